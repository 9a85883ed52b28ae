#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "satforge/cnf.hpp"

namespace satforge {

struct ManifestEntry {
  std::string path;  // relative to the manifest's directory unless absolute
  std::string family;
  std::optional<Feasibility> feasibility;
  std::optional<std::uint64_t> seed;
};

/// Line-delimited corpus index. One tab-separated record per line:
///   path <TAB> family <TAB> SAT|UNSAT|unknown <TAB> seed|-
/// Lines starting with '#' are comments.
struct CorpusManifest {
  std::vector<ManifestEntry> entries;
  std::string base_dir;

  /// Throws DataError on duplicate paths or malformed lines.
  static CorpusManifest parse(const std::string& text, const std::string& base_dir = ".");
  static CorpusManifest load(const std::string& path);
  std::string serialize() const;
  void save(const std::string& path) const;

  std::string resolve(const ManifestEntry& entry) const;
  /// Reads the formula and attaches the manifest's labels to it.
  CnfFormula load_formula(const ManifestEntry& entry) const;
  std::vector<std::string> families() const;
};

}  // namespace satforge
