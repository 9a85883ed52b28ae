#include "satforge/manifest.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "satforge/error.hpp"

namespace satforge {

namespace fs = std::filesystem;

CorpusManifest CorpusManifest::parse(const std::string& text, const std::string& base_dir) {
  CorpusManifest m;
  m.base_dir = base_dir;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ls(line);
    std::string field;
    while (std::getline(ls, field, '\t')) fields.push_back(field);
    if (fields.size() != 4) {
      throw DataError("manifest line " + std::to_string(line_no) + ": expected 4 tab-separated fields");
    }
    ManifestEntry e;
    e.path = fields[0];
    e.family = fields[1];
    if (e.path.empty() || e.family.empty()) {
      throw DataError("manifest line " + std::to_string(line_no) + ": empty path or family");
    }
    if (fields[2] != "unknown" && fields[2] != "-") {
      e.feasibility = parse_feasibility(fields[2]);
      if (!e.feasibility) throw DataError("manifest line " + std::to_string(line_no) + ": bad feasibility '" + fields[2] + "'");
    }
    if (fields[3] != "-") {
      try {
        std::size_t used = 0;
        e.seed = std::stoull(fields[3], &used);
        if (used != fields[3].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw DataError("manifest line " + std::to_string(line_no) + ": bad seed '" + fields[3] + "'");
      }
    }
    if (!seen.insert(e.path).second) throw DataError("manifest: duplicate path " + e.path);
    m.entries.push_back(std::move(e));
  }
  return m;
}

CorpusManifest CorpusManifest::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open manifest " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string base = fs::path(path).parent_path().string();
  return parse(buf.str(), base.empty() ? "." : base);
}

std::string CorpusManifest::serialize() const {
  std::string out = "# path\tfamily\tfeasibility\tseed\n";
  for (const ManifestEntry& e : entries) {
    out += e.path + '\t' + e.family + '\t';
    out += e.feasibility ? std::string(to_string(*e.feasibility)) : "unknown";
    out += '\t';
    out += e.seed ? std::to_string(*e.seed) : "-";
    out += '\n';
  }
  return out;
}

void CorpusManifest::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write manifest " + path);
  out << serialize();
}

std::string CorpusManifest::resolve(const ManifestEntry& entry) const {
  fs::path p(entry.path);
  if (p.is_absolute()) return p.string();
  return (fs::path(base_dir) / p).string();
}

CnfFormula CorpusManifest::load_formula(const ManifestEntry& entry) const {
  CnfFormula f = read_dimacs_file(resolve(entry));
  f.family = entry.family;
  f.feasibility = entry.feasibility;
  f.source_id = entry.path;
  return f;
}

std::vector<std::string> CorpusManifest::families() const {
  std::vector<std::string> out;
  for (const ManifestEntry& e : entries) {
    if (std::find(out.begin(), out.end(), e.family) == out.end()) out.push_back(e.family);
  }
  return out;
}

}  // namespace satforge
