#pragma once

#include <cstdint>
#include <string>

#include "satforge/features.hpp"
#include "satforge/model.hpp"
#include "satforge/train.hpp"

namespace satforge {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Everything needed to embed new instances with a trained model.
struct Checkpoint {
  std::uint32_t version = kCheckpointVersion;
  SchemaId schema = SchemaId::kSat;
  Standardizer standardizer;
  TrainConfig config;
  VqGae model;
  std::string corpus_digest;
};

/// Binary layout (little-endian):
///   magic "SFVQGAE\0" | u32 version | u32 schema | standardizer vectors |
///   train config | model dims | parameters in declaration order (name,
///   rows, cols, raw fp64) | corpus digest | u32 CRC-32 of all prior bytes.
std::string serialize_checkpoint(const Checkpoint& ckpt);
/// Throws CheckpointError on bad magic, unsupported version, truncation or a
/// checksum mismatch.
Checkpoint deserialize_checkpoint(std::string_view bytes);

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

/// How a checkpoint will be applied to features of `requested` schema.
struct SchemaBinding {
  bool transfer = false;  // schema differs from the one the model was trained on
};

/// Loading under another schema is allowed iff the padded input widths match.
/// Throws CheckpointError otherwise.
SchemaBinding bind_schema(const Checkpoint& ckpt, SchemaId requested);

}  // namespace satforge
