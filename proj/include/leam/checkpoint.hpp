#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "leam/corpus.hpp"
#include "leam/model.hpp"

namespace leam {

/// Everything needed to run inference without side files.
struct Model {
  ModelParams params;
  Vocabulary vocab;
  std::vector<std::string> label_names;
  Variant variant = Variant::leam;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Binary layout, little-endian throughout:
///   "LEAM" | u32 version | u32 K | u32 P | u32 r | u32 vocab size | u32 mode
///   | f64 V[P*vocab] | f64 C[P*K] | f64 W1[2r+1] | f64 b1[K] | f64 W2[K*P] | f64 b2[K]
///   | vocab size x (u32 length, UTF-8 bytes) | K x (u32 length, UTF-8 bytes)
///   | u32 variant
/// Matrices are written row-major.
std::vector<std::uint8_t> serialize(const Model& model);
Model deserialize(const std::vector<std::uint8_t>& bytes);

void save_checkpoint(const Model& model, const std::filesystem::path& path);
Model load_checkpoint(const std::filesystem::path& path);

}  // namespace leam
