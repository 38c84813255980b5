#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace cellmetrics {

/// 4 -> 256 -> 512 -> 4096 GELU MLP parameters. Matrices are row-major
/// float32; layout matches the PEMB weights file.
struct MlpWeights {
  static constexpr std::size_t kIn = 4;
  static constexpr std::size_t kHidden1 = 256;
  static constexpr std::size_t kHidden2 = 512;
  static constexpr std::size_t kOut = 4096;

  std::vector<float> w1;  // kHidden1 x kIn
  std::vector<float> b1;  // kHidden1
  std::vector<float> w2;  // kHidden2 x kHidden1
  std::vector<float> b2;  // kHidden2
  std::vector<float> w3;  // kOut x kHidden2
  std::vector<float> b3;  // kOut

  static MlpWeights zeros();
  /// Seeded uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) per tensor; biases use
  /// their layer's fan-in. Reproducible across platforms.
  static MlpWeights random_init(std::uint64_t seed);

  void validate() const;  // throws std::invalid_argument on shape mismatch
};

/// Exact (erf-form) GELU: x * Phi(x).
double gelu(double x);

/// Forward pass, accumulated in double. Output is always 4096 long.
/// Inputs outside [0,1] are accepted (the caller may warn) since the
/// network itself is defined on all of R^4.
std::vector<double> embed_phenotype(const std::array<double, 4>& p,
                                    const MlpWeights& weights);

/// L x 4096 token embedding block, row-major.
struct TokenMatrix {
  static constexpr std::size_t kCols = 4096;
  std::size_t rows = 0;
  std::vector<float> data;  // rows x kCols

  bool operator==(const TokenMatrix&) const = default;
};

/// Returns [p_embed; tokens]: row 0 is the phenotype embedding, rows 1..L
/// are the input rows unchanged.
TokenMatrix prepend_token(const TokenMatrix& tokens,
                          const std::vector<double>& p_embed);

// PEMB weights file: magic "PEMB" | version u8 (=1) | 3 reserved zero
// bytes | 6 shape records (rows u32, cols u32; biases have cols = 1) |
// tensor data W1,b1,W2,b2,W3,b3 as little-endian float32.
MlpWeights load_weights(const std::filesystem::path& path);
void save_weights(const MlpWeights& weights, const std::filesystem::path& path);

}  // namespace cellmetrics
