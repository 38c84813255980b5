#include "cellmetrics/conditioning.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <cstring>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>

#include "cellmetrics/errors.hpp"

namespace cellmetrics {
namespace {

struct TensorSpec {
  const char* name;
  std::size_t rows;
  std::size_t cols;
  std::vector<float> MlpWeights::*member;
};

constexpr std::size_t kTensorCount = 6;

const TensorSpec kTensors[kTensorCount] = {
    {"W1", MlpWeights::kHidden1, MlpWeights::kIn, &MlpWeights::w1},
    {"b1", MlpWeights::kHidden1, 1, &MlpWeights::b1},
    {"W2", MlpWeights::kHidden2, MlpWeights::kHidden1, &MlpWeights::w2},
    {"b2", MlpWeights::kHidden2, 1, &MlpWeights::b2},
    {"W3", MlpWeights::kOut, MlpWeights::kHidden2, &MlpWeights::w3},
    {"b3", MlpWeights::kOut, 1, &MlpWeights::b3},
};

constexpr char kMagic[4] = {'P', 'E', 'M', 'B'};
constexpr std::uint8_t kVersion = 1;

// Uniform in [0,1) from the top 53 bits; avoids the
// implementation-defined std::uniform_real_distribution.
double uniform01(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

std::uint32_t read_u32le(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

void write_u32le(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

}  // namespace

MlpWeights MlpWeights::zeros() {
  MlpWeights w;
  for (const auto& t : kTensors) {
    (w.*(t.member)).assign(t.rows * t.cols, 0.0f);
  }
  return w;
}

MlpWeights MlpWeights::random_init(std::uint64_t seed) {
  MlpWeights w = zeros();
  std::mt19937_64 eng(seed);
  const std::size_t fan_in[kTensorCount] = {kIn,     kIn,     kHidden1,
                                            kHidden1, kHidden2, kHidden2};
  for (std::size_t t = 0; t < kTensorCount; ++t) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in[t]));
    for (float& v : w.*(kTensors[t].member)) {
      v = static_cast<float>((2.0 * uniform01(eng) - 1.0) * bound);
    }
  }
  return w;
}

void MlpWeights::validate() const {
  for (const auto& t : kTensors) {
    const auto& data = this->*(t.member);
    if (data.size() != t.rows * t.cols) {
      throw std::invalid_argument(
          std::string("MlpWeights: tensor ") + t.name + " has " +
          std::to_string(data.size()) + " entries, expected " +
          std::to_string(t.rows * t.cols));
    }
    for (float v : data) {
      if (!std::isfinite(v)) {
        throw std::invalid_argument(std::string("MlpWeights: tensor ") + t.name +
                                    " contains a non-finite entry");
      }
    }
  }
}

double gelu(double x) {
  return x * 0.5 * (1.0 + std::erf(x / std::numbers::sqrt2));
}

std::vector<double> embed_phenotype(const std::array<double, 4>& p,
                                    const MlpWeights& weights) {
  weights.validate();

  std::vector<double> h1(MlpWeights::kHidden1);
  for (std::size_t i = 0; i < MlpWeights::kHidden1; ++i) {
    double acc = weights.b1[i];
    for (std::size_t j = 0; j < MlpWeights::kIn; ++j) {
      acc += static_cast<double>(weights.w1[i * MlpWeights::kIn + j]) * p[j];
    }
    h1[i] = gelu(acc);
  }
  std::vector<double> h2(MlpWeights::kHidden2);
  for (std::size_t i = 0; i < MlpWeights::kHidden2; ++i) {
    double acc = weights.b2[i];
    const float* row = weights.w2.data() + i * MlpWeights::kHidden1;
    for (std::size_t j = 0; j < MlpWeights::kHidden1; ++j) {
      acc += static_cast<double>(row[j]) * h1[j];
    }
    h2[i] = gelu(acc);
  }
  std::vector<double> out(MlpWeights::kOut);
  for (std::size_t i = 0; i < MlpWeights::kOut; ++i) {
    double acc = weights.b3[i];
    const float* row = weights.w3.data() + i * MlpWeights::kHidden2;
    for (std::size_t j = 0; j < MlpWeights::kHidden2; ++j) {
      acc += static_cast<double>(row[j]) * h2[j];
    }
    out[i] = acc;
  }
  return out;
}

TokenMatrix prepend_token(const TokenMatrix& tokens,
                          const std::vector<double>& p_embed) {
  if (p_embed.size() != TokenMatrix::kCols) {
    throw std::invalid_argument("prepend_token: embedding must have 4096 entries");
  }
  if (tokens.data.size() != tokens.rows * TokenMatrix::kCols) {
    throw std::invalid_argument("prepend_token: token matrix shape mismatch");
  }
  TokenMatrix out;
  out.rows = tokens.rows + 1;
  out.data.resize(out.rows * TokenMatrix::kCols);
  for (std::size_t j = 0; j < TokenMatrix::kCols; ++j) {
    out.data[j] = static_cast<float>(p_embed[j]);
  }
  std::copy(tokens.data.begin(), tokens.data.end(),
            out.data.begin() + TokenMatrix::kCols);
  return out;
}

MlpWeights load_weights(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InputError("cannot open weights file: " + path.string());
  }
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw InputError("not a PEMB weights file: " + path.string());
  }
  std::uint8_t version = 0;
  std::uint8_t reserved[3];
  in.read(reinterpret_cast<char*>(&version), 1);
  in.read(reinterpret_cast<char*>(reserved), 3);
  if (!in || version != kVersion) {
    throw InputError("unsupported PEMB version in " + path.string());
  }
  std::uint32_t shapes[kTensorCount][2];
  for (auto& shape : shapes) {
    shape[0] = read_u32le(in);
    shape[1] = read_u32le(in);
  }
  if (!in) {
    throw InputError("truncated PEMB header in " + path.string());
  }
  for (std::size_t t = 0; t < kTensorCount; ++t) {
    if (shapes[t][0] != kTensors[t].rows || shapes[t][1] != kTensors[t].cols) {
      throw InputError(std::string("PEMB tensor ") + kTensors[t].name +
                       " has shape " + std::to_string(shapes[t][0]) + "x" +
                       std::to_string(shapes[t][1]) + ", expected " +
                       std::to_string(kTensors[t].rows) + "x" +
                       std::to_string(kTensors[t].cols) + " in " + path.string());
    }
  }
  MlpWeights w = MlpWeights::zeros();
  for (std::size_t t = 0; t < kTensorCount; ++t) {
    auto& data = w.*(kTensors[t].member);
    for (float& v : data) {
      v = std::bit_cast<float>(read_u32le(in));
    }
    if (!in) {
      throw InputError(std::string("truncated PEMB tensor ") + kTensors[t].name +
                       " in " + path.string());
    }
  }
  try {
    w.validate();
  } catch (const std::invalid_argument& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  return w;
}

void save_weights(const MlpWeights& weights, const std::filesystem::path& path) {
  weights.validate();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw InputError("cannot open output file: " + path.string());
  }
  out.write(kMagic, 4);
  const std::uint8_t version = kVersion;
  const std::uint8_t reserved[3] = {0, 0, 0};
  out.write(reinterpret_cast<const char*>(&version), 1);
  out.write(reinterpret_cast<const char*>(reserved), 3);
  for (const auto& t : kTensors) {
    write_u32le(out, static_cast<std::uint32_t>(t.rows));
    write_u32le(out, static_cast<std::uint32_t>(t.cols));
  }
  for (const auto& t : kTensors) {
    for (float v : weights.*(t.member)) {
      write_u32le(out, std::bit_cast<std::uint32_t>(v));
    }
  }
  if (!out) {
    throw InputError("write failed: " + path.string());
  }
}

}  // namespace cellmetrics
