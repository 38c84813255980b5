#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "cellmetrics/conditioning.hpp"
#include "cellmetrics/errors.hpp"

using namespace cellmetrics;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  auto dir = fs::temp_directory_path() / "cellmetrics_conditioning_tests";
  fs::create_directories(dir);
  return dir;
}

// Independent scalar-loop oracle for the forward pass: plain nested loops,
// no shared matrix helpers.
std::vector<double> forward_oracle(const std::array<double, 4>& p,
                                   const MlpWeights& w) {
  auto layer = [](const std::vector<double>& x, const std::vector<float>& mat,
                  const std::vector<float>& bias, std::size_t rows,
                  bool activate) {
    std::vector<double> out(rows);
    const std::size_t cols = x.size();
    for (std::size_t r = 0; r < rows; ++r) {
      double acc = static_cast<double>(bias[r]);
      for (std::size_t c = 0; c < cols; ++c) {
        acc += static_cast<double>(mat[r * cols + c]) * x[c];
      }
      out[r] = activate ? acc * 0.5 * (1.0 + std::erf(acc / std::sqrt(2.0))) : acc;
    }
    return out;
  };
  std::vector<double> x(p.begin(), p.end());
  x = layer(x, w.w1, w.b1, MlpWeights::kHidden1, true);
  x = layer(x, w.w2, w.b2, MlpWeights::kHidden2, true);
  return layer(x, w.w3, w.b3, MlpWeights::kOut, false);
}

}  // namespace

TEST_CASE("gelu closed-form values") {
  CHECK(gelu(0.0) == doctest::Approx(0.0));
  CHECK(gelu(10.0) == doctest::Approx(10.0).epsilon(1e-9));
  CHECK(gelu(-10.0) == doctest::Approx(0.0).epsilon(1e-9));
  // gelu(1) = 0.5 * (1 + erf(1/sqrt 2)) = Phi(1) = 0.841344746...
  CHECK(gelu(1.0) == doctest::Approx(0.8413447460685429).epsilon(1e-12));
  CHECK(gelu(-1.0) == doctest::Approx(-1.0 + 0.8413447460685429).epsilon(1e-9));
}

TEST_CASE("embed_phenotype basics") {
  SUBCASE("output is always 4096-dim") {
    const auto out = embed_phenotype({0.1, 0.2, 0.3, 0.4}, MlpWeights::zeros());
    CHECK(out.size() == 4096);
  }
  SUBCASE("zero weights give the zero vector") {
    const auto out = embed_phenotype({0.9, 0.1, 0.5, 0.7}, MlpWeights::zeros());
    for (double v : out) CHECK(v == 0.0);
  }
  SUBCASE("the output bias passes through zero weights") {
    auto w = MlpWeights::zeros();
    w.b3[0] = 2.5f;
    w.b3[4095] = -1.25f;
    const auto out = embed_phenotype({1, 1, 1, 1}, w);
    CHECK(out[0] == doctest::Approx(2.5));
    CHECK(out[4095] == doctest::Approx(-1.25));
    CHECK(out[1] == doctest::Approx(0.0));
  }
  SUBCASE("deterministic across calls") {
    const auto w = MlpWeights::random_init(12);
    CHECK(embed_phenotype({0.2, 0.4, 0.6, 0.8}, w) ==
          embed_phenotype({0.2, 0.4, 0.6, 0.8}, w));
  }
}

TEST_CASE("embed_phenotype matches the scalar-loop oracle") {
  std::mt19937_64 eng(2718);
  auto u = [&eng] { return static_cast<double>(eng() >> 11) * 0x1.0p-53; };
  for (int trial = 0; trial < 50; ++trial) {
    const auto w = MlpWeights::random_init(1000 + static_cast<std::uint64_t>(trial));
    const std::array<double, 4> p{u(), u(), u(), u()};
    const auto got = embed_phenotype(p, w);
    const auto expected = forward_oracle(p, w);
    REQUIRE(got.size() == expected.size());
    double max_err = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i) {
      max_err = std::max(max_err, std::abs(got[i] - expected[i]));
    }
    CHECK(max_err <= 1e-12);
  }
}

TEST_CASE("random_init is seeded and bounded by 1/sqrt(fan_in)") {
  const auto a = MlpWeights::random_init(7);
  const auto b = MlpWeights::random_init(7);
  const auto c = MlpWeights::random_init(8);
  CHECK(a.w1 == b.w1);
  CHECK(a.w3 == b.w3);
  CHECK(a.b2 == b.b2);
  CHECK(a.w1 != c.w1);
  for (float v : a.w1) CHECK(std::abs(v) <= 0.5f);                    // 1/sqrt(4)
  for (float v : a.w2) CHECK(std::abs(v) <= 1.0f / std::sqrt(256.0f));
  for (float v : a.w3) CHECK(std::abs(v) <= 1.0f / std::sqrt(512.0f));
}

TEST_CASE("prepend_token") {
  const auto w = MlpWeights::zeros();
  auto p_embed = embed_phenotype({0, 0, 0, 0}, w);
  p_embed[0] = 3.0;

  SUBCASE("empty token block becomes a single row") {
    const auto out = prepend_token(TokenMatrix{}, p_embed);
    CHECK(out.rows == 1);
    REQUIRE(out.data.size() == 4096);
    CHECK(out.data[0] == 3.0f);
  }
  SUBCASE("suffix rows are bit-identical") {
    TokenMatrix tokens;
    tokens.rows = 3;
    tokens.data.resize(3 * TokenMatrix::kCols);
    std::mt19937_64 eng(5);
    for (auto& v : tokens.data) {
      v = static_cast<float>(static_cast<double>(eng() >> 11) * 0x1.0p-53);
    }
    const auto out = prepend_token(tokens, p_embed);
    CHECK(out.rows == 4);
    REQUIRE(out.data.size() == 4 * TokenMatrix::kCols);
    for (std::size_t i = 0; i < tokens.data.size(); ++i) {
      // Bitwise comparison, not approximate.
      CHECK(std::bit_cast<std::uint32_t>(out.data[TokenMatrix::kCols + i]) ==
            std::bit_cast<std::uint32_t>(tokens.data[i]));
    }
  }
  SUBCASE("wrong embedding length is rejected") {
    CHECK_THROWS_AS(prepend_token(TokenMatrix{}, std::vector<double>(7)),
                    std::invalid_argument);
  }
}

TEST_CASE("weights file round trip") {
  const auto path = temp_dir() / "weights.pemb";
  const auto original = MlpWeights::random_init(42);
  save_weights(original, path);
  const auto restored = load_weights(path);
  CHECK(restored.w1 == original.w1);
  CHECK(restored.b1 == original.b1);
  CHECK(restored.w2 == original.w2);
  CHECK(restored.b2 == original.b2);
  CHECK(restored.w3 == original.w3);
  CHECK(restored.b3 == original.b3);
}

TEST_CASE("malformed weights files are rejected") {
  const auto dir = temp_dir();

  SUBCASE("bad magic") {
    const auto path = dir / "bad_magic.pemb";
    std::ofstream(path, std::ios::binary) << "XXXX" << std::string(64, '\0');
    CHECK_THROWS_AS(load_weights(path), InputError);
  }
  SUBCASE("truncated data") {
    const auto path = dir / "truncated.pemb";
    save_weights(MlpWeights::zeros(), path);
    fs::resize_file(path, 100);
    CHECK_THROWS_AS(load_weights(path), InputError);
  }
  SUBCASE("shape mismatch names the offending tensor") {
    const auto good = dir / "good.pemb";
    save_weights(MlpWeights::zeros(), good);
    std::fstream f(good, std::ios::binary | std::ios::in | std::ios::out);
    // Corrupt the W2 shape record: records start at byte 8, 8 bytes each.
    f.seekp(8 + 2 * 8);
    const std::uint32_t bad_rows = 99;
    f.write(reinterpret_cast<const char*>(&bad_rows), 4);
    f.close();
    try {
      load_weights(good);
      FAIL("expected InputError");
    } catch (const InputError& e) {
      CHECK(std::string(e.what()).find("W2") != std::string::npos);
    }
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_weights(dir / "nope.pemb"), InputError);
  }
}
