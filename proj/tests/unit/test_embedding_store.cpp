#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

#include "cuelex/common.hpp"
#include "cuelex/embedding_store.hpp"
#include "oracles.hpp"

using namespace cuelex;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / "cuelex_unit";
  fs::create_directories(dir);
  return dir / name;
}

void write_bytes(const fs::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

std::string float_bytes(std::initializer_list<float> xs) {
  std::string s;
  for (float x : xs) {
    char b[4];
    std::memcpy(b, &x, 4);
    s.append(b, 4);
  }
  return s;
}

EmbeddingModel from_raw(const oracle::RawModel& m, std::string name = "m") {
  return EmbeddingModel(std::move(name), m.dim, m.tokens, m.values);
}

}  // namespace

TEST_CASE("minimal binary file") {
  const auto p = scratch("min.bin");
  write_bytes(p, "1 2\na " + float_bytes({1.0f, 0.0f}));
  const auto m = load_model(p);
  CHECK(m.size() == 1);
  CHECK(m.dim() == 2);
  CHECK(m.token(0) == "a");
  CHECK(m.vector(0)[0] == 1.0f);
  CHECK(m.vector(0)[1] == 0.0f);
  CHECK(m.name() == "min");
}

TEST_CASE("binary load errors") {
  SUBCASE("malformed header") {
    const auto p = scratch("bad_header.bin");
    write_bytes(p, "x y\n");
    CHECK_THROWS_AS(load_model(p), InputError);
  }
  SUBCASE("truncated payload") {
    const auto p = scratch("trunc.bin");
    write_bytes(p, "1 3\na " + float_bytes({1.0f, 2.0f}));
    CHECK_THROWS_AS(load_model(p), InputError);
  }
  SUBCASE("fewer records than declared") {
    const auto p = scratch("short.bin");
    write_bytes(p, "2 1\na " + float_bytes({1.0f}));
    CHECK_THROWS_AS(load_model(p), InputError);
  }
  SUBCASE("non-finite value") {
    const auto p = scratch("nan.bin");
    write_bytes(p, "1 2\na " + float_bytes({1.0f, std::nanf("")}));
    CHECK_THROWS_AS(load_model(p), InputError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_model(scratch("does_not_exist.bin")), InputError);
  }
  SUBCASE("filter removes everything") {
    const auto p = scratch("filter_all.bin");
    write_bytes(p, "1 1\na " + float_bytes({1.0f}));
    LoadOptions o;
    o.vocab_filter = std::unordered_set<std::string>{"zzz"};
    CHECK_THROWS_AS(load_model(p, o), InputError);
  }
}

TEST_CASE("duplicate tokens keep the first record") {
  const auto p = scratch("dup.bin");
  write_bytes(p, "3 1\na " + float_bytes({1.0f}) + "b " + float_bytes({2.0f}) + "a " +
                     float_bytes({3.0f}));
  const auto m = load_model(p);
  CHECK(m.size() == 2);
  CHECK(m.vector(*m.find("a"))[0] == 1.0f);
  CHECK(m.duplicates_dropped() == 1);
}

TEST_CASE("binary round trip is bit exact, with and without LF separators") {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 10; ++rep) {
    const auto raw = oracle::random_model(rng, 100, 3 + rep);
    for (bool lf : {false, true}) {
      const auto p = scratch("rt.bin");
      oracle::write_w2v_binary(p, raw, lf);
      const auto m = load_model(p);
      REQUIRE(m.size() == raw.tokens.size());
      CHECK(m.vocab() == raw.tokens);
      bool same = true;
      for (std::size_t i = 0; i < m.size(); ++i)
        same = same && std::memcmp(m.vector(i).data(), raw.values.data() + i * raw.dim,
                                   raw.dim * sizeof(float)) == 0;
      CHECK(same);
    }
  }
}

TEST_CASE("save then load reproduces the model") {
  std::mt19937_64 rng(11);
  const auto m = from_raw(oracle::random_model(rng, 60, 5), "saved");
  for (auto fmt : {ModelFormat::binary, ModelFormat::text}) {
    const auto p = scratch(fmt == ModelFormat::binary ? "saved.bin" : "saved.txt");
    save_model(m, p, fmt);
    LoadOptions o;
    o.format = fmt;
    const auto r = load_model(p, o);
    CHECK(r.vocab() == m.vocab());
    bool same = true;
    for (std::size_t i = 0; i < m.size(); ++i)
      same = same && std::memcmp(m.vector(i).data(), r.vector(i).data(), 5 * sizeof(float)) == 0;
    CHECK(same);
  }
}

TEST_CASE("text format with and without header") {
  std::mt19937_64 rng(3);
  const auto raw = oracle::random_model(rng, 30, 4);
  for (bool header : {true, false}) {
    const auto p = scratch("t.txt");
    oracle::write_w2v_text(p, raw, header);
    LoadOptions o;
    o.format = ModelFormat::text;
    const auto m = load_model(p, o);
    CHECK(m.vocab() == raw.tokens);
    bool same = true;
    for (std::size_t i = 0; i < m.size(); ++i)
      for (std::size_t d = 0; d < raw.dim; ++d)
        same = same && m.vector(i)[d] == raw.values[i * raw.dim + d];
    CHECK(same);
  }
}

TEST_CASE("loading twice gives identical models") {
  std::mt19937_64 rng(5);
  const auto raw = oracle::random_model(rng, 50, 6);
  const auto p = scratch("twice.bin");
  oracle::write_w2v_binary(p, raw, true);
  const auto a = load_model(p);
  const auto b = load_model(p);
  CHECK(a.vocab() == b.vocab());
  CHECK(std::memcmp(a.vector(0).data(), b.vector(0).data(), 6 * sizeof(float)) == 0);
}

TEST_CASE("vocab filter keeps matching tokens in file order") {
  const auto p = scratch("filt.bin");
  write_bytes(p, "4 1\nalpha " + float_bytes({1.0f}) + "Beta " + float_bytes({2.0f}) +
                     "gamma " + float_bytes({3.0f}) + "beta " + float_bytes({4.0f}));
  LoadOptions o;
  o.vocab_filter = std::unordered_set<std::string>{"beta", "alpha"};
  const auto m = load_model(p, o);
  CHECK(m.vocab() == std::vector<std::string>{"alpha", "Beta", "beta"});
}

TEST_CASE("stored norms match recomputation") {
  std::mt19937_64 rng(9);
  const auto raw = oracle::random_model(rng, 80, 12);
  const auto m = from_raw(raw);
  for (std::size_t i = 0; i < m.size(); ++i) {
    double ss = 0.0;
    for (float x : m.vector(i)) ss += double(x) * x;
    CHECK(std::abs(m.norm(i) - std::sqrt(ss)) <= 1e-5 * std::sqrt(ss));
  }
}

TEST_CASE("cosine basics") {
  EmbeddingModel m("m", 2, {"x", "y", "z", "zero"}, {1, 0, 0, 1, 3, 4, 0, 0});
  CHECK(cosine(m, "x", "y") == 0.0);
  CHECK(cosine(m, "z", "z") == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(cosine(m, "x", "z") == doctest::Approx(0.6).epsilon(1e-12));
  CHECK_FALSE(m.usable(3));
  CHECK_THROWS_AS(cosine(m, "x", "zero"), InputError);
  CHECK_THROWS_AS(cosine(m, "x", "missing"), InputError);
}

TEST_CASE("cosine is exactly symmetric") {
  std::mt19937_64 rng(21);
  const auto m = from_raw(oracle::random_model(rng, 60, 17));
  for (std::size_t a = 0; a < m.size(); ++a)
    for (std::size_t b = 0; b < m.size(); ++b) REQUIRE(cosine(m, a, b) == cosine(m, b, a));
}

TEST_CASE("top_k agrees with brute force") {
  std::mt19937_64 rng(1234);
  for (int rep = 0; rep < 5; ++rep) {
    const auto raw = oracle::random_model(rng, 100, 8 + 4 * rep);
    const auto m = from_raw(raw);
    for (int q = 0; q < 20; ++q) {
      const std::size_t qi = rng() % raw.tokens.size();
      for (std::size_t k : {1u, 5u, 50u}) {
        for (bool fold_case : {true, false}) {
          const auto expected = oracle::brute_top_k(raw, qi, k, fold_case);
          for (auto exec : {Exec::serial, Exec::parallel}) {
            const auto got = top_k(m, raw.tokens[qi], k, fold_case, exec);
            REQUIRE(got.size() == expected.size());
            for (std::size_t i = 0; i < got.size(); ++i) {
              REQUIRE(got[i].neighbor == expected[i].token);
              REQUIRE(got[i].similarity == expected[i].similarity);
            }
          }
        }
      }
    }
  }
}

TEST_CASE("top_k prefix property and edge cases") {
  std::mt19937_64 rng(77);
  const auto raw = oracle::random_model(rng, 120, 10);
  const auto m = from_raw(raw);
  const auto all = top_k(m, raw.tokens[3], m.size());
  for (std::size_t k : {0u, 1u, 7u, 30u}) {
    const auto part = top_k(m, raw.tokens[3], k);
    REQUIRE(part.size() == std::min<std::size_t>(k, all.size()));
    for (std::size_t i = 0; i < part.size(); ++i) CHECK(part[i] == all[i]);
  }
  CHECK(top_k(m, raw.tokens[0], 0).empty());
  CHECK_THROWS_AS(top_k(m, "not-a-token", 3), InputError);
}

TEST_CASE("case folding collapses variants") {
  EmbeddingModel m("m", 2, {"inconsistent", "Inconsistent", "Contradicting", "contradicting", "far"},
                   {1, 0, 0.99f, 0.1f, 0.7f, 0.7f, 0.8f, 0.6f, -1, 0});
  const auto folded = top_k(m, "INCONSISTENT", 10, true);
  REQUIRE(folded.size() == 2);
  CHECK(folded[0].neighbor == "contradicting");
  CHECK(folded[1].neighbor == "far");
  const auto raw = top_k(m, "inconsistent", 10, false);
  REQUIRE(raw.size() == 4);
  CHECK(raw[0].neighbor == "Inconsistent");
  CHECK_THROWS_AS(top_k(m, "INCONSISTENT", 1, false), InputError);
}

TEST_CASE("model format parsing") {
  CHECK(parse_model_format("bin") == ModelFormat::binary);
  CHECK(parse_model_format("text") == ModelFormat::text);
  CHECK_THROWS_AS(parse_model_format("csv"), InputError);
}
