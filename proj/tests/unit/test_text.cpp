// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "common/error.hpp"
#include "tensor/rng.hpp"
#include "text/features.hpp"
#include "text/text.hpp"
#include "text/vocab.hpp"

using namespace bgcnn;
using namespace bgcnn::text;

namespace {

Vocabulary ab_vocab() {
  Vocabulary v;
  v.add("a", 2);
  v.add("b", 1);
  return v;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("bgcnn_text_" + name)).string();
}

}  // namespace

TEST_CASE("clean_text examples") {
  CHECK(clean_text("") == "");
  CHECK(clean_text("@user I LOVE this!!! http://t.co/x 2024 #happy") == "i love this");
  CHECK(clean_text("no noise here") == "no noise here");
  CHECK(clean_text("  Mixed\tCASE\nlines  ") == "mixed case lines");
  CHECK(clean_text("www.example.com rest") == "rest");
  CHECK(clean_text("https://a.b/c?d=1 ok") == "ok");
  CHECK(clean_text("don't stop") == "dont stop");
  CHECK(clean_text("caf\xC3\xA9 \xF0\x9F\x98\x80 fun") == "caf fun");
  CHECK(clean_text("#only @only") == "");
}

TEST_CASE("clean_text output alphabet and idempotence on random strings") {
  Rng rng(2024);
  const std::string alphabet = "aZ09 #@:/.!?'\"\t\n,xyzhttpswww";
  for (int i = 0; i < 10000; ++i) {
    std::string s;
    const auto n = rng.below(40);
    for (std::uint64_t k = 0; k < n; ++k) {
      if (rng.bernoulli(0.1))
        s += static_cast<char>(0x80 + rng.below(0x80));  // stray UTF-8 bytes
      else if (rng.bernoulli(0.05))
        s += rng.bernoulli(0.5) ? "http://" : "www.";
      else
        s += alphabet[rng.below(alphabet.size())];
    }
    const std::string once = clean_text(s);
    REQUIRE(clean_text(once) == once);
    for (char c : once) REQUIRE(((c >= 'a' && c <= 'z') || c == ' '));
    if (!once.empty()) {
      REQUIRE(once.front() != ' ');
      REQUIRE(once.back() != ' ');
      REQUIRE(once.find("  ") == std::string::npos);
    }
  }
}

TEST_CASE("tokenize") {
  CHECK(tokenize("i love this") == Tokens{"i", "love", "this"});
  CHECK(tokenize("").empty());
  CHECK(tokenize("a  b") == Tokens{"a", "b"});
}

TEST_CASE("remove_stopwords") {
  CHECK(remove_stopwords({"the", "cat", "is", "mean"}, {"the", "is"}) == Tokens{"cat", "mean"});
  CHECK(remove_stopwords({}, {"the"}).empty());
  CHECK(remove_stopwords({"cat"}, {}) == Tokens{"cat"});
}

TEST_CASE("bundled stopword list") {
  const auto& list = bundled_stopword_list();
  CHECK(list.size() == 179);
  CHECK(std::set<std::string>(list.begin(), list.end()).size() == 179);
  const auto& set = default_stopwords();
  CHECK(set.contains("the"));
  CHECK(set.contains("don't"));
  CHECK(set.contains("dont"));
  CHECK_FALSE(set.contains("hate"));
  CHECK(preprocess("@user The cat IS mean!!") == Tokens{"cat", "mean"});
}

TEST_CASE("load_stopwords") {
  const auto path = temp_path("stop.txt");
  {
    std::ofstream out(path);
    out << "foo\n\nbar\r\n";
  }
  const auto s = load_stopwords(path);
  CHECK(s == StopwordSet{"foo", "bar"});
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_stopwords(path), NotFoundError);
}

TEST_CASE("build_vocabulary") {
  auto v = build_vocabulary({{"a", "b", "a"}}, 1, 10);
  CHECK(v.size() == 4);
  CHECK(v.id("a") == 2);
  CHECK(v.id("b") == 3);
  CHECK(v.frequency(2) == 2);
  CHECK(v.id("zzz") == Vocabulary::kOovId);
  CHECK(v.token(Vocabulary::kPadId) == "<pad>");

  CHECK(build_vocabulary({}, 1, 10).size() == 2);
  CHECK(build_vocabulary({{"x", "y"}}, 2, 10).size() == 2);

  // Frequency ties rank alphabetically; max_size counts the reserved ids.
  auto t = build_vocabulary({{"c", "b", "a", "c"}}, 1, 4);
  CHECK(t.size() == 4);
  CHECK(t.id("c") == 2);
  CHECK(t.id("a") == 3);
  CHECK_FALSE(t.contains("b"));

  CHECK(build_vocabulary({{"q", "r"}, {"r"}}, 1, 10) == build_vocabulary({{"q", "r"}, {"r"}}, 1, 10));
}

TEST_CASE("vocabulary file round trip and errors") {
  auto v = build_vocabulary({{"x", "y", "y", "z"}}, 1, 100);
  const auto path = temp_path("vocab.tsv");
  v.save(path);
  CHECK(Vocabulary::load(path) == v);
  {
    std::ofstream out(path);
    out << "<pad>\t0\t0\n<oov>\t1\t0\nbroken line\n";
  }
  CHECK_THROWS_AS(Vocabulary::load(path), ModelFormatError);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(Vocabulary::load(path), NotFoundError);
  CHECK_THROWS_AS(v.add("x", 1), ContractViolation);
}

TEST_CASE("encode") {
  Vocabulary v;
  v.add("a", 1);
  CHECK(encode({"a"}, v, 3) == std::vector<std::int32_t>{2, 0, 0});
  CHECK(encode({"z"}, v, 2) == std::vector<std::int32_t>{1, 0});
  const auto ab = ab_vocab();
  CHECK(encode({"a", "b", "a"}, ab, 2) == std::vector<std::int32_t>{2, 3});
  for (std::size_t len = 1; len < 6; ++len) {
    const auto ids = encode({"a", "q", "b", "b"}, ab, len);
    CHECK(ids.size() == len);
    for (auto id : ids) CHECK(static_cast<std::size_t>(id) < ab.size());
  }
}

TEST_CASE("count_vectorize") {
  const auto v = ab_vocab();
  const auto c = count_vectorize({"a", "a", "b"}, v);
  CHECK(c.indices == std::vector<std::int32_t>{2, 3});
  CHECK(c.values == std::vector<double>{2, 1});
  CHECK(count_vectorize({}, v).nnz() == 0);
  CHECK(count_vectorize({"z"}, v).nnz() == 0);
  const auto mixed = count_vectorize({"a", "z", "b", "b", "y"}, v);
  double total = 0;
  for (double x : mixed.values) total += x;
  CHECK(total == 3.0);
}

TEST_CASE("tfidf") {
  Vocabulary v;
  v.add("a", 1);
  v.add("b", 1);
  const auto single = tfidf_transform({count_vectorize({"a"}, v)}, 1);
  REQUIRE(single[0].nnz() == 1);
  CHECK(single[0].values[0] == doctest::Approx(1.0).epsilon(1e-12));

  std::vector<SparseVector> docs = {count_vectorize({"a", "b"}, v), count_vectorize({"a"}, v),
                                    count_vectorize({"a", "b", "b"}, v)};
  const auto idf = IdfWeights::fit(docs);
  CHECK(idf.idf(2) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(idf.idf(3) == doctest::Approx(std::log(4.0 / 3.0) + 1.0).epsilon(1e-12));

  const auto out = tfidf_transform(docs, 3);
  for (const auto& d : out) CHECK(d.norm() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(idf.apply(SparseVector{}).nnz() == 0);
  CHECK_THROWS_AS(tfidf_transform(docs, 2), ContractViolation);
}
