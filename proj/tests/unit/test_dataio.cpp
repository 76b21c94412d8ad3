// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <set>

#include "common/error.hpp"
#include "data/corpus.hpp"
#include "data/csv.hpp"

using namespace bgcnn;
using namespace bgcnn::data;

namespace {

std::vector<RawTweet> synthetic(std::size_t n0, std::size_t n1) {
  std::vector<RawTweet> out;
  for (std::size_t i = 0; i < n0 + n1; ++i) out.push_back({std::to_string(i), "t" + std::to_string(i), i < n0 ? 0 : 1});
  return out;
}

}  // namespace

TEST_CASE("csv parsing") {
  const auto rows = parse_csv("a,b\n\"x, y\",\"he said \"\"hi\"\"\nnext\"\n\n1,2");
  REQUIRE(rows.size() == 3);
  CHECK(rows[1].fields == std::vector<std::string>{"x, y", "he said \"hi\"\nnext"});
  CHECK(rows[2].fields == std::vector<std::string>{"1", "2"});
  CHECK(parse_csv("\xEF\xBB\xBFid\r\n1\r\n")[0].fields[0] == "id");
  CHECK_THROWS_AS(parse_csv("a\n\"open"), ParseError);
  try {
    parse_csv("a,b\n\"x\"y,2\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.byte_offset() > 0);
  }
}

TEST_CASE("load corpus") {
  const auto r = parse_corpus("id,label,tweet\n1,0,hello\n2,1,\"bad, words\"\n3,0,x\n");
  REQUIRE(r.size() == 3);
  CHECK(r[1] == RawTweet{"2", "bad, words", 1});
  CHECK(parse_corpus("text,y\nhi,1\n", "text", "y")[0].id == "1");
  try {
    parse_corpus("id,label\n1,0\n");
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(std::string(e.what()).find("tweet") != std::string::npos);
  }
  try {
    parse_corpus("id,label,tweet\n1,0,a\n2,2,b\n");
    FAIL("expected RowError");
  } catch (const RowError& e) {
    CHECK(e.row() == 2);
    CHECK(std::string(e.what()).find("row 2") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_corpus("id,label,tweet\n1,0\n"), ParseError);
  CHECK_THROWS_AS(load_csv("/definitely/missing.csv"), NotFoundError);
}

TEST_CASE("split sizes") {
  const auto ten = split(synthetic(5, 5), 0.2, true, 1);
  CHECK(ten.count(Split::Test) == 2);
  CHECK(ten.count(Split::Train) == 8);

  const auto big = split(synthetic(29720, 2242), 0.2, true, 42);
  CHECK(big.count(Split::Test) == 6392);
  CHECK(big.count(Split::Train) == 25570);
  CHECK(big.stratified);
  const auto report = class_report(big.subset(Split::Test));
  CHECK(std::abs(static_cast<double>(report.counts[1]) - 0.2 * 2242) <= 1.0);

  CHECK_THROWS_AS(split(synthetic(5, 5), 0.0, true, 1), ConfigError);
  CHECK_THROWS_AS(split(synthetic(5, 5), 1.0, true, 1), ConfigError);
}

TEST_CASE("split is a deterministic partition") {
  const auto records = synthetic(37, 13);
  for (bool stratified : {true, false}) {
    const auto a = split(records, 0.3, stratified, 9);
    const auto b = split(records, 0.3, stratified, 9);
    CHECK(a.splits == b.splits);
    const auto tr = a.subset(Split::Train), te = a.subset(Split::Test);
    CHECK(tr.size() + te.size() == records.size());
    std::set<std::string> ids;
    for (const auto& r : tr) ids.insert(r.id);
    for (const auto& r : te) CHECK(ids.insert(r.id).second);
    CHECK(te.size() == 15);
    // subsets keep file order
    CHECK(std::is_sorted(tr.begin(), tr.end(), [](const RawTweet& x, const RawTweet& y) {
      return std::stoi(x.id) < std::stoi(y.id);
    }));
  }
  CHECK(split(records, 0.3, true, 9).splits != split(records, 0.3, true, 10).splits);
  const auto one_class = split(synthetic(10, 0), 0.2, true, 3);
  CHECK_FALSE(one_class.stratified);
  CHECK(one_class.count(Split::Test) == 2);
}

TEST_CASE("class report") {
  const auto r = class_report(synthetic(29720, 2242));
  CHECK(r.majority_label == 0);
  CHECK(r.majority_fraction == doctest::Approx(0.9299).epsilon(1e-4));
  CHECK(class_report(synthetic(4, 0)).majority_fraction == 1.0);
  CHECK(class_report(synthetic(3, 3)).majority_fraction == 0.5);
  CHECK_THROWS_AS(class_report({}), ContractViolation);
}
