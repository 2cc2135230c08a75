#include <algorithm>
#include <sstream>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "exposome/ohp.hpp"
#include "exposome/rng.hpp"

using namespace exposome;

namespace {

RawRecord valid_raw() {
  RawRecord raw;
  raw.record_id = "R1";
  raw.reported_on = "2004-03-02";
  raw.center = "CTR01";
  raw.pathology = "C34.1";
  raw.occupation = "welder";
  raw.sector = "construction";
  raw.agents = {{"asbestos", 3}};
  return raw;
}

bool has_error(const ValidationOutcome& outcome, ValidationCode code,
               const std::string& field = {}) {
  return std::find(outcome.errors.begin(), outcome.errors.end(),
                   ValidationError{code, field}) != outcome.errors.end();
}

}  // namespace

TEST_CASE("a minimal valid record passes validation", "[ohp]") {
  const auto outcome = validate_record(valid_raw());
  REQUIRE(outcome.ok());
  CHECK(outcome.record->record_id == "R1");
  CHECK(outcome.record->reported_on.to_string() == "2004-03-02");
  CHECK(outcome.record->agents.size() == 1);
  CHECK(outcome.record->agents[0].responsibility == 3);
}

TEST_CASE("six agents exceed the maximum", "[ohp]") {
  auto raw = valid_raw();
  raw.agents.assign(6, {"a", 1});
  const auto outcome = validate_record(raw);
  REQUIRE_FALSE(outcome.ok());
  CHECK(has_error(outcome, ValidationCode::MaxAgentsExceeded));

  raw.agents.assign(5, {"a", 1});
  CHECK(validate_record(raw).ok());
}

TEST_CASE("zero agents are rejected", "[ohp]") {
  auto raw = valid_raw();
  raw.agents.clear();
  const auto outcome = validate_record(raw);
  REQUIRE_FALSE(outcome.ok());
  CHECK(has_error(outcome, ValidationCode::NoAgents));
}

TEST_CASE("all violated rules are reported together", "[ohp]") {
  auto raw = valid_raw();
  raw.agents = {{"fumes", 5}};
  raw.sector = "   ";
  const auto outcome = validate_record(raw);
  REQUIRE_FALSE(outcome.ok());
  REQUIRE(outcome.errors.size() == 2);
  CHECK(has_error(outcome, ValidationCode::BadResponsibility));
  CHECK(has_error(outcome, ValidationCode::EmptyField, "sector"));
}

TEST_CASE("bad dates and empty fields are named", "[ohp]") {
  auto raw = valid_raw();
  raw.reported_on = "2004-02-30";
  raw.record_id = "";
  raw.center = "\t";
  const auto outcome = validate_record(raw);
  REQUIRE_FALSE(outcome.ok());
  CHECK(has_error(outcome, ValidationCode::BadDate));
  CHECK(has_error(outcome, ValidationCode::EmptyField, "record_id"));
  CHECK(has_error(outcome, ValidationCode::EmptyField, "center"));

  auto missing_resp = valid_raw();
  missing_resp.agents = {{"dust", std::nullopt}};
  CHECK(has_error(validate_record(missing_resp), ValidationCode::BadResponsibility));

  auto blank_agent = valid_raw();
  blank_agent.agents = {{"  ", 2}};
  CHECK(has_error(validate_record(blank_agent), ValidationCode::EmptyField, "agent_code"));
}

TEST_CASE("responsibility bounds are inclusive 0..3", "[ohp]") {
  for (long long resp : {0LL, 1LL, 2LL, 3LL}) {
    auto raw = valid_raw();
    raw.agents = {{"dust", resp}};
    CHECK(validate_record(raw).ok());
  }
  for (long long resp : {-1LL, 4LL, 100LL}) {
    auto raw = valid_raw();
    raw.agents = {{"dust", resp}};
    CHECK_FALSE(validate_record(raw).ok());
  }
}

TEST_CASE("token fields are trimmed before use", "[ohp]") {
  auto raw = valid_raw();
  raw.pathology = "  C34.1 ";
  raw.agents = {{" asbestos ", 2}};
  const auto outcome = validate_record(raw);
  REQUIRE(outcome.ok());
  CHECK(outcome.record->pathology == "C34.1");
  CHECK(outcome.record->agents[0].code == "asbestos");
}

TEST_CASE("identity ignores agent order, duplicates and responsibilities", "[ohp]") {
  auto raw = valid_raw();
  raw.agents = {{"B", 1}, {"A", 2}};
  const auto first = identity_of(*validate_record(raw).record);

  raw.agents = {{"A", 3}, {"B", 1}};
  const auto second = identity_of(*validate_record(raw).record);
  CHECK(first == second);

  raw.agents = {{"A", 1}, {"A", 3}};
  const auto deduped = identity_of(*validate_record(raw).record);
  CHECK(deduped.agent_set == std::vector<std::string>{"A"});
}

TEST_CASE("identity is stable under permutation and duplication", "[ohp]") {
  SplitMix64 rng(20240001);
  for (int trial = 0; trial < 200; ++trial) {
    auto raw = valid_raw();
    raw.agents.clear();
    const std::size_t count = 1 + rng.next_below(5);
    for (std::size_t i = 0; i < count; ++i) {
      raw.agents.push_back({"AG" + std::to_string(rng.next_below(6)),
                            static_cast<long long>(rng.next_below(4))});
    }
    const auto record = validate_record(raw).record;
    REQUIRE(record.has_value());
    const auto reference = identity_of(*record);

    auto shuffled = *record;
    for (std::size_t i = shuffled.agents.size(); i > 1; --i) {
      std::swap(shuffled.agents[i - 1], shuffled.agents[rng.next_below(i)]);
    }
    if (shuffled.agents.size() < kMaxAgents) {  // duplicate one entry
      shuffled.agents.push_back(shuffled.agents[rng.next_below(shuffled.agents.size())]);
    }
    for (auto& agent : shuffled.agents) {
      agent.responsibility = static_cast<int>(rng.next_below(4));
    }
    CHECK(identity_of(shuffled) == reference);
  }
}

TEST_CASE("random field corruption yields the named error", "[ohp]") {
  SplitMix64 rng(909090);
  for (int trial = 0; trial < 300; ++trial) {
    auto raw = valid_raw();
    const auto corruption = rng.next_below(6);
    ValidationCode expected{};
    std::string field;
    switch (corruption) {
      case 0:
        raw.agents.assign(6 + rng.next_below(3), {"x", 1});
        expected = ValidationCode::MaxAgentsExceeded;
        break;
      case 1:
        raw.agents.clear();
        expected = ValidationCode::NoAgents;
        break;
      case 2:
        raw.agents[0].responsibility = 4 + static_cast<long long>(rng.next_below(10));
        expected = ValidationCode::BadResponsibility;
        break;
      case 3:
        raw.reported_on = "not a date";
        expected = ValidationCode::BadDate;
        break;
      case 4:
        raw.occupation = "";
        expected = ValidationCode::EmptyField;
        field = "occupation";
        break;
      case 5:
        raw.sector = " ";
        expected = ValidationCode::EmptyField;
        field = "sector";
        break;
    }
    const auto outcome = validate_record(raw);
    REQUIRE_FALSE(outcome.ok());
    REQUIRE(outcome.errors.size() == 1);
    CHECK(outcome.errors[0] == ValidationError{expected, field});
  }
}

TEST_CASE("default prefix rule maps codes across levels", "[ohp]") {
  CHECK(pathology_at("C34.1", PathologyLevel::Disease) == "C34.1");
  CHECK(pathology_at("C34.1", PathologyLevel::Subgroup) == "C34");
  CHECK(pathology_at("C34.1", PathologyLevel::Category) == "C");
  CHECK(pathology_at("C34", PathologyLevel::Subgroup) == "C34");
  CHECK(pathology_at("C", PathologyLevel::Category) == "C");
  // Degenerate codes fall back instead of vanishing.
  CHECK(pathology_at(".1", PathologyLevel::Subgroup) == ".1");
  CHECK(pathology_at("123", PathologyLevel::Category) == "123");
}

TEST_CASE("prefix rule is monotone for arbitrary codes", "[ohp]") {
  SplitMix64 rng(37);
  const std::string alphabet = "ABCabc019.-";
  for (int trial = 0; trial < 500; ++trial) {
    std::string code;
    const std::size_t length = 1 + rng.next_below(8);
    for (std::size_t i = 0; i < length; ++i) {
      code += alphabet[rng.next_below(alphabet.size())];
    }
    const auto via_subgroup =
        pathology_at(pathology_at(code, PathologyLevel::Subgroup), PathologyLevel::Category);
    CHECK(via_subgroup == pathology_at(code, PathologyLevel::Category));
  }
}

TEST_CASE("hierarchy tables override the prefix rule", "[ohp]") {
  std::istringstream tsv(
      "code\tsubgroup\tcategory\n"
      "C34.1\tlung\ttumour\n"
      "C34.2\tlung\ttumour\n"
      "C45.0\tmesothelioma\ttumour\n");
  const auto table = HierarchyTable::parse_tsv(tsv);
  CHECK(table.size() == 3);
  CHECK(pathology_at("C34.1", PathologyLevel::Subgroup, &table) == "lung");
  CHECK(pathology_at("C34.1", PathologyLevel::Category, &table) == "tumour");
  CHECK(pathology_at("C34.1", PathologyLevel::Disease, &table) == "C34.1");
  // Subgroup and category codes resolve to themselves at their own level.
  CHECK(pathology_at("lung", PathologyLevel::Subgroup, &table) == "lung");
  CHECK(pathology_at("lung", PathologyLevel::Category, &table) == "tumour");
  CHECK(pathology_at("tumour", PathologyLevel::Category, &table) == "tumour");
  CHECK_THROWS_AS(pathology_at("Z99", PathologyLevel::Subgroup, &table), UnknownCodeError);
}

TEST_CASE("malformed hierarchy tables are fatal", "[ohp]") {
  std::istringstream missing_header("C34.1\tlung\ttumour\n");
  CHECK_THROWS_AS(HierarchyTable::parse_tsv(missing_header), BadHierarchyError);

  std::istringstream short_row("code\tsubgroup\tcategory\nC34.1\tlung\n");
  CHECK_THROWS_AS(HierarchyTable::parse_tsv(short_row), BadHierarchyError);

  std::istringstream conflict(
      "code\tsubgroup\tcategory\n"
      "C34.1\tlung\ttumour\n"
      "C34.1\tlung\tother\n");
  CHECK_THROWS_AS(HierarchyTable::parse_tsv(conflict), BadHierarchyError);

  std::istringstream split_subgroup(
      "code\tsubgroup\tcategory\n"
      "C34.1\tlung\ttumour\n"
      "C34.2\tlung\tother\n");
  CHECK_THROWS_AS(HierarchyTable::parse_tsv(split_subgroup), BadHierarchyError);

  std::istringstream empty("");
  CHECK_THROWS_AS(HierarchyTable::parse_tsv(empty), BadHierarchyError);
}
