#include <doctest.h>

#include <random>

#include "case_study.hpp"
#include "skillroute/error.hpp"
#include "skillroute/skills.hpp"

using namespace skillroute;

namespace {

bool has_code(const std::vector<VectorIssue>& issues, VectorIssue::Code code) {
  for (const auto& i : issues)
    if (i.code == code) return true;
  return false;
}

}  // namespace

TEST_CASE("canonical taxonomy has the eight shared skills") {
  const auto& tax = Taxonomy::canonical();
  CHECK(tax.size() == 8);
  CHECK(tax.ids() == std::vector<std::string>{"mathematical_reasoning", "logical_reasoning", "code_generation",
                                              "tool_use", "factual_knowledge", "writing_quality",
                                              "instruction_following", "summarization"});
  CHECK(tax.definitions_block().rfind("- mathematical_reasoning: ", 0) == 0);
}

TEST_CASE("taxonomy file matches the built-in set") {
  const Taxonomy file = load_taxonomy(testing::case_file("skills.json"));
  CHECK(file.ids() == Taxonomy::canonical().ids());
}

TEST_CASE("taxonomy rejects duplicates and empty fields") {
  CHECK_THROWS_AS(Taxonomy({{"a", "x"}, {"a", "y"}}), Error);
  CHECK_THROWS_AS(Taxonomy(std::vector<Skill>{{"", "x"}}), Error);
  CHECK_THROWS_AS(Taxonomy(std::vector<Skill>{{"a", ""}}), Error);
  CHECK_THROWS_AS(parse_taxonomy(Json::parse(R"({"skills": [{"id": "a"}]})")), Error);
}

TEST_CASE("normalize") {
  SUBCASE("already normalized vector is returned unchanged") {
    SkillVector v{{"mathematical_reasoning", 0.7}, {"logical_reasoning", 0.3}};
    CHECK(normalize(v) == v);
  }
  SUBCASE("symmetric weights") {
    auto n = normalize({{"mathematical_reasoning", 2}, {"logical_reasoning", 2}});
    CHECK(n.weight("mathematical_reasoning") == 0.5);
    CHECK(n.weight("logical_reasoning") == 0.5);
  }
  SUBCASE("proportions kept and zeros stay zero") {
    auto n = normalize({{"mathematical_reasoning", 3}, {"logical_reasoning", 1}, {"tool_use", 0}});
    CHECK(n.weight("mathematical_reasoning") == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(n.weight("logical_reasoning") == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(n.weights().contains("tool_use"));
    CHECK(n.weight("tool_use") == 0.0);
  }
  SUBCASE("undefined inputs") {
    CHECK_THROWS_AS(normalize({{"tool_use", 0.0}}), Error);
    CHECK_THROWS_AS(normalize(SkillVector{}), Error);
    CHECK_THROWS_AS(normalize({{"tool_use", -1.0}, {"summarization", 2.0}}), Error);
  }
}

TEST_CASE("normalize is idempotent and keeps the support") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> w(0.0, 5.0);
  const auto ids = Taxonomy::canonical().ids();
  for (int trial = 0; trial < 300; ++trial) {
    SkillVector::Weights raw;
    for (const auto& id : ids)
      if (w(rng) > 2.0) raw[id] = w(rng);
    if (raw.empty()) raw[ids[0]] = 1.0;
    const SkillVector v(raw);
    const SkillVector once = normalize(v);
    CHECK(normalize(once) == once);
    CHECK(once.support() == v.support());
    CHECK(std::abs(once.sum() - 1.0) <= 1e-6);
  }
}

TEST_CASE("validate_against_taxonomy") {
  const auto& tax = Taxonomy::canonical();
  SUBCASE("unknown skill") {
    auto issues = validate_against_taxonomy({{"sarcasm", 1.0}}, tax);
    REQUIRE(!issues.empty());
    CHECK(has_code(issues, VectorIssue::Code::unknown_skill));
    CHECK(issues.front().message.find("unknown skill") != std::string::npos);
  }
  SUBCASE("published row is clean") {
    CHECK(validate_against_taxonomy(
              {{"mathematical_reasoning", .3}, {"logical_reasoning", .3}, {"factual_knowledge", .4}}, tax)
              .empty());
  }
  SUBCASE("negative weight plus drift gives two issues") {
    auto issues = validate_against_taxonomy({{"mathematical_reasoning", -0.1}, {"logical_reasoning", 1.1}}, tax);
    CHECK(issues.size() == 2);
    CHECK(has_code(issues, VectorIssue::Code::negative_weight));
    CHECK(has_code(issues, VectorIssue::Code::sum_drift));
  }
  SUBCASE("non-finite and empty") {
    CHECK(has_code(validate_against_taxonomy({{"tool_use", std::nan("")}}, tax),
                   VectorIssue::Code::non_finite_weight));
    CHECK(has_code(validate_against_taxonomy(SkillVector{}, tax), VectorIssue::Code::empty));
  }
}

TEST_CASE("ingest renormalizes within tolerance and rejects beyond it") {
  const auto& tax = Taxonomy::canonical();
  auto v = ingest_skill_vector({{"tool_use", 0.5004}, {"summarization", 0.5}}, tax, "ctx");
  CHECK(std::abs(v.sum() - 1.0) <= 1e-12);
  CHECK_THROWS_AS(ingest_skill_vector({{"tool_use", 0.6}, {"summarization", 0.5}}, tax, "ctx"), Error);
  try {
    ingest_skill_vector({{"sarcasm", 0.5}, {"tool_use", -0.5}}, tax, "ctx");
    FAIL("expected validation error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::validation);
    CHECK(e.details().size() >= 2);
  }
}

TEST_CASE("dot product and json round trip") {
  SkillVector a{{"tool_use", 0.5}, {"summarization", 0.5}};
  SkillVector b{{"tool_use", 1.0}};
  CHECK(dot(a, b) == 0.5);
  CHECK(dot(a, SkillVector{{"code_generation", 1.0}}) == 0.0);
  CHECK(skill_vector_from_json(to_json(a), "x") == a);
  CHECK_THROWS_AS(skill_vector_from_json(Json::parse(R"({"tool_use": "high"})"), "x"), Error);
}
