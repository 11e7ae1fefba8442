#include <doctest.h>

#include "battle/evaluator.hpp"

using namespace battle;
using K = TroopType::Kind;
using nlohmann::json;

namespace {

EngagementContext context() {
  EngagementContext ctx;
  ctx.tick = 2;
  ctx.attacker.id = ArmyId("ARMY-d2ff280c");
  ctx.attacker.aliases = {"ARMY-aaaaaaaa"};
  ctx.attacker.side = "France";
  ctx.attacker.composition = {{K::man_at_arms, 12000}};
  ctx.defender.id = ArmyId("ARMY-9418a275");
  ctx.defender.side = "England";
  ctx.defender.composition = {{K::longbowman, 500}};
  ctx.defender.terrain = {{"ForestF", FeatureKind::forest}};
  ctx.kind = &action("Execute Flanking Maneuvers");
  ctx.description = "flank";
  ctx.distance = 3;
  return ctx;
}

}  // namespace

TEST_CASE("the request carries the four factor groups") {
  const json r = engagement_request(context(), CasualtyConfig::defaults());
  CHECK(r.at("tick") == 2);
  CHECK(r.at("profiles").at("attacker").at("id") == "ARMY-d2ff280c");
  CHECK(r.at("profiles").at("defender").at("total") == 500);
  CHECK(r.at("action").at("name") == "Execute Flanking Maneuvers");
  CHECK(r.at("positions").at("distance_m").get<double>() == doctest::Approx(3 * 9.144));
  CHECK(r.at("positions").at("defender").at("terrain").at(0).at("kind") == "forest");
  CHECK(r.at("weapons").at("defender").at(0).at("weapon") == "longbow");
}

TEST_CASE("responses must carry non-negative integer losses") {
  CHECK(parse_engagement_response(json{{"attacker_losses", 1}, {"defender_losses", 2}, {"rationale", "x"}}) ==
        EngagementOutcome{1, 2, "x"});
  CHECK_FALSE(parse_engagement_response(json{{"attacker_losses", -1}, {"defender_losses", 2}}));
  CHECK_FALSE(parse_engagement_response(json{{"attacker_losses", 1.5}, {"defender_losses", 2}}));
  CHECK_FALSE(parse_engagement_response(json{{"defender_losses", 2}}));
  CHECK_FALSE(parse_engagement_response(json::array()));
}

TEST_CASE("transcripts are keyed by tick, attacker and defender, aliases included") {
  const auto t = EvaluatorTranscript::parse(
      R"({"request": {"tick": 2, "attacker": {"id": "ARMY-aaaaaaaa"}, "defender": {"id": "ARMY-9418a275"}}, "response": {"attacker_losses": 120, "defender_losses": 3800}}
not json
{"request": {"tick": 2}, "response": {}}
)");
  CHECK(t.size() == 1);
  CHECK(t.warnings().size() == 2);
  ExternalEvaluator ev(CasualtyConfig::defaults(), t);
  Rng rng(1);
  std::vector<std::string> warnings;
  const auto out = ev.evaluate(context(), rng, warnings);
  // 3800 exceeds the 500 defenders present here.
  CHECK(out.attacker_losses == 120);
  CHECK(out.defender_losses == 500);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("clamped") != std::string::npos);
}

TEST_CASE("missing entries fall back to the model with a warning") {
  ExternalEvaluator ev(CasualtyConfig::defaults(), EvaluatorTranscript::parse(""));
  Rng a(5), b(5);
  std::vector<std::string> warnings;
  const auto out = ev.evaluate(context(), a, warnings);
  CHECK(out == assess(context(), CasualtyConfig::defaults(), &b));
  CHECK(warnings.size() == 1);
}

TEST_CASE("a transport sees the serialized request") {
  std::string seen;
  ExternalEvaluator ev(CasualtyConfig::defaults(), [&](const std::string& req) {
    seen = req;
    return std::string(R"({"attacker_losses": 7, "defender_losses": 9})");
  });
  Rng rng(1);
  std::vector<std::string> warnings;
  CHECK(ev.evaluate(context(), rng, warnings) == EngagementOutcome{7, 9, ""});
  CHECK(warnings.empty());
  CHECK(json::parse(seen).at("tick") == 2);

  ExternalEvaluator broken(CasualtyConfig::defaults(),
                           [](const std::string&) -> std::string { throw std::runtime_error("offline"); });
  broken.evaluate(context(), rng, warnings);
  CHECK(warnings.size() == 1);
}

TEST_CASE("the model evaluator is assess with the run stream") {
  ModelEvaluator m(CasualtyConfig::defaults());
  Rng a(3), b(3);
  std::vector<std::string> w;
  CHECK(m.evaluate(context(), a, w) == assess(context(), CasualtyConfig::defaults(), &b));
}
