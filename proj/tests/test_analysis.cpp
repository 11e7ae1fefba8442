#include <doctest.h>

#include <cmath>
#include <set>

#include "battle/analysis.hpp"
#include "battle/errors.hpp"

using namespace battle;

namespace {

std::vector<RunRecord> runs(const char* id, int count) {
  const Scenario sc = builtin_scenario(id);
  const auto p = baseline_policies(sc);
  std::vector<RunRecord> out;
  for (int s = 1; s <= count; ++s) {
    RunOptions o;
    o.seed = static_cast<std::uint64_t>(s);
    out.push_back(run(sc, {p[0].get(), p[1].get()}, o));
  }
  return out;
}

RunRecord synthetic(std::vector<std::int64_t> a, std::vector<std::int64_t> b) {
  RunRecord r;
  r.scenario_id = "toy";
  r.sides = {"A", "B"};
  r.casualties["A"] = std::move(a);
  r.casualties["B"] = std::move(b);
  return r;
}

}  // namespace

TEST_CASE("casualty report on hand-computed series") {
  // Finals A: 10, 20, 30 -> mean 20, variance 100. B: 4, 4, 7 -> mean 5.
  const std::vector<RunRecord> rs{synthetic({0, 10}, {0, 4}), synthetic({0, 5, 20}, {4, 4, 4}),
                                  synthetic({0, 30}, {0, 7})};
  const std::vector<ReferenceRange> ref{{"A", 0, 0, 15, 25}, {"B", 0, 0, 6, 9}};
  const CasualtyReport r = casualty_report(rs, ref);
  CHECK(r.runs == 3);
  CHECK(r.sides.at("A").final_mean == doctest::Approx(20));
  CHECK(r.sides.at("A").finals == std::vector<std::int64_t>{10, 20, 30});
  CHECK(r.sides.at("A").within_reference);
  CHECK_FALSE(r.sides.at("B").within_reference);
  CHECK_FALSE(r.within_reference);
  REQUIRE(r.ratio);
  CHECK(*r.ratio == doctest::Approx(4));
  CHECK(r.ratio_numerator == "A");
  // Tick 2: A holds 10, 20, 30; B holds 4, 4, 7.
  CHECK(r.series.at("A").mean == std::vector<double>{0, 15, 20});
  CHECK(r.series.at("A").variance[2] == doctest::Approx(100));
  CHECK(r.series.at("B").variance[2] == doctest::Approx(3));

  const auto j = to_json(r);
  CHECK(j.at("sides").at("A").at("mean_series").size() == 3);
  CHECK(j.at("ratio").get<double>() == doctest::Approx(4));
  const std::string csv = casualty_csv(r);
  CHECK(csv.rfind("tick,A_mean,A_variance,B_mean,B_variance\n0,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);

  CHECK_FALSE(casualty_report(std::vector<RunRecord>{synthetic({0}, {3})}, {}).ratio);
  CHECK_THROWS_AS(casualty_report({}, {}), std::invalid_argument);
}

TEST_CASE("movement trace normalizes by side strength") {
  const auto rs = runs("falkirk", 1);
  const auto trace = movement_trace(rs[0]);
  REQUIRE_FALSE(trace.empty());
  for (const auto& p : trace) {
    CHECK(p.size > 0);
    CHECK(p.size <= 1);
  }
  CHECK(trace.front().tick == 0);
  CHECK(trace.front().size == doctest::Approx(1));
  const std::string jsonl = trace_jsonl(trace);
  CHECK(static_cast<std::size_t>(std::count(jsonl.begin(), jsonl.end(), '\n')) == trace.size());
  CHECK(nlohmann::json::parse(jsonl.substr(0, jsonl.find('\n'))).at("tick") == 0);
}

TEST_CASE("action tracker follows chosen agents") {
  const auto rs = runs("crecy", 1);
  const std::string root = rs[0].frames[0].agents[0].id.str();
  const std::vector<std::string> agents{root};
  const auto rows = action_tracker(rs[0], agents);
  REQUIRE_FALSE(rows.empty());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].agent.str() == root);
    if (i) CHECK(rows[i - 1].tick <= rows[i].tick);
  }
  CHECK(tracker_csv(rows).rfind("tick,agent,action,description,losses\n", 0) == 0);
  const std::vector<std::string> ghost{"ARMY-0badf00d"};
  CHECK_THROWS_AS(action_tracker(rs[0], ghost), LookupError);
}

TEST_CASE("word frequency of a full Crecy run puts death near the top for both sides") {
  const auto rs = runs("crecy", 1);
  for (const auto& side : rs[0].sides) {
    INFO(side);
    const auto corpus = side_corpus(rs, side);
    REQUIRE_FALSE(corpus.empty());
    const auto report = word_frequency(corpus);
    const auto rank = report.rank_of("death");
    REQUIRE(rank);
    CHECK(*rank < 10);
    const std::set<std::string> banned{"think", "feel", "battle", "war", "the", "of"};
    for (const auto& [token, n] : report.counts) CHECK_FALSE(banned.contains(token));
    const std::string csv = frequency_csv(report, 5);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
  }
}
