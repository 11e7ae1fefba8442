#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "battle/soldiers.hpp"

using namespace battle;

namespace {

std::vector<SoldierState> roster(int n) {
  std::vector<SoldierState> out(n);
  for (int i = 0; i < n; ++i) {
    out[i].profile.id = "S" + std::to_string(i);
    out[i].profile.side = "England";
    out[i].profile.name = "Soldier " + std::to_string(i);
  }
  return out;
}

std::vector<SoldierState*> pointers(std::vector<SoldierState>& r) {
  std::vector<SoldierState*> out;
  for (auto& s : r) out.push_back(&s);
  return out;
}

}  // namespace

TEST_CASE("wound sampling matches its binomial expectation") {
  // 100 losses out of 1000 at severity 1.5 hits each living soldier with p = 0.15.
  constexpr int kSoldiers = 40, kTrials = 2000;
  constexpr double p = 0.15;
  Rng rng(99);
  std::int64_t hits = 0, wounded = 0;
  for (int t = 0; t < kTrials; ++t) {
    auto r = roster(kSoldiers);
    auto ptrs = pointers(r);
    const auto tr = sample_wounds(100, 1000, ptrs, 1.5, 3, rng);
    hits += static_cast<std::int64_t>(tr.size());
    for (const auto& w : tr) {
      CHECK(w.from == WoundState::unharmed);
      if (w.to == WoundState::wounded) ++wounded;
    }
  }
  const double n = double(kSoldiers) * kTrials;
  CHECK(std::abs(hits - n * p) < 5 * std::sqrt(n * p * (1 - p)));
  CHECK(std::abs(wounded - hits * 0.8) < 5 * std::sqrt(hits * 0.8 * 0.2));
}

TEST_CASE("wound sampling transitions and edge cases") {
  auto r = roster(3);
  r[0].wound = WoundState::wounded;
  r[1].wound = WoundState::dead;
  auto ptrs = pointers(r);
  Rng rng(1);
  // p clamps to 1: everyone alive is hit.
  const auto tr = sample_wounds(500, 100, ptrs, 1.0, 7, rng);
  REQUIRE(tr.size() == 2);
  CHECK(tr[0] == WoundTransition{"S0", WoundState::wounded, WoundState::dead});
  CHECK(r[0].death_tick == 7);
  CHECK(tr[1].soldier == "S2");
  CHECK(r[1].wound == WoundState::dead);
  CHECK(sample_wounds(0, 100, ptrs, 1.0, 8, rng).empty());
  CHECK(sample_wounds(10, 100, ptrs, 0.0, 8, rng).empty());
}

TEST_CASE("wound sampling is a function of seed and roster") {
  auto a = roster(30), b = roster(30);
  auto pa = pointers(a), pb = pointers(b);
  Rng ra(42), rb(42);
  for (int tick = 0; tick < 10; ++tick) {
    CHECK(sample_wounds(50, 400, pa, 1.0, tick, ra) == sample_wounds(50, 400, pb, 1.0, tick, rb));
  }
}

TEST_CASE("experience episodes") {
  SoldierState s;
  s.profile.id = "S1";
  s.profile.side = "France";
  s.profile.name = "Jean";
  s.profile.occupation = "miller";
  TickContext ctx;
  ctx.tick = 5;
  ctx.agent = ArmyId("ARMY-00000001");
  ctx.action = "Charge Cavalry";
  ctx.category = ActionCategory::Attack;
  ctx.under_attack = true;
  ctx.momentum = -1;
  ctx.losses_witnessed = 300;
  s.wound = WoundState::wounded;
  const auto e = record_experience(s, ctx);
  CHECK(e.soldier == "S1");
  CHECK(e.tick == 5);
  CHECK(e.agent == "ARMY-00000001");
  CHECK(e.wound_state == WoundState::wounded);
  CHECK(e.emotions == std::vector<std::string>{"fear", "grief", "anger"});
  CHECK(e.text.find("Jean") != std::string::npos);
  CHECK(e.text.find("miller") != std::string::npos);
  CHECK(record_experience(s, ctx) == e);

  ctx.wound_before = WoundState::wounded;
  s.wound = WoundState::dead;
  ctx.momentum = 1;
  const auto k = record_experience(s, ctx);
  CHECK(k.emotions == std::vector<std::string>{"fear", "grief", "hope", "anger"});

  TickContext idle;
  const auto quiet = record_experience(roster(1)[0], idle);
  CHECK(quiet.emotions == std::vector<std::string>{"exhaustion"});
  CHECK(quiet.agent.empty());
  for (const auto& em : k.emotions) {
    CHECK(std::find(std::begin(kEmotionLexicon), std::end(kEmotionLexicon), em) != std::end(kEmotionLexicon));
  }
}

TEST_CASE("tokenize") {
  CHECK(tokenize("  The ARMY's  \"death\"... 1346 (twice) é-ok ") ==
        std::vector<std::string>{"the", "army's", "death", "twice", "é-ok"});
  CHECK(tokenize("").empty());
  CHECK(tokenize("!!! 42 ,").empty());
}

TEST_CASE("lexicon parsing") {
  const auto lex = PosLexicon::parse("# comment\nQuickly\tRB\r\nbad line\n\nsword\tNN\n");
  CHECK(lex.size() == 2);
  CHECK(lex.tag("quickly") == "RB");
  CHECK(lex.tag("sword") == "NN");
  CHECK_FALSE(lex.tag("bad line"));
  CHECK(PosLexicon::bundled().tag("death") == "NN");
  CHECK(PosLexicon::bundled().tag("soldiers") == "NNS");
}

TEST_CASE("word frequency drops stoplisted and tag-filtered tokens") {
  const std::vector<std::string> corpus{
      "The soldiers would think of death quickly.", "Death, death and mud.", "Two men feel the war through mud."};
  const auto r = word_frequency(corpus);
  CHECK(r.counts == std::vector<std::pair<std::string, std::int64_t>>{{"death", 3}, {"mud", 2}});
  CHECK(r.rank_of("death") == 0);
  CHECK_FALSE(r.rank_of("soldiers"));
  CHECK_FALSE(r.rank_of("men"));
  CHECK_FALSE(r.empty_after_filter);

  const std::vector<std::string> filtered{"the war would feel quickly", "1346"};
  CHECK(word_frequency(filtered).empty_after_filter);
}

TEST_CASE("word frequency agrees with an independent count on random corpora") {
  const std::vector<std::pair<std::string, std::string>> vocab{
      {"death", "NN"}, {"mud", "NN"},   {"quickly", "RB"}, {"would", "MD"}, {"through", "IN"}, {"two", "CD"},
      {"this", "DT"},  {"arrows", "NNS"}, {"they", "PRP"},  {"anno", "FW"},  {"bleed", "VB"},   {"think", "VB"},
      {"war", "NN"},   {"cold", "JJ"},  {"with", "IN"}};
  std::string tsv;
  for (const auto& [w, t] : vocab) tsv += w + "\t" + t + "\n";
  const PosLexicon lex = PosLexicon::parse(tsv);
  const FrequencyFilter filter;
  const std::set<std::string> banned_tags(filter.tags.begin(), filter.tags.end());
  const std::set<std::string> stop(filter.stoplist.begin(), filter.stoplist.end());

  std::mt19937_64 gen(5);
  for (int c = 0; c < 300; ++c) {
    std::vector<std::string> corpus(1 + gen() % 4);
    std::map<std::string, std::int64_t> expect;
    for (auto& doc : corpus) {
      const int n = static_cast<int>(gen() % 20);
      for (int i = 0; i < n; ++i) {
        const auto& [w, t] = vocab[gen() % vocab.size()];
        doc += (gen() % 3 == 0 ? " " + std::string(1, char(std::toupper(w[0]))) + w.substr(1) : " " + w) +
               (gen() % 4 == 0 ? "," : "");
        if (!banned_tags.contains(t) && !stop.contains(w) && !is_function_word(w)) ++expect[w];
      }
    }
    const auto r = word_frequency(corpus, filter, lex);
    std::map<std::string, std::int64_t> got(r.counts.begin(), r.counts.end());
    CHECK(got == expect);
    CHECK(r.empty_after_filter == expect.empty());
    for (std::size_t i = 1; i < r.counts.size(); ++i) {
      CHECK(r.counts[i - 1].second >= r.counts[i].second);
    }
  }
}
