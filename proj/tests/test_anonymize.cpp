#include <doctest.h>

#include <random>

#include "battle/decision.hpp"
#include "battle/errors.hpp"
#include "battle/scenario.hpp"

using namespace battle;
using nlohmann::json;

namespace {

std::vector<std::string> sensitive(const AnonymizationConfig& c) {
  std::vector<std::string> all;
  for (const auto* list : {&c.countries, &c.leaders, &c.dates, &c.locations}) all.insert(all.end(), list->begin(), list->end());
  return all;
}

/// Every string value and object key in a parsed document.
void strings_of(const json& j, std::vector<std::string>& out) {
  if (j.is_string()) out.push_back(j.get<std::string>());
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) {
      out.push_back(k);
      strings_of(v, out);
    }
  }
  if (j.is_array()) {
    for (const auto& v : j) strings_of(v, out);
  }
}

}  // namespace

TEST_CASE("builtin scenarios round-trip and lose every sensitive string") {
  for (const auto& id : builtin_scenario_ids()) {
    INFO(id);
    const std::string original(builtin_scenario_text(id));
    const auto [anon, map] = anonymize(original);
    CHECK(de_anonymize(anon, map) == original);
    CHECK(anon != original);
    const Scenario sc = builtin_scenario(id);
    std::vector<std::string> values;
    strings_of(json::parse(anon), values);
    for (const auto& s : sensitive(sc.anonymization)) {
      CHECK_MESSAGE(anon.find(s) == std::string::npos, s);
      for (const auto& v : values) CHECK_MESSAGE(v.find(s) == std::string::npos, s);
    }
    // Geometry and numbers are untouched, so the document still loads.
    const Scenario a = load_scenario(json::parse(anon));
    CHECK(a.map.features().size() == sc.map.features().size());
    CHECK(a.sides[0].profile.composition == sc.sides[0].profile.composition);
  }
}

TEST_CASE("alias naming by category") {
  AnonymizationConfig c;
  c.countries = {"England", "France"};
  c.leaders = {"Edward III"};
  c.dates = {"1346"};
  c.locations = {"Crécy"};
  const auto [out, map] = anonymize(R"({"a": "England met France at Crécy in 1346 under Edward III", "n": 1346})", c);
  CHECK(out == R"({"a": "Country_A met Country_B at Location_1 in Year_X under Leader_1", "n": 1346})");
  CHECK(map.alias_of("France") == "Country_B");
  CHECK(map.original_of("Year_X") == "1346");
}

TEST_CASE("longer names win and existing aliases are skipped") {
  AnonymizationConfig c;
  c.leaders = {"Edward", "Edward III"};
  const auto [out, map] = anonymize(R"(["Edward III and Edward", "Leader_1 was already here"])", c);
  CHECK(map.alias_of("Edward") == "Leader_2");
  CHECK(map.alias_of("Edward III") == "Leader_3");
  CHECK(out == R"(["Leader_3 and Leader_2", "Leader_1 was already here"])");
  CHECK(de_anonymize(out, map) == R"(["Edward III and Edward", "Leader_1 was already here"])");
}

TEST_CASE("escapes inside strings are preserved") {
  AnonymizationConfig c;
  c.countries = {"France"};
  const std::string doc = R"({"q": "say \"France\" twice: France"})";
  const auto [out, map] = anonymize(doc, c);
  CHECK(out == R"({"q": "say \"Country_A\" twice: Country_A"})");
  CHECK(de_anonymize(out, map) == doc);
}

TEST_CASE("random documents round-trip") {
  std::mt19937_64 gen(11);
  const std::vector<std::string> words{"England", "France", "Philip", "Crecy", "the", "army", "1346", "Country_A",
                                       "Leader_1", "x", "\\\"", "Loc"};
  AnonymizationConfig c;
  c.countries = {"England", "France"};
  c.leaders = {"Philip"};
  c.dates = {"1346"};
  c.locations = {"Crecy"};
  for (int i = 0; i < 500; ++i) {
    std::string doc = "[";
    const int n = 1 + static_cast<int>(gen() % 6);
    for (int k = 0; k < n; ++k) {
      doc += (k ? ", \"" : "\"");
      const int m = static_cast<int>(gen() % 6);
      for (int w = 0; w < m; ++w) doc += words[gen() % words.size()] + (gen() % 2 ? " " : "");
      doc += "\"";
    }
    doc += "]";
    try {
      const auto [out, map] = anonymize(doc, c);
      CHECK(de_anonymize(out, map) == doc);
      for (const auto& s : sensitive(c)) CHECK(out.find(s) == std::string::npos);
    } catch (const Error&) {
      // Refusing a document that cannot be reversed is allowed; silently
      // returning a lossy one is not.
    }
  }
}
