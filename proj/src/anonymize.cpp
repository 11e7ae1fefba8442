#include "battle/decision.hpp"

#include <algorithm>

#include "battle/errors.hpp"

namespace battle {

std::optional<std::string> AliasMap::alias_of(std::string_view original) const {
  for (const auto& [o, a] : entries) {
    if (o == original) return a;
  }
  return std::nullopt;
}

std::optional<std::string> AliasMap::original_of(std::string_view alias) const {
  for (const auto& [o, a] : entries) {
    if (a == alias) return o;
  }
  return std::nullopt;
}

namespace {

using Table = std::vector<std::pair<std::string, std::string>>;

std::string letters(std::size_t i, std::string_view alphabet) {
  std::string s(1, alphabet[i % alphabet.size()]);
  if (i >= alphabet.size()) s += std::to_string(i / alphabet.size() + 1);
  return s;
}

std::string make_alias(std::string_view category, std::size_t i) {
  if (category == "countries") return "Country_" + letters(i, "ABCDEFGHIJKLMNOPQRSTUVWXYZ");
  if (category == "leaders") return "Leader_" + std::to_string(i + 1);
  if (category == "dates") return "Year_" + letters(i, "XYZWVUTSRQPONMLKJIHGFEDCBA");
  return "Location_" + std::to_string(i + 1);
}

// Replaces inside JSON string literals only, longest key first at each position.
std::string rewrite(std::string_view doc, Table table) {
  std::stable_sort(table.begin(), table.end(),
                   [](const auto& a, const auto& b) { return a.first.size() > b.first.size(); });
  std::string out;
  out.reserve(doc.size());
  bool in_string = false;
  for (std::size_t i = 0; i < doc.size();) {
    const char c = doc[i];
    if (!in_string) {
      out += c;
      in_string = c == '"';
      ++i;
      continue;
    }
    if (c == '\\' && i + 1 < doc.size()) {
      out.append(doc.substr(i, 2));
      i += 2;
      continue;
    }
    if (c == '"') {
      out += c;
      in_string = false;
      ++i;
      continue;
    }
    bool replaced = false;
    for (const auto& [from, to] : table) {
      if (!from.empty() && doc.compare(i, from.size(), from) == 0) {
        out += to;
        i += from.size();
        replaced = true;
        break;
      }
    }
    if (!replaced) {
      out += c;
      ++i;
    }
  }
  return out;
}

}  // namespace

std::pair<std::string, AliasMap> anonymize(std::string_view document, const AnonymizationConfig& config) {
  AliasMap map;
  const std::pair<std::string_view, const std::vector<std::string>*> groups[] = {
      {"countries", &config.countries},
      {"leaders", &config.leaders},
      {"dates", &config.dates},
      {"locations", &config.locations},
  };
  for (const auto& [category, names] : groups) {
    std::size_t next = 0;
    for (const auto& name : *names) {
      if (name.empty() || map.alias_of(name)) continue;
      std::string alias;
      // Skip aliases that already occur in the document or would shadow a name.
      do {
        alias = make_alias(category, next++);
      } while (document.find(alias) != std::string_view::npos || map.original_of(alias) ||
               std::any_of(map.entries.begin(), map.entries.end(),
                           [&](const auto& e) { return e.first.find(alias) != std::string::npos; }));
      map.entries.emplace_back(name, alias);
    }
  }
  std::string out = rewrite(document, map.entries);
  if (de_anonymize(out, map) != document) {
    throw Error("anonymize: substitution is not reversible for this document");
  }
  return {std::move(out), std::move(map)};
}

std::pair<std::string, AliasMap> anonymize(std::string_view document) {
  const auto doc = nlohmann::json::parse(document);
  AnonymizationConfig config;
  if (auto it = doc.find("anonymization"); it != doc.end() && it->is_object()) {
    auto list = [&](const char* key) {
      std::vector<std::string> v;
      if (auto l = it->find(key); l != it->end() && l->is_array()) {
        for (const auto& s : *l) {
          if (s.is_string()) v.push_back(s);
        }
      }
      return v;
    };
    config.countries = list("countries");
    config.leaders = list("leaders");
    config.dates = list("dates");
    config.locations = list("locations");
  }
  return anonymize(document, config);
}

std::string de_anonymize(std::string_view document, const AliasMap& aliases) {
  Table inverse;
  for (const auto& [o, a] : aliases.entries) inverse.emplace_back(a, o);
  return rewrite(document, std::move(inverse));
}

}  // namespace battle
