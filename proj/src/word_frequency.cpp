#include "battle/soldiers.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "battle/errors.hpp"

namespace battle {

namespace detail {
extern const std::string_view kPosLexicon;
}

PosLexicon PosLexicon::parse(std::string_view tsv) {
  PosLexicon lex;
  std::size_t pos = 0;
  while (pos < tsv.size()) {
    std::size_t end = tsv.find('\n', pos);
    if (end == std::string_view::npos) end = tsv.size();
    std::string_view line = tsv.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) continue;
    std::string word(line.substr(0, tab));
    std::transform(word.begin(), word.end(), word.begin(), [](unsigned char c) { return std::tolower(c); });
    lex.tags_.emplace(std::move(word), std::string(line.substr(tab + 1)));
  }
  return lex;
}

const PosLexicon& PosLexicon::bundled() {
  static const PosLexicon lex = [] {
    if (const char* path = std::getenv("BATTLE_LEXICON"); path != nullptr && *path != '\0') {
      std::ifstream in(path, std::ios::binary);
      if (!in) throw LoadError(path, "cannot read lexicon");
      std::ostringstream ss;
      ss << in.rdbuf();
      return parse(ss.str());
    }
    return parse(detail::kPosLexicon);
  }();
  return lex;
}

std::optional<std::string_view> PosLexicon::tag(std::string_view word) const {
  auto it = tags_.find(word);
  if (it == tags_.end()) return std::nullopt;
  return std::string_view(it->second);
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
  // Only ASCII punctuation is stripped; multi-byte letters stay intact.
  auto is_punct = [](char c) { return static_cast<unsigned char>(c) < 0x80 && std::ispunct(static_cast<unsigned char>(c)); };
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j])) ++j;
    std::string_view raw = text.substr(i, j - i);
    i = j;
    while (!raw.empty() && is_punct(raw.front())) raw.remove_prefix(1);
    while (!raw.empty() && is_punct(raw.back())) raw.remove_suffix(1);
    if (raw.empty()) continue;
    if (std::all_of(raw.begin(), raw.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; })) {
      continue;
    }
    std::string token(raw);
    std::transform(token.begin(), token.end(), token.begin(), [](unsigned char c) {
      return c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c);
    });
    out.push_back(std::move(token));
  }
  return out;
}

bool is_function_word(std::string_view token) {
  static const std::string_view kWords[] = {
      "a",     "an",    "and",   "are",   "as",    "at",    "be",    "been",  "being", "but",   "by",
      "did",   "do",    "does",  "doing", "for",   "from",  "had",   "has",   "have",  "having", "if",
      "in",    "into",  "is",    "it's",  "nor",   "not",   "of",    "on",    "or",    "so",    "than",
      "that",  "the",   "then",  "there", "to",    "too",   "was",   "were",  "what",  "when",  "where",
      "which", "while", "who",   "whom",  "whose", "why",   "with",  "yet",   "how",   "very",  "just",
      "only",  "also",  "s",     "t",     "'s",    "n't",   "like",  "any",   "every", "each",
  };
  return std::find(std::begin(kWords), std::end(kWords), token) != std::end(kWords);
}

std::optional<std::size_t> FrequencyReport::rank_of(std::string_view token) const {
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i].first == token) return i;
  }
  return std::nullopt;
}

FrequencyReport word_frequency(std::span<const std::string> corpus, const FrequencyFilter& filter,
                               const PosLexicon& lexicon) {
  std::unordered_map<std::string, std::int64_t> counts;
  for (const auto& doc : corpus) {
    for (auto& token : tokenize(doc)) {
      if (std::find(filter.stoplist.begin(), filter.stoplist.end(), token) != filter.stoplist.end()) continue;
      if (filter.drop_function_words && is_function_word(token)) continue;
      if (auto tag = lexicon.tag(token);
          tag && std::find(filter.tags.begin(), filter.tags.end(), *tag) != filter.tags.end()) {
        continue;
      }
      ++counts[token];
    }
  }
  FrequencyReport r;
  r.counts.assign(counts.begin(), counts.end());
  std::sort(r.counts.begin(), r.counts.end(),
            [](const auto& a, const auto& b) { return a.second > b.second || (a.second == b.second && a.first < b.first); });
  r.empty_after_filter = r.counts.empty();
  return r;
}

}  // namespace battle
