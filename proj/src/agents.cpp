#include "battle/agents.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <stdexcept>

#include "battle/errors.hpp"

namespace battle {

namespace {

std::string normalize_token(std::string_view text) {
  std::string s;
  for (char c : text) {
    const unsigned char u = static_cast<unsigned char>(c);
    if (c == ' ' || c == '-' || c == '_') {
      if (!s.empty() && s.back() != '_') s.push_back('_');
    } else {
      s.push_back(static_cast<char>(std::tolower(u)));
    }
  }
  while (!s.empty() && s.back() == '_') s.pop_back();
  return s;
}

struct TroopName {
  const char* canonical;
  TroopType::Kind kind;
};

constexpr TroopName kTroopNames[] = {
    {"longbowman", TroopType::Kind::longbowman},       {"man_at_arms", TroopType::Kind::man_at_arms},
    {"light_cavalry", TroopType::Kind::light_cavalry}, {"heavy_cavalry", TroopType::Kind::heavy_cavalry},
    {"spearman", TroopType::Kind::spearman},           {"hobelar", TroopType::Kind::hobelar},
    {"crossbowman", TroopType::Kind::crossbowman},     {"infantry", TroopType::Kind::infantry},
    {"archer", TroopType::Kind::archer},
};

}  // namespace

// --- ArmyId --------------------------------------------------------------

ArmyId::ArmyId(std::string text) : value_(std::move(text)) {
  if (!is_valid(value_)) throw std::invalid_argument("malformed army id: " + value_);
}

bool ArmyId::is_valid(std::string_view text) {
  if (text.size() != 13 || text.substr(0, 5) != "ARMY-") return false;
  return std::all_of(text.begin() + 5, text.end(),
                     [](char c) { return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'); });
}

std::optional<ArmyId> ArmyId::parse(std::string_view text) {
  if (!is_valid(text)) return std::nullopt;
  return ArmyId(std::string(text));
}

ArmyId IdIssuer::issue() {
  for (;;) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "ARMY-%08x", static_cast<unsigned>(rng_.next_u64() >> 32));
    ArmyId id{std::string(buf)};
    if (issued_.insert(id).second) return id;
  }
}

bool IdIssuer::reserve(const ArmyId& id) { return issued_.insert(id).second; }

// --- TroopType -----------------------------------------------------------

std::optional<TroopType> TroopType::parse(std::string_view text) {
  if (text.substr(0, 6) == "other:") {
    if (text.size() == 6) return std::nullopt;
    return TroopType::other(std::string(text.substr(6)));
  }
  const std::string s = normalize_token(text);
  for (const auto& n : kTroopNames) {
    if (s == n.canonical) return TroopType(n.kind);
  }
  // Plural and prose forms.
  static const std::pair<const char*, Kind> aliases[] = {
      {"longbowmen", Kind::longbowman},   {"longbow", Kind::longbowman},       {"men_at_arms", Kind::man_at_arms},
      {"spearmen", Kind::spearman},       {"hobelars", Kind::hobelar},         {"crossbowmen", Kind::crossbowman},
      {"archers", Kind::archer},          {"knights", Kind::heavy_cavalry},    {"knight", Kind::heavy_cavalry},
      {"heavy_knights", Kind::heavy_cavalry}, {"light_horse", Kind::light_cavalry},
  };
  for (const auto& [alias, kind] : aliases) {
    if (s == alias) return TroopType(kind);
  }
  return std::nullopt;
}

std::string TroopType::name() const {
  if (kind_ == Kind::other) return "other:" + label_;
  for (const auto& n : kTroopNames) {
    if (n.kind == kind_) return n.canonical;
  }
  return "infantry";
}

bool TroopType::is_cavalry() const {
  return kind_ == Kind::light_cavalry || kind_ == Kind::heavy_cavalry || kind_ == Kind::hobelar;
}

// --- ForceComposition ----------------------------------------------------

ForceComposition::ForceComposition(std::initializer_list<std::pair<const TroopType, std::int64_t>> counts) {
  for (const auto& [t, n] : counts) add(t, n);
}

std::int64_t ForceComposition::total() const {
  std::int64_t sum = 0;
  for (const auto& [t, n] : counts_) sum += n;
  return sum;
}

std::int64_t ForceComposition::count(const TroopType& type) const {
  auto it = counts_.find(type);
  return it == counts_.end() ? 0 : it->second;
}

void ForceComposition::add(const TroopType& type, std::int64_t n) {
  if (n < 0) throw std::invalid_argument("negative troop count for " + type.name());
  if (n == 0) return;
  counts_[type] += n;
}

void ForceComposition::remove(const TroopType& type, std::int64_t n) {
  if (n < 0) throw std::invalid_argument("negative troop removal for " + type.name());
  if (n > count(type)) throw std::invalid_argument("removing more " + type.name() + " than available");
  if (n == 0) return;
  counts_[type] -= n;
  prune_zeros();
}

ForceComposition ForceComposition::apply_losses(std::int64_t losses) {
  const std::int64_t tot = total();
  losses = std::clamp<std::int64_t>(losses, 0, tot);
  ForceComposition removed;
  if (losses == 0) return removed;

  struct Share {
    TroopType type;
    std::int64_t floor;
    std::int64_t remainder;  // numerator of the fractional part, over tot
  };
  std::vector<Share> shares;
  std::int64_t assigned = 0;
  for (const auto& [t, n] : counts_) {
    // losses * n / tot without overflow for realistic army sizes.
    const __int128 num = static_cast<__int128>(losses) * n;
    const auto fl = static_cast<std::int64_t>(num / tot);
    const auto rem = static_cast<std::int64_t>(num % tot);
    shares.push_back({t, fl, rem});
    assigned += fl;
  }
  std::vector<std::size_t> order(shares.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return shares[a].remainder > shares[b].remainder; });
  for (std::size_t k = 0; assigned < losses; ++k) {
    ++shares[order[k % order.size()]].floor;
    ++assigned;
  }
  for (const auto& s : shares) {
    const std::int64_t take = std::min(s.floor, count(s.type));
    if (take > 0) {
      counts_[s.type] -= take;
      removed.add(s.type, take);
    }
  }
  prune_zeros();
  return removed;
}

ForceComposition& ForceComposition::operator+=(const ForceComposition& other) {
  for (const auto& [t, n] : other.counts_) add(t, n);
  return *this;
}

void ForceComposition::prune_zeros() {
  std::erase_if(counts_, [](const auto& kv) { return kv.second == 0; });
}

// --- status --------------------------------------------------------------

std::string_view to_string(AgentStatus status) {
  switch (status) {
    case AgentStatus::active: return "active";
    case AgentStatus::retreated: return "retreated";
    case AgentStatus::destroyed: return "destroyed";
    case AgentStatus::merged: return "merged";
    case AgentStatus::pruned: return "pruned";
  }
  return "active";
}

std::optional<AgentStatus> parse_agent_status(std::string_view text) {
  for (AgentStatus s : {AgentStatus::active, AgentStatus::retreated, AgentStatus::destroyed, AgentStatus::merged,
                        AgentStatus::pruned}) {
    if (text == to_string(s)) return s;
  }
  return std::nullopt;
}

bool valid_transition(AgentStatus from, AgentStatus to) {
  return from == AgentStatus::active && to != AgentStatus::active;
}

bool AgentState::ledger_balanced() const {
  return total() + cumulative_losses + forked_out == initial_total + received_via_merge;
}

AgentState make_root_agent(const CommanderProfile& profile) {
  AgentState a;
  a.profile = profile;
  a.mission = profile.mission;
  a.location = profile.location;
  a.composition = profile.composition;
  a.initial_total = profile.composition.total();
  a.morale_score = profile.morale_score;
  return a;
}

// --- topology ------------------------------------------------------------

ForkResult fork(const AgentState& parent, std::span<const ForkRequest> requests, IdIssuer& ids, int tick) {
  if (!parent.active()) throw TopologyError("fork: parent " + parent.id().str() + " is not active");
  std::map<TroopType, std::int64_t> wanted;
  for (const auto& r : requests) {
    if (r.count <= 0) throw TopologyError("fork: request for " + r.troop_type.name() + " must be positive");
    wanted[r.troop_type] += r.count;
  }
  for (const auto& [type, n] : wanted) {
    if (n > parent.composition.count(type)) {
      throw TopologyError("fork: over-allocation of " + type.name() + " (requested " + std::to_string(n) +
                          ", available " + std::to_string(parent.composition.count(type)) + ")");
    }
  }

  ForkResult result{parent, {}};
  for (const auto& r : requests) {
    AgentState child;
    child.profile = parent.profile;
    child.profile.id = ids.issue();
    child.profile.mission = r.mission;
    child.profile.location = parent.location;
    child.composition.add(r.troop_type, r.count);
    child.profile.composition = child.composition;
    child.mission = r.mission;
    child.location = parent.location;
    child.initial_total = r.count;
    child.parent = parent.id();
    child.created_tick = tick;
    child.morale_score = parent.morale_score;
    result.parent.composition.remove(r.troop_type, r.count);
    result.parent.forked_out += r.count;
    result.children.push_back(std::move(child));
  }
  return result;
}

MergeResult merge(const AgentState& a, const AgentState& b, double merge_radius) {
  if (a.id() == b.id()) throw TopologyError("merge: an agent cannot merge with itself");
  if (!a.active() || !b.active()) throw TopologyError("merge: both agents must be active");
  if (a.side() != b.side()) {
    throw TopologyError("merge: cross-side merge of " + a.id().str() + " (" + a.side() + ") and " + b.id().str() +
                        " (" + b.side() + ")");
  }
  const double d = distance(a.location, b.location);
  if (d > merge_radius) {
    throw TopologyError("merge: agents are " + std::to_string(d) + " units apart, beyond merge radius " +
                        std::to_string(merge_radius));
  }
  const bool a_keeps = a.total() > b.total() || (a.total() == b.total() && a.id() < b.id());
  const AgentState& keeper = a_keeps ? a : b;
  const AgentState& other = a_keeps ? b : a;

  MergeResult r{keeper, other};
  const double wk = static_cast<double>(keeper.total());
  const double wo = static_cast<double>(other.total());
  if (wk + wo > 0.0) r.merged.morale_score = (keeper.morale_score * wk + other.morale_score * wo) / (wk + wo);
  r.merged.composition += other.composition;
  r.merged.cumulative_losses += other.cumulative_losses;
  r.merged.received_via_merge += other.initial_total + other.received_via_merge;
  r.merged.forked_out += other.forked_out;
  r.merged.fortified = false;
  r.absorbed.status = AgentStatus::merged;
  return r;
}

AgentState prune(const AgentState& agent, PruneReason reason) {
  if (!agent.active()) {
    throw TopologyError("prune: " + agent.id().str() + " is already " + std::string(to_string(agent.status)));
  }
  AgentState out = agent;
  switch (reason) {
    case PruneReason::destroyed: out.status = AgentStatus::destroyed; break;
    case PruneReason::retreated_off_map: out.status = AgentStatus::retreated; break;
    case PruneReason::removed: out.status = AgentStatus::pruned; break;
  }
  return out;
}

std::string_view to_string(WoundState state) {
  switch (state) {
    case WoundState::unharmed: return "unharmed";
    case WoundState::wounded: return "wounded";
    case WoundState::dead: return "dead";
  }
  return "unharmed";
}

std::optional<WoundState> parse_wound_state(std::string_view text) {
  for (WoundState s : {WoundState::unharmed, WoundState::wounded, WoundState::dead}) {
    if (text == to_string(s)) return s;
  }
  return std::nullopt;
}

}  // namespace battle
