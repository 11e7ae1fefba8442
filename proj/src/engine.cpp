#include "battle/engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "battle/errors.hpp"

namespace battle {

MoveResult apply_movement(Coordinate from, Coordinate target, double cap_units, const WorldMap& world,
                          bool bridging) {
  MoveResult r;
  const Coordinate goal = world.bounds().clamp(target);
  r.clamped = !(goal == target);
  const double len = distance(from, goal);
  r.to = from;
  if (len == 0.0 || cap_units <= 0.0) return r;

  // First pass: how far along the segment the agent may go before an impassable feature.
  double stop_t = 1.0;
  for (const auto& f : world.features()) {
    if (f.movement_factor != 0.0 || bridging || contains(f, from)) continue;
    const auto iv = inside_intervals(f, from, goal);
    if (!iv.empty()) stop_t = std::min(stop_t, std::max(0.0, iv.front().t0 - kSightEpsilon / len));
  }
  // Second pass: slowest terrain on the part of the path that can be walked.
  double factor = 1.0;
  for (const auto& f : world.features()) {
    if (f.movement_factor == 0.0 || f.movement_factor >= factor) continue;
    const auto iv = inside_intervals(f, from, goal);
    if (!iv.empty() && iv.front().t0 <= stop_t) factor = f.movement_factor;
  }
  const double budget = cap_units * factor;
  const double reachable = stop_t * len;
  const double travel = std::min(budget, reachable);
  r.blocked = stop_t < 1.0 && reachable <= budget;
  if (travel >= len) {
    r.to = goal;
    r.distance = len;
  } else {
    const double t = travel / len;
    r.to = {from.x + (goal.x - from.x) * t, from.y + (goal.y - from.y) * t};
    r.distance = travel;
  }
  return r;
}

struct Engine::Pending {
  ArmyId id;
  bool existing = true;
  PolicyDecision decision;
  std::vector<Order> orders;
  std::vector<std::string> structure;
  std::optional<Coordinate> spawn_target;
  std::optional<MovementRecord> movement;
  bool bridging = false;
  std::int64_t original = 0;
  std::int64_t losses = 0;
  bool under_attack = false;
  std::string enemy_action;
};

Engine::Engine(const Scenario& scenario, std::array<const Policy*, 2> policies, RunOptions options,
               std::unique_ptr<CasualtyEvaluator> evaluator)
    : scenario_(scenario),
      policies_(policies),
      config_(scenario.engine),
      streams_(RunStreams::from_seed(options.seed)),
      ids_(streams_.ids),
      evaluator_(std::move(evaluator)) {
  if (options.max_ticks) config_.max_ticks = *options.max_ticks;
  if (options.sight_range_m) config_.sight_range_m = *options.sight_range_m;
  if (options.convergence_window) config_.convergence_window = *options.convergence_window;
  if (options.convergence_epsilon) config_.convergence_epsilon = *options.convergence_epsilon;
  if (config_.max_ticks < 1) throw std::invalid_argument("max_ticks must be at least 1");
  if (config_.sight_range_m <= 0.0) throw std::invalid_argument("sight range must be positive");
  for (const Policy* p : policies_) {
    if (p == nullptr) throw std::invalid_argument("both sides need a policy");
  }
  if (!evaluator_) evaluator_ = std::make_unique<ModelEvaluator>(scenario.casualty);

  record_.scenario_id = scenario.id;
  record_.seed = options.seed;
  for (std::size_t i = 0; i < 2; ++i) {
    const SideConfig& side = scenario.sides[i];
    AgentState root = make_root_agent(side.profile);
    ids_.reserve(root.id());
    record_.policies.push_back(policies_[i]->name());
    record_.sides.push_back(side.name);
    record_.initial[side.name] = root.total();
    record_.casualties[side.name] = {0};
    agents_.emplace(root.id(), std::move(root));
  }
  for (const auto& profile : scenario.soldiers) {
    SoldierState s;
    s.profile = profile;
    s.assigned_agent = scenario.sides[side_index(profile.side)].profile.id;
    soldiers_.push_back(std::move(s));
  }
  snapshot();
}

std::size_t Engine::side_index(const std::string& side) const {
  return record_.sides.at(0) == side ? 0 : 1;
}

void Engine::event(std::string kind, const std::string& agent, std::string message) {
  record_.events.push_back({tick_, std::move(kind), agent, std::move(message)});
}

std::optional<ArmyId> Engine::resolve(const ArmyId& id) const {
  std::optional<ArmyId> cur;
  if (agents_.contains(id)) {
    cur = id;
  } else if (auto a = aliases_.find(id.str()); a != aliases_.end()) {
    cur = a->second;
  } else {
    return std::nullopt;
  }
  for (auto m = merged_into_.find(*cur); m != merged_into_.end(); m = merged_into_.find(*cur)) cur = m->second;
  return cur;
}

Observation Engine::observe(const ArmyId& id) const {
  return battle::observe(scenario_.map, agents_, id, config_.sight_range_m, tick_, current_action_,
                         last_observation_);
}

std::span<const TrajectoryEntry> Engine::history(const ArmyId& id) const {
  auto it = history_.find(id);
  if (it == history_.end()) return {};
  const auto& h = it->second;
  const std::size_t n = std::min<std::size_t>(h.size(), static_cast<std::size_t>(config_.trajectory_window));
  return {h.data() + (h.size() - n), n};
}

CombatantSnapshot Engine::combatant(const AgentState& a) const {
  CombatantSnapshot c;
  c.id = a.id();
  c.aliases = a.aliases;
  c.side = a.side();
  c.composition = a.composition;
  c.morale_score = a.morale_score;
  c.location = a.location;
  c.command_structure = a.profile.command_structure;
  c.fortified = a.fortified;
  for (const auto& fid : terrain_at(scenario_.map, a.location)) {
    c.terrain.push_back({fid, scenario_.map.find(fid)->kind});
  }
  return c;
}

void Engine::reassign_soldiers(const ArmyId& from) {
  // Walk up to the nearest active agent (the merge target or an ancestor).
  std::optional<ArmyId> to;
  if (auto m = merged_into_.find(from); m != merged_into_.end()) {
    to = resolve(m->second);
  } else {
    std::optional<ArmyId> cur = agents_.at(from).parent;
    while (cur) {
      const AgentState& a = agents_.at(*cur);
      if (a.active()) {
        to = cur;
        break;
      }
      if (auto m2 = merged_into_.find(*cur); m2 != merged_into_.end()) {
        to = resolve(m2->second);
        if (to && agents_.at(*to).active()) break;
        to.reset();
      }
      cur = a.parent;
    }
  }
  for (auto& s : soldiers_) {
    if (s.assigned_agent == from && s.wound != WoundState::dead) s.assigned_agent = to;
  }
}

void Engine::collect_decisions(std::vector<Pending>& pending) {
  std::map<ArmyId, Observation> observations;
  for (const auto& [id, a] : agents_) {
    if (!a.active()) continue;
    Pending p;
    p.id = id;
    p.original = a.total();
    Observation obs = observe(id);
    const Policy& policy = *policies_[side_index(a.side())];
    p.decision = policy.decide(obs, history(id));
    for (const auto& w : p.decision.warnings) event("warning", id.str(), w);

    for (Order order : p.decision.orders) {
      order.initiator = id;
      std::vector<std::string> v;
      if (order.recipient) {
        if (auto r = resolve(*order.recipient)) {
          order.recipient = r;
        } else {
          v.push_back("recipient " + order.recipient->str() + " does not exist");
        }
      }
      if (v.empty()) v = validate_order(order, scenario_.map, agents_);
      if (v.empty() && order.kind->offensive && order.recipient && !obs.knows(*order.recipient)) {
        v.push_back("recipient " + order.recipient->str() + " is neither visible nor reported");
      }
      if (!v.empty()) {
        std::string msg = std::string(order.kind ? order.kind->name : "order") + " dropped:";
        for (const auto& s : v) msg += " " + s + ";";
        msg.pop_back();
        event("violation", id.str(), msg);
        continue;
      }
      p.bridging = p.bridging || order.kind->name == "Build Bridge";
      p.orders.push_back(std::move(order));
    }
    observations.emplace(id, std::move(obs));
    pending.push_back(std::move(p));
  }
  for (const auto& p : pending) {
    if (std::any_of(p.orders.begin(), p.orders.end(),
                    [](const Order& o) { return o.kind->category == ActionCategory::Defense; })) {
      agents_.at(p.id).fortified = true;
    }
  }
  last_observation_ = std::move(observations);
}

void Engine::apply_forks(std::vector<Pending>& pending) {
  const std::size_t existing = pending.size();
  for (std::size_t i = 0; i < existing; ++i) {
    const std::vector<ForkDirective> directives = pending[i].decision.forks;
    if (directives.empty()) continue;
    const ArmyId parent_id = pending[i].id;
    std::vector<ForkRequest> requests;
    for (const auto& d : directives) {
      std::string mission = d.next_action;
      if (!d.remarks.empty()) mission += ": " + d.remarks;
      requests.push_back({d.troop_type, d.deployed, mission, d.target_position, d.target_agent_id});
    }
    ForkResult result;
    try {
      result = fork(agents_.at(parent_id), requests, ids_, tick_);
    } catch (const TopologyError& e) {
      event("violation", parent_id.str(), e.what());
      continue;
    }
    agents_.at(parent_id) = result.parent;
    for (std::size_t k = 0; k < result.children.size(); ++k) {
      AgentState& child = result.children[k];
      const ForkDirective& d = directives[k];
      if (d.agent_id) {
        auto proposed = ArmyId::parse(*d.agent_id);
        if (proposed && !agents_.contains(*proposed) && !aliases_.contains(*d.agent_id) && ids_.reserve(*proposed)) {
          child.profile.id = *proposed;
        } else {
          child.aliases.push_back(*d.agent_id);
          aliases_[*d.agent_id] = child.id();
          event("alias", child.id().str(), *d.agent_id + " re-keyed as " + child.id().str());
        }
      }
      const ArmyId cid = child.id();
      event("fork", parent_id.str(),
            cid.str() + " with " + std::to_string(d.deployed) + " " + d.troop_type.name() + " (" + d.next_action + ")");
      pending[i].structure.push_back("fork " + cid.str() + " " + std::to_string(d.deployed) + " " +
                                     d.troop_type.name());
      Pending cp;
      cp.id = cid;
      cp.existing = false;
      cp.original = child.total();
      cp.spawn_target = d.target_position;
      cp.structure.push_back("spawned from " + parent_id.str());
      pending.push_back(std::move(cp));
      agents_.emplace(cid, std::move(child));
    }
  }
}

void Engine::apply_merges(std::vector<Pending>& pending) {
  for (auto& p : pending) {
    if (!p.existing || !p.decision.merge_with) continue;
    const AgentState& a = agents_.at(p.id);
    auto target = resolve(*p.decision.merge_with);
    if (!target) {
      event("violation", p.id.str(), "merge target " + p.decision.merge_with->str() + " does not exist");
      continue;
    }
    if (!a.active()) continue;  // absorbed earlier this tick
    MergeResult m;
    try {
      m = merge(a, agents_.at(*target), config_.merge_radius);
    } catch (const TopologyError& e) {
      event("violation", p.id.str(), e.what());
      continue;
    }
    const ArmyId keeper = m.merged.id();
    const ArmyId gone = m.absorbed.id();
    agents_.at(keeper) = std::move(m.merged);
    agents_.at(gone) = std::move(m.absorbed);
    merged_into_[gone] = keeper;
    event("merge", keeper.str(), gone.str() + " merged into " + keeper.str());
    for (auto& q : pending) {
      if (q.id == keeper) q.structure.push_back("merge absorbed " + gone.str());
      if (q.id == gone) q.structure.push_back("merge into " + keeper.str());
    }
    reassign_soldiers(gone);
  }
}

void Engine::apply_moves(std::vector<Pending>& pending) {
  std::vector<Pending*> order;
  for (auto& p : pending) order.push_back(&p);
  std::sort(order.begin(), order.end(), [](const Pending* a, const Pending* b) { return a->id < b->id; });
  for (Pending* p : order) {
    AgentState& a = agents_.at(p->id);
    if (!a.active()) continue;
    std::optional<Coordinate> target;
    bool retreating = p->decision.retreat;
    for (const auto& o : p->orders) {
      if (!o.kind->moves) continue;
      target = o.location;
      retreating = retreating || o.kind->category == ActionCategory::Retreat;
    }
    const SideConfig& side = scenario_.sides[side_index(a.side())];
    if (p->decision.retreat && !target) target = edge_point(scenario_.map.bounds(), side.home_edge, a.location);
    if (!target && p->spawn_target) target = p->spawn_target;
    if (!target) continue;

    const double cap = meters_to_units(config_.speeds.cap_m(a.composition));
    const MoveResult mv = apply_movement(a.location, *target, cap, scenario_.map, p->bridging);
    if (mv.clamped) event("warning", p->id.str(), "movement target outside the map; clamped to bounds");
    p->movement = MovementRecord{a.location, mv.to, *target, mv.distance, mv.clamped, mv.blocked};
    a.location = mv.to;
    if (mv.distance > 0.0) a.fortified = false;
    if (retreating && scenario_.map.bounds().on_edge(a.location, 1e-6)) {
      a = prune(a, PruneReason::retreated_off_map);
      p->structure.push_back("prune retreated_off_map");
      event("prune", p->id.str(), "retreated off the map");
      reassign_soldiers(p->id);
    }
  }
}

void Engine::apply_engagements(std::vector<Pending>& pending) {
  std::vector<Pending*> order;
  for (auto& p : pending) order.push_back(&p);
  std::sort(order.begin(), order.end(), [](const Pending* a, const Pending* b) { return a->id < b->id; });
  auto pending_of = [&](const ArmyId& id) -> Pending* {
    for (Pending* q : order) {
      if (q->id == id) return q;
    }
    return nullptr;
  };
  for (Pending* p : order) {
    for (const auto& o : p->orders) {
      if (!o.kind->offensive) continue;
      AgentState& att = agents_.at(p->id);
      const std::string name(o.kind->name);
      if (!att.active()) {
        event("warning", p->id.str(), name + " not carried out: the initiator is no longer active");
        break;
      }
      auto target = resolve(*o.recipient);
      if (!target || !agents_.at(*target).active()) {
        event("warning", p->id.str(), name + " not carried out: " + o.recipient->str() + " is no longer active");
        continue;
      }
      AgentState& def = agents_.at(*target);
      EngagementContext ctx;
      ctx.tick = tick_;
      ctx.attacker = combatant(att);
      ctx.defender = combatant(def);
      ctx.kind = o.kind;
      ctx.description = o.description;
      ctx.distance = distance(att.location, def.location);
      for (const auto& f : scenario_.map.features()) {
        if (f.kind == FeatureKind::river && !inside_intervals(f, att.location, def.location).empty()) {
          ctx.crosses_river = true;
        }
      }
      std::vector<std::string> warnings;
      const EngagementOutcome out = evaluator_->evaluate(ctx, streams_.casualty, warnings);
      for (const auto& w : warnings) event("warning", p->id.str(), w);

      const std::int64_t al = att.composition.apply_losses(out.attacker_losses).total();
      const std::int64_t dl = def.composition.apply_losses(out.defender_losses).total();
      att.cumulative_losses += al;
      def.cumulative_losses += dl;
      p->losses += al;
      if (Pending* q = pending_of(def.id())) {
        q->losses += dl;
        q->under_attack = true;
        q->enemy_action = name;
      }
      const std::size_t as = side_index(att.side());
      const std::size_t ds = side_index(def.side());
      side_losses_[as] += al;
      side_losses_[ds] += dl;
      tick_side_losses_[as] += al;
      tick_side_losses_[ds] += dl;
      record_.engagements.push_back({tick_, att.id(), def.id(), name, o.description, ctx.distance, al, dl,
                                     out.rationale});
    }
  }
}

void Engine::update_morale() {
  const CasualtyConfig& c = scenario_.casualty;
  for (std::size_t s = 0; s < 2; ++s) {
    const auto lost = static_cast<double>(tick_side_losses_[s]);
    if (lost <= 0.0 || lost < c.morale_loss_threshold * static_cast<double>(tick_start_strength_[s])) continue;
    for (auto& [id, a] : agents_) {
      if (a.active() && side_index(a.side()) == s) a.morale_score = std::max(0.0, a.morale_score - c.morale_decay);
    }
  }
}

void Engine::update_soldiers(std::vector<Pending>& pending) {
  std::vector<WoundState> before;
  for (const auto& s : soldiers_) before.push_back(s.wound);

  std::vector<Pending*> order;
  for (auto& p : pending) order.push_back(&p);
  std::sort(order.begin(), order.end(), [](const Pending* a, const Pending* b) { return a->id < b->id; });
  for (Pending* p : order) {
    if (p->losses <= 0) continue;
    std::vector<SoldierState*> roster;
    for (auto& s : soldiers_) {
      if (s.assigned_agent == p->id) roster.push_back(&s);
    }
    if (roster.empty()) continue;
    const AgentState& a = agents_.at(p->id);
    sample_wounds(p->losses, a.total() + p->losses, roster, config_.wound_severity, tick_, streams_.soldiers);
  }

  for (std::size_t i = 0; i < soldiers_.size(); ++i) {
    const SoldierState& s = soldiers_[i];
    if (before[i] == WoundState::dead) continue;
    TickContext ctx;
    ctx.tick = tick_;
    ctx.wound_before = before[i];
    const std::size_t side = side_index(s.profile.side);
    const std::int64_t own = tick_side_losses_[side];
    const std::int64_t enemy = tick_side_losses_[1 - side];
    ctx.momentum = enemy > own ? 1 : (enemy < own ? -1 : 0);
    if (s.assigned_agent) {
      ctx.agent = s.assigned_agent;
      const AgentState& a = agents_.at(*s.assigned_agent);
      ctx.location = a.location;
      for (Pending* p : order) {
        if (p->id != *s.assigned_agent) continue;
        if (!p->orders.empty()) {
          ctx.action = std::string(p->orders.front().kind->name);
          ctx.category = p->orders.front().kind->category;
        }
        ctx.losses_witnessed = p->losses;
        ctx.under_attack = p->under_attack;
        ctx.enemy_action = p->enemy_action;
      }
    }
    record_.episodes.push_back(record_experience(s, ctx));
  }
}

void Engine::prune_destroyed(std::vector<Pending>& pending) {
  for (auto& p : pending) {
    AgentState& a = agents_.at(p.id);
    if (!a.active() || a.total() > 0) continue;
    a = prune(a, PruneReason::destroyed);
    p.structure.push_back("prune destroyed");
    event("prune", p.id.str(), "destroyed");
    reassign_soldiers(p.id);
  }
}

void Engine::write_trajectory(std::vector<Pending>& pending) {
  std::sort(pending.begin(), pending.end(), [](const Pending& a, const Pending& b) { return a.id < b.id; });
  for (auto& p : pending) {
    const AgentState& a = agents_.at(p.id);
    TrajectoryEntry e;
    e.tick = tick_;
    e.agent = p.id;
    e.side = a.side();
    for (const auto& o : p.orders) {
      e.orders.push_back({std::string(o.kind->name), std::string(to_string(o.kind->category)), o.location,
                          o.recipient, o.description});
    }
    e.structure = p.structure;
    e.movement = p.movement;
    e.location = a.location;
    e.original = p.original;
    e.losses = p.losses;
    e.remaining = a.total();
    if (!p.orders.empty()) {
      e.action_description = std::string(p.orders.front().kind->name) + " " + p.orders.front().description;
      current_action_[p.id] = std::string(p.orders.front().kind->name);
    } else if (!p.existing) {
      e.action_description = a.mission;
      current_action_[p.id] = a.mission.substr(0, a.mission.find(':'));
    } else {
      e.action_description = "Hold";
      current_action_[p.id] = "Hold";
    }
    history_[p.id].push_back(e);
    record_.trajectory.push_back(std::move(e));
  }
}

void Engine::snapshot() {
  Frame f;
  f.tick = tick_;
  for (const auto& [id, a] : agents_) {
    AgentFrame af;
    af.id = id;
    af.side = a.side();
    af.status = a.status;
    af.location = a.location;
    af.composition = a.composition;
    af.initial_total = a.initial_total;
    af.cumulative_losses = a.cumulative_losses;
    af.received_via_merge = a.received_via_merge;
    af.forked_out = a.forked_out;
    af.morale_score = a.morale_score;
    af.fortified = a.fortified;
    af.parent = a.parent;
    af.created_tick = a.created_tick;
    af.aliases = a.aliases;
    af.mission = a.mission;
    f.agents.push_back(std::move(af));
  }
  record_.frames.push_back(std::move(f));
  if (tick_ > 0) {
    for (std::size_t s = 0; s < 2; ++s) record_.casualties[record_.sides[s]].push_back(side_losses_[s]);
  }
  record_.ticks = tick_;
}

void Engine::check_termination() {
  std::array<int, 2> active{0, 0};
  for (const auto& [id, a] : agents_) {
    if (a.active()) ++active[side_index(a.side())];
  }
  if (active[0] == 0 || active[1] == 0) {
    record_.termination = Termination::annihilation;
    return;
  }
  const int w = config_.convergence_window;
  if (tick_ >= w) {
    bool still = true;
    for (const auto& side : record_.sides) {
      const auto& series = record_.casualties.at(side);
      const auto n = series.size();
      if (std::llabs(series[n - 1] - series[n - 1 - static_cast<std::size_t>(w)]) > config_.convergence_epsilon) {
        still = false;
      }
    }
    if (still) {
      record_.termination = Termination::converged;
      return;
    }
  }
  if (tick_ >= config_.max_ticks) record_.termination = Termination::max_ticks;
}

void Engine::step() {
  if (terminated()) return;
  tick_side_losses_ = {0, 0};
  tick_start_strength_ = {0, 0};
  for (const auto& [id, a] : agents_) {
    if (a.active()) tick_start_strength_[side_index(a.side())] += a.total();
  }
  std::vector<Pending> pending;
  collect_decisions(pending);
  apply_forks(pending);
  apply_merges(pending);
  apply_moves(pending);
  apply_engagements(pending);
  update_morale();
  update_soldiers(pending);
  prune_destroyed(pending);
  write_trajectory(pending);
  ++tick_;
  snapshot();
  check_termination();
  if (terminated()) {
    for (const auto& s : soldiers_) {
      record_.soldiers.push_back({s.profile.id, s.profile.side, s.profile.name, s.wound, s.death_tick,
                                  s.assigned_agent ? s.assigned_agent->str() : std::string()});
    }
  }
}

const RunRecord& Engine::run() {
  while (!terminated()) step();
  return record_;
}

RunRecord run(const Scenario& scenario, std::array<const Policy*, 2> policies, RunOptions options,
              std::unique_ptr<CasualtyEvaluator> evaluator) {
  Engine engine(scenario, policies, options, std::move(evaluator));
  return engine.run();
}

std::array<std::unique_ptr<Policy>, 2> baseline_policies(const Scenario& scenario) {
  return {std::make_unique<BaselinePolicy>(BaselineSettings::for_side(scenario, 0)),
          std::make_unique<BaselinePolicy>(BaselineSettings::for_side(scenario, 1))};
}

std::map<std::string, SeriesStats> mean_variance_series(std::span<const RunRecord> records) {
  if (records.empty()) throw std::invalid_argument("mean_variance_series: no records");
  for (const auto& r : records) {
    if (r.scenario_id != records.front().scenario_id) {
      throw std::invalid_argument("mean_variance_series: records come from different scenarios (" +
                                  records.front().scenario_id + ", " + r.scenario_id + ")");
    }
  }
  std::map<std::string, SeriesStats> out;
  for (const auto& side : records.front().sides) {
    std::size_t len = 0;
    for (const auto& r : records) len = std::max(len, r.casualties.at(side).size());
    SeriesStats st;
    st.variance_defined = records.size() >= 2;
    const auto n = static_cast<double>(records.size());
    for (std::size_t t = 0; t < len; ++t) {
      double sum = 0.0;
      std::vector<double> xs;
      for (const auto& r : records) {
        const auto& s = r.casualties.at(side);
        const double x = s.empty() ? 0.0 : static_cast<double>(t < s.size() ? s[t] : s.back());
        xs.push_back(x);
        sum += x;
      }
      const double mean = sum / n;
      double ss = 0.0;
      for (double x : xs) ss += (x - mean) * (x - mean);
      st.mean.push_back(mean);
      st.variance.push_back(st.variance_defined ? ss / (n - 1.0) : 0.0);
    }
    out.emplace(side, std::move(st));
  }
  return out;
}

}  // namespace battle
