#include "battle/soldiers.hpp"

#include <algorithm>
#include <set>

namespace battle {

std::vector<WoundTransition> sample_wounds(std::int64_t losses, std::int64_t remaining_before,
                                           std::span<SoldierState*> roster, double severity, int tick, Rng& rng) {
  std::vector<WoundTransition> out;
  if (losses <= 0) return out;
  const double p = remaining_before <= 0
                       ? 1.0
                       : std::min(1.0, severity * static_cast<double>(losses) / static_cast<double>(remaining_before));
  if (p <= 0.0) return out;
  for (SoldierState* s : roster) {
    if (s->wound == WoundState::dead) continue;
    if (!(rng.uniform01() < p)) continue;
    const WoundState from = s->wound;
    WoundState to = WoundState::dead;
    if (from == WoundState::unharmed && rng.uniform01() < 0.8) to = WoundState::wounded;
    s->wound = to;
    if (to == WoundState::dead) s->death_tick = tick;
    if (to == WoundState::wounded) s->wound_tick = tick;
    out.push_back({s->profile.id, from, to});
  }
  return out;
}

namespace {

enum class Change { none, newly_wounded, still_wounded, killed };

std::string opening(const std::optional<ActionCategory>& category, const std::string& name,
                    const std::string& occupation) {
  const std::string trade = occupation.empty() ? "common man" : occupation;
  if (!category) {
    return name + " waited in the ranks with nothing to do but listen and brood on death.";
  }
  switch (*category) {
    case ActionCategory::Reposition:
      return name + ", once a " + trade + ", marched with the company to new ground, every step taken in the shadow of death.";
    case ActionCategory::Preparation:
      return name + " readied arms beside the others; the " + trade + " in them knew the work that comes before death.";
    case ActionCategory::Attack:
      return name + " went forward in the assault, a " + trade + " turned killer, trading death for death.";
    case ActionCategory::Defense:
      return name + " spent the quarter hour digging and fortifying the line, spade in hand like any " + trade +
             ", raising earth against death.";
    case ActionCategory::Observation:
      return name + " watched the enemy from cover, counting banners and guessing where death would come from.";
    case ActionCategory::Retreat:
      return name + " fell back with the company, glad to put distance between them and death.";
  }
  return {};
}

std::string_view base_emotion(const std::optional<ActionCategory>& category) {
  if (!category) return "exhaustion";
  switch (*category) {
    case ActionCategory::Reposition: return "exhaustion";
    case ActionCategory::Preparation: return "resolve";
    case ActionCategory::Attack: return "anger";
    case ActionCategory::Defense: return "resolve";
    case ActionCategory::Observation: return "resolve";
    case ActionCategory::Retreat: return "relief";
  }
  return "resolve";
}

}  // namespace

ExperienceEpisode record_experience(const SoldierState& soldier, const TickContext& ctx) {
  const SoldierProfile& p = soldier.profile;
  Change change = Change::none;
  if (soldier.wound == WoundState::dead && ctx.wound_before != WoundState::dead) {
    change = Change::killed;
  } else if (soldier.wound == WoundState::wounded) {
    change = ctx.wound_before == WoundState::unharmed ? Change::newly_wounded : Change::still_wounded;
  }

  std::set<std::string_view> tags{base_emotion(ctx.category)};
  std::string text = opening(ctx.category, p.name, p.occupation);
  if (ctx.under_attack) {
    tags.insert("fear");
    text += " The enemy came on with " + (ctx.enemy_action.empty() ? std::string("a sudden rush") : ctx.enemy_action) +
            ", and the men around " + p.name + " cried out.";
  }
  switch (change) {
    case Change::newly_wounded:
      tags.insert("fear");
      text += " A blow opened a wound in their side; the pain was sharp and the blood ran freely.";
      break;
    case Change::still_wounded:
      tags.insert("exhaustion");
      text += " The old wound throbbed and slowed every movement.";
      break;
    case Change::killed:
      tags.insert("fear");
      tags.insert("grief");
      text += " " + p.name + " fell there and did not rise; death came quickly.";
      break;
    case Change::none: break;
  }
  if (ctx.momentum > 0) {
    tags.insert("hope");
    text += " Word spread that the enemy was losing more men than we were, and hope returned.";
  } else if (ctx.momentum < 0) {
    tags.insert("grief");
    text += " Too many friends lay dead, and the grief of it weighed on everyone.";
  } else if (ctx.losses_witnessed == 0 && !ctx.under_attack) {
    text += " The ground stayed quiet for now.";
  }

  ExperienceEpisode e;
  e.soldier = p.id;
  e.side = p.side;
  e.tick = ctx.tick;
  e.agent = ctx.agent ? ctx.agent->str() : std::string();
  e.action = ctx.action;
  e.location = ctx.location;
  e.losses_witnessed = ctx.losses_witnessed;
  e.wound_state = soldier.wound;
  for (std::string_view emotion : kEmotionLexicon) {
    if (tags.contains(emotion)) e.emotions.emplace_back(emotion);
  }
  e.text = std::move(text);
  return e;
}

}  // namespace battle
