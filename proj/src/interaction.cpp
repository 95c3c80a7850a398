#include "crsim/interaction.hpp"

#include "crsim/errors.hpp"

namespace crsim {

bool goal_accomplished(const CompatibilityTable& table, UserActionKind user_action,
                       AgentActionKind agent_action) {
    return table.compatible(user_action, agent_action);
}

bool cir6_transition_allowed(const Cir6StateDiagram& diagram, UserActionKind from,
                             UserActionKind to) {
    auto from_main = cir6_main(from);
    auto to_main = cir6_main(to);
    if (!from_main || !to_main) {
        throw TaxonomyError("action outside the six-state model: " +
                            std::string(label(!from_main ? from : to)));
    }
    return diagram.allowed(*from_main, *to_main);
}

AgendaUpdate update_agenda(SimulationState& state, const TransitionModel& model, bool delta,
                           Rng& rng) {
    if (state.agenda.empty()) return AgendaUpdate::Terminated;
    if (delta) {
        state.agenda.pull();
        return state.agenda.empty() ? AgendaUpdate::Terminated : AgendaUpdate::Pulled;
    }
    UserActionKind replacement_kind;
    if (state.last_agent_action) {
        replacement_kind = model.sample_replacement(state.last_agent_action->kind, rng);
    } else if (state.last_user_action) {
        // No recognized agent action to condition on; resample off the
        // previous user action through the model's own transition walk.
        if (model.kind == InteractionModelKind::Cir6) {
            auto main = cir6_main(state.last_user_action->kind);
            auto next_main =
                main ? model.sample_cir6_next_main(*main, rng, false) : std::nullopt;
            replacement_kind = next_main ? model.sample_fine_within_main(*next_main, rng)
                                         : state.agenda.top().kind;
        } else {
            replacement_kind =
                model.sample_qrfa_next(state.last_user_action->kind, std::nullopt, rng, false);
        }
    } else {
        replacement_kind = state.agenda.top().kind;
    }
    state.agenda.replace_top(UserAction{replacement_kind, {}});
    return AgendaUpdate::Replaced;
}

std::optional<UserActionKind> next_user_action_cir6(const SimulationState& state,
                                                    const TransitionModel& model, Rng& rng) {
    if (state.agenda.empty()) throw ArgumentError("agenda is empty");
    UserActionKind current =
        state.last_user_action ? state.last_user_action->kind : state.agenda.top().kind;
    auto main = cir6_main(current);
    if (!main) {
        throw TaxonomyError("action outside the six-state model: " +
                            std::string(label(current)));
    }
    auto next_main = model.sample_cir6_next_main(*main, rng, false);
    if (!next_main) return std::nullopt;
    return model.sample_fine_within_main(*next_main, rng);
}

UserActionKind next_user_action_qrfa(const SimulationState& state, const TransitionModel& model,
                                     Rng& rng) {
    if (state.agenda.empty()) throw ArgumentError("agenda is empty");
    UserActionKind current =
        state.last_user_action ? state.last_user_action->kind : state.agenda.top().kind;
    std::optional<AgentActionKind> observed;
    if (state.last_agent_action) observed = state.last_agent_action->kind;
    return model.sample_qrfa_next(current, observed, rng, false);
}

EarlyStopOutcome apply_pkg_early_stop(SimulationState& state, const PersonalKnowledgeGraph& pkg,
                                      const ItemCatalog& catalog, const std::string& item_id) {
    if (answer_consumed(pkg.profile, item_id)) return EarlyStopOutcome::AlreadyConsumed;
    const CatalogItem* item = catalog.find(item_id);
    if (!item) return EarlyStopOutcome::Unchanged;
    if (predict_item_sentiment(pkg, item->attributes) <= 0) return EarlyStopOutcome::Unchanged;
    if (!state.agenda.empty()) {
        state.agenda.clear_to_complete();
    }
    return EarlyStopOutcome::Cleared;
}

}  // namespace crsim
