#pragma once

#include <optional>
#include <string>

#include "crsim/actions.hpp"
#include "crsim/agenda.hpp"
#include "crsim/cir6_diagram.hpp"
#include "crsim/compatibility.hpp"
#include "crsim/corpus.hpp"
#include "crsim/goal.hpp"
#include "crsim/preference.hpp"
#include "crsim/rng.hpp"
#include "crsim/transition_model.hpp"

namespace crsim {

// Per-dialogue mutable state, confined to one simulation worker.
struct SimulationState {
    Agenda agenda;
    Goal goal;
    std::optional<UserAction> last_user_action;
    std::optional<AgentAction> last_agent_action;
    int turn = 0;
};

// Goal-update indicator: the goal counts as accomplished when the agent's
// response is an appropriate reaction to the user action.
bool goal_accomplished(const CompatibilityTable& table, UserActionKind user_action,
                       AgentActionKind agent_action);

// Adjacency lookup at the main level; fine actions are mapped to their
// main group first. Suggest has no CIR6 state and is rejected.
bool cir6_transition_allowed(const Cir6StateDiagram& diagram, UserActionKind from,
                             UserActionKind to);

enum class AgendaUpdate { Pulled, Replaced, Terminated };

// Pull on an accomplished goal, replace-top otherwise. The replacement is
// drawn from P(replacement | last agent action); when no agent action was
// recognized this turn, the top is resampled from the model's transitions
// off the previous user action instead.
AgendaUpdate update_agenda(SimulationState& state, const TransitionModel& model, bool delta,
                           Rng& rng);

// Masked transition step of the six-state model; nullopt once the current
// action is Complete.
std::optional<UserActionKind> next_user_action_cir6(const SimulationState& state,
                                                    const TransitionModel& model, Rng& rng);

// Two-step coarse transition conditioned on the observed agent action
// (sampled when none has been observed yet), then a fine action within
// the drawn class.
UserActionKind next_user_action_qrfa(const SimulationState& state, const TransitionModel& model,
                                     Rng& rng);

enum class EarlyStopOutcome { Cleared, Unchanged, AlreadyConsumed };

// Empties the agenda down to a single Complete once a recommended, not yet
// consumed item is predicted likeable from the graph. Recommendations of
// already consumed items leave the agenda alone and are answered as such.
EarlyStopOutcome apply_pkg_early_stop(SimulationState& state, const PersonalKnowledgeGraph& pkg,
                                      const ItemCatalog& catalog, const std::string& item_id);

}  // namespace crsim
