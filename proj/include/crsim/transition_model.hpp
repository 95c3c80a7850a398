#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "crsim/actions.hpp"
#include "crsim/agenda.hpp"
#include "crsim/cir6_diagram.hpp"
#include "crsim/corpus.hpp"
#include "crsim/rng.hpp"

namespace crsim {

enum class InteractionModelKind { Cir6, Qrfa };

std::string_view label(InteractionModelKind kind);
InteractionModelKind parse_interaction_model_kind(std::string_view text);

inline constexpr double kDefaultSmoothingAlpha = 0.1;

// Empirical action-transition model estimated from an annotated corpus.
// Exact integer counts are the persisted state; smoothed conditional
// probabilities are derived on demand. With alpha = 0 smoothing is off and
// rows with no observations fall back to a uniform convention.
class TransitionModel {
public:
    InteractionModelKind kind = InteractionModelKind::Cir6;
    double alpha = kDefaultSmoothingAlpha;

    // CIR6 counts: bigrams of consecutive user actions at the main level,
    // and fine-action frequencies within each main group.
    std::array<std::array<std::uint64_t, kCir6MainCount>, kCir6MainCount> cir6_bigrams{};
    std::array<std::array<std::uint64_t, kUserActionCount>, kCir6MainCount> fine_within_main{};

    // QRFA counts from (user, agent, next-user) triples: agent action given
    // the user coarse class, next user coarse class given the agent action,
    // and fine-action frequencies within Query / Feedback.
    std::array<std::array<std::uint64_t, kAgentActionCount>, 2> agent_given_class{};
    std::array<std::array<std::uint64_t, 2>, kAgentActionCount> class_given_agent{};
    std::array<std::array<std::uint64_t, kUserActionCount>, 2> fine_within_class{};

    // Replacement counts: user action immediately following each agent action.
    std::array<std::array<std::uint64_t, kUserActionCount>, kAgentActionCount> replacement{};

    // Dialogue-initial user action and per-dialogue user-action counts.
    std::array<std::uint64_t, kUserActionCount> start_counts{};
    std::map<int, std::uint64_t> length_counts;

    // Present for CIR6 models; connectivity mask used when sampling.
    std::optional<Cir6StateDiagram> diagram;

    bool operator==(const TransitionModel&) const = default;

    // --- smoothed conditional rows ---

    // P(next main | main), over the six mains.
    std::vector<double> cir6_row(Cir6Main from) const;
    // P(fine | main), parallel to cir6_members(main).
    std::vector<double> fine_row_main(Cir6Main main) const;
    // P(agent action | user coarse class), over the twelve agent kinds.
    std::vector<double> agent_row(QrfaClass user_class) const;
    // P(next user coarse class | agent action), {Query, Feedback}.
    std::array<double, 2> class_row(AgentActionKind b) const;
    // P(fine | coarse class), parallel to qrfa_members(cls).
    std::vector<double> fine_row_class(QrfaClass cls) const;
    // P(replacement user action | agent action), over the fifteen user kinds.
    std::vector<double> replacement_row(AgentActionKind b) const;
    // Dialogue-initial action distribution, over the fifteen user kinds.
    std::vector<double> start_distribution() const;
    // Normalized per-dialogue user-action-count distribution.
    std::map<int, double> length_distribution() const;

    // --- sampling ---

    int sample_length(Rng& rng) const;
    UserActionKind sample_start(Rng& rng) const;
    UserActionKind sample_fine_within_main(Cir6Main main, Rng& rng) const;
    UserActionKind sample_fine_within_class(QrfaClass cls, Rng& rng) const;
    // Masked CIR6 step; nullopt at Complete. exclude_complete removes the
    // Complete successor, for positions before the end of an agenda walk.
    std::optional<Cir6Main> sample_cir6_next_main(Cir6Main from, Rng& rng,
                                                  bool exclude_complete) const;
    // Two-step QRFA walk; samples an intermediate agent action when none
    // is supplied.
    UserActionKind sample_qrfa_next(UserActionKind current,
                                    std::optional<AgentActionKind> observed_agent, Rng& rng,
                                    bool exclude_complete) const;
    UserActionKind sample_replacement(AgentActionKind b, Rng& rng) const;

    // --- persistence ---

    std::string to_json_string() const;
    static TransitionModel from_json_string(const std::string& text);
    void save(const std::filesystem::path& path) const;
    static TransitionModel load(const std::filesystem::path& path);
};

// Counts consecutive-user-action bigrams at the main level; agent turns do
// not break user bigrams.
TransitionModel estimate_cir6(const AnnotatedDialogueCorpus& corpus,
                              const Cir6StateDiagram& diagram,
                              double alpha = kDefaultSmoothingAlpha);

// Two-step estimation through agent actions from (a, b, a') triples.
TransitionModel estimate_qrfa(const AnnotatedDialogueCorpus& corpus,
                              double alpha = kDefaultSmoothingAlpha);

// Agenda of sampled length whose content is a masked walk of the model's
// transitions; the action executed last is always Complete.
Agenda sample_initial_agenda(const TransitionModel& model, Rng& rng);

}  // namespace crsim
