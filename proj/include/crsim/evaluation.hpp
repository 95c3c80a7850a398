#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "crsim/actions.hpp"
#include "crsim/capabilities.hpp"
#include "crsim/corpus.hpp"
#include "crsim/transcript.hpp"
#include "crsim/transition_model.hpp"

namespace crsim {

enum class DistributionProvenance { Real, Simulated };

// Probability over the fifteen user action kinds, smoothed to strictly
// positive support so divergences stay finite.
struct ActionDistribution {
    std::array<double, kUserActionCount> p{};
    DistributionProvenance provenance = DistributionProvenance::Simulated;
};

ActionDistribution distribution_from_transcripts(std::span<const DialogueTranscript> transcripts,
                                                 double alpha = kDefaultSmoothingAlpha);
ActionDistribution distribution_from_corpus(const AnnotatedDialogueCorpus& corpus,
                                            double alpha = kDefaultSmoothingAlpha);

// Mean user-turn count.
double avg_turns(std::span<const DialogueTranscript> transcripts);

// Total user acts over total acts; counts annotated actions, not turns.
double user_act_ratio(std::span<const DialogueTranscript> transcripts);

// Directed Kullback-Leibler divergence, natural log. Supports must have
// equal size and strictly positive entries.
double kl(std::span<const double> p, std::span<const double> q);
double kl(const ActionDistribution& p, const ActionDistribution& q);

// Symmetrized divergence (D(P||Q) + D(Q||P)) / 2.
double ds_kl(std::span<const double> p, std::span<const double> q);
double ds_kl(const ActionDistribution& p, const ActionDistribution& q);

// User turns after collapsing consecutive Repeat pairs left to right; a
// turn counts as Repeat when its first action is Navigate.Repeat.
int collapsed_user_turns(const DialogueTranscript& transcript);

// max{0, Full - Cost * T} with Full = 4 points per declared capability and
// unit cost per collapsed user turn. Cost and the per-capability points
// are parameters so rescaling both together can be checked to preserve
// orderings.
double reward(const DialogueTranscript& transcript, const CapabilitySet& capabilities,
              double cost = 1.0, double points_per_capability = kPointsPerCapability);
double mean_reward(std::span<const DialogueTranscript> transcripts,
                   const CapabilitySet& capabilities, double cost = 1.0);

// Fraction of agent turns flagged goal-satisfied, pooled over transcripts.
double success_rate(std::span<const DialogueTranscript> transcripts);

struct ScoredAgent {
    std::string name;
    double value = 0.0;
};

// Descending by value; agents within tie_epsilon land in one tie group.
std::vector<std::vector<std::string>> rank_agents(std::vector<ScoredAgent> scores,
                                                  double tie_epsilon = 1e-6);

struct MetricsRow {
    std::string agent;
    std::string simulator;
    double avg_turns = 0.0;
    double user_act_ratio = 0.0;
    double ds_kl = 0.0;
    double reward_mean = 0.0;
    double success_rate = 0.0;
    std::size_t dialogues = 0;
    std::size_t agent_errors = 0;
};

struct MetricsReport {
    std::vector<MetricsRow> rows;

    std::string to_json_string() const;
    // Human-readable tables: conversation characteristics plus per-metric
    // agent orderings.
    std::string to_table() const;
};

struct TranscriptSet {
    std::string agent;
    std::string simulator;
    CapabilitySet capabilities;
    std::vector<DialogueTranscript> transcripts;
};

MetricsReport build_report(const std::vector<TranscriptSet>& sets,
                           const ActionDistribution& reference,
                           double alpha = kDefaultSmoothingAlpha);

}  // namespace crsim
