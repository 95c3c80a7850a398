#include "crsim/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "crsim/errors.hpp"

namespace crsim {

using nlohmann::json;

namespace {

ActionDistribution smooth_counts(const std::array<std::uint64_t, kUserActionCount>& counts,
                                 double alpha, DistributionProvenance provenance) {
    double total = 0.0;
    for (auto c : counts) total += static_cast<double>(c);
    if (total == 0.0 && alpha == 0.0) {
        throw ArgumentError("action distribution needs observations or smoothing");
    }
    ActionDistribution dist;
    dist.provenance = provenance;
    double denom = total + alpha * static_cast<double>(kUserActionCount);
    for (std::size_t i = 0; i < kUserActionCount; ++i) {
        dist.p[i] = (static_cast<double>(counts[i]) + alpha) / denom;
    }
    return dist;
}

}  // namespace

ActionDistribution distribution_from_transcripts(std::span<const DialogueTranscript> transcripts,
                                                 double alpha) {
    std::array<std::uint64_t, kUserActionCount> counts{};
    for (const auto& t : transcripts) {
        for (UserActionKind kind : t.user_actions()) counts[index_of(kind)] += 1;
    }
    return smooth_counts(counts, alpha, DistributionProvenance::Simulated);
}

ActionDistribution distribution_from_corpus(const AnnotatedDialogueCorpus& corpus, double alpha) {
    std::array<std::uint64_t, kUserActionCount> counts{};
    for (const auto& dialogue : corpus.dialogues) {
        for (UserActionKind kind : AnnotatedDialogueCorpus::user_action_stream(dialogue)) {
            counts[index_of(kind)] += 1;
        }
    }
    return smooth_counts(counts, alpha, DistributionProvenance::Real);
}

double avg_turns(std::span<const DialogueTranscript> transcripts) {
    if (transcripts.empty()) throw ArgumentError("avg_turns over an empty transcript set");
    double total = 0.0;
    for (const auto& t : transcripts) total += static_cast<double>(t.user_turn_count());
    return total / static_cast<double>(transcripts.size());
}

double user_act_ratio(std::span<const DialogueTranscript> transcripts) {
    std::size_t user_acts = 0;
    std::size_t agent_acts = 0;
    for (const auto& t : transcripts) {
        for (const auto& turn : t.turns) {
            if (turn.speaker == Speaker::User) {
                user_acts += turn.actions.size();
            } else {
                agent_acts += turn.actions.size();
            }
        }
    }
    if (user_acts + agent_acts == 0) throw ArgumentError("no acts recorded");
    return static_cast<double>(user_acts) / static_cast<double>(user_acts + agent_acts);
}

double kl(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw ArgumentError("KL divergence over mismatched supports");
    if (p.empty()) throw ArgumentError("KL divergence over empty distributions");
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!(p[i] > 0.0) || !(q[i] > 0.0)) {
            throw ArgumentError("KL divergence needs strictly positive probabilities");
        }
        sum += p[i] * std::log(p[i] / q[i]);
    }
    return sum;
}

double kl(const ActionDistribution& p, const ActionDistribution& q) {
    return kl(std::span<const double>(p.p), std::span<const double>(q.p));
}

double ds_kl(std::span<const double> p, std::span<const double> q) {
    return (kl(p, q) + kl(q, p)) / 2.0;
}

double ds_kl(const ActionDistribution& p, const ActionDistribution& q) {
    return ds_kl(std::span<const double>(p.p), std::span<const double>(q.p));
}

int collapsed_user_turns(const DialogueTranscript& transcript) {
    std::vector<bool> is_repeat;
    for (const auto& turn : transcript.turns) {
        if (turn.speaker != Speaker::User) continue;
        bool repeat = !turn.actions.empty() &&
                      try_parse_user_action(turn.actions.front()) == UserActionKind::NavigateRepeat;
        is_repeat.push_back(repeat);
    }
    int turns = 0;
    for (std::size_t i = 0; i < is_repeat.size();) {
        if (is_repeat[i] && i + 1 < is_repeat.size() && is_repeat[i + 1]) {
            turns += 1;  // the pair counts once
            i += 2;
        } else {
            turns += 1;
            i += 1;
        }
    }
    return turns;
}

double reward(const DialogueTranscript& transcript, const CapabilitySet& capabilities,
              double cost, double points_per_capability) {
    double full = points_per_capability * static_cast<double>(capabilities.size());
    double t = static_cast<double>(collapsed_user_turns(transcript));
    return std::max(0.0, full - cost * t);
}

double mean_reward(std::span<const DialogueTranscript> transcripts,
                   const CapabilitySet& capabilities, double cost) {
    if (transcripts.empty()) throw ArgumentError("mean_reward over an empty transcript set");
    double total = 0.0;
    for (const auto& t : transcripts) total += reward(t, capabilities, cost);
    return total / static_cast<double>(transcripts.size());
}

double success_rate(std::span<const DialogueTranscript> transcripts) {
    std::size_t agent_turns = 0;
    std::size_t satisfied = 0;
    for (const auto& t : transcripts) {
        for (const auto& turn : t.turns) {
            if (turn.speaker != Speaker::Agent) continue;
            ++agent_turns;
            if (turn.goal_satisfied.value_or(false)) ++satisfied;
        }
    }
    if (agent_turns == 0) throw ArgumentError("success_rate without agent turns");
    return static_cast<double>(satisfied) / static_cast<double>(agent_turns);
}

std::vector<std::vector<std::string>> rank_agents(std::vector<ScoredAgent> scores,
                                                  double tie_epsilon) {
    if (scores.size() < 2) throw ArgumentError("ranking needs at least two agents");
    std::sort(scores.begin(), scores.end(), [](const ScoredAgent& a, const ScoredAgent& b) {
        if (a.value != b.value) return a.value > b.value;
        return a.name < b.name;
    });
    std::vector<std::vector<std::string>> groups;
    double group_head = 0.0;
    for (const auto& s : scores) {
        if (!groups.empty() && std::abs(group_head - s.value) <= tie_epsilon) {
            groups.back().push_back(s.name);
            continue;
        }
        groups.push_back({s.name});
        group_head = s.value;
    }
    for (auto& group : groups) std::sort(group.begin(), group.end());
    return groups;
}

namespace {

std::string format_ordering(const std::vector<std::vector<std::string>>& groups) {
    std::ostringstream out;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        if (g) out << " > ";
        for (std::size_t i = 0; i < groups[g].size(); ++i) {
            if (i) out << " = ";
            out << groups[g][i];
        }
    }
    return out.str();
}

}  // namespace

std::string MetricsReport::to_json_string() const {
    json rows_json = json::array();
    for (const auto& row : rows) {
        json j;
        j["agent"] = row.agent;
        j["simulator"] = row.simulator;
        j["avg_turns"] = row.avg_turns;
        j["user_act_ratio"] = row.user_act_ratio;
        j["ds_kl"] = row.ds_kl;
        j["reward"] = row.reward_mean;
        j["success_rate"] = row.success_rate;
        j["dialogues"] = row.dialogues;
        j["agent_errors"] = row.agent_errors;
        rows_json.push_back(j);
    }
    json j;
    j["rows"] = rows_json;
    return j.dump(2);
}

std::string MetricsReport::to_table() const {
    std::ostringstream out;
    out << std::fixed << std::setprecision(3);
    out << "Characteristics (per simulator and agent)\n";
    out << std::left << std::setw(14) << "Simulator" << std::setw(10) << "Agent"
        << std::right << std::setw(10) << "AvgTurns" << std::setw(14) << "UserActRatio"
        << std::setw(9) << "DS-KL" << std::setw(9) << "Reward" << std::setw(13)
        << "SuccessRate" << std::setw(8) << "Errors" << "\n";
    for (const auto& row : rows) {
        out << std::left << std::setw(14) << row.simulator << std::setw(10) << row.agent
            << std::right << std::setw(10) << row.avg_turns << std::setw(14)
            << row.user_act_ratio << std::setw(9) << row.ds_kl << std::setw(9)
            << row.reward_mean << std::setw(13) << row.success_rate << std::setw(8)
            << row.agent_errors << "\n";
    }

    // Per-simulator agent orderings for the two end-to-end metrics. Rows
    // without usable dialogues have no defined ordering position.
    std::map<std::string, std::vector<const MetricsRow*>> by_sim;
    for (const auto& row : rows) {
        if (!std::isnan(row.reward_mean)) by_sim[row.simulator].push_back(&row);
    }
    for (const auto& [simulator, sim_rows] : by_sim) {
        if (sim_rows.size() < 2) continue;
        std::vector<ScoredAgent> by_reward;
        std::vector<ScoredAgent> by_success;
        for (const auto* row : sim_rows) {
            by_reward.push_back({row->agent, row->reward_mean});
            by_success.push_back({row->agent, row->success_rate});
        }
        out << "\n" << simulator << " ordering by Reward:       "
            << format_ordering(rank_agents(by_reward));
        out << "\n" << simulator << " ordering by Success Rate: "
            << format_ordering(rank_agents(by_success)) << "\n";
    }
    return out.str();
}

MetricsReport build_report(const std::vector<TranscriptSet>& sets,
                           const ActionDistribution& reference, double alpha) {
    MetricsReport report;
    for (const auto& set : sets) {
        if (set.transcripts.empty()) throw ArgumentError("empty transcript set for " + set.agent);
        MetricsRow row;
        row.agent = set.agent;
        row.simulator = set.simulator;
        row.dialogues = set.transcripts.size();
        // Dialogues that died on the transport carry no usable turns; they
        // are counted but excluded from the per-turn metrics.
        std::vector<DialogueTranscript> usable;
        for (const auto& t : set.transcripts) {
            if (t.status == TerminalStatus::AgentError) {
                ++row.agent_errors;
            } else {
                usable.push_back(t);
            }
        }
        if (usable.empty()) {
            double nan = std::numeric_limits<double>::quiet_NaN();
            row.avg_turns = nan;
            row.user_act_ratio = nan;
            row.ds_kl = nan;
            row.reward_mean = nan;
            row.success_rate = nan;
        } else {
            row.avg_turns = avg_turns(usable);
            row.user_act_ratio = user_act_ratio(usable);
            row.ds_kl = ds_kl(distribution_from_transcripts(usable, alpha), reference);
            row.reward_mean = mean_reward(usable, set.capabilities);
            row.success_rate = success_rate(usable);
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

}  // namespace crsim
