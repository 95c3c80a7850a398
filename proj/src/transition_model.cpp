#include "crsim/transition_model.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "crsim/errors.hpp"

namespace crsim {

using nlohmann::json;

std::string_view label(InteractionModelKind kind) {
    return kind == InteractionModelKind::Cir6 ? "CIR6" : "QRFA";
}

InteractionModelKind parse_interaction_model_kind(std::string_view text) {
    if (text == "CIR6") return InteractionModelKind::Cir6;
    if (text == "QRFA") return InteractionModelKind::Qrfa;
    throw ParseError("unknown interaction model kind: " + std::string(text));
}

namespace {

// Smoothed row over an arbitrary support size. Zero-observation rows with
// smoothing off use the uniform convention.
template <typename Counts>
std::vector<double> smooth_row(const Counts& counts, std::size_t support, double alpha) {
    std::vector<double> row(support, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < support; ++i) total += static_cast<double>(counts[i]);
    if (total == 0.0 && alpha == 0.0) {
        std::fill(row.begin(), row.end(), 1.0 / static_cast<double>(support));
        return row;
    }
    const double denom = total + alpha * static_cast<double>(support);
    for (std::size_t i = 0; i < support; ++i) {
        row[i] = (static_cast<double>(counts[i]) + alpha) / denom;
    }
    return row;
}

}  // namespace

std::vector<double> TransitionModel::cir6_row(Cir6Main from) const {
    return smooth_row(cir6_bigrams[index_of(from)], kCir6MainCount, alpha);
}

std::vector<double> TransitionModel::fine_row_main(Cir6Main main) const {
    const auto& members = cir6_members(main);
    std::vector<std::uint64_t> counts(members.size());
    for (std::size_t i = 0; i < members.size(); ++i) {
        counts[i] = fine_within_main[index_of(main)][index_of(members[i])];
    }
    return smooth_row(counts, members.size(), alpha);
}

std::vector<double> TransitionModel::agent_row(QrfaClass user_class) const {
    std::size_t row = user_class == QrfaClass::Query ? 0 : 1;
    return smooth_row(agent_given_class[row], kAgentActionCount, alpha);
}

std::array<double, 2> TransitionModel::class_row(AgentActionKind b) const {
    auto row = smooth_row(class_given_agent[index_of(b)], 2, alpha);
    return {row[0], row[1]};
}

std::vector<double> TransitionModel::fine_row_class(QrfaClass cls) const {
    const auto& members = qrfa_members(cls);
    std::size_t row = cls == QrfaClass::Query ? 0 : 1;
    std::vector<std::uint64_t> counts(members.size());
    for (std::size_t i = 0; i < members.size(); ++i) {
        counts[i] = fine_within_class[row][index_of(members[i])];
    }
    return smooth_row(counts, members.size(), alpha);
}

std::vector<double> TransitionModel::replacement_row(AgentActionKind b) const {
    return smooth_row(replacement[index_of(b)], kUserActionCount, alpha);
}

std::vector<double> TransitionModel::start_distribution() const {
    return smooth_row(start_counts, kUserActionCount, alpha);
}

std::map<int, double> TransitionModel::length_distribution() const {
    std::map<int, double> dist;
    double total = 0.0;
    for (const auto& [len, count] : length_counts) total += static_cast<double>(count);
    if (total == 0.0) throw EstimationError("model has no observed dialogue lengths");
    for (const auto& [len, count] : length_counts) {
        dist[len] = static_cast<double>(count) / total;
    }
    return dist;
}

int TransitionModel::sample_length(Rng& rng) const {
    if (length_counts.empty()) throw EstimationError("model has no observed dialogue lengths");
    std::vector<int> lengths;
    std::vector<double> weights;
    for (const auto& [len, count] : length_counts) {
        lengths.push_back(len);
        weights.push_back(static_cast<double>(count));
    }
    return lengths[rng.next_categorical(weights)];
}

UserActionKind TransitionModel::sample_start(Rng& rng) const {
    auto dist = start_distribution();
    // Complete never starts a usable agenda walk; Suggest has no CIR6 state.
    dist[index_of(UserActionKind::NavigateComplete)] = 0.0;
    if (kind == InteractionModelKind::Cir6) {
        dist[index_of(UserActionKind::Suggest)] = 0.0;
    }
    double mass = std::accumulate(dist.begin(), dist.end(), 0.0);
    if (mass <= 0.0) {
        for (std::size_t i = 0; i < dist.size(); ++i) {
            UserActionKind k = kAllUserActions[i];
            bool excluded = k == UserActionKind::NavigateComplete ||
                            (kind == InteractionModelKind::Cir6 && k == UserActionKind::Suggest);
            dist[i] = excluded ? 0.0 : 1.0;
        }
    }
    return kAllUserActions[rng.next_categorical(dist)];
}

UserActionKind TransitionModel::sample_fine_within_main(Cir6Main main, Rng& rng) const {
    const auto& members = cir6_members(main);
    auto row = fine_row_main(main);
    return members[rng.next_categorical(row)];
}

UserActionKind TransitionModel::sample_fine_within_class(QrfaClass cls, Rng& rng) const {
    const auto& members = qrfa_members(cls);
    auto row = fine_row_class(cls);
    return members[rng.next_categorical(row)];
}

std::optional<Cir6Main> TransitionModel::sample_cir6_next_main(Cir6Main from, Rng& rng,
                                                               bool exclude_complete) const {
    if (from == Cir6Main::Complete) return std::nullopt;
    if (!diagram) throw EstimationError("CIR6 sampling requires a state diagram");
    auto row = cir6_row(from);
    std::vector<double> masked(kCir6MainCount, 0.0);
    double mass = 0.0;
    for (Cir6Main to : kAllCir6Mains) {
        if (!diagram->allowed(from, to)) continue;
        if (exclude_complete && to == Cir6Main::Complete) continue;
        masked[index_of(to)] = row[index_of(to)];
        mass += row[index_of(to)];
    }
    if (mass <= 0.0) {
        // All trained mass fell on masked-out successors: uniform over the
        // diagram-allowed ones.
        bool any = false;
        for (Cir6Main to : kAllCir6Mains) {
            if (!diagram->allowed(from, to)) continue;
            if (exclude_complete && to == Cir6Main::Complete) continue;
            masked[index_of(to)] = 1.0;
            any = true;
        }
        if (!any) return std::nullopt;  // only Complete remains reachable
    }
    return kAllCir6Mains[rng.next_categorical(masked)];
}

UserActionKind TransitionModel::sample_qrfa_next(UserActionKind current,
                                                 std::optional<AgentActionKind> observed_agent,
                                                 Rng& rng, bool exclude_complete) const {
    AgentActionKind b;
    if (observed_agent) {
        b = *observed_agent;
    } else {
        auto row = agent_row(qrfa_class(current));
        b = kAllAgentActions[rng.next_categorical(row)];
    }
    auto classes = class_row(b);
    QrfaClass next_class = rng.next_categorical(std::span<const double>(classes)) == 0
                               ? QrfaClass::Query
                               : QrfaClass::Feedback;
    const auto& members = qrfa_members(next_class);
    auto fine = fine_row_class(next_class);
    if (exclude_complete) {
        double mass = 0.0;
        for (std::size_t i = 0; i < members.size(); ++i) {
            if (members[i] == UserActionKind::NavigateComplete) fine[i] = 0.0;
            mass += fine[i];
        }
        if (mass <= 0.0) {
            for (std::size_t i = 0; i < members.size(); ++i) {
                fine[i] = members[i] == UserActionKind::NavigateComplete ? 0.0 : 1.0;
            }
        }
    }
    return members[rng.next_categorical(fine)];
}

UserActionKind TransitionModel::sample_replacement(AgentActionKind b, Rng& rng) const {
    auto row = replacement_row(b);
    return kAllUserActions[rng.next_categorical(row)];
}

namespace {

struct FlatAction {
    Speaker side;
    std::size_t user_index;   // valid when side == User
    std::size_t agent_index;  // valid when side == Agent
};

std::vector<FlatAction> flatten(const CorpusDialogue& dialogue) {
    std::vector<FlatAction> stream;
    for (const auto& turn : dialogue.turns) {
        for (const auto& a : turn.actions) {
            if (turn.speaker == Speaker::User) {
                stream.push_back({Speaker::User, index_of(parse_user_action(a)), 0});
            } else {
                stream.push_back({Speaker::Agent, 0, index_of(parse_agent_action(a))});
            }
        }
    }
    return stream;
}

// Shared counting pass: start actions, lengths, replacements, and the
// model-specific transition counts.
void count_corpus(TransitionModel& model, const AnnotatedDialogueCorpus& corpus) {
    if (corpus.empty()) throw EstimationError("cannot estimate from an empty corpus");
    bool any_user_action = false;
    for (const auto& dialogue : corpus.dialogues) {
        auto stream = flatten(dialogue);

        std::vector<std::size_t> user_positions;
        for (std::size_t i = 0; i < stream.size(); ++i) {
            if (stream[i].side == Speaker::User) user_positions.push_back(i);
        }
        if (user_positions.empty()) continue;
        any_user_action = true;

        std::size_t first_user = stream[user_positions.front()].user_index;
        model.start_counts[first_user] += 1;
        model.length_counts[static_cast<int>(user_positions.size())] += 1;

        for (std::size_t p = 0; p < user_positions.size(); ++p) {
            UserActionKind a = kAllUserActions[stream[user_positions[p]].user_index];
            if (auto main = cir6_main(a)) {
                model.fine_within_main[index_of(*main)][index_of(a)] += 1;
            }
            QrfaClass cls = qrfa_class(a);
            model.fine_within_class[cls == QrfaClass::Query ? 0 : 1][index_of(a)] += 1;
        }

        for (std::size_t p = 0; p + 1 < user_positions.size(); ++p) {
            std::size_t i = user_positions[p];
            std::size_t j = user_positions[p + 1];
            UserActionKind a = kAllUserActions[stream[i].user_index];
            UserActionKind a_next = kAllUserActions[stream[j].user_index];

            // CIR6: main-level bigram over consecutive user actions; agent
            // actions in between are skipped. Suggest has no main state.
            auto from = cir6_main(a);
            auto to = cir6_main(a_next);
            if (from && to) {
                model.cir6_bigrams[index_of(*from)][index_of(*to)] += 1;
            }

            // QRFA triple and the replacement distribution both use the
            // agent action closest to the follow-up user action.
            std::optional<std::size_t> last_agent;
            for (std::size_t k = i + 1; k < j; ++k) {
                if (stream[k].side == Speaker::Agent) last_agent = stream[k].agent_index;
            }
            if (last_agent) {
                QrfaClass from_class = qrfa_class(a);
                QrfaClass to_class = qrfa_class(a_next);
                model.agent_given_class[from_class == QrfaClass::Query ? 0 : 1][*last_agent] += 1;
                model.class_given_agent[*last_agent][to_class == QrfaClass::Query ? 0 : 1] += 1;
                model.replacement[*last_agent][index_of(a_next)] += 1;
            }
        }
    }
    if (!any_user_action) {
        throw EstimationError("corpus contains no user actions to estimate from");
    }
}

}  // namespace

TransitionModel estimate_cir6(const AnnotatedDialogueCorpus& corpus,
                              const Cir6StateDiagram& diagram, double alpha) {
    TransitionModel model;
    model.kind = InteractionModelKind::Cir6;
    model.alpha = alpha;
    model.diagram = diagram;
    count_corpus(model, corpus);
    return model;
}

TransitionModel estimate_qrfa(const AnnotatedDialogueCorpus& corpus, double alpha) {
    TransitionModel model;
    model.kind = InteractionModelKind::Qrfa;
    model.alpha = alpha;
    count_corpus(model, corpus);
    return model;
}

Agenda sample_initial_agenda(const TransitionModel& model, Rng& rng) {
    int n = model.sample_length(rng);
    std::vector<UserAction> temporal;
    if (n > 1) {
        UserActionKind current = model.sample_start(rng);
        temporal.push_back(UserAction{current, {}});
        for (int k = 1; k < n - 1; ++k) {
            if (model.kind == InteractionModelKind::Cir6) {
                auto main = cir6_main(current);
                if (!main) break;  // unreachable with Suggest masked at start
                auto next_main = model.sample_cir6_next_main(*main, rng, true);
                if (!next_main) break;  // dead end: close the agenda early
                current = model.sample_fine_within_main(*next_main, rng);
            } else {
                current = model.sample_qrfa_next(current, std::nullopt, rng, true);
            }
            temporal.push_back(UserAction{current, {}});
        }
    }
    temporal.push_back(UserAction{UserActionKind::NavigateComplete, {}});
    // The first intended action must sit on top of the stack, the Complete
    // that ends the dialogue at the bottom.
    std::vector<UserAction> bottom_to_top(temporal.rbegin(), temporal.rend());
    return Agenda(std::move(bottom_to_top));
}

namespace {

template <typename Array2D>
json grid_to_json(const Array2D& grid) {
    json rows = json::array();
    for (const auto& row : grid) {
        json cols = json::array();
        for (auto v : row) cols.push_back(v);
        rows.push_back(cols);
    }
    return rows;
}

template <typename Array2D>
void grid_from_json(const json& j, Array2D& grid) {
    for (std::size_t r = 0; r < grid.size(); ++r) {
        for (std::size_t c = 0; c < grid[r].size(); ++c) {
            grid[r][c] = j.at(r).at(c).get<std::uint64_t>();
        }
    }
}

}  // namespace

std::string TransitionModel::to_json_string() const {
    json j;
    j["kind"] = std::string(label(kind));
    j["alpha"] = alpha;
    j["cir6_bigrams"] = grid_to_json(cir6_bigrams);
    j["fine_within_main"] = grid_to_json(fine_within_main);
    j["agent_given_class"] = grid_to_json(agent_given_class);
    j["class_given_agent"] = grid_to_json(class_given_agent);
    j["fine_within_class"] = grid_to_json(fine_within_class);
    j["replacement"] = grid_to_json(replacement);
    json starts = json::array();
    for (auto v : start_counts) starts.push_back(v);
    j["start_counts"] = starts;
    json lengths = json::array();
    for (const auto& [len, count] : length_counts) {
        lengths.push_back({{"length", len}, {"count", count}});
    }
    j["length_counts"] = lengths;
    if (diagram) {
        json edges = json::array();
        for (const auto& [from, to] : diagram->edges()) {
            edges.push_back({{"from", std::string(label(from))}, {"to", std::string(label(to))}});
        }
        j["diagram"] = edges;
    }
    return j.dump(2);
}

TransitionModel TransitionModel::from_json_string(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad model artifact: ") + e.what());
    }
    TransitionModel model;
    model.kind = parse_interaction_model_kind(j.at("kind").get<std::string>());
    model.alpha = j.at("alpha").get<double>();
    grid_from_json(j.at("cir6_bigrams"), model.cir6_bigrams);
    grid_from_json(j.at("fine_within_main"), model.fine_within_main);
    grid_from_json(j.at("agent_given_class"), model.agent_given_class);
    grid_from_json(j.at("class_given_agent"), model.class_given_agent);
    grid_from_json(j.at("fine_within_class"), model.fine_within_class);
    grid_from_json(j.at("replacement"), model.replacement);
    for (std::size_t i = 0; i < kUserActionCount; ++i) {
        model.start_counts[i] = j.at("start_counts").at(i).get<std::uint64_t>();
    }
    for (const auto& entry : j.at("length_counts")) {
        model.length_counts[entry.at("length").get<int>()] =
            entry.at("count").get<std::uint64_t>();
    }
    if (j.contains("diagram")) {
        Cir6StateDiagram diagram;
        for (const auto& edge : j.at("diagram")) {
            diagram.add_edge(parse_cir6_main(edge.at("from").get<std::string>()),
                             parse_cir6_main(edge.at("to").get<std::string>()));
        }
        diagram.validate();
        model.diagram = diagram;
    }
    return model;
}

void TransitionModel::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write model artifact: " + path.string());
    out << to_json_string() << "\n";
}

TransitionModel TransitionModel::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open model artifact: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return from_json_string(buffer.str());
}

}  // namespace crsim
