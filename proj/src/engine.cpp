#include "crsim/engine.hpp"

#include <algorithm>
#include <atomic>
#include <set>
#include <thread>

#include "crsim/errors.hpp"
#include "crsim/wire.hpp"

namespace crsim {

std::string_view label(PreferenceModelKind kind) {
    return kind == PreferenceModelKind::Single ? "Single" : "PKG";
}

std::string SimulatorConfig::name() const {
    return std::string(label(interaction)) + "-" + std::string(label(preference));
}

void SimulatorConfig::validate() const {
    if (interaction == InteractionModelKind::Qrfa && preference == PreferenceModelKind::Pkg) {
        throw ConfigError("QRFA-PKG is not a supported simulator configuration");
    }
    if (turn_cap < 1) throw ConfigError("turn cap must be positive");
    if (similarity_floor < 0.0 || similarity_floor > 1.0) {
        throw ConfigError("similarity floor must lie in [0, 1]");
    }
}

SimulatorConfig parse_simulator_config(std::string_view name) {
    SimulatorConfig config;
    if (name == "QRFA-Single") {
        config.interaction = InteractionModelKind::Qrfa;
        config.preference = PreferenceModelKind::Single;
    } else if (name == "CIR6-Single") {
        config.interaction = InteractionModelKind::Cir6;
        config.preference = PreferenceModelKind::Single;
    } else if (name == "CIR6-PKG") {
        config.interaction = InteractionModelKind::Cir6;
        config.preference = PreferenceModelKind::Pkg;
    } else {
        throw ConfigError("unknown simulator configuration: " + std::string(name));
    }
    return config;
}

void AgentEndpoint::validate() const {
    if (name.empty()) throw ConfigError("agent endpoint needs a name");
    if (capabilities.empty()) throw ConfigError("agent capability set must be non-empty");
    if (transport == TransportKind::Stdio && argv.empty()) {
        throw ConfigError("stdio endpoint needs a command line");
    }
    if (transport == TransportKind::Tcp && port <= 0) {
        throw ConfigError("tcp endpoint needs a port");
    }
    if (transport == TransportKind::Callback && !callback) {
        throw ConfigError("callback endpoint needs a handler");
    }
    if (timeout_seconds <= 0.0) throw ConfigError("endpoint timeout must be positive");
}

namespace {

bool is_recommendation(AgentActionKind kind) {
    switch (kind) {
        case AgentActionKind::RevealShow:
        case AgentActionKind::RevealList:
        case AgentActionKind::RevealSimilar:
        case AgentActionKind::RevealSubset:
        case AgentActionKind::Suggest:
            return true;
        default:
            return false;
    }
}

std::vector<std::string> sorted_unique(std::vector<std::string> values) {
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    return values;
}

// All catalog attributes of the profile's consumed items.
std::vector<std::string> profile_attribute_pool(const UserProfile& profile,
                                                const ItemCatalog& catalog) {
    std::vector<std::string> pool;
    for (const auto& [item_id, sentiment] : profile.item_sentiments) {
        if (const CatalogItem* item = catalog.find(item_id)) {
            pool.insert(pool.end(), item->attributes.begin(), item->attributes.end());
        }
    }
    return sorted_unique(std::move(pool));
}

std::vector<std::string> liked_attribute_pool(const UserProfile& profile,
                                              const std::optional<PersonalKnowledgeGraph>& pkg,
                                              const ItemCatalog& catalog) {
    if (pkg) {
        return {pkg->liked_attributes.begin(), pkg->liked_attributes.end()};
    }
    std::vector<std::string> pool;
    for (const auto& item_id : profile.liked_items()) {
        if (const CatalogItem* item = catalog.find(item_id)) {
            pool.insert(pool.end(), item->attributes.begin(), item->attributes.end());
        }
    }
    return sorted_unique(std::move(pool));
}

struct PendingReactions {
    std::optional<std::string> consumed_item;
    std::optional<std::string> liked_item;
    std::optional<int> sentiment;
};

std::string item_title(const ItemCatalog& catalog, const std::string& item_id) {
    const CatalogItem* item = catalog.find(item_id);
    return item ? item->title : item_id;
}

// Slot values for the next agenda action, drawn from the goal and the
// preference state.
void fill_action_slots(UserAction& action, const Goal& goal, const UserProfile& profile,
                       const ItemCatalog& catalog, const std::vector<std::string>& attribute_pool,
                       const std::optional<std::string>& last_recommendation,
                       const PendingReactions& pending, Rng& rng) {
    auto add = [&](const char* name, std::string value) {
        action.slots.push_back(make_slot(name, std::move(value)));
    };
    switch (action.kind) {
        case UserActionKind::RevealDisclose:
            if (!goal.constraints.empty()) add("ATTRIBUTE", goal.constraints.front().value);
            break;
        case UserActionKind::RevealRevise:
        case UserActionKind::RevealRefine:
        case UserActionKind::RevealExpand:
        case UserActionKind::InquireSubset:
            if (!attribute_pool.empty()) {
                add("ATTRIBUTE", attribute_pool[rng.next_below(attribute_pool.size())]);
            }
            break;
        case UserActionKind::InquireSimilar: {
            if (last_recommendation) {
                add("ITEM", item_title(catalog, *last_recommendation));
            } else {
                auto liked = profile.liked_items();
                if (!liked.empty()) {
                    add("ITEM", item_title(catalog, liked[rng.next_below(liked.size())]));
                }
            }
            break;
        }
        case UserActionKind::NavigateNote:
            if (last_recommendation) add("ITEM", item_title(catalog, *last_recommendation));
            break;
        case UserActionKind::Suggest: {
            auto liked = profile.liked_items();
            if (!liked.empty()) {
                add("ITEM", item_title(catalog, liked[rng.next_below(liked.size())]));
            }
            break;
        }
        case UserActionKind::NavigateComplete:
            if (pending.liked_item) add("ITEM", item_title(catalog, *pending.liked_item));
            break;
        default:
            break;
    }
}

}  // namespace

DialogueTranscript run_dialogue(const SimulatorConfig& config, const SimulatorAssets& assets,
                                AgentTransport& transport, const std::string& conversation_id,
                                std::uint64_t seed, const std::string& agent_name,
                                double timeout_seconds) {
    config.validate();
    Rng rng(seed);

    DialogueTranscript transcript;
    transcript.conversation_id = conversation_id;
    transcript.agent_name = agent_name;
    transcript.simulator_name = config.name();
    transcript.seed = seed;

    UserProfile profile = sample_profile(assets.ratings, rng);
    std::optional<PersonalKnowledgeGraph> pkg;
    if (config.preference == PreferenceModelKind::Pkg) {
        pkg = build_pkg(profile, assets.catalog);
    }

    auto attribute_pool = profile_attribute_pool(profile, assets.catalog);
    auto liked_pool = liked_attribute_pool(profile, pkg, assets.catalog);
    if (liked_pool.empty()) liked_pool = attribute_pool;
    if (liked_pool.empty()) {
        throw ConfigError("profile items carry no attributes; goal cannot be constructed");
    }
    Goal goal;
    goal.constraints.push_back(
        GoalConstraint{"genre", liked_pool[rng.next_below(liked_pool.size())]});
    goal.requests.push_back(kRequestRecommendation);

    const TransitionModel& model = assets.model_for(config.interaction);
    SimulationState state;
    state.goal = goal;
    state.agenda = sample_initial_agenda(model, rng);

    PendingReactions pending;
    std::optional<std::string> last_recommendation;
    int turn_index = 0;
    int user_turns = 0;
    TerminalStatus status = TerminalStatus::Completed;

    auto exchange = [&](const std::string& utterance) -> std::optional<AgentResponse> {
        AgentRequest request{conversation_id, turn_index, utterance};
        auto line = transport.exchange(encode_request(request), timeout_seconds);
        if (!line) return std::nullopt;
        try {
            return decode_response(*line);
        } catch (const ParseError&) {
            return std::nullopt;
        }
    };

    // Understand one agent response: action labels via the oracle channel
    // or retrieval classification, entities via template alignment.
    auto understand = [&](const AgentResponse& response) {
        struct Understood {
            std::vector<std::string> labels;
            std::optional<AgentActionKind> first_kind;
            std::vector<EntityLink> links;
        } u;
        if (config.oracle_nlu && response.actions) {
            for (const auto& raw : *response.actions) {
                if (auto kind = try_parse_agent_action(raw)) {
                    u.labels.push_back(std::string(label(*kind)));
                    if (!u.first_kind) u.first_kind = *kind;
                }
            }
        } else {
            auto result = classify(response.utterance, assets.agent_index,
                                   config.similarity_floor);
            if (result.action_label) {
                u.labels.push_back(*result.action_label);
                u.first_kind = parse_agent_action(*result.action_label);
            }
        }
        u.links = link_entities(response.utterance, assets.agent_index, assets.entities,
                                config.similarity_floor);
        return u;
    };

    if (config.agent_opens) {
        auto response = exchange("");
        if (!response) {
            transcript.status = TerminalStatus::AgentError;
            return transcript;
        }
        auto understood = understand(*response);
        TranscriptTurn greeting;
        greeting.index = turn_index++;
        greeting.speaker = Speaker::Agent;
        greeting.utterance = response->utterance;
        greeting.actions = understood.labels;
        // No user action precedes the greeting, so nothing can fail yet.
        greeting.goal_satisfied = true;
        transcript.turns.push_back(std::move(greeting));
        if (understood.first_kind) {
            state.last_agent_action = AgentAction{*understood.first_kind, {}};
        }
    }

    while (!state.agenda.empty()) {
        if (user_turns >= config.turn_cap) {
            status = TerminalStatus::TurnCapReached;
            break;
        }

        // --- user turn: render the top of the agenda ---
        UserAction action{state.agenda.top().kind, {}};
        fill_action_slots(action, goal, profile, assets.catalog, attribute_pool,
                          last_recommendation, pending, rng);
        std::string utterance = render_covered(action, assets.user_bank, rng);

        TranscriptTurn user_turn;
        user_turn.index = turn_index++;
        user_turn.speaker = Speaker::User;
        user_turn.actions.push_back(std::string(label(action.kind)));
        user_turn.slots = action.slots;
        if (pending.consumed_item) {
            std::string title = item_title(assets.catalog, *pending.consumed_item);
            std::string notice =
                fill_template(config.consumed_notice, {make_slot("ITEM", title)});
            utterance = notice + " " + utterance;
            user_turn.slots.push_back(make_slot("ITEM", *pending.consumed_item));
            user_turn.slots.push_back(make_slot("SENTIMENT", "seen"));
            pending.consumed_item.reset();
        }
        if (pending.sentiment) {
            user_turn.slots.push_back(
                make_slot("SENTIMENT", *pending.sentiment > 0 ? "like" : "dislike"));
            pending.sentiment.reset();
        }
        user_turn.utterance = utterance;
        transcript.turns.push_back(user_turn);
        ++user_turns;
        state.last_user_action = action;

        // --- agent exchange ---
        auto response = exchange(utterance);
        if (!response) {
            status = TerminalStatus::AgentError;
            break;
        }
        auto understood = understand(*response);

        bool delta = false;
        for (const auto& lbl : understood.labels) {
            if (goal_accomplished(assets.compatibility, action.kind, parse_agent_action(lbl))) {
                delta = true;
                break;
            }
        }

        TranscriptTurn agent_turn;
        agent_turn.index = turn_index++;
        agent_turn.speaker = Speaker::Agent;
        agent_turn.utterance = response->utterance;
        agent_turn.actions = understood.labels;
        for (const auto& link : understood.links) {
            agent_turn.slots.push_back(make_slot(link.slot_name, link.entity_id));
        }
        agent_turn.goal_satisfied = delta;
        transcript.turns.push_back(agent_turn);

        if (understood.first_kind) {
            AgentAction agent_action{*understood.first_kind, {}};
            for (const auto& link : understood.links) {
                agent_action.slots.push_back(make_slot(link.slot_name, link.entity_id));
            }
            state.last_agent_action = agent_action;
        } else {
            state.last_agent_action.reset();
        }

        std::optional<std::string> recommended_item;
        if (understood.first_kind && is_recommendation(*understood.first_kind)) {
            for (const auto& link : understood.links) {
                if (link.slot_name == "ITEM") {
                    recommended_item = link.entity_id;
                    break;
                }
            }
        }

        update_agenda(state, model, delta, rng);

        if (recommended_item) {
            last_recommendation = recommended_item;
            if (pkg) {
                switch (apply_pkg_early_stop(state, *pkg, assets.catalog, *recommended_item)) {
                    case EarlyStopOutcome::AlreadyConsumed:
                        pending.consumed_item = recommended_item;
                        break;
                    case EarlyStopOutcome::Cleared:
                        pending.liked_item = recommended_item;
                        break;
                    case EarlyStopOutcome::Unchanged:
                        break;
                }
            } else {
                if (answer_consumed(profile, *recommended_item)) {
                    pending.consumed_item = recommended_item;
                } else {
                    pending.sentiment = answer_preference_single(rng);
                }
            }
        }
        state.turn += 1;
    }

    transcript.status = status;
    return transcript;
}

namespace {

DialogueTranscript error_transcript(const SimulatorConfig& config, const std::string& id,
                                    std::uint64_t seed, const std::string& agent_name) {
    DialogueTranscript t;
    t.conversation_id = id;
    t.agent_name = agent_name;
    t.simulator_name = config.name();
    t.seed = seed;
    t.status = TerminalStatus::AgentError;
    return t;
}

}  // namespace

std::vector<DialogueTranscript> run_campaign(const SimulatorConfig& config,
                                             const SimulatorAssets& assets,
                                             const AgentEndpoint& endpoint,
                                             const CampaignOptions& options) {
    config.validate();
    endpoint.validate();
    if (options.n_dialogues == 0) throw ArgumentError("campaign needs at least one dialogue");

    std::vector<DialogueTranscript> out(options.n_dialogues);
    auto conversation_id = [&](std::size_t i) {
        return endpoint.name + "-" + config.name() + "-" + std::to_string(i);
    };

    if (endpoint.transport == AgentEndpoint::TransportKind::Stdio) {
        // One shared child process; conversations are serialized over its
        // standard streams.
        SubprocessTransport child(endpoint.argv);
        for (std::size_t i = 0; i < options.n_dialogues; ++i) {
            std::uint64_t seed = options.base_seed + i;
            try {
                out[i] = run_dialogue(config, assets, child, conversation_id(i), seed,
                                      endpoint.name, endpoint.timeout_seconds);
            } catch (const TransportError&) {
                out[i] = error_transcript(config, conversation_id(i), seed, endpoint.name);
            }
        }
        return out;
    }

    int jobs = std::max(1, options.jobs);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= options.n_dialogues) return;
            std::uint64_t seed = options.base_seed + i;
            try {
                std::unique_ptr<AgentTransport> transport;
                if (endpoint.transport == AgentEndpoint::TransportKind::Tcp) {
                    transport = std::make_unique<TcpTransport>(endpoint.host, endpoint.port);
                } else {
                    transport = std::make_unique<CallbackTransport>(endpoint.callback);
                }
                out[i] = run_dialogue(config, assets, *transport, conversation_id(i), seed,
                                      endpoint.name, endpoint.timeout_seconds);
            } catch (const TransportError&) {
                out[i] = error_transcript(config, conversation_id(i), seed, endpoint.name);
            }
        }
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        for (int j = 0; j < jobs; ++j) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }
    return out;
}

}  // namespace crsim
