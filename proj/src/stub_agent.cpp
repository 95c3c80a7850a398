#include "crsim/stub_agent.hpp"

#include <unistd.h>

#include <fstream>
#include <iostream>
#include <thread>

#include <nlohmann/json.hpp>

#include "crsim/errors.hpp"

namespace crsim {

using nlohmann::json;

std::string_view label(StubPolicy policy) {
    switch (policy) {
        case StubPolicy::Perfect: return "PERFECT";
        case StubPolicy::Flaky: return "FLAKY";
        case StubPolicy::Scripted: return "SCRIPTED";
    }
    return "?";
}

StubPolicy parse_stub_policy(std::string_view text) {
    if (text == "PERFECT") return StubPolicy::Perfect;
    if (text == "FLAKY") return StubPolicy::Flaky;
    if (text == "SCRIPTED") return StubPolicy::Scripted;
    throw ConfigError("unknown stub policy: " + std::string(text));
}

void StubAgentSpec::validate() const {
    if (flaky_p < 0.0 || flaky_p > 1.0) throw ConfigError("flaky p must lie in [0, 1]");
    if (capabilities.empty()) throw ConfigError("stub capability set must be non-empty");
    if (policy == StubPolicy::Scripted) {
        // The scripted table must be total over user action kinds.
        for (UserActionKind kind : kAllUserActions) {
            if (!scripted.count(std::string(label(kind)))) {
                throw ConfigError("scripted table misses user action: " +
                                  std::string(label(kind)));
            }
        }
        for (const auto& [user_label, agent_label] : scripted) {
            if (!try_parse_user_action(user_label)) {
                throw ConfigError("scripted table keys unknown user action: " + user_label);
            }
            if (!agent_label.empty() && !try_parse_agent_action(agent_label)) {
                throw ConfigError("scripted table maps to unknown agent action: " + agent_label);
            }
        }
    }
}

StubAgentSpec StubAgentSpec::load(const std::filesystem::path& config_path) {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot open stub config: " + config_path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("bad stub config: " + std::string(e.what()));
    }
    StubAgentSpec spec;
    spec.policy = parse_stub_policy(j.at("policy").get<std::string>());
    spec.flaky_p = j.value("p", spec.policy == StubPolicy::Flaky ? 0.5 : 1.0);
    spec.seed = j.value("seed", 0ull);
    if (j.contains("capabilities")) {
        spec.capabilities.clear();
        for (const auto& c : j.at("capabilities")) {
            spec.capabilities.insert(parse_capability(c.get<std::string>()));
        }
    }
    if (j.contains("recommendation_pool")) {
        for (const auto& item : j.at("recommendation_pool")) {
            spec.recommendation_pool.push_back(item.get<std::string>());
        }
    }
    if (j.contains("scripted")) {
        for (const auto& [key, value] : j.at("scripted").items()) {
            spec.scripted[key] = value.get<std::string>();
        }
    }
    const auto base = config_path.parent_path();
    auto path_of = [&](const char* key) {
        std::filesystem::path p = j.at("data").at(key).get<std::string>();
        return p.is_absolute() ? p : base / p;
    };
    spec.compatibility_path = path_of("compatibility");
    spec.user_templates_path = path_of("user_templates");
    spec.agent_templates_path = path_of("agent_templates");
    spec.catalog_path = path_of("catalog");
    spec.validate();
    return spec;
}

namespace {

// Response kinds tried in order; recommendations lead so item-carrying
// answers occur whenever the table allows one.
constexpr std::array<AgentActionKind, kAgentActionCount> kResponsePreference = {
    AgentActionKind::RevealShow,     AgentActionKind::RevealList,
    AgentActionKind::RevealSimilar,  AgentActionKind::RevealSubset,
    AgentActionKind::InquireElicit,  AgentActionKind::InquireClarify,
    AgentActionKind::TraverseRecord, AgentActionKind::TraverseMore,
    AgentActionKind::TraverseRepeat, AgentActionKind::TraverseBack,
    AgentActionKind::TraverseEnd,    AgentActionKind::Suggest,
};

std::vector<std::string> split_sentences(const std::string& text) {
    std::vector<std::string> sentences;
    std::string current;
    for (char c : text) {
        current.push_back(c);
        if (c == '.' || c == '?' || c == '!') {
            sentences.push_back(current);
            current.clear();
        }
    }
    if (current.find_first_not_of(" \t") != std::string::npos) sentences.push_back(current);
    return sentences;
}

}  // namespace

StubAgent::StubAgent(StubAgentSpec spec)
    : spec_(std::move(spec)),
      compatibility_(CompatibilityTable::load(spec_.compatibility_path)),
      agent_bank_(TemplateBank::load(spec_.agent_templates_path, Speaker::Agent)),
      user_index_(index_from_bank(TemplateBank::load(spec_.user_templates_path, Speaker::User))),
      catalog_(ItemCatalog::load(spec_.catalog_path)) {
    spec_.validate();
}

StubAgent::ConversationState& StubAgent::conversation(const std::string& id) {
    auto it = conversations_.find(id);
    if (it == conversations_.end()) {
        it = conversations_
                 .emplace(id, ConversationState{Rng(spec_.seed ^ stable_hash(id)), 0})
                 .first;
    }
    return it->second;
}

std::optional<UserActionKind> StubAgent::classify_user(const std::string& utterance) const {
    // The engine may prefix preference answers to the agenda utterance, so
    // also try each sentence and keep the best score.
    auto best = classify(utterance, user_index_);
    for (const auto& sentence : split_sentences(utterance)) {
        auto result = classify(sentence, user_index_);
        if (result.score > best.score) best = result;
    }
    if (!best.action_label) return std::nullopt;
    return parse_user_action(*best.action_label);
}

AgentResponse StubAgent::build_response(std::optional<UserActionKind> user_kind,
                                        ConversationState& conv) {
    std::optional<AgentActionKind> response_kind;
    if (!user_kind) {
        response_kind = AgentActionKind::InquireClarify;
    } else {
        switch (spec_.policy) {
            case StubPolicy::Perfect: {
                for (AgentActionKind candidate : kResponsePreference) {
                    if (compatibility_.compatible(*user_kind, candidate)) {
                        response_kind = candidate;
                        break;
                    }
                }
                break;
            }
            case StubPolicy::Flaky: {
                bool cooperate = conv.rng.next_bernoulli(spec_.flaky_p);
                for (AgentActionKind candidate : kResponsePreference) {
                    bool compatible = compatibility_.compatible(*user_kind, candidate);
                    if (compatible == cooperate) {
                        response_kind = candidate;
                        break;
                    }
                }
                break;
            }
            case StubPolicy::Scripted: {
                const auto& mapped = spec_.scripted.at(std::string(label(*user_kind)));
                if (mapped.empty()) {
                    response_kind = std::nullopt;
                } else {
                    response_kind = parse_agent_action(mapped);
                }
                break;
            }
        }
    }

    AgentResponse response;
    if (!response_kind) {
        // Deliberately unintelligible: shares no tokens with the labeled
        // utterance inventory.
        response.utterance = "mmh errr hrm";
        response.actions = std::vector<std::string>{};
        return response;
    }

    AgentAction action{*response_kind, {}};
    if (!spec_.recommendation_pool.empty()) {
        const std::string& item_id =
            spec_.recommendation_pool[conv.pool_cursor % spec_.recommendation_pool.size()];
        if (const CatalogItem* item = catalog_.find(item_id)) {
            action.slots.push_back(make_slot("ITEM", item->title));
        }
    }

    // Prefer templates that name the pooled item so recommendations carry
    // a linkable mention.
    const auto& templates = agent_bank_.templates(std::string(label(*response_kind)));
    std::vector<const Template*> with_item;
    std::vector<const Template*> without_item;
    for (const auto& t : templates) {
        auto shape = parse_template(t.text);
        bool covered = true;
        bool uses_item = false;
        for (const auto& name : shape.placeholders) {
            if (!find_slot(action.slots, name)) covered = false;
            if (name == "ITEM") uses_item = true;
        }
        if (!covered) continue;
        (uses_item ? with_item : without_item).push_back(&t);
    }
    const auto& usable = !with_item.empty() ? with_item : without_item;
    if (usable.empty()) {
        throw CoverageError("no renderable template for agent action " +
                            std::string(label(*response_kind)));
    }
    const Template& chosen = *usable[conv.rng.next_below(usable.size())];
    response.utterance = fill_template(chosen.text, action.slots);
    if (!with_item.empty() && !action.slots.empty()) conv.pool_cursor += 1;
    response.actions = std::vector<std::string>{std::string(label(*response_kind))};
    return response;
}

AgentResponse StubAgent::respond(const AgentRequest& request) {
    std::lock_guard<std::mutex> lock(mutex_);
    // Turn 0 opens a dialogue: repeated campaigns may reuse conversation
    // ids against a long-lived server, so start from a clean slate.
    if (request.turn == 0) conversations_.erase(request.conversation_id);
    auto& conv = conversation(request.conversation_id);
    if (request.utterance.empty()) {
        // Greeting probe (agent-opens mode).
        AgentResponse greeting;
        greeting.utterance = "Hello! Tell me what kind of movie you are in the mood for.";
        greeting.actions = std::vector<std::string>{
            std::string(label(AgentActionKind::InquireElicit))};
        return greeting;
    }
    return build_response(classify_user(request.utterance), conv);
}

std::string StubAgent::handle_line(const std::string& line) {
    try {
        AgentRequest request = decode_request(line);
        return encode_response(respond(request));
    } catch (const Error&) {
        AgentResponse error;
        error.utterance = "ERROR: malformed request";
        return encode_response(error);
    }
}

void serve_stdio(StubAgent& agent) {
    std::string line;
    while (std::getline(std::cin, line)) {
        if (line.empty()) continue;
        std::cout << agent.handle_line(line) << "\n" << std::flush;
    }
}

void serve_tcp(StubAgent& agent, TcpListener& listener) {
    std::vector<std::thread> workers;
    while (true) {
        int client = listener.accept_connection();
        if (client < 0) break;
        workers.emplace_back([client, &agent]() {
            std::string buffer;
            while (true) {
                auto line = read_line_fd(client, buffer, 3600.0);
                if (!line) break;
                if (line->empty()) continue;
                if (!write_all(client, agent.handle_line(*line) + "\n")) break;
            }
            ::close(client);
        });
    }
    for (auto& w : workers) w.join();
}

}  // namespace crsim
