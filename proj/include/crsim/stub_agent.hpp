#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "crsim/capabilities.hpp"
#include "crsim/compatibility.hpp"
#include "crsim/corpus.hpp"
#include "crsim/nlg.hpp"
#include "crsim/nlu.hpp"
#include "crsim/rng.hpp"
#include "crsim/transport.hpp"
#include "crsim/wire.hpp"

namespace crsim {

enum class StubPolicy { Perfect, Flaky, Scripted };

std::string_view label(StubPolicy policy);
StubPolicy parse_stub_policy(std::string_view text);

// Controllable replacement for a third-party conversational agent: known
// response quality, speaks only the wire protocol.
struct StubAgentSpec {
    StubPolicy policy = StubPolicy::Perfect;
    double flaky_p = 1.0;  // probability of a compatible response
    std::uint64_t seed = 0;
    CapabilitySet capabilities = all_capabilities();
    std::vector<std::string> recommendation_pool;  // item ids
    // User action label -> agent response label; empty value means an
    // unintelligible reply.
    std::map<std::string, std::string> scripted;

    std::filesystem::path compatibility_path;
    std::filesystem::path user_templates_path;
    std::filesystem::path agent_templates_path;
    std::filesystem::path catalog_path;

    void validate() const;
    static StubAgentSpec load(const std::filesystem::path& config_path);
};

class StubAgent {
public:
    explicit StubAgent(StubAgentSpec spec);

    // Handles one raw request line; always yields a response line and
    // never throws (malformed requests get a protocol error reply).
    std::string handle_line(const std::string& line);

    AgentResponse respond(const AgentRequest& request);

    const StubAgentSpec& spec() const { return spec_; }

private:
    struct ConversationState {
        Rng rng;
        std::size_t pool_cursor = 0;
    };

    ConversationState& conversation(const std::string& id);
    std::optional<UserActionKind> classify_user(const std::string& utterance) const;
    AgentResponse build_response(std::optional<UserActionKind> user_kind,
                                 ConversationState& conv);

    StubAgentSpec spec_;
    CompatibilityTable compatibility_;
    TemplateBank agent_bank_{Speaker::Agent};
    LabeledUtteranceIndex user_index_{Speaker::User};
    ItemCatalog catalog_;
    std::map<std::string, ConversationState> conversations_;
    std::mutex mutex_;
};

// Blocking serve loops; both keep running until the peer closes.
void serve_stdio(StubAgent& agent);
void serve_tcp(StubAgent& agent, TcpListener& listener);

}  // namespace crsim
