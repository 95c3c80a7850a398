#pragma once

#include <optional>
#include <string>
#include <vector>

namespace crsim {

// One request line to the agent. JSON object with exactly these fields:
// {"conversation_id": string, "turn": integer, "utterance": string}
struct AgentRequest {
    std::string conversation_id;
    int turn = 0;
    std::string utterance;

    bool operator==(const AgentRequest&) const = default;
};

// One response line from the agent:
// {"utterance": string, "actions": [labels...]} with actions optional.
struct AgentResponse {
    std::string utterance;
    std::optional<std::vector<std::string>> actions;

    bool operator==(const AgentResponse&) const = default;
};

std::string encode_request(const AgentRequest& request);
AgentRequest decode_request(const std::string& line);
std::string encode_response(const AgentResponse& response);
AgentResponse decode_response(const std::string& line);

}  // namespace crsim
