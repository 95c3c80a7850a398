#include "crsim/wire.hpp"

#include <nlohmann/json.hpp>

#include "crsim/errors.hpp"

namespace crsim {

using nlohmann::json;

std::string encode_request(const AgentRequest& request) {
    json j;
    j["conversation_id"] = request.conversation_id;
    j["turn"] = request.turn;
    j["utterance"] = request.utterance;
    return j.dump();
}

AgentRequest decode_request(const std::string& line) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed request line: ") + e.what());
    }
    AgentRequest request;
    try {
        request.conversation_id = j.at("conversation_id").get<std::string>();
        request.turn = j.at("turn").get<int>();
        request.utterance = j.at("utterance").get<std::string>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("request violates schema: ") + e.what());
    }
    return request;
}

std::string encode_response(const AgentResponse& response) {
    json j;
    j["utterance"] = response.utterance;
    if (response.actions) j["actions"] = *response.actions;
    return j.dump();
}

AgentResponse decode_response(const std::string& line) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed response line: ") + e.what());
    }
    AgentResponse response;
    try {
        response.utterance = j.at("utterance").get<std::string>();
        if (j.contains("actions")) {
            std::vector<std::string> actions;
            for (const auto& a : j.at("actions")) actions.push_back(a.get<std::string>());
            response.actions = std::move(actions);
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("response violates schema: ") + e.what());
    }
    return response;
}

}  // namespace crsim
