#include "crsim/transcript.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "crsim/errors.hpp"

namespace crsim {

using nlohmann::json;

std::string_view label(TerminalStatus status) {
    switch (status) {
        case TerminalStatus::Completed: return "COMPLETED";
        case TerminalStatus::TurnCapReached: return "TURN_CAP_REACHED";
        case TerminalStatus::AgentError: return "AGENT_ERROR";
    }
    return "?";
}

TerminalStatus parse_terminal_status(std::string_view text) {
    if (text == "COMPLETED") return TerminalStatus::Completed;
    if (text == "TURN_CAP_REACHED") return TerminalStatus::TurnCapReached;
    if (text == "AGENT_ERROR") return TerminalStatus::AgentError;
    throw ParseError("unknown terminal status: " + std::string(text));
}

std::size_t DialogueTranscript::user_turn_count() const {
    std::size_t n = 0;
    for (const auto& turn : turns)
        if (turn.speaker == Speaker::User) ++n;
    return n;
}

std::size_t DialogueTranscript::agent_turn_count() const {
    return turns.size() - user_turn_count();
}

std::vector<UserActionKind> DialogueTranscript::user_actions() const {
    std::vector<UserActionKind> out;
    for (const auto& turn : turns) {
        if (turn.speaker != Speaker::User) continue;
        for (const auto& a : turn.actions) out.push_back(parse_user_action(a));
    }
    return out;
}

std::vector<AgentActionKind> DialogueTranscript::agent_actions() const {
    std::vector<AgentActionKind> out;
    for (const auto& turn : turns) {
        if (turn.speaker != Speaker::Agent) continue;
        for (const auto& a : turn.actions) out.push_back(parse_agent_action(a));
    }
    return out;
}

namespace {

json turn_to_json(const TranscriptTurn& turn) {
    json j;
    j["index"] = turn.index;
    j["speaker"] = std::string(label(turn.speaker));
    j["utterance"] = turn.utterance;
    j["actions"] = turn.actions;
    if (!turn.slots.empty()) {
        json slots = json::array();
        for (const auto& slot : turn.slots) {
            slots.push_back({{"name", slot.name}, {"value", slot.value}});
        }
        j["slots"] = slots;
    }
    if (turn.goal_satisfied.has_value()) j["goal_satisfied"] = *turn.goal_satisfied;
    return j;
}

TranscriptTurn turn_from_json(const json& j) {
    TranscriptTurn turn;
    turn.index = j.at("index").get<int>();
    std::string speaker = j.at("speaker").get<std::string>();
    if (speaker == "USER") {
        turn.speaker = Speaker::User;
    } else if (speaker == "AGENT") {
        turn.speaker = Speaker::Agent;
    } else {
        throw ParseError("unknown speaker: " + speaker);
    }
    turn.utterance = j.at("utterance").get<std::string>();
    for (const auto& a : j.at("actions")) turn.actions.push_back(a.get<std::string>());
    if (j.contains("slots")) {
        for (const auto& s : j.at("slots")) {
            turn.slots.push_back(Slot{s.at("name").get<std::string>(),
                                      s.at("value").get<std::string>()});
        }
    }
    if (j.contains("goal_satisfied")) turn.goal_satisfied = j.at("goal_satisfied").get<bool>();
    return turn;
}

}  // namespace

std::string to_json_line(const DialogueTranscript& transcript) {
    json j;
    j["conversation_id"] = transcript.conversation_id;
    j["agent"] = transcript.agent_name;
    j["simulator"] = transcript.simulator_name;
    j["seed"] = transcript.seed;
    j["status"] = std::string(label(transcript.status));
    json turns = json::array();
    for (const auto& turn : transcript.turns) turns.push_back(turn_to_json(turn));
    j["turns"] = turns;
    return j.dump();
}

DialogueTranscript transcript_from_json_line(const std::string& line) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad transcript record: ") + e.what());
    }
    DialogueTranscript t;
    t.conversation_id = j.at("conversation_id").get<std::string>();
    t.agent_name = j.value("agent", "");
    t.simulator_name = j.value("simulator", "");
    t.seed = j.at("seed").get<std::uint64_t>();
    t.status = parse_terminal_status(j.at("status").get<std::string>());
    for (const auto& turn : j.at("turns")) t.turns.push_back(turn_from_json(turn));
    return t;
}

void save_transcripts(const std::vector<DialogueTranscript>& transcripts,
                      const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open for writing: " + path.string());
    for (const auto& t : transcripts) out << to_json_line(t) << "\n";
}

std::vector<DialogueTranscript> load_transcripts(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open transcripts: " + path.string());
    std::vector<DialogueTranscript> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        out.push_back(transcript_from_json_line(line));
    }
    return out;
}

}  // namespace crsim
