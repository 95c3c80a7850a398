#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "crsim/actions.hpp"

namespace crsim {

enum class TerminalStatus { Completed, TurnCapReached, AgentError };

std::string_view label(TerminalStatus status);
TerminalStatus parse_terminal_status(std::string_view text);

struct TranscriptTurn {
    int index = 0;
    Speaker speaker = Speaker::User;
    std::string utterance;
    // Action labels in canonical short form, interpreted per speaker side.
    std::vector<std::string> actions;
    std::vector<Slot> slots;
    // Recorded goal-update indicator; present on every agent turn.
    std::optional<bool> goal_satisfied;

    bool operator==(const TranscriptTurn&) const = default;
};

// Full record of one simulated dialogue, the unit all metrics consume.
struct DialogueTranscript {
    std::string conversation_id;
    std::string agent_name;
    std::string simulator_name;
    std::uint64_t seed = 0;
    TerminalStatus status = TerminalStatus::Completed;
    std::vector<TranscriptTurn> turns;

    std::size_t user_turn_count() const;
    std::size_t agent_turn_count() const;

    // Parsed user actions across all user turns, in order.
    std::vector<UserActionKind> user_actions() const;
    std::vector<AgentActionKind> agent_actions() const;

    bool operator==(const DialogueTranscript&) const = default;
};

std::string to_json_line(const DialogueTranscript& transcript);
DialogueTranscript transcript_from_json_line(const std::string& line);

void save_transcripts(const std::vector<DialogueTranscript>& transcripts,
                      const std::filesystem::path& path);
std::vector<DialogueTranscript> load_transcripts(const std::filesystem::path& path);

}  // namespace crsim
