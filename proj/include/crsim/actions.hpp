#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace crsim {

enum class Speaker { User, Agent };

// User-side dialogue acts. Groups: Reveal (query formulation),
// Inquire and Navigate (set retrieval), Suggest (mixed initiative).
enum class UserActionKind {
    RevealDisclose,
    RevealNonDisclose,
    RevealRevise,
    RevealRefine,
    RevealExpand,
    InquireList,
    InquireCompare,
    InquireSubset,
    InquireSimilar,
    NavigateRepeat,
    NavigateBack,
    NavigateMore,
    NavigateNote,
    NavigateComplete,
    Suggest,
};

// Agent-side dialogue acts. Groups: Inquire, Reveal, Traverse, Suggest.
enum class AgentActionKind {
    InquireElicit,
    InquireClarify,
    RevealShow,
    RevealList,
    RevealSimilar,
    RevealSubset,
    TraverseRepeat,
    TraverseBack,
    TraverseMore,
    TraverseRecord,
    TraverseEnd,
    Suggest,
};

enum class ActionCategory { QueryFormulation, SetRetrieval, MixedInitiative };

// The six main user actions of the task-specific interaction model.
enum class Cir6Main { Disclose, Reveal, Inquire, Navigate, Note, Complete };

// High-level conversational flow classes: Query/Feedback are user-side,
// Request/Answer are agent-side.
enum class QrfaClass { Query, Request, Feedback, Answer };

inline constexpr std::size_t kUserActionCount = 15;
inline constexpr std::size_t kAgentActionCount = 12;
inline constexpr std::size_t kCir6MainCount = 6;

extern const std::array<UserActionKind, kUserActionCount> kAllUserActions;
extern const std::array<AgentActionKind, kAgentActionCount> kAllAgentActions;
extern const std::array<Cir6Main, kCir6MainCount> kAllCir6Mains;

// Canonical short label, e.g. "Disclose", "Non-disclose", "Elicit".
std::string_view label(UserActionKind kind);
std::string_view label(AgentActionKind kind);
std::string_view label(Cir6Main main);
std::string_view label(QrfaClass cls);
std::string_view label(Speaker speaker);

// Qualified label including the group, e.g. "Reveal.Disclose".
std::string qualified_label(UserActionKind kind);
std::string qualified_label(AgentActionKind kind);

// Label parsing accepts both the short and the qualified form. The action
// set is closed: unknown labels yield nullopt / a TaxonomyError.
std::optional<UserActionKind> try_parse_user_action(std::string_view text);
std::optional<AgentActionKind> try_parse_agent_action(std::string_view text);
UserActionKind parse_user_action(std::string_view text);
AgentActionKind parse_agent_action(std::string_view text);
std::optional<Cir6Main> try_parse_cir6_main(std::string_view text);
Cir6Main parse_cir6_main(std::string_view text);

ActionCategory category(UserActionKind kind);
ActionCategory category(AgentActionKind kind);

// CIR6 main group of a user action. Suggest has no place in the six-state
// model and maps to nullopt.
std::optional<Cir6Main> cir6_main(UserActionKind kind);

// User actions belonging to a CIR6 main group, in enum order.
const std::vector<UserActionKind>& cir6_members(Cir6Main main);

// QRFA coarse class. User kinds map to Query or Feedback, agent kinds to
// Request or Answer.
QrfaClass qrfa_class(UserActionKind kind);
QrfaClass qrfa_class(AgentActionKind kind);

// User actions within a coarse class (Query or Feedback), in enum order.
const std::vector<UserActionKind>& qrfa_members(QrfaClass cls);

constexpr std::size_t index_of(UserActionKind kind) { return static_cast<std::size_t>(kind); }
constexpr std::size_t index_of(AgentActionKind kind) { return static_cast<std::size_t>(kind); }
constexpr std::size_t index_of(Cir6Main main) { return static_cast<std::size_t>(main); }

// Slot vocabulary is fixed: ITEM, ATTRIBUTE, SENTIMENT.
bool is_valid_slot_name(std::string_view name);

struct Slot {
    std::string name;
    std::string value;

    bool operator==(const Slot&) const = default;
};

Slot make_slot(std::string name, std::string value);

struct UserAction {
    UserActionKind kind;
    std::vector<Slot> slots;

    bool operator==(const UserAction&) const = default;
};

struct AgentAction {
    AgentActionKind kind;
    std::vector<Slot> slots;

    bool operator==(const AgentAction&) const = default;
};

const std::string* find_slot(const std::vector<Slot>& slots, std::string_view name);

}  // namespace crsim
