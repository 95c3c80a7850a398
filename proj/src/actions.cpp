#include "crsim/actions.hpp"

#include <algorithm>

#include "crsim/errors.hpp"

namespace crsim {

const std::array<UserActionKind, kUserActionCount> kAllUserActions = {
    UserActionKind::RevealDisclose,   UserActionKind::RevealNonDisclose,
    UserActionKind::RevealRevise,     UserActionKind::RevealRefine,
    UserActionKind::RevealExpand,     UserActionKind::InquireList,
    UserActionKind::InquireCompare,   UserActionKind::InquireSubset,
    UserActionKind::InquireSimilar,   UserActionKind::NavigateRepeat,
    UserActionKind::NavigateBack,     UserActionKind::NavigateMore,
    UserActionKind::NavigateNote,     UserActionKind::NavigateComplete,
    UserActionKind::Suggest,
};

const std::array<AgentActionKind, kAgentActionCount> kAllAgentActions = {
    AgentActionKind::InquireElicit,  AgentActionKind::InquireClarify,
    AgentActionKind::RevealShow,     AgentActionKind::RevealList,
    AgentActionKind::RevealSimilar,  AgentActionKind::RevealSubset,
    AgentActionKind::TraverseRepeat, AgentActionKind::TraverseBack,
    AgentActionKind::TraverseMore,   AgentActionKind::TraverseRecord,
    AgentActionKind::TraverseEnd,    AgentActionKind::Suggest,
};

const std::array<Cir6Main, kCir6MainCount> kAllCir6Mains = {
    Cir6Main::Disclose, Cir6Main::Reveal, Cir6Main::Inquire,
    Cir6Main::Navigate, Cir6Main::Note,   Cir6Main::Complete,
};

namespace {

struct UserActionInfo {
    UserActionKind kind;
    std::string_view group;
    std::string_view name;
    ActionCategory cat;
    std::optional<Cir6Main> main;
    QrfaClass qrfa;
};

// Short labels follow the taxonomy; CIR6 main groups follow the six-state
// reading where Disclose, Note, and Complete stand apart from their groups.
constexpr std::array<UserActionInfo, kUserActionCount> kUserInfo = {{
    {UserActionKind::RevealDisclose, "Reveal", "Disclose", ActionCategory::QueryFormulation,
     Cir6Main::Disclose, QrfaClass::Query},
    {UserActionKind::RevealNonDisclose, "Reveal", "Non-disclose", ActionCategory::QueryFormulation,
     Cir6Main::Disclose, QrfaClass::Query},
    {UserActionKind::RevealRevise, "Reveal", "Revise", ActionCategory::QueryFormulation,
     Cir6Main::Reveal, QrfaClass::Query},
    {UserActionKind::RevealRefine, "Reveal", "Refine", ActionCategory::QueryFormulation,
     Cir6Main::Reveal, QrfaClass::Query},
    {UserActionKind::RevealExpand, "Reveal", "Expand", ActionCategory::QueryFormulation,
     Cir6Main::Reveal, QrfaClass::Query},
    {UserActionKind::InquireList, "Inquire", "List", ActionCategory::SetRetrieval,
     Cir6Main::Inquire, QrfaClass::Query},
    {UserActionKind::InquireCompare, "Inquire", "Compare", ActionCategory::SetRetrieval,
     Cir6Main::Inquire, QrfaClass::Query},
    {UserActionKind::InquireSubset, "Inquire", "Subset", ActionCategory::SetRetrieval,
     Cir6Main::Inquire, QrfaClass::Query},
    {UserActionKind::InquireSimilar, "Inquire", "Similar", ActionCategory::SetRetrieval,
     Cir6Main::Inquire, QrfaClass::Query},
    {UserActionKind::NavigateRepeat, "Navigate", "Repeat", ActionCategory::SetRetrieval,
     Cir6Main::Navigate, QrfaClass::Query},
    {UserActionKind::NavigateBack, "Navigate", "Back", ActionCategory::SetRetrieval,
     Cir6Main::Navigate, QrfaClass::Feedback},
    {UserActionKind::NavigateMore, "Navigate", "More", ActionCategory::SetRetrieval,
     Cir6Main::Navigate, QrfaClass::Feedback},
    {UserActionKind::NavigateNote, "Navigate", "Note", ActionCategory::SetRetrieval,
     Cir6Main::Note, QrfaClass::Feedback},
    {UserActionKind::NavigateComplete, "Navigate", "Complete", ActionCategory::SetRetrieval,
     Cir6Main::Complete, QrfaClass::Feedback},
    {UserActionKind::Suggest, "", "Suggest", ActionCategory::MixedInitiative,
     std::nullopt, QrfaClass::Query},
}};

struct AgentActionInfo {
    AgentActionKind kind;
    std::string_view group;
    std::string_view name;
    ActionCategory cat;
    QrfaClass qrfa;
};

constexpr std::array<AgentActionInfo, kAgentActionCount> kAgentInfo = {{
    {AgentActionKind::InquireElicit, "Inquire", "Elicit", ActionCategory::QueryFormulation,
     QrfaClass::Request},
    {AgentActionKind::InquireClarify, "Inquire", "Clarify", ActionCategory::QueryFormulation,
     QrfaClass::Request},
    {AgentActionKind::RevealShow, "Reveal", "Show", ActionCategory::SetRetrieval,
     QrfaClass::Answer},
    {AgentActionKind::RevealList, "Reveal", "List", ActionCategory::SetRetrieval,
     QrfaClass::Answer},
    {AgentActionKind::RevealSimilar, "Reveal", "Similar", ActionCategory::SetRetrieval,
     QrfaClass::Answer},
    {AgentActionKind::RevealSubset, "Reveal", "Subset", ActionCategory::SetRetrieval,
     QrfaClass::Answer},
    {AgentActionKind::TraverseRepeat, "Traverse", "Repeat", ActionCategory::SetRetrieval,
     QrfaClass::Answer},
    {AgentActionKind::TraverseBack, "Traverse", "Back", ActionCategory::SetRetrieval,
     QrfaClass::Answer},
    {AgentActionKind::TraverseMore, "Traverse", "More", ActionCategory::SetRetrieval,
     QrfaClass::Answer},
    {AgentActionKind::TraverseRecord, "Traverse", "Record", ActionCategory::SetRetrieval,
     QrfaClass::Answer},
    {AgentActionKind::TraverseEnd, "Traverse", "End", ActionCategory::SetRetrieval,
     QrfaClass::Answer},
    {AgentActionKind::Suggest, "", "Suggest", ActionCategory::MixedInitiative,
     QrfaClass::Request},
}};

const UserActionInfo& user_info(UserActionKind kind) {
    return kUserInfo[static_cast<std::size_t>(kind)];
}

const AgentActionInfo& agent_info(AgentActionKind kind) {
    return kAgentInfo[static_cast<std::size_t>(kind)];
}

}  // namespace

std::string_view label(UserActionKind kind) { return user_info(kind).name; }
std::string_view label(AgentActionKind kind) { return agent_info(kind).name; }

std::string_view label(Cir6Main main) {
    switch (main) {
        case Cir6Main::Disclose: return "Disclose";
        case Cir6Main::Reveal: return "Reveal";
        case Cir6Main::Inquire: return "Inquire";
        case Cir6Main::Navigate: return "Navigate";
        case Cir6Main::Note: return "Note";
        case Cir6Main::Complete: return "Complete";
    }
    return "?";
}

std::string_view label(QrfaClass cls) {
    switch (cls) {
        case QrfaClass::Query: return "Query";
        case QrfaClass::Request: return "Request";
        case QrfaClass::Feedback: return "Feedback";
        case QrfaClass::Answer: return "Answer";
    }
    return "?";
}

std::string_view label(Speaker speaker) {
    return speaker == Speaker::User ? "USER" : "AGENT";
}

std::string qualified_label(UserActionKind kind) {
    const auto& info = user_info(kind);
    if (info.group.empty()) return std::string(info.name);
    return std::string(info.group) + "." + std::string(info.name);
}

std::string qualified_label(AgentActionKind kind) {
    const auto& info = agent_info(kind);
    if (info.group.empty()) return std::string(info.name);
    return std::string(info.group) + "." + std::string(info.name);
}

std::optional<UserActionKind> try_parse_user_action(std::string_view text) {
    for (const auto& info : kUserInfo) {
        if (text == info.name) return info.kind;
        if (!info.group.empty()) {
            std::string qualified = std::string(info.group) + "." + std::string(info.name);
            if (text == qualified) return info.kind;
        }
    }
    return std::nullopt;
}

std::optional<AgentActionKind> try_parse_agent_action(std::string_view text) {
    for (const auto& info : kAgentInfo) {
        if (text == info.name) return info.kind;
        if (!info.group.empty()) {
            std::string qualified = std::string(info.group) + "." + std::string(info.name);
            if (text == qualified) return info.kind;
        }
    }
    return std::nullopt;
}

UserActionKind parse_user_action(std::string_view text) {
    auto kind = try_parse_user_action(text);
    if (!kind) throw TaxonomyError("unknown user action label: " + std::string(text));
    return *kind;
}

AgentActionKind parse_agent_action(std::string_view text) {
    auto kind = try_parse_agent_action(text);
    if (!kind) throw TaxonomyError("unknown agent action label: " + std::string(text));
    return *kind;
}

std::optional<Cir6Main> try_parse_cir6_main(std::string_view text) {
    for (Cir6Main main : kAllCir6Mains) {
        if (text == label(main)) return main;
    }
    return std::nullopt;
}

Cir6Main parse_cir6_main(std::string_view text) {
    auto main = try_parse_cir6_main(text);
    if (!main) throw TaxonomyError("unknown CIR6 main action: " + std::string(text));
    return *main;
}

ActionCategory category(UserActionKind kind) { return user_info(kind).cat; }
ActionCategory category(AgentActionKind kind) { return agent_info(kind).cat; }

std::optional<Cir6Main> cir6_main(UserActionKind kind) { return user_info(kind).main; }

const std::vector<UserActionKind>& cir6_members(Cir6Main main) {
    static const auto tables = [] {
        std::array<std::vector<UserActionKind>, kCir6MainCount> t;
        for (const auto& info : kUserInfo) {
            if (info.main) t[static_cast<std::size_t>(*info.main)].push_back(info.kind);
        }
        return t;
    }();
    return tables[static_cast<std::size_t>(main)];
}

QrfaClass qrfa_class(UserActionKind kind) { return user_info(kind).qrfa; }
QrfaClass qrfa_class(AgentActionKind kind) { return agent_info(kind).qrfa; }

const std::vector<UserActionKind>& qrfa_members(QrfaClass cls) {
    static const auto query = [] {
        std::vector<UserActionKind> v;
        for (const auto& info : kUserInfo)
            if (info.qrfa == QrfaClass::Query) v.push_back(info.kind);
        return v;
    }();
    static const auto feedback = [] {
        std::vector<UserActionKind> v;
        for (const auto& info : kUserInfo)
            if (info.qrfa == QrfaClass::Feedback) v.push_back(info.kind);
        return v;
    }();
    if (cls == QrfaClass::Query) return query;
    if (cls == QrfaClass::Feedback) return feedback;
    throw ArgumentError("qrfa_members: only user-side classes have user members");
}

bool is_valid_slot_name(std::string_view name) {
    return name == "ITEM" || name == "ATTRIBUTE" || name == "SENTIMENT";
}

Slot make_slot(std::string name, std::string value) {
    if (!is_valid_slot_name(name)) {
        throw ArgumentError("slot name outside the declared vocabulary: " + name);
    }
    return Slot{std::move(name), std::move(value)};
}

const std::string* find_slot(const std::vector<Slot>& slots, std::string_view name) {
    auto it = std::find_if(slots.begin(), slots.end(),
                           [&](const Slot& s) { return s.name == name; });
    return it == slots.end() ? nullptr : &it->value;
}

}  // namespace crsim
