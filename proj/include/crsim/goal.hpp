#pragma once

#include <string>
#include <vector>

namespace crsim {

// An attribute requirement the user is seeking, e.g. genre = "comedy".
struct GoalConstraint {
    std::string attribute;
    std::string value;

    bool operator==(const GoalConstraint&) const = default;
};

// Information types the user requests from the agent.
inline constexpr const char* kRequestRecommendation = "RECOMMENDATION";
inline constexpr const char* kRequestItemInfo = "ITEM_INFO";

// Information-seeking goal: constraints on what is sought plus the pieces
// of information requested from the agent.
struct Goal {
    std::vector<GoalConstraint> constraints;
    std::vector<std::string> requests;

    bool operator==(const Goal&) const = default;
};

}  // namespace crsim
