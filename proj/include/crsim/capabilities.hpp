#pragma once

#include <set>
#include <string_view>

namespace crsim {

// The five scored agent functions; task completion earns 4 points each.
enum class AgentCapability { Disclose, Refine, Inquire, Navigate, MixedInitiative };

inline constexpr int kPointsPerCapability = 4;

std::string_view label(AgentCapability capability);
AgentCapability parse_capability(std::string_view text);

using CapabilitySet = std::set<AgentCapability>;

CapabilitySet all_capabilities();

}  // namespace crsim
