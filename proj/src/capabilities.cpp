#include "crsim/capabilities.hpp"

#include "crsim/errors.hpp"

namespace crsim {

std::string_view label(AgentCapability capability) {
    switch (capability) {
        case AgentCapability::Disclose: return "Disclose";
        case AgentCapability::Refine: return "Refine";
        case AgentCapability::Inquire: return "Inquire";
        case AgentCapability::Navigate: return "Navigate";
        case AgentCapability::MixedInitiative: return "MixedInitiative";
    }
    return "?";
}

AgentCapability parse_capability(std::string_view text) {
    if (text == "Disclose") return AgentCapability::Disclose;
    if (text == "Refine") return AgentCapability::Refine;
    if (text == "Inquire") return AgentCapability::Inquire;
    if (text == "Navigate") return AgentCapability::Navigate;
    if (text == "MixedInitiative") return AgentCapability::MixedInitiative;
    throw ParseError("unknown agent capability: " + std::string(text));
}

CapabilitySet all_capabilities() {
    return {AgentCapability::Disclose, AgentCapability::Refine, AgentCapability::Inquire,
            AgentCapability::Navigate, AgentCapability::MixedInitiative};
}

}  // namespace crsim
