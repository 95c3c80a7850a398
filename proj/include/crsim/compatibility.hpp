#pragma once

#include <array>
#include <bitset>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "crsim/actions.hpp"

namespace crsim {

// Which agent actions count as an appropriate response to each user
// action. Shipped as a data file so the mapping stays configurable per
// experiment; the loader rejects unknown kinds.
class CompatibilityTable {
public:
    static CompatibilityTable load(const std::filesystem::path& path);
    static CompatibilityTable parse(std::istream& in, const std::string& source_name);

    bool compatible(UserActionKind user, AgentActionKind agent) const {
        return rows_[index_of(user)][index_of(agent)];
    }

    std::vector<AgentActionKind> compatible_responses(UserActionKind user) const;
    std::vector<AgentActionKind> incompatible_responses(UserActionKind user) const;

    void add(UserActionKind user, AgentActionKind agent) {
        rows_[index_of(user)][index_of(agent)] = true;
    }

    // Throws if some user action has no compatible agent response.
    void validate() const;

private:
    std::array<std::bitset<kAgentActionCount>, kUserActionCount> rows_{};
};

}  // namespace crsim
