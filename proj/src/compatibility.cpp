#include "crsim/compatibility.hpp"

#include <fstream>
#include <sstream>

#include "crsim/errors.hpp"

namespace crsim {

CompatibilityTable CompatibilityTable::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open compatibility table: " + path.string());
    return parse(in, path.string());
}

CompatibilityTable CompatibilityTable::parse(std::istream& in, const std::string& source_name) {
    CompatibilityTable table;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream tokens(line);
        std::string user_label;
        if (!(tokens >> user_label)) continue;
        auto user = try_parse_user_action(user_label);
        if (!user) {
            throw ParseError(source_name + ":" + std::to_string(line_no) +
                             ": unknown user action kind '" + user_label + "'");
        }
        std::string agent_label;
        bool any = false;
        while (tokens >> agent_label) {
            auto agent = try_parse_agent_action(agent_label);
            if (!agent) {
                throw ParseError(source_name + ":" + std::to_string(line_no) +
                                 ": unknown agent action kind '" + agent_label + "'");
            }
            table.add(*user, *agent);
            any = true;
        }
        if (!any) {
            throw ParseError(source_name + ":" + std::to_string(line_no) +
                             ": user action '" + user_label + "' lists no agent responses");
        }
    }
    table.validate();
    return table;
}

std::vector<AgentActionKind> CompatibilityTable::compatible_responses(UserActionKind user) const {
    std::vector<AgentActionKind> out;
    for (AgentActionKind agent : kAllAgentActions) {
        if (compatible(user, agent)) out.push_back(agent);
    }
    return out;
}

std::vector<AgentActionKind> CompatibilityTable::incompatible_responses(UserActionKind user) const {
    std::vector<AgentActionKind> out;
    for (AgentActionKind agent : kAllAgentActions) {
        if (!compatible(user, agent)) out.push_back(agent);
    }
    return out;
}

void CompatibilityTable::validate() const {
    for (UserActionKind user : kAllUserActions) {
        if (rows_[index_of(user)].none()) {
            throw ParseError("compatibility table leaves user action '" +
                             std::string(label(user)) + "' without any compatible response");
        }
    }
}

}  // namespace crsim
