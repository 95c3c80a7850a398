#pragma once

#include <array>
#include <bitset>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "crsim/actions.hpp"

namespace crsim {

// Connectivity over the six main user actions. Shipped as a data file so
// alternate readings of the diagram stay testable. Complete is terminal.
class Cir6StateDiagram {
public:
    static Cir6StateDiagram load(const std::filesystem::path& path);
    static Cir6StateDiagram parse(std::istream& in, const std::string& source_name);

    void add_edge(Cir6Main from, Cir6Main to) {
        edges_[index_of(from)][index_of(to)] = true;
    }

    bool allowed(Cir6Main from, Cir6Main to) const {
        return edges_[index_of(from)][index_of(to)];
    }

    std::vector<Cir6Main> successors(Cir6Main from) const;

    std::vector<std::pair<Cir6Main, Cir6Main>> edges() const;

    // Complete has no outgoing edges and every other node reaches Complete.
    void validate() const;

    bool operator==(const Cir6StateDiagram&) const = default;

private:
    std::array<std::bitset<kCir6MainCount>, kCir6MainCount> edges_{};
};

}  // namespace crsim
