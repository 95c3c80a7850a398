#include "crsim/cir6_diagram.hpp"

#include <fstream>
#include <sstream>

#include "crsim/errors.hpp"

namespace crsim {

Cir6StateDiagram Cir6StateDiagram::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open CIR6 diagram: " + path.string());
    return parse(in, path.string());
}

Cir6StateDiagram Cir6StateDiagram::parse(std::istream& in, const std::string& source_name) {
    Cir6StateDiagram diagram;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream tokens(line);
        std::string from_label;
        if (!(tokens >> from_label)) continue;
        auto from = try_parse_cir6_main(from_label);
        if (!from) {
            throw ParseError(source_name + ":" + std::to_string(line_no) +
                             ": unknown main action '" + from_label + "'");
        }
        std::string to_label;
        bool any = false;
        while (tokens >> to_label) {
            auto to = try_parse_cir6_main(to_label);
            if (!to) {
                throw ParseError(source_name + ":" + std::to_string(line_no) +
                                 ": unknown main action '" + to_label + "'");
            }
            diagram.add_edge(*from, *to);
            any = true;
        }
        if (!any) {
            throw ParseError(source_name + ":" + std::to_string(line_no) +
                             ": edge line lists no successor");
        }
    }
    diagram.validate();
    return diagram;
}

std::vector<Cir6Main> Cir6StateDiagram::successors(Cir6Main from) const {
    std::vector<Cir6Main> out;
    for (Cir6Main to : kAllCir6Mains) {
        if (allowed(from, to)) out.push_back(to);
    }
    return out;
}

std::vector<std::pair<Cir6Main, Cir6Main>> Cir6StateDiagram::edges() const {
    std::vector<std::pair<Cir6Main, Cir6Main>> out;
    for (Cir6Main from : kAllCir6Mains) {
        for (Cir6Main to : kAllCir6Mains) {
            if (allowed(from, to)) out.emplace_back(from, to);
        }
    }
    return out;
}

void Cir6StateDiagram::validate() const {
    if (edges_[index_of(Cir6Main::Complete)].any()) {
        throw ParseError("CIR6 diagram gives Complete an outgoing edge");
    }
    // Reverse reachability from Complete.
    std::bitset<kCir6MainCount> reaches;
    reaches[index_of(Cir6Main::Complete)] = true;
    bool changed = true;
    while (changed) {
        changed = false;
        for (Cir6Main from : kAllCir6Mains) {
            if (reaches[index_of(from)]) continue;
            for (Cir6Main to : kAllCir6Mains) {
                if (allowed(from, to) && reaches[index_of(to)]) {
                    reaches[index_of(from)] = true;
                    changed = true;
                    break;
                }
            }
        }
    }
    for (Cir6Main main : kAllCir6Mains) {
        if (!reaches[index_of(main)]) {
            throw ParseError("CIR6 diagram: no path from " + std::string(label(main)) +
                             " to Complete");
        }
    }
}

}  // namespace crsim
