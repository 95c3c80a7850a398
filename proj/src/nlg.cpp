#include "crsim/nlg.hpp"

#include <fstream>
#include <sstream>

#include "crsim/errors.hpp"
#include "crsim/nlu.hpp"

namespace crsim {

TemplateBank TemplateBank::load(const std::filesystem::path& path, Speaker side) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open template bank: " + path.string());
    return parse(in, path.string(), side);
}

TemplateBank TemplateBank::parse(std::istream& in, const std::string& source_name,
                                 Speaker side) {
    TemplateBank bank(side);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            auto tab = line.find('\t', start);
            if (tab == std::string::npos) {
                fields.push_back(line.substr(start));
                break;
            }
            fields.push_back(line.substr(start, tab - start));
            start = tab + 1;
        }
        if (fields.size() < 2) {
            throw ParseError(source_name + ":" + std::to_string(line_no) +
                             ": expected label<TAB>template[<TAB>typo]");
        }
        bool typo = fields.size() > 2 && fields[2] == "typo";
        try {
            bank.add(fields[0], fields[1], typo);
        } catch (const Error& e) {
            throw ParseError(source_name + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return bank;
}

void TemplateBank::add(const std::string& action_label, const std::string& template_text,
                       bool typo) {
    if (side_ == Speaker::User) {
        if (!try_parse_user_action(action_label)) {
            throw TaxonomyError("template for unknown user action: " + action_label);
        }
    } else {
        if (!try_parse_agent_action(action_label)) {
            throw TaxonomyError("template for unknown agent action: " + action_label);
        }
    }
    parse_template(template_text);  // placeholder names must be declared slots
    std::string canonical = side_ == Speaker::User
                                ? std::string(label(parse_user_action(action_label)))
                                : std::string(label(parse_agent_action(action_label)));
    templates_[canonical].push_back(Template{template_text, typo});
}

bool TemplateBank::covers(const std::string& action_label) const {
    return templates_.count(action_label) > 0;
}

const std::vector<Template>& TemplateBank::templates(const std::string& action_label) const {
    auto it = templates_.find(action_label);
    if (it == templates_.end()) {
        throw CoverageError("no template for action kind: " + action_label);
    }
    return it->second;
}

void TemplateBank::validate_full_coverage() const {
    if (side_ == Speaker::User) {
        for (UserActionKind kind : kAllUserActions) {
            if (!covers(std::string(label(kind)))) {
                throw CoverageError("user template bank misses kind: " +
                                    std::string(label(kind)));
            }
        }
    } else {
        for (AgentActionKind kind : kAllAgentActions) {
            if (!covers(std::string(label(kind)))) {
                throw CoverageError("agent template bank misses kind: " +
                                    std::string(label(kind)));
            }
        }
    }
}

std::string fill_template(const std::string& template_text, const std::vector<Slot>& slots) {
    std::string out;
    std::size_t i = 0;
    while (i < template_text.size()) {
        if (template_text[i] == '<') {
            auto close = template_text.find('>', i);
            if (close == std::string::npos) {
                throw ParseError("unterminated placeholder in template: " + template_text);
            }
            std::string name = template_text.substr(i + 1, close - i - 1);
            const std::string* value = find_slot(slots, name);
            if (!value) {
                throw SlotError("no slot value for placeholder <" + name + "> in: " +
                                template_text);
            }
            out += *value;
            i = close + 1;
        } else {
            out.push_back(template_text[i]);
            ++i;
        }
    }
    return out;
}

namespace {

std::string render_impl(const std::string& action_label, const std::vector<Slot>& slots,
                        const TemplateBank& bank, Rng& rng) {
    const auto& templates = bank.templates(action_label);
    const Template& chosen = templates[rng.next_below(templates.size())];
    return fill_template(chosen.text, slots);
}

std::string render_covered_impl(const std::string& action_label, const std::vector<Slot>& slots,
                                const TemplateBank& bank, Rng& rng) {
    const auto& templates = bank.templates(action_label);
    std::vector<const Template*> usable;
    for (const auto& t : templates) {
        auto shape = parse_template(t.text);
        bool covered = true;
        for (const auto& name : shape.placeholders) {
            if (!find_slot(slots, name)) {
                covered = false;
                break;
            }
        }
        if (covered) usable.push_back(&t);
    }
    if (usable.empty()) {
        throw SlotError("no template for '" + action_label + "' renderable from given slots");
    }
    const Template& chosen = *usable[rng.next_below(usable.size())];
    return fill_template(chosen.text, slots);
}

}  // namespace

std::string render(const UserAction& action, const TemplateBank& bank, Rng& rng) {
    return render_impl(std::string(label(action.kind)), action.slots, bank, rng);
}

std::string render(const AgentAction& action, const TemplateBank& bank, Rng& rng) {
    return render_impl(std::string(label(action.kind)), action.slots, bank, rng);
}

std::string render_covered(const UserAction& action, const TemplateBank& bank, Rng& rng) {
    return render_covered_impl(std::string(label(action.kind)), action.slots, bank, rng);
}

std::string render_covered(const AgentAction& action, const TemplateBank& bank, Rng& rng) {
    return render_covered_impl(std::string(label(action.kind)), action.slots, bank, rng);
}

LabeledUtteranceIndex index_from_bank(const TemplateBank& bank, bool include_typos) {
    LabeledUtteranceIndex index(bank.side());
    for (const auto& [action_label, templates] : bank.all()) {
        for (const auto& t : templates) {
            if (!include_typos && t.typo) continue;
            index.add(t.text, action_label, t.text);
        }
    }
    return index;
}

}  // namespace crsim

