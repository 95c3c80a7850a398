#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "crsim/actions.hpp"
#include "crsim/rng.hpp"

namespace crsim {

struct Template {
    std::string text;
    bool typo = false;  // intentional-typo variant, kept out of round-trip checks

    bool operator==(const Template&) const = default;
};

// Hand-crafted utterance variations per action kind, with slot
// placeholders like <ITEM> and <ATTRIBUTE>.
class TemplateBank {
public:
    explicit TemplateBank(Speaker side) : side_(side) {}

    // TSV file: label <TAB> template [<TAB> "typo"]
    static TemplateBank load(const std::filesystem::path& path, Speaker side);
    static TemplateBank parse(std::istream& in, const std::string& source_name, Speaker side);

    void add(const std::string& action_label, const std::string& template_text, bool typo);

    bool covers(const std::string& action_label) const;
    const std::vector<Template>& templates(const std::string& action_label) const;
    Speaker side() const { return side_; }
    const std::map<std::string, std::vector<Template>>& all() const { return templates_; }

    // Every kind of this side's taxonomy must have at least one template.
    void validate_full_coverage() const;

private:
    Speaker side_;
    std::map<std::string, std::vector<Template>> templates_;
};

// Uniformly samples a template for the action's kind and substitutes the
// placeholders from the action's slots. Missing template coverage or a
// placeholder without a slot value is an error.
std::string render(const UserAction& action, const TemplateBank& bank, Rng& rng);
std::string render(const AgentAction& action, const TemplateBank& bank, Rng& rng);

// Engine-side variant: samples only among templates whose placeholders are
// all covered by the provided slots, so optional slots select richer
// templates when available.
std::string render_covered(const UserAction& action, const TemplateBank& bank, Rng& rng);
std::string render_covered(const AgentAction& action, const TemplateBank& bank, Rng& rng);

// Substitutes the placeholders of one template text.
std::string fill_template(const std::string& template_text, const std::vector<Slot>& slots);

class LabeledUtteranceIndex;

// Retrieval index whose entries are the bank's own templates, used for
// round-trip checks and by the stub agents' user-side understanding.
LabeledUtteranceIndex index_from_bank(const TemplateBank& bank, bool include_typos = true);

}  // namespace crsim
