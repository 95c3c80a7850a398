#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "crsim/actions.hpp"
#include "crsim/corpus.hpp"

namespace crsim {

inline constexpr double kDefaultSimilarityFloor = 0.2;

// Lowercase, punctuation stripped, whitespace collapsed.
std::string normalize_text(const std::string& text);
std::vector<std::string> tokenize(const std::string& normalized);

// Token-set overlap ratio |A n B| / |A u B| over normalized token sets.
double token_set_similarity(const std::set<std::string>& a, const std::set<std::string>& b);

// One template split into literal segments around slot placeholders, e.g.
// "Have you seen <ITEM>?" -> ["Have you seen ", "?"] with ITEM between.
struct TemplateShape {
    std::vector<std::string> literals;      // size = placeholders + 1, normalized
    std::vector<std::string> placeholders;  // slot names in order
};

TemplateShape parse_template(const std::string& template_text);

struct IndexEntry {
    std::string utterance;   // original surface form
    std::string normalized;  // normalized utterance
    std::set<std::string> tokens;  // normalized tokens minus placeholder tokens
    std::string action_label;
    std::string template_text;
    TemplateShape shape;
};

// Retrieval index over labeled utterances. Side selects which taxonomy the
// labels are validated against.
class LabeledUtteranceIndex {
public:
    explicit LabeledUtteranceIndex(Speaker side) : side_(side) {}

    // TSV file: utterance <TAB> action label <TAB> template (template may
    // equal the utterance).
    static LabeledUtteranceIndex load(const std::filesystem::path& path, Speaker side);
    static LabeledUtteranceIndex parse(std::istream& in, const std::string& source_name,
                                       Speaker side);

    void add(const std::string& utterance, const std::string& action_label,
             const std::string& template_text);

    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }
    const std::vector<IndexEntry>& entries() const { return entries_; }
    Speaker side() const { return side_; }

private:
    Speaker side_;
    std::vector<IndexEntry> entries_;
};

struct Classification {
    // Unset when the best similarity fell below the floor.
    std::optional<std::string> action_label;
    double score = 0.0;
    const IndexEntry* best_entry = nullptr;
};

// Retrieval classification: label of the most similar index entry.
// Deterministic: ties break on longest common prefix with the utterance,
// then lexicographically smallest label.
Classification classify(const std::string& utterance, const LabeledUtteranceIndex& index,
                        double floor = kDefaultSimilarityFloor);

// Convenience wrapper for the engine's agent-side index.
std::optional<AgentActionKind> classify_agent_action(const std::string& utterance,
                                                     const LabeledUtteranceIndex& index,
                                                     double floor = kDefaultSimilarityFloor);

// Entity id with its normalized surface forms.
class EntityCatalog {
public:
    void add(const std::string& entity_id, const std::vector<std::string>& surface_forms);
    static EntityCatalog from_items(const ItemCatalog& items);

    bool empty() const { return entries_.empty(); }

    struct Entry {
        std::string id;
        std::vector<std::set<std::string>> form_tokens;
        std::vector<std::string> forms_normalized;
    };
    const std::vector<Entry>& entries() const { return entries_; }

private:
    std::vector<Entry> entries_;
};

struct EntityLink {
    std::size_t begin = 0;  // span over the normalized utterance
    std::size_t end = 0;
    std::string mention;    // normalized span text
    std::string slot_name;  // placeholder the span filled
    std::string entity_id;
    double score = 0.0;
};

// Aligns the utterance against the templates of the most similar entries
// and resolves placeholder spans against catalog surface forms. Spans never
// overlap; unresolved placeholders yield no link.
std::vector<EntityLink> link_entities(const std::string& utterance,
                                      const LabeledUtteranceIndex& index,
                                      const EntityCatalog& catalog,
                                      double floor = kDefaultSimilarityFloor);

}  // namespace crsim
