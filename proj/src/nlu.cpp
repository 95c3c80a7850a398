#include "crsim/nlu.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "crsim/errors.hpp"

namespace crsim {

std::string normalize_text(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (unsigned char c : text) {
        if (std::isalnum(c)) {
            if (pending_space && !out.empty()) out.push_back(' ');
            pending_space = false;
            out.push_back(static_cast<char>(std::tolower(c)));
        } else {
            pending_space = true;
        }
    }
    return out;
}

std::vector<std::string> tokenize(const std::string& normalized) {
    std::vector<std::string> tokens;
    std::istringstream in(normalized);
    std::string token;
    while (in >> token) tokens.push_back(token);
    return tokens;
}

double token_set_similarity(const std::set<std::string>& a, const std::set<std::string>& b) {
    if (a.empty() && b.empty()) return 0.0;
    std::size_t intersection = 0;
    for (const auto& t : a) intersection += b.count(t);
    std::size_t union_size = a.size() + b.size() - intersection;
    if (union_size == 0) return 0.0;
    return static_cast<double>(intersection) / static_cast<double>(union_size);
}

TemplateShape parse_template(const std::string& template_text) {
    TemplateShape shape;
    std::string literal;
    std::size_t i = 0;
    while (i < template_text.size()) {
        if (template_text[i] == '<') {
            auto close = template_text.find('>', i);
            if (close == std::string::npos) {
                throw ParseError("unterminated placeholder in template: " + template_text);
            }
            std::string name = template_text.substr(i + 1, close - i - 1);
            if (!is_valid_slot_name(name)) {
                throw ParseError("placeholder '" + name + "' names no declared slot in: " +
                                 template_text);
            }
            shape.literals.push_back(normalize_text(literal));
            shape.placeholders.push_back(name);
            literal.clear();
            i = close + 1;
        } else {
            literal.push_back(template_text[i]);
            ++i;
        }
    }
    shape.literals.push_back(normalize_text(literal));
    return shape;
}

void LabeledUtteranceIndex::add(const std::string& utterance, const std::string& action_label,
                                const std::string& template_text) {
    if (side_ == Speaker::Agent) {
        if (!try_parse_agent_action(action_label)) {
            throw TaxonomyError("index entry labeled with unknown agent action: " + action_label);
        }
    } else {
        if (!try_parse_user_action(action_label)) {
            throw TaxonomyError("index entry labeled with unknown user action: " + action_label);
        }
    }
    IndexEntry entry;
    entry.utterance = utterance;
    entry.normalized = normalize_text(utterance);
    entry.action_label = action_label;
    entry.template_text = template_text.empty() ? utterance : template_text;
    entry.shape = parse_template(entry.template_text);

    // Placeholder-derived tokens carry no lexical evidence; drop them so a
    // filled-in utterance still matches its own template well.
    auto tokens = tokenize(entry.normalized);
    std::set<std::string> placeholder_tokens;
    for (const auto& name : entry.shape.placeholders) {
        for (const auto& t : tokenize(normalize_text("<" + name + ">"))) {
            placeholder_tokens.insert(t);
        }
    }
    for (const auto& t : tokens) {
        if (!placeholder_tokens.count(t)) entry.tokens.insert(t);
    }
    entries_.push_back(std::move(entry));
}

LabeledUtteranceIndex LabeledUtteranceIndex::load(const std::filesystem::path& path,
                                                  Speaker side) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open labeled utterance file: " + path.string());
    return parse(in, path.string(), side);
}

LabeledUtteranceIndex LabeledUtteranceIndex::parse(std::istream& in,
                                                   const std::string& source_name,
                                                   Speaker side) {
    LabeledUtteranceIndex index(side);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
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
        if (!fields.empty() && !fields.back().empty() && fields.back().back() == '\r') {
            fields.back().pop_back();
        }
        if (fields.size() < 2) {
            throw ParseError(source_name + ":" + std::to_string(line_no) +
                             ": expected utterance<TAB>label[<TAB>template]");
        }
        try {
            index.add(fields[0], fields[1], fields.size() > 2 ? fields[2] : "");
        } catch (const Error& e) {
            throw ParseError(source_name + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return index;
}

namespace {

std::size_t common_prefix_length(const std::string& a, const std::string& b) {
    std::size_t n = std::min(a.size(), b.size());
    std::size_t i = 0;
    while (i < n && a[i] == b[i]) ++i;
    return i;
}

}  // namespace

Classification classify(const std::string& utterance, const LabeledUtteranceIndex& index,
                        double floor) {
    if (index.empty()) throw ArgumentError("classification against an empty index");
    std::string normalized = normalize_text(utterance);
    auto tokens = tokenize(normalized);
    std::set<std::string> token_set(tokens.begin(), tokens.end());

    const IndexEntry* best = nullptr;
    double best_score = -1.0;
    std::size_t best_prefix = 0;
    for (const auto& entry : index.entries()) {
        double score = token_set_similarity(token_set, entry.tokens);
        std::size_t prefix = common_prefix_length(normalized, entry.normalized);
        bool better = false;
        if (score > best_score) {
            better = true;
        } else if (score == best_score && best) {
            if (prefix > best_prefix) {
                better = true;
            } else if (prefix == best_prefix) {
                if (entry.action_label < best->action_label) {
                    better = true;
                } else if (entry.action_label == best->action_label &&
                           entry.normalized < best->normalized) {
                    better = true;
                }
            }
        }
        if (better) {
            best = &entry;
            best_score = score;
            best_prefix = prefix;
        }
    }

    Classification result;
    result.score = std::max(best_score, 0.0);
    result.best_entry = best;
    if (best && best_score >= floor) result.action_label = best->action_label;
    return result;
}

std::optional<AgentActionKind> classify_agent_action(const std::string& utterance,
                                                     const LabeledUtteranceIndex& index,
                                                     double floor) {
    auto result = classify(utterance, index, floor);
    if (!result.action_label) return std::nullopt;
    return parse_agent_action(*result.action_label);
}

void EntityCatalog::add(const std::string& entity_id,
                        const std::vector<std::string>& surface_forms) {
    if (surface_forms.empty()) {
        throw ArgumentError("entity '" + entity_id + "' has no surface forms");
    }
    Entry entry;
    entry.id = entity_id;
    for (const auto& form : surface_forms) {
        std::string normalized = normalize_text(form);
        if (normalized.empty()) continue;
        auto tokens = tokenize(normalized);
        entry.form_tokens.emplace_back(tokens.begin(), tokens.end());
        entry.forms_normalized.push_back(std::move(normalized));
    }
    if (entry.forms_normalized.empty()) {
        throw ArgumentError("entity '" + entity_id + "' has only empty surface forms");
    }
    entries_.push_back(std::move(entry));
    std::sort(entries_.begin(), entries_.end(),
              [](const Entry& a, const Entry& b) { return a.id < b.id; });
}

EntityCatalog EntityCatalog::from_items(const ItemCatalog& items) {
    EntityCatalog catalog;
    for (const auto& [id, item] : items.items()) {
        catalog.add(id, {item.title});
    }
    return catalog;
}

namespace {

struct Alignment {
    // Placeholder spans over the normalized utterance, in template order.
    std::vector<std::pair<std::size_t, std::size_t>> spans;
};

// Matches the template's literal segments left to right; the text between
// them becomes the placeholder spans. Leading/trailing literals must anchor
// at the utterance edges.
std::optional<Alignment> align_template(const std::string& normalized,
                                        const TemplateShape& shape) {
    if (shape.placeholders.empty()) return std::nullopt;
    Alignment alignment;
    std::size_t pos = 0;
    const std::string& head = shape.literals.front();
    if (!head.empty()) {
        if (normalized.rfind(head, 0) != 0) return std::nullopt;
        pos = head.size();
    }
    for (std::size_t p = 0; p < shape.placeholders.size(); ++p) {
        const std::string& next_literal = shape.literals[p + 1];
        std::size_t span_begin = pos;
        // Skip the separating space the normalizer leaves between segments.
        while (span_begin < normalized.size() && normalized[span_begin] == ' ') ++span_begin;
        std::size_t span_end;
        if (next_literal.empty()) {
            if (p + 1 == shape.placeholders.size() && shape.literals.size() == p + 2) {
                span_end = normalized.size();
                pos = span_end;
            } else {
                // Adjacent placeholders are not alignable.
                return std::nullopt;
            }
        } else {
            auto found = normalized.find(next_literal, span_begin);
            if (found == std::string::npos) return std::nullopt;
            span_end = found;
            pos = found + next_literal.size();
        }
        while (span_end > span_begin && normalized[span_end - 1] == ' ') --span_end;
        if (span_end <= span_begin) return std::nullopt;
        alignment.spans.emplace_back(span_begin, span_end);
    }
    if (!shape.literals.back().empty() && pos != normalized.size()) return std::nullopt;
    return alignment;
}

}  // namespace

std::vector<EntityLink> link_entities(const std::string& utterance,
                                      const LabeledUtteranceIndex& index,
                                      const EntityCatalog& catalog, double floor) {
    if (index.empty() || catalog.empty()) return {};
    std::string normalized = normalize_text(utterance);
    auto tokens = tokenize(normalized);
    std::set<std::string> token_set(tokens.begin(), tokens.end());

    // Try entries in decreasing similarity; the first one whose template
    // aligns provides the placeholder spans.
    std::vector<const IndexEntry*> candidates;
    for (const auto& entry : index.entries()) {
        if (!entry.shape.placeholders.empty()) candidates.push_back(&entry);
    }
    std::sort(candidates.begin(), candidates.end(),
              [&](const IndexEntry* a, const IndexEntry* b) {
                  double sa = token_set_similarity(token_set, a->tokens);
                  double sb = token_set_similarity(token_set, b->tokens);
                  if (sa != sb) return sa > sb;
                  if (a->action_label != b->action_label) return a->action_label < b->action_label;
                  return a->normalized < b->normalized;
              });

    for (const IndexEntry* entry : candidates) {
        auto alignment = align_template(normalized, entry->shape);
        if (!alignment) continue;

        std::vector<EntityLink> links;
        for (std::size_t p = 0; p < alignment->spans.size(); ++p) {
            auto [begin, end] = alignment->spans[p];
            std::string mention = normalized.substr(begin, end - begin);
            auto mention_tokens = tokenize(mention);
            std::set<std::string> mention_set(mention_tokens.begin(), mention_tokens.end());

            const EntityCatalog::Entry* best_entity = nullptr;
            double best_score = -1.0;
            for (const auto& entity : catalog.entries()) {
                double entity_score = 0.0;
                for (const auto& form : entity.form_tokens) {
                    entity_score = std::max(entity_score,
                                            token_set_similarity(mention_set, form));
                }
                // Ties resolve to the smallest entity id: entries are kept
                // sorted by id, so strict improvement suffices.
                if (entity_score > best_score) {
                    best_score = entity_score;
                    best_entity = &entity;
                }
            }
            if (best_entity && best_score >= floor) {
                links.push_back(EntityLink{begin, end, mention,
                                           entry->shape.placeholders[p], best_entity->id,
                                           best_score});
            }
        }
        return links;
    }
    return {};
}

}  // namespace crsim
