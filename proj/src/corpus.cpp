#include "crsim/corpus.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "crsim/errors.hpp"

namespace crsim {

using nlohmann::json;

namespace {

std::string turn_ref(const std::string& dialogue_id, std::size_t turn_index) {
    return "dialogue '" + dialogue_id + "' turn " + std::to_string(turn_index);
}

CorpusTurn parse_corpus_turn(const json& j, const std::string& dialogue_id,
                             std::size_t turn_index) {
    CorpusTurn turn;
    std::string speaker = j.at("speaker").get<std::string>();
    if (speaker == "USER") {
        turn.speaker = Speaker::User;
    } else if (speaker == "AGENT") {
        turn.speaker = Speaker::Agent;
    } else {
        throw ParseError("unknown speaker '" + speaker + "' in " +
                         turn_ref(dialogue_id, turn_index));
    }
    turn.utterance = j.at("utterance").get<std::string>();
    for (const auto& a : j.at("actions")) {
        std::string action_label = a.get<std::string>();
        if (turn.speaker == Speaker::User) {
            if (!try_parse_user_action(action_label)) {
                throw TaxonomyError("unknown user action label '" + action_label + "' in " +
                                    turn_ref(dialogue_id, turn_index));
            }
        } else {
            if (!try_parse_agent_action(action_label)) {
                throw TaxonomyError("unknown agent action label '" + action_label + "' in " +
                                    turn_ref(dialogue_id, turn_index));
            }
        }
        turn.actions.push_back(action_label);
    }
    if (j.contains("entities")) {
        for (const auto& e : j.at("entities")) {
            turn.entities.push_back(CorpusEntity{e.at("mention").get<std::string>(),
                                                 e.at("id").get<std::string>()});
        }
    }
    return turn;
}

}  // namespace

std::vector<UserActionKind> AnnotatedDialogueCorpus::user_action_stream(
    const CorpusDialogue& dialogue) {
    std::vector<UserActionKind> out;
    for (const auto& turn : dialogue.turns) {
        if (turn.speaker != Speaker::User) continue;
        for (const auto& a : turn.actions) out.push_back(parse_user_action(a));
    }
    return out;
}

AnnotatedDialogueCorpus load_dialogues(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open dialogue corpus: " + path.string());
    return parse_dialogues(in, path.string());
}

AnnotatedDialogueCorpus parse_dialogues(std::istream& in, const std::string& source_name) {
    AnnotatedDialogueCorpus corpus;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError(source_name + ":" + std::to_string(line_no) +
                             ": bad dialogue record: " + e.what());
        }
        CorpusDialogue dialogue;
        try {
            dialogue.id = j.at("dialogue_id").get<std::string>();
            const auto& turns = j.at("turns");
            for (std::size_t i = 0; i < turns.size(); ++i) {
                dialogue.turns.push_back(parse_corpus_turn(turns[i], dialogue.id, i));
            }
        } catch (const json::exception& e) {
            throw ParseError(source_name + ":" + std::to_string(line_no) +
                             ": dialogue record violates schema: " + e.what());
        }
        corpus.dialogues.push_back(std::move(dialogue));
    }
    if (corpus.empty()) {
        throw ParseError(source_name + ": corpus contains no dialogues");
    }
    return corpus;
}

void ItemCatalog::add(CatalogItem item) {
    items_[item.id] = std::move(item);
}

const CatalogItem& ItemCatalog::at(const std::string& item_id) const {
    auto it = items_.find(item_id);
    if (it == items_.end()) throw ReferentialError("unknown item id: " + item_id);
    return it->second;
}

const CatalogItem* ItemCatalog::find(const std::string& item_id) const {
    auto it = items_.find(item_id);
    return it == items_.end() ? nullptr : &it->second;
}

namespace {

// Minimal CSV field splitter with double-quote support, enough for titles
// containing commas.
std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(field);
            field.clear();
        } else if (c != '\r') {
            field.push_back(c);
        }
    }
    fields.push_back(field);
    return fields;
}

std::vector<std::string> split_pipe(const std::string& text) {
    std::vector<std::string> parts;
    std::string part;
    std::istringstream in(text);
    while (std::getline(in, part, '|')) {
        if (!part.empty()) parts.push_back(part);
    }
    return parts;
}

}  // namespace

ItemCatalog ItemCatalog::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open item catalog: " + path.string());
    return parse(in, path.string());
}

ItemCatalog ItemCatalog::parse(std::istream& in, const std::string& source_name) {
    ItemCatalog catalog;
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto fields = split_csv_line(line);
        if (!header_seen) {
            header_seen = true;
            if (fields.size() >= 2 && fields[0] == "item_id") continue;  // header row
        }
        if (fields.size() < 3) {
            throw ParseError(source_name + ":" + std::to_string(line_no) +
                             ": expected item_id,title,attributes");
        }
        catalog.add(CatalogItem{fields[0], fields[1], split_pipe(fields[2])});
    }
    return catalog;
}

std::map<std::string, std::vector<Rating>> RatingsCorpus::by_user() const {
    std::map<std::string, std::vector<Rating>> grouped;
    for (const auto& r : ratings) grouped[r.user_id].push_back(r);
    return grouped;
}

RatingsCorpus load_ratings(const std::filesystem::path& ratings_path,
                           const std::filesystem::path& catalog_path) {
    ItemCatalog catalog = ItemCatalog::load(catalog_path);
    std::ifstream in(ratings_path);
    if (!in) throw ParseError("cannot open ratings: " + ratings_path.string());
    return parse_ratings(in, ratings_path.string(), std::move(catalog));
}

RatingsCorpus parse_ratings(std::istream& ratings_in, const std::string& ratings_name,
                            ItemCatalog catalog) {
    RatingsCorpus corpus;
    corpus.catalog = std::move(catalog);
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    while (std::getline(ratings_in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto fields = split_csv_line(line);
        if (!header_seen) {
            header_seen = true;
            if (fields.size() >= 3 && fields[0] == "user_id") continue;
        }
        if (fields.size() < 3) {
            throw ParseError(ratings_name + ":" + std::to_string(line_no) +
                             ": expected user_id,item_id,rating");
        }
        Rating rating;
        rating.user_id = fields[0];
        rating.item_id = fields[1];
        try {
            rating.value = std::stod(fields[2]);
        } catch (const std::exception&) {
            throw ParseError(ratings_name + ":" + std::to_string(line_no) +
                             ": rating is not a number: '" + fields[2] + "'");
        }
        if (rating.value < kMinRating || rating.value > kMaxRating) {
            throw RangeError(ratings_name + ":" + std::to_string(line_no) + ": rating " +
                             fields[2] + " outside [0.5, 5.0]");
        }
        if (!corpus.catalog.contains(rating.item_id)) {
            throw ReferentialError(ratings_name + ":" + std::to_string(line_no) +
                                   ": item '" + rating.item_id + "' missing from catalog");
        }
        corpus.ratings.push_back(std::move(rating));
    }
    return corpus;
}

}  // namespace crsim
