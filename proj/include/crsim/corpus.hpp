#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "crsim/actions.hpp"

namespace crsim {

struct CorpusEntity {
    std::string mention;
    std::string id;

    bool operator==(const CorpusEntity&) const = default;
};

struct CorpusTurn {
    Speaker speaker = Speaker::User;
    std::string utterance;
    std::vector<std::string> actions;  // validated taxonomy labels
    std::vector<CorpusEntity> entities;

    bool operator==(const CorpusTurn&) const = default;
};

struct CorpusDialogue {
    std::string id;
    std::vector<CorpusTurn> turns;

    bool operator==(const CorpusDialogue&) const = default;
};

// Human-agent dialogues with manually annotated actions, the training
// material for the interaction models.
struct AnnotatedDialogueCorpus {
    std::vector<CorpusDialogue> dialogues;

    bool empty() const { return dialogues.empty(); }

    // Flattened user actions of one dialogue, in order.
    static std::vector<UserActionKind> user_action_stream(const CorpusDialogue& dialogue);
};

// One dialogue per line, JSON-encoded. Unknown action labels and schema
// violations are rejected with the dialogue id and turn index.
AnnotatedDialogueCorpus load_dialogues(const std::filesystem::path& path);
AnnotatedDialogueCorpus parse_dialogues(std::istream& in, const std::string& source_name);

struct CatalogItem {
    std::string id;
    std::string title;
    std::vector<std::string> attributes;

    bool operator==(const CatalogItem&) const = default;
};

class ItemCatalog {
public:
    static ItemCatalog load(const std::filesystem::path& path);
    static ItemCatalog parse(std::istream& in, const std::string& source_name);

    void add(CatalogItem item);
    bool contains(const std::string& item_id) const { return items_.count(item_id) > 0; }
    const CatalogItem& at(const std::string& item_id) const;
    const CatalogItem* find(const std::string& item_id) const;
    std::size_t size() const { return items_.size(); }

    // Sorted by item id, for deterministic iteration.
    const std::map<std::string, CatalogItem>& items() const { return items_; }

private:
    std::map<std::string, CatalogItem> items_;
};

struct Rating {
    std::string user_id;
    std::string item_id;
    double value = 0.0;  // raw scale 0.5 - 5.0

    bool operator==(const Rating&) const = default;
};

inline constexpr double kMinRating = 0.5;
inline constexpr double kMaxRating = 5.0;

// Historical user-item interactions joined against the item catalog.
struct RatingsCorpus {
    std::vector<Rating> ratings;
    ItemCatalog catalog;

    // Ratings grouped per user, users sorted by id.
    std::map<std::string, std::vector<Rating>> by_user() const;
};

// ratings: delimited text with header user_id,item_id,rating.
// catalog: item_id,title,attributes with pipe-separated attributes.
RatingsCorpus load_ratings(const std::filesystem::path& ratings_path,
                           const std::filesystem::path& catalog_path);
RatingsCorpus parse_ratings(std::istream& ratings_in, const std::string& ratings_name,
                            ItemCatalog catalog);

}  // namespace crsim
