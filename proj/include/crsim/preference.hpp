#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "crsim/corpus.hpp"
#include "crsim/rng.hpp"

namespace crsim {

inline constexpr std::size_t kDefaultProfileSize = 8;

// Raw 0.5-5.0 rating mapped to the shared sentiment scale: >= 4 liked,
// <= 2 disliked, in between neutral.
int rating_to_sentiment(double raw);

// Consumed-item state of one simulated user, sampled from the historical
// ratings of a real user.
struct UserProfile {
    std::string source_user_id;
    // item id -> sentiment in {-1, 0, +1}; the key set is I_u.
    std::map<std::string, int> item_sentiments;

    bool consumed(const std::string& item_id) const {
        return item_sentiments.count(item_id) > 0;
    }
    std::vector<std::string> items() const;
    std::vector<std::string> liked_items() const;
    std::vector<std::string> disliked_items() const;
    std::vector<std::string> neutral_items() const;

    bool operator==(const UserProfile&) const = default;
};

// Uniformly picks an eligible source user (>= size ratings, at least one
// liked), then samples `size` rated items without replacement, rejecting
// draws with no liked item.
UserProfile sample_profile(const RatingsCorpus& ratings, Rng& rng,
                           std::size_t size = kDefaultProfileSize);

enum class PkgNodeKind { Item, Attribute };

struct PkgNode {
    PkgNodeKind kind;
    std::string id;
};

// Item and attribute nodes with inferred attribute sentiments; guarantees
// that preference answers stay consistent across the dialogue.
struct PersonalKnowledgeGraph {
    UserProfile profile;
    // attribute -> mean item sentiment over the profile items carrying it.
    std::map<std::string, double> attribute_ratings;
    std::set<std::string> liked_attributes;     // r_j > 0
    std::set<std::string> disliked_attributes;  // r_j < 0
    // item id -> its catalog attributes, restricted to profile items.
    std::map<std::string, std::vector<std::string>> item_attributes;

    bool operator==(const PersonalKnowledgeGraph&) const = default;
};

PersonalKnowledgeGraph build_pkg(const UserProfile& profile, const ItemCatalog& catalog);

// Membership check against I_u; unknown ids are simply not consumed.
bool answer_consumed(const UserProfile& profile, const std::string& item_id);

// Single-item preference baseline: a fair coin, independent of the item.
int answer_preference_single(Rng& rng);

// PKG-backed preference answer. Items answer with their recorded sentiment
// (0 when not consumed); attributes answer with the sign of the inferred
// rating (0 when the attribute is absent).
int answer_preference_pkg(const PersonalKnowledgeGraph& pkg, const PkgNode& node);

// Predicted sentiment for an item that is not in I_u, from the mean of the
// inferred ratings of its attributes; attributes without evidence count 0.
int predict_item_sentiment(const PersonalKnowledgeGraph& pkg,
                           const std::vector<std::string>& item_attributes);

}  // namespace crsim
