#include "crsim/preference.hpp"

#include <algorithm>

#include "crsim/errors.hpp"

namespace crsim {

int rating_to_sentiment(double raw) {
    if (raw < kMinRating || raw > kMaxRating) {
        throw RangeError("rating " + std::to_string(raw) + " outside [0.5, 5.0]");
    }
    if (raw >= 4.0) return 1;
    if (raw <= 2.0) return -1;
    return 0;
}

std::vector<std::string> UserProfile::items() const {
    std::vector<std::string> out;
    for (const auto& [id, s] : item_sentiments) out.push_back(id);
    return out;
}

std::vector<std::string> UserProfile::liked_items() const {
    std::vector<std::string> out;
    for (const auto& [id, s] : item_sentiments)
        if (s > 0) out.push_back(id);
    return out;
}

std::vector<std::string> UserProfile::disliked_items() const {
    std::vector<std::string> out;
    for (const auto& [id, s] : item_sentiments)
        if (s < 0) out.push_back(id);
    return out;
}

std::vector<std::string> UserProfile::neutral_items() const {
    std::vector<std::string> out;
    for (const auto& [id, s] : item_sentiments)
        if (s == 0) out.push_back(id);
    return out;
}

UserProfile sample_profile(const RatingsCorpus& ratings, Rng& rng, std::size_t size) {
    if (size == 0) throw ArgumentError("profile size must be positive");
    auto grouped = ratings.by_user();

    // Keep one rating per (user, item); repeated ratings would break
    // without-replacement sampling below.
    std::map<std::string, std::vector<Rating>> deduped;
    for (const auto& [user_id, user_ratings] : grouped) {
        std::set<std::string> seen;
        for (const auto& r : user_ratings) {
            if (seen.insert(r.item_id).second) deduped[user_id].push_back(r);
        }
    }

    std::vector<const std::pair<const std::string, std::vector<Rating>>*> eligible;
    for (const auto& entry : deduped) {
        if (entry.second.size() < size) continue;
        bool has_liked = std::any_of(entry.second.begin(), entry.second.end(),
                                     [](const Rating& r) { return rating_to_sentiment(r.value) > 0; });
        if (has_liked) eligible.push_back(&entry);
    }
    if (eligible.empty()) {
        throw SamplingError("no user owns " + std::to_string(size) +
                            " ratings with at least one liked item");
    }

    const auto& [user_id, user_ratings] = *eligible[rng.next_below(eligible.size())];

    // Rejection sampling until the subsample carries a liked item. The
    // chosen user has one, so this terminates with probability one.
    while (true) {
        std::vector<std::size_t> order(user_ratings.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        rng.shuffle(order);

        UserProfile profile;
        profile.source_user_id = user_id;
        bool liked = false;
        for (std::size_t i = 0; i < size; ++i) {
            const Rating& r = user_ratings[order[i]];
            int sentiment = rating_to_sentiment(r.value);
            profile.item_sentiments[r.item_id] = sentiment;
            if (sentiment > 0) liked = true;
        }
        if (liked && profile.item_sentiments.size() == size) return profile;
    }
}

PersonalKnowledgeGraph build_pkg(const UserProfile& profile, const ItemCatalog& catalog) {
    PersonalKnowledgeGraph pkg;
    pkg.profile = profile;

    std::map<std::string, std::pair<double, std::size_t>> sums;  // attr -> (sum, count)
    for (const auto& [item_id, sentiment] : profile.item_sentiments) {
        const CatalogItem* item = catalog.find(item_id);
        if (!item) {
            throw ReferentialError("profile item '" + item_id + "' missing from catalog");
        }
        if (item->attributes.empty()) {
            throw ReferentialError("profile item '" + item_id + "' has no attributes");
        }
        pkg.item_attributes[item_id] = item->attributes;
        for (const auto& attr : item->attributes) {
            auto& [sum, count] = sums[attr];
            sum += static_cast<double>(sentiment);
            count += 1;
        }
    }
    for (const auto& [attr, sum_count] : sums) {
        double r = sum_count.first / static_cast<double>(sum_count.second);
        pkg.attribute_ratings[attr] = r;
        if (r > 0.0) pkg.liked_attributes.insert(attr);
        if (r < 0.0) pkg.disliked_attributes.insert(attr);
    }
    return pkg;
}

bool answer_consumed(const UserProfile& profile, const std::string& item_id) {
    return profile.consumed(item_id);
}

int answer_preference_single(Rng& rng) {
    return rng.next_bernoulli(0.5) ? 1 : -1;
}

int answer_preference_pkg(const PersonalKnowledgeGraph& pkg, const PkgNode& node) {
    if (node.kind == PkgNodeKind::Item) {
        auto it = pkg.profile.item_sentiments.find(node.id);
        return it == pkg.profile.item_sentiments.end() ? 0 : it->second;
    }
    auto it = pkg.attribute_ratings.find(node.id);
    if (it == pkg.attribute_ratings.end()) return 0;
    if (it->second > 0.0) return 1;
    if (it->second < 0.0) return -1;
    return 0;
}

int predict_item_sentiment(const PersonalKnowledgeGraph& pkg,
                           const std::vector<std::string>& item_attributes) {
    if (item_attributes.empty()) return 0;
    double sum = 0.0;
    for (const auto& attr : item_attributes) {
        auto it = pkg.attribute_ratings.find(attr);
        if (it != pkg.attribute_ratings.end()) sum += it->second;
    }
    double mean = sum / static_cast<double>(item_attributes.size());
    if (mean > 0.0) return 1;
    if (mean < 0.0) return -1;
    return 0;
}

}  // namespace crsim
