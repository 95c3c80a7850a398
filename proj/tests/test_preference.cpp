#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "crsim/errors.hpp"
#include "crsim/preference.hpp"

#include "helpers.hpp"

using namespace crsim;
using namespace crsim::testing;

TEST_CASE("rating thresholds: liked at 4, disliked at 2, neutral between") {
    CHECK(rating_to_sentiment(4.0) == 1);
    CHECK(rating_to_sentiment(2.0) == -1);
    CHECK(rating_to_sentiment(3.5) == 0);
    CHECK(rating_to_sentiment(5.0) == 1);
    CHECK(rating_to_sentiment(0.5) == -1);
    CHECK_THROWS_AS(rating_to_sentiment(5.5), RangeError);
    CHECK_THROWS_AS(rating_to_sentiment(0.0), RangeError);

    // Monotone non-decreasing over the raw scale.
    int previous = -1;
    for (double raw = 0.5; raw <= 5.0 + 1e-9; raw += 0.25) {
        int s = rating_to_sentiment(raw);
        CHECK(s >= previous);
        previous = s;
    }
}

namespace {

RatingsCorpus single_user_corpus() {
    RatingsCorpus corpus;
    for (int i = 0; i < 8; ++i) {
        CatalogItem item;
        item.id = "m" + std::to_string(i);
        item.title = "Film " + std::to_string(i);
        item.attributes = {"drama"};
        corpus.catalog.add(std::move(item));
    }
    for (int i = 0; i < 8; ++i) {
        corpus.ratings.push_back(Rating{"u1", "m" + std::to_string(i), i == 3 ? 4.5 : 3.0});
    }
    return corpus;
}

}  // namespace

TEST_CASE("sample_profile takes the only eligible user's full history") {
    auto corpus = single_user_corpus();
    Rng rng(1);
    auto profile = sample_profile(corpus, rng);
    CHECK(profile.source_user_id == "u1");
    CHECK(profile.item_sentiments.size() == 8);
    CHECK(profile.liked_items() == std::vector<std::string>{"m3"});

    Rng rng_a(42);
    Rng rng_b(42);
    CHECK(sample_profile(corpus, rng_a) == sample_profile(corpus, rng_b));
}

TEST_CASE("sample_profile fails when no user can provide a liked item") {
    RatingsCorpus corpus;
    CatalogItem item;
    item.id = "m0";
    item.title = "Mediocre";
    item.attributes = {"drama"};
    corpus.catalog.add(std::move(item));
    for (int u = 0; u < 3; ++u) {
        for (int i = 0; i < 8; ++i) {
            corpus.ratings.push_back(Rating{"u" + std::to_string(u), "m0", 3.0});
        }
    }
    Rng rng(1);
    CHECK_THROWS_AS(sample_profile(corpus, rng), SamplingError);
}

TEST_CASE("pkg attribute ratings follow the mean formula") {
    UserProfile profile;
    profile.source_user_id = "u";
    profile.item_sentiments = {{"a", 1}, {"b", 1}, {"c", -1}, {"d", 1}, {"e", -1}};
    ItemCatalog catalog;
    catalog.add(CatalogItem{"a", "A", {"j", "solo"}});
    catalog.add(CatalogItem{"b", "B", {"j"}});
    catalog.add(CatalogItem{"c", "C", {"j", "pair"}});
    catalog.add(CatalogItem{"d", "D", {"pair"}});
    catalog.add(CatalogItem{"e", "E", {"drama"}});

    auto pkg = build_pkg(profile, catalog);
    // j appears on +1, +1, -1.
    CHECK(std::abs(pkg.attribute_ratings.at("j") - 1.0 / 3.0) < 1e-12);
    CHECK(pkg.liked_attributes.count("j") == 1);
    // solo appears on one liked item.
    CHECK(pkg.attribute_ratings.at("solo") == 1.0);
    // pair cancels out: -1 and +1.
    CHECK(pkg.attribute_ratings.at("pair") == 0.0);
    CHECK(pkg.liked_attributes.count("pair") == 0);
    CHECK(pkg.disliked_attributes.count("pair") == 0);
    CHECK(pkg.disliked_attributes.count("drama") == 1);
}

TEST_CASE("pkg requires catalog attributes for every profile item") {
    UserProfile profile;
    profile.item_sentiments = {{"a", 1}};
    ItemCatalog catalog;
    CHECK_THROWS_AS(build_pkg(profile, catalog), ReferentialError);
    catalog.add(CatalogItem{"a", "A", {}});
    CHECK_THROWS_AS(build_pkg(profile, catalog), ReferentialError);
}

TEST_CASE("stored attribute ratings equal an independent recomputation") {
    Rng rng(31);
    for (int round = 0; round < 25; ++round) {
        auto ratings = make_ratings(6, 8, 1000 + round);
        auto profile = sample_profile(ratings, rng);
        auto pkg = build_pkg(profile, ratings.catalog);

        // Brute-force pass over (item, attribute) pairs.
        std::map<std::string, std::pair<double, int>> sums;
        for (const auto& [item_id, sentiment] : profile.item_sentiments) {
            for (const auto& attr : ratings.catalog.at(item_id).attributes) {
                sums[attr].first += sentiment;
                sums[attr].second += 1;
            }
        }
        REQUIRE(sums.size() == pkg.attribute_ratings.size());
        for (const auto& [attr, sum_count] : sums) {
            double expected = sum_count.first / sum_count.second;
            CHECK(pkg.attribute_ratings.at(attr) == expected);  // exact
            CHECK(pkg.liked_attributes.count(attr) == (expected > 0.0 ? 1u : 0u));
            CHECK(pkg.disliked_attributes.count(attr) == (expected < 0.0 ? 1u : 0u));
        }
    }
}

TEST_CASE("consumed answers are plain set membership") {
    UserProfile profile;
    profile.item_sentiments = {{"a", 0}, {"b", 1}};
    CHECK(answer_consumed(profile, "a"));
    CHECK(answer_consumed(profile, "b"));
    CHECK_FALSE(answer_consumed(profile, "zzz"));
}

TEST_CASE("single-item preference is a fair coin") {
    Rng rng(2024);
    int positive = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        int s = answer_preference_single(rng);
        CHECK((s == 1 || s == -1));
        if (s == 1) ++positive;
    }
    double fraction = static_cast<double>(positive) / n;
    CHECK(fraction > 0.48);
    CHECK(fraction < 0.52);

    // Reproducible under a fixed seed.
    Rng a(7);
    Rng b(7);
    for (int i = 0; i < 100; ++i) CHECK(answer_preference_single(a) == answer_preference_single(b));

    // The same item asked twice may get different answers: draws are
    // independent of item identity, so the stream must contain both signs.
    Rng c(3);
    bool saw_positive = false;
    bool saw_negative = false;
    for (int i = 0; i < 100; ++i) {
        (answer_preference_single(c) == 1 ? saw_positive : saw_negative) = true;
    }
    CHECK(saw_positive);
    CHECK(saw_negative);
}

TEST_CASE("pkg answers are consistent across repeated queries") {
    auto ratings = make_ratings(4, 8, 77);
    Rng rng(5);
    auto profile = sample_profile(ratings, rng);
    auto pkg = build_pkg(profile, ratings.catalog);

    // Item nodes answer the recorded sentiment; attributes the sign.
    auto liked = profile.liked_items();
    REQUIRE(!liked.empty());
    for (int i = 0; i < 100; ++i) {
        CHECK(answer_preference_pkg(pkg, PkgNode{PkgNodeKind::Item, liked.front()}) == 1);
    }
    CHECK(answer_preference_pkg(pkg, PkgNode{PkgNodeKind::Item, "unknown-item"}) == 0);
    CHECK(answer_preference_pkg(pkg, PkgNode{PkgNodeKind::Attribute, "no-such-attr"}) == 0);

    // Randomized query sequences, asked twice, agree everywhere.
    std::vector<PkgNode> nodes;
    for (const auto& [item, s] : pkg.profile.item_sentiments) {
        nodes.push_back(PkgNode{PkgNodeKind::Item, item});
    }
    for (const auto& [attr, r] : pkg.attribute_ratings) {
        nodes.push_back(PkgNode{PkgNodeKind::Attribute, attr});
    }
    Rng order(9);
    std::vector<int> first_pass;
    std::vector<std::size_t> sequence;
    for (int i = 0; i < 200; ++i) sequence.push_back(order.next_below(nodes.size()));
    for (auto idx : sequence) first_pass.push_back(answer_preference_pkg(pkg, nodes[idx]));
    for (std::size_t i = 0; i < sequence.size(); ++i) {
        CHECK(answer_preference_pkg(pkg, nodes[sequence[i]]) == first_pass[i]);
    }
}

TEST_CASE("unseen items are scored from their attributes") {
    UserProfile profile;
    profile.item_sentiments = {{"a", 1}, {"b", -1}};
    ItemCatalog catalog;
    catalog.add(CatalogItem{"a", "A", {"comedy"}});
    catalog.add(CatalogItem{"b", "B", {"horror"}});
    auto pkg = build_pkg(profile, catalog);

    CHECK(predict_item_sentiment(pkg, {"comedy"}) == 1);
    CHECK(predict_item_sentiment(pkg, {"horror"}) == -1);
    CHECK(predict_item_sentiment(pkg, {"comedy", "horror"}) == 0);
    CHECK(predict_item_sentiment(pkg, {"western"}) == 0);
    CHECK(predict_item_sentiment(pkg, {}) == 0);
}
