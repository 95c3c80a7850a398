#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "crsim/errors.hpp"
#include "crsim/evaluation.hpp"

#include "helpers.hpp"

using namespace crsim;
using namespace crsim::testing;

namespace {

// Transcript with the given per-user-turn action labels; agent turns are
// interleaved with the given satisfaction flags.
DialogueTranscript make_transcript(const std::vector<std::string>& user_actions,
                                   const std::vector<bool>& agent_delta) {
    DialogueTranscript t;
    t.conversation_id = "t";
    t.status = TerminalStatus::Completed;
    int index = 0;
    for (std::size_t i = 0; i < user_actions.size(); ++i) {
        TranscriptTurn user;
        user.index = index++;
        user.speaker = Speaker::User;
        user.actions = {user_actions[i]};
        t.turns.push_back(user);
        if (i < agent_delta.size()) {
            TranscriptTurn agent;
            agent.index = index++;
            agent.speaker = Speaker::Agent;
            agent.actions = {"List"};
            agent.goal_satisfied = agent_delta[i];
            t.turns.push_back(agent);
        }
    }
    return t;
}

DialogueTranscript turns_only(std::size_t n) {
    return make_transcript(std::vector<std::string>(n, "Disclose"),
                           std::vector<bool>(n, true));
}

}  // namespace

TEST_CASE("avg_turns is the arithmetic mean of user turn counts") {
    std::vector<DialogueTranscript> transcripts = {turns_only(9), turns_only(11)};
    CHECK(avg_turns(transcripts) == doctest::Approx(10.0));
    std::vector<DialogueTranscript> single = {turns_only(7)};
    CHECK(avg_turns(single) == doctest::Approx(7.0));
    std::vector<DialogueTranscript> none;
    CHECK_THROWS_AS(avg_turns(none), ArgumentError);
}

TEST_CASE("user_act_ratio counts acts, not turns") {
    std::vector<DialogueTranscript> even = {make_transcript(
        std::vector<std::string>(10, "Disclose"), std::vector<bool>(10, true))};
    CHECK(user_act_ratio(even) == doctest::Approx(0.5));

    // 3 user acts vs 5 agent acts.
    DialogueTranscript t = make_transcript({"Disclose", "Inquire.List", "Complete"},
                                           {true, true, true});
    t.turns[1].actions = {"Elicit", "Show"};  // agent turn with two acts
    t.turns[3].actions = {"List", "Show"};
    std::vector<DialogueTranscript> uneven = {t};
    CHECK(user_act_ratio(uneven) == doctest::Approx(3.0 / 8.0));

    std::vector<DialogueTranscript> empty_turns = {DialogueTranscript{}};
    CHECK_THROWS_AS(user_act_ratio(empty_turns), ArgumentError);
}

TEST_CASE("directed KL divergence matches a hand evaluation") {
    std::vector<double> p = {0.5, 0.5};
    std::vector<double> q = {0.25, 0.75};
    // 0.5*ln(0.5/0.25) + 0.5*ln(0.5/0.75) = 0.5*ln(4/3)
    double expected = 0.5 * std::log(4.0 / 3.0);
    CHECK(std::abs(kl(p, q) - expected) < 1e-12);
    CHECK(kl(p, p) == 0.0);

    std::vector<double> r = {1.0, 0.0};
    CHECK_THROWS_AS(kl(p, r), ArgumentError);
    std::vector<double> longer = {0.2, 0.3, 0.5};
    CHECK_THROWS_AS(kl(p, longer), ArgumentError);
}

TEST_CASE("kl is non-negative and ds_kl symmetric over random pairs") {
    Rng rng(64);
    for (int round = 0; round < 1000; ++round) {
        std::size_t k = 2 + rng.next_below(14);
        std::vector<double> p(k);
        std::vector<double> q(k);
        double ps = 0.0;
        double qs = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            p[i] = rng.next_unit() + 1e-6;
            q[i] = rng.next_unit() + 1e-6;
            ps += p[i];
            qs += q[i];
        }
        for (std::size_t i = 0; i < k; ++i) {
            p[i] /= ps;
            q[i] /= qs;
        }
        CHECK(kl(p, q) >= -1e-12);
        CHECK(std::abs(ds_kl(p, q) - ds_kl(q, p)) < 1e-12);
        CHECK(ds_kl(p, p) == 0.0);
        CHECK(ds_kl(p, q) >= -1e-12);
    }
}

TEST_CASE("reward follows max{0, Full - Cost*T}") {
    CapabilitySet five = all_capabilities();
    CHECK(reward(turns_only(8), five) == doctest::Approx(12.0));  // 20 - 8

    CapabilitySet four = {AgentCapability::Disclose, AgentCapability::Refine,
                          AgentCapability::Inquire, AgentCapability::MixedInitiative};
    CHECK(reward(turns_only(20), four) == doctest::Approx(0.0));  // clamp at 0, Full = 16

    // Upper bound over arbitrary transcripts.
    Rng rng(9);
    for (int i = 0; i < 50; ++i) {
        auto t = turns_only(1 + rng.next_below(40));
        CHECK(reward(t, five) <= 4.0 * five.size());
    }
}

TEST_CASE("consecutive Repeat pairs collapse into one turn") {
    std::vector<std::string> actions(10, "Disclose");
    actions[4] = "Navigate.Repeat";
    actions[5] = "Navigate.Repeat";
    auto t = make_transcript(actions, std::vector<bool>(10, true));
    CHECK(collapsed_user_turns(t) == 9);
    CHECK(reward(t, all_capabilities()) == doctest::Approx(20.0 - 9.0));

    // Randomized sequences against a brute-force collapser.
    Rng rng(555);
    for (int round = 0; round < 100; ++round) {
        std::size_t n = 1 + rng.next_below(30);
        std::vector<std::string> seq;
        std::vector<bool> repeat_flags;
        for (std::size_t i = 0; i < n; ++i) {
            bool is_repeat = rng.next_bernoulli(0.4);
            repeat_flags.push_back(is_repeat);
            seq.push_back(is_repeat ? "Navigate.Repeat" : "Disclose");
        }
        auto transcript = make_transcript(seq, std::vector<bool>(n, true));

        // Brute force: walk left to right, fusing pairs.
        int expected = 0;
        int pairs = 0;
        for (std::size_t i = 0; i < n;) {
            if (repeat_flags[i] && i + 1 < n && repeat_flags[i + 1]) {
                ++expected;
                ++pairs;
                i += 2;
            } else {
                ++expected;
                i += 1;
            }
        }
        int got = collapsed_user_turns(transcript);
        CHECK(got == expected);
        CHECK(static_cast<int>(n) - got == pairs);  // reduction = collapsed pairs
    }
}

TEST_CASE("success rate pools agent turns across transcripts") {
    std::vector<DialogueTranscript> all_good = {turns_only(4)};
    CHECK(success_rate(all_good) == doctest::Approx(1.0));

    std::vector<DialogueTranscript> some = {
        make_transcript({"Disclose", "Disclose", "Disclose", "Disclose"},
                        {true, true, true, false})};
    CHECK(success_rate(some) == doctest::Approx(0.75));

    // Recomputing from the raw per-turn flags must agree (no cached state).
    std::size_t satisfied = 0;
    std::size_t total = 0;
    for (const auto& turn : some[0].turns) {
        if (turn.speaker != Speaker::Agent) continue;
        ++total;
        if (*turn.goal_satisfied) ++satisfied;
    }
    CHECK(success_rate(some) == doctest::Approx(static_cast<double>(satisfied) / total));

    std::vector<DialogueTranscript> no_agent = {
        make_transcript({"Disclose"}, {})};
    CHECK_THROWS_AS(success_rate(no_agent), ArgumentError);
}

TEST_CASE("agents rank descending with explicit ties") {
    auto groups = rank_agents({{"B", 7.56}, {"A", 8.88}, {"C", 6.04}});
    REQUIRE(groups.size() == 3);
    CHECK(groups[0] == std::vector<std::string>{"A"});
    CHECK(groups[1] == std::vector<std::string>{"B"});
    CHECK(groups[2] == std::vector<std::string>{"C"});

    auto tied = rank_agents({{"A", 1.0}, {"B", 1.0 + 1e-9}});
    REQUIRE(tied.size() == 1);
    CHECK(tied[0] == std::vector<std::string>{"A", "B"});

    // Order independence of the input.
    auto permuted = rank_agents({{"C", 6.04}, {"B", 7.56}, {"A", 8.88}});
    CHECK(permuted == groups);

    CHECK_THROWS_AS(rank_agents({{"A", 1.0}}), ArgumentError);
}

TEST_CASE("rescaling Cost and Full together preserves the ordering") {
    Rng rng(77);
    for (int round = 0; round < 20; ++round) {
        std::vector<ScoredAgent> base;
        std::vector<ScoredAgent> scaled;
        double factor = 0.5 + rng.next_unit() * 4.0;
        for (char name = 'A'; name <= 'E'; ++name) {
            auto t = turns_only(1 + rng.next_below(25));
            base.push_back({std::string(1, name), reward(t, all_capabilities(), 1.0, 4.0)});
            scaled.push_back(
                {std::string(1, name), reward(t, all_capabilities(), factor, 4.0 * factor)});
        }
        CHECK(rank_agents(base) == rank_agents(scaled));
    }
}

TEST_CASE("action distributions are smoothed and normalized") {
    std::vector<DialogueTranscript> transcripts = {turns_only(5)};
    auto dist = distribution_from_transcripts(transcripts);
    double sum = 0.0;
    for (double p : dist.p) {
        CHECK(p > 0.0);
        sum += p;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));

    auto corpus = load_dialogues(data_dir() / "dialogues.jsonl");
    auto real = distribution_from_corpus(corpus);
    CHECK(real.provenance == DistributionProvenance::Real);
    CHECK(ds_kl(dist, real) >= 0.0);
}

TEST_CASE("report carries all five metrics per (agent, simulator) pair") {
    TranscriptSet set;
    set.agent = "A";
    set.simulator = "CIR6-Single";
    set.capabilities = all_capabilities();
    set.transcripts = {turns_only(6), turns_only(8)};
    auto corpus = load_dialogues(data_dir() / "dialogues.jsonl");
    auto report = build_report({set}, distribution_from_corpus(corpus));
    REQUIRE(report.rows.size() == 1);
    const auto& row = report.rows[0];
    CHECK(row.avg_turns == doctest::Approx(7.0));
    CHECK(row.user_act_ratio == doctest::Approx(0.5));
    CHECK(row.ds_kl > 0.0);
    CHECK(row.reward_mean == doctest::Approx((14.0 + 12.0) / 2.0));
    CHECK(row.success_rate == doctest::Approx(1.0));
    CHECK(!report.to_json_string().empty());
    CHECK(report.to_table().find("AvgTurns") != std::string::npos);
}
