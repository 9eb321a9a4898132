#include "oracles.hpp"

#include "sensegrid/pdc.hpp"

#include <gtest/gtest.h>

using namespace sensegrid;

namespace {

sentence sent(std::string_view text, double pos = 0.5, std::string id = "x", std::size_t index = 0) {
    sentence s;
    s.response_id = std::move(id);
    s.index = index;
    s.tokens = tokenize(text);
    s.norm_pos = pos;
    return s;
}

std::vector<std::string> texts_of(const std::vector<sentence>& ss) {
    std::vector<std::string> out;
    for (const auto& s : ss) out.push_back(oracle::join(s.words()));
    return out;
}

} // namespace

TEST(Content, SpotValues) {
    EXPECT_NEAR(content_similarity(sent("a b c"), sent("a b d")), 4.0 / 6.0, 1e-9);
    EXPECT_NEAR(content_similarity(sent("a b c"), sent("a b d")), 0.6667, 1e-4);
    EXPECT_DOUBLE_EQ(content_similarity(sent("one two three four"), sent("one two three four")), 1.0);
    EXPECT_DOUBLE_EQ(content_similarity(sent("one two"), sent("three four")), 0.0);
    EXPECT_DOUBLE_EQ(content_similarity(sent("..."), sent("one")), 0.0);
}

TEST(Content, SymmetricBoundedAndMatchesOracle) {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 300; ++trial) {
        auto texts = oracle::random_texts(rng, {});
        auto x = segment(texts[0], "a");
        auto y = segment(texts[1], "b");
        for (const auto& sx : x)
            for (const auto& sy : y) {
                double c = content_similarity(sx, sy);
                EXPECT_GE(c, 0.0);
                EXPECT_LE(c, 1.0);
                EXPECT_DOUBLE_EQ(c, content_similarity(sy, sx));
                EXPECT_NEAR(c, oracle::content(sx.words(), sy.words()), 1e-12);
            }
    }
}

TEST(Position, SpotValues) {
    EXPECT_DOUBLE_EQ(position_similarity(sent("a", 0.3), sent("b", 0.3)), 1.0);
    EXPECT_DOUBLE_EQ(position_similarity(sent("a", 0.0), sent("b", 1.0)), 0.0);
    EXPECT_DOUBLE_EQ(position_similarity(sent("a", 0.25), sent("b", 0.75)), 0.5);
}

TEST(Cluster, IdenticalSingleSentenceResponses) {
    std::vector<merge_event> events;
    auto r = cluster(oracle::make_corpus({"The lamp is bright.", "The lamp is bright."}), {},
                     [&](const merge_event& e) { events.push_back(e); });
    ASSERT_EQ(r.groups.size(), 1u);
    EXPECT_EQ(r.groups[0].members.size(), 2u);
    ASSERT_EQ(events.size(), 1u);
    EXPECT_DOUBLE_EQ(events[0].gate, 2.5);
    EXPECT_FALSE(r.groups[0].is_singleton);
    EXPECT_DOUBLE_EQ(r.groups[0].distinct_ratio, 1.0);
}

TEST(Cluster, BelowThresholdNeverMerges) {
    // content 0.1 needs 20 words: 1 shared of 10 each side.
    std::string a = "shared w1 w2 w3 w4 w5 w6 w7 w8 w9";
    std::string b = "shared v1 v2 v3 v4 v5 v6 v7 v8 v9";
    EXPECT_NEAR(content_similarity(sent(a), sent(b)), 0.1, 1e-12);
    auto r = cluster(oracle::make_corpus({a, b}));
    EXPECT_EQ(r.groups.size(), 2u);
}

TEST(Cluster, DistinctnessBlocksSameResponseMerge) {
    // Same-response pairs are never candidates; a chain through a third
    // response must still respect the ratio.
    auto r = cluster(oracle::make_corpus({"Hello there friend. Hello there friend.", "Nothing alike here."}));
    for (const auto& g : r.groups) EXPECT_EQ(g.members.size(), 1u);

    // r0 twice + r1 once is 2/3 < 0.7: only one pair can merge.
    auto r2 = cluster(oracle::make_corpus({"Hello there friend.\nHello there friend.", "Hello there friend."}));
    std::size_t largest = 0;
    for (const auto& g : r2.groups) largest = std::max(largest, g.members.size());
    EXPECT_EQ(largest, 2u);
}

TEST(Cluster, MatchesNaiveOracle) {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 300; ++trial) {
        oracle::gen_options opt;
        opt.responses = 2 + trial % 5;
        opt.max_words = 25;
        auto c = oracle::random_corpus(rng, opt);
        EXPECT_EQ(oracle::partition_of(cluster(c)), oracle::pdc_partition(c)) << "trial " << trial;
    }
}

TEST(Cluster, CustomThresholdMatchesOracle) {
    std::mt19937_64 rng(22);
    pdc_params p{1.0, 1.0, 1.5, 0.5};
    for (int trial = 0; trial < 100; ++trial) {
        oracle::gen_options opt;
        opt.responses = 4;
        auto c = oracle::random_corpus(rng, opt);
        EXPECT_EQ(oracle::partition_of(cluster(c, p)), oracle::pdc_partition(c, 1.0, 1.0, 1.5, 0.5));
    }
}

TEST(Cluster, GroupOrderAndStats) {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        oracle::gen_options opt;
        opt.responses = 5;
        auto c = oracle::random_corpus(rng, opt);
        auto r = cluster(c);
        for (std::size_t g = 0; g < r.groups.size(); ++g) {
            const auto& grp = r.groups[g];
            EXPECT_EQ(grp.id, g);
            if (g > 0) {
                EXPECT_LE(r.groups[g - 1].median_pos, grp.median_pos);
            }
            std::vector<double> pos;
            double sum = 0;
            for (const auto& m : grp.members) {
                pos.push_back(r.at(m).norm_pos);
                sum += r.at(m).norm_pos;
            }
            std::sort(pos.begin(), pos.end());
            double med = pos.size() % 2 ? pos[pos.size() / 2] : (pos[pos.size() / 2 - 1] + pos[pos.size() / 2]) / 2;
            EXPECT_DOUBLE_EQ(grp.median_pos, med);
            EXPECT_NEAR(grp.mean_pos, sum / pos.size(), 1e-12);
            EXPECT_EQ(grp.order.size(), grp.members.size());
            EXPECT_EQ(grp.gray.size(), grp.members.size());
        }
    }
}

TEST(Cluster, MedianTieGoesToLongerResponse) {
    // Both responses are single sentences at 0.5 and never merge.
    auto r = cluster(oracle::make_corpus({"short one.", "a much longer sentence with many more words."}));
    ASSERT_EQ(r.groups.size(), 2u);
    EXPECT_EQ(r.at(r.groups[0].members[0]).response_id, "r1");
}

TEST(Order, SingletonAndIdenticalPair) {
    auto s = sent("only line", 0.5, "a");
    EXPECT_EQ(texts_of(order_within_group({s})), std::vector<std::string>{"only line"});
    auto a = sent("same words", 0.5, "b", 0);
    auto b = sent("same words", 0.5, "a", 3);
    auto out = order_within_group({a, b});
    EXPECT_EQ(out[0].response_id, "a");
}

TEST(Order, GreedyMatchesExhaustiveOnExample) {
    auto a = sent("how does a lightbulb work", 0.5, "r1");
    auto b = sent("how does a filament work", 0.5, "r2");
    auto c = sent("why we use glass", 0.5, "r3");
    auto out = order_within_group({c, b, a});
    EXPECT_EQ(texts_of(out), (std::vector<std::string>{"how does a lightbulb work", "how does a filament work",
                                                       "why we use glass"}));
    std::vector<std::vector<std::string>> lines;
    for (const auto& s : out) lines.push_back(s.words());
    std::size_t greedy = 0;
    for (std::size_t k = 1; k < lines.size(); ++k)
        for (std::size_t i = 0; i < std::min(lines[k].size(), lines[k - 1].size()); ++i)
            greedy += lines[k][i] == lines[k - 1][i];
    EXPECT_EQ(greedy, oracle::best_chain_overlap({a.words(), b.words(), c.words()}));
}

TEST(Gray, Flags) {
    auto flags = grayout_flags(std::vector<sentence>{sent("how does a lightbulb work"),
                                                     sent("how does a filament work")});
    EXPECT_EQ(flags[0], (std::vector<bool>{false, false, false, false, false}));
    EXPECT_EQ(flags[1], (std::vector<bool>{true, true, true, false, true}));
    auto short_first = grayout_flags(std::vector<sentence>{sent("a b"), sent("a b c")});
    EXPECT_EQ(short_first[1], (std::vector<bool>{true, true, false}));
}

TEST(Gray, IdenticalGroupFullyGrayAfterFirst) {
    auto r = cluster(oracle::make_corpus({"Light travels fast.", "Light travels fast.", "Light travels fast."}));
    ASSERT_EQ(r.groups.size(), 1u);
    const auto& g = r.groups[0];
    EXPECT_EQ(g.gray[0], (std::vector<bool>{false, false, false}));
    for (std::size_t k = 1; k < g.gray.size(); ++k) EXPECT_EQ(g.gray[k], (std::vector<bool>{true, true, true}));
}

TEST(Cluster, JsonSchemaAndDeterminism) {
    auto c = oracle::make_corpus({"The lamp is bright. It glows.", "The lamp is bright. It hums."});
    auto j = to_json(cluster(c));
    ASSERT_TRUE(j.contains("groups"));
    const auto& g = j["groups"][0];
    for (auto key : {"id", "median_pos", "mean_pos", "distinct_ratio", "is_singleton", "members", "order", "gray"})
        EXPECT_TRUE(g.contains(key)) << key;
    EXPECT_TRUE(g["members"][0].contains("char_span"));
    EXPECT_EQ(j.dump(), to_json(cluster(c)).dump());
}
