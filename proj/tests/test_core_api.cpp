#include <gtest/gtest.h>

#include <random>

#include <pred/oracle_set.hpp>
#include <pred/predecessor_set.hpp>

#include "oracles.hpp"

using namespace pred;

TEST(Universe, Bounds) {
    EXPECT_EQ(Universe(5).max_key(), 31u);
    EXPECT_EQ(Universe(40).max_key(), (Key(1) << 40) - 1);
    EXPECT_EQ(Universe(64).max_key(), ~Key(0));
    EXPECT_TRUE(Universe(32).contains(0xFFFFFFFFu));
    EXPECT_FALSE(Universe(32).contains(Key(1) << 32));
    EXPECT_THROW(Universe(0), std::invalid_argument);
    EXPECT_THROW(Universe(65), std::invalid_argument);
}

TEST(OracleSet, Contract) {
    OracleSet s;
    EXPECT_FALSE(s.erase(4));
    EXPECT_TRUE(s.insert(0));
    EXPECT_EQ(s.predecessor(0), Key(0));
    EXPECT_FALSE(s.insert(0));
    EXPECT_EQ(s.size(), 1u);
    EXPECT_TRUE(s.erase(0));
    EXPECT_EQ(s.predecessor(0), std::nullopt);

    for(Key k : {2, 3, 12, 27}) s.insert(k);
    EXPECT_EQ(s.predecessor(25), Key(12));
    EXPECT_EQ(s.predecessor(4), Key(3));
    EXPECT_EQ(s.predecessor(12), Key(12));
    EXPECT_EQ(s.predecessor(1), std::nullopt);
}

TEST(OracleSet, RoundTripAndMonotone) {
    std::mt19937_64 rng(1);
    OracleSet s;
    std::vector<Key> plain;
    for(int i = 0; i < 2000; ++i) {
        const Key x = rng() % 5000;
        const auto before = s.predecessor(x);
        if(s.insert(x)) {
            plain.push_back(x);
            s.erase(x);
            ASSERT_EQ(s.predecessor(x), before);
            s.insert(x);
        }
    }
    std::optional<Key> last;
    for(Key x = 0; x < 5100; ++x) {
        const auto p = s.predecessor(x);
        ASSERT_EQ(p, oracle::brute_pred(plain, x));
        if(last) {
            ASSERT_TRUE(p && *p >= *last);
        }
        last = p;
    }
    EXPECT_TRUE(std::is_sorted(s.keys().begin(), s.keys().end()));
    EXPECT_EQ(std::adjacent_find(s.keys().begin(), s.keys().end()), s.keys().end());
}
