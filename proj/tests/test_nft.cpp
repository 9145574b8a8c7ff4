#include <gtest/gtest.h>

#include <random>

#include "rledger/nft_ledger.hpp"

using namespace rledger;

namespace {

const Address gov{"gov"}, A{"A"}, B{"B"}, C{"C"};
const TokenId T1 = *Hash256::parse("1"), T2 = *Hash256::parse("2");

std::vector<OwnerRecord> owners(const NftLedger& n, const TokenId& id) {
    const auto& q = n.token(id).owners;
    return {q.begin(), q.end()};
}

struct Nft : ::testing::Test {
    NftLedger n{gov, EpochConfig{1000, 100}};
};

}  // namespace

TEST_F(Nft, MintAndTransfer) {
    n.mint(T1, A, 1);
    EXPECT_EQ(owners(n, T1), (std::vector<OwnerRecord>{{A, 1}}));
    EXPECT_THROW(n.mint(T1, B, 2), DuplicateTokenError);
    n.mint(T2, A, 2);
    n.transfer(T1, A, B, 10);
    EXPECT_EQ(owners(n, T1), (std::vector<OwnerRecord>{{A, 1}, {B, 10}}));
    EXPECT_EQ(owners(n, T2), (std::vector<OwnerRecord>{{A, 2}}));
    EXPECT_THROW(n.transfer(*Hash256::parse("3"), A, B, 11), UnknownTokenError);
    EXPECT_THROW(n.transfer(T1, A, C, 11), NotOwnerError);
}

TEST_F(Nft, FreezeWindowAndRepeat) {
    n.mint(T1, A, 1);
    n.transfer(T1, A, B, 10);
    EXPECT_THROW(n.freeze(A, T1, 0, 50), NotGovernanceError);
    EXPECT_THROW(n.freeze(gov, T2, 0, 50), UnknownTokenError);
    {
        NftLedger late = n;
        EXPECT_FALSE(late.freeze(gov, T1, 0, 200));
        EXPECT_FALSE(late.token(T1).frozen);
    }
    EXPECT_FALSE(n.freeze(gov, T1, 1, 50));  // no transfer after position 1
    EXPECT_TRUE(n.freeze(gov, T1, 0, 50));
    EXPECT_TRUE(n.token(T1).frozen);
    EXPECT_FALSE(n.freeze(gov, T1, 0, 51));
    EXPECT_THROW(n.transfer(T1, B, C, 52), FrozenAssetError);
}

TEST_F(Nft, ReverseToPreviousOwner) {
    n.mint(T1, A, 1);
    n.transfer(T1, A, B, 10);
    EXPECT_THROW(n.reverse(gov, T1, 0, 20), NotFrozenError);
    ASSERT_TRUE(n.freeze(gov, T1, 0, 20));
    EXPECT_THROW(n.reverse(B, T1, 0, 21), NotGovernanceError);
    n.reverse(gov, T1, 0, 21);
    EXPECT_EQ(n.token(T1).current_owner(), A);
    EXPECT_FALSE(n.token(T1).frozen);
    EXPECT_EQ(n.token(T1).owners.size(), 3u);
}

TEST_F(Nft, ReverseByIndex) {
    n.mint(T1, A, 1);
    n.transfer(T1, A, B, 10);
    n.transfer(T1, B, C, 20);
    ASSERT_TRUE(n.freeze(gov, T1, 1, 30));
    n.reverse(gov, T1, 1, 31);
    EXPECT_EQ(n.token(T1).current_owner(), B);
}

TEST_F(Nft, RejectUnfreezes) {
    n.mint(T1, A, 1);
    n.transfer(T1, A, B, 10);
    EXPECT_THROW(n.reject_reverse(gov, T1, 11), NotFrozenError);
    ASSERT_TRUE(n.freeze(gov, T1, 0, 11));
    n.reject_reverse(gov, T1, 12);
    EXPECT_FALSE(n.token(T1).frozen);
    EXPECT_EQ(n.token(T1).current_owner(), B);
    n.transfer(T1, B, C, 13);
    EXPECT_EQ(n.token(T1).current_owner(), C);
}

TEST_F(Nft, CleanKeepsOnlyDisputableSuffix) {
    n.mint(T1, A, 1);
    n.transfer(T1, A, B, 10);
    n.transfer(T1, B, C, 500);
    const auto r = n.clean({T1}, 1000);
    EXPECT_EQ(r.tokens.at(0).removed, 2u);
    EXPECT_EQ(owners(n, T1), (std::vector<OwnerRecord>{{C, 500}}));
    EXPECT_EQ(n.token(T1).head, 2u);
    const NftLedger once = n;
    n.clean({T1}, 1000);
    EXPECT_EQ(n, once);
}

TEST_F(Nft, CleanSkipsFrozenAndUnknown) {
    n.mint(T1, A, 1);
    n.transfer(T1, A, B, 10);
    n.transfer(T1, B, C, 50);
    ASSERT_TRUE(n.freeze(gov, T1, 1, 60));
    const NftLedger before = n;
    const auto r = n.clean({T1, T2}, 500);
    EXPECT_EQ(r.tokens.at(0).status, NftCleanResult::Status::SkippedFrozen);
    EXPECT_EQ(r.tokens.at(1).status, NftCleanResult::Status::Unknown);
    EXPECT_EQ(n.tokens(), before.tokens());
}

TEST_F(Nft, PositionsStayValidAfterClean) {
    n.mint(T1, A, 1);
    n.transfer(T1, A, B, 10);
    n.transfer(T1, B, C, 500);
    n.clean({T1}, 520);
    EXPECT_EQ(n.token(T1).head, 1u);
    ASSERT_TRUE(n.freeze(gov, T1, 1, 520));
    n.reverse(gov, T1, 1, 521);
    EXPECT_EQ(n.token(T1).current_owner(), B);
}

// Cleaning never turns a freezable (token, index) into a non-freezable one,
// and never touches the current owner.
TEST(NftProperty, CleanPreservesFreezability) {
    std::mt19937_64 rng(5);
    const Address people[] = {A, B, C, Address{"D"}};
    for (int trial = 0; trial < 500; ++trial) {
        NftLedger n(gov, EpochConfig{50, 40 + rng() % 80});
        BlockNumber block = 1;
        n.mint(T1, A, block);
        Address owner = A;
        const int steps = 1 + static_cast<int>(rng() % 12);
        for (int s = 0; s < steps; ++s) {
            block += rng() % 60;
            const Address next = people[rng() % 4];
            n.transfer(T1, owner, next, block);
            owner = next;
            if (rng() % 3 == 0) n.clean({T1}, block);
        }
        const BlockNumber now = block + rng() % 100;
        const std::uint64_t end = n.token(T1).end();
        std::vector<bool> before;
        for (std::uint64_t i = 0; i < end; ++i) before.push_back(n.can_freeze(T1, i, now));
        n.clean({T1}, now);
        for (std::uint64_t i = 0; i < end; ++i)
            if (before[i]) { ASSERT_TRUE(n.can_freeze(T1, i, now)) << "trial " << trial << " index " << i; }
        ASSERT_EQ(n.token(T1).current_owner(), owner);
    }
}
