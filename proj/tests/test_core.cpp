#include <gtest/gtest.h>

#include <random>

#include "rledger/ledger.hpp"
#include "rledger/sha256.hpp"

using namespace rledger;

namespace {
const Address A{"A"}, B{"B"}, C{"C"};
TokenAmount T(std::uint64_t v) { return TokenAmount{v}; }
}  // namespace

// ---------------------------------------------------------------- types

TEST(TokenAmount, ParseAndFormat) {
    EXPECT_EQ(TokenAmount::parse("0")->to_string(), "0");
    EXPECT_EQ(TokenAmount::parse("340282366920938463463374607431768211455")->to_string(),
              "340282366920938463463374607431768211455");
    EXPECT_FALSE(TokenAmount::parse("340282366920938463463374607431768211456"));
    EXPECT_FALSE(TokenAmount::parse("abc"));
    EXPECT_FALSE(TokenAmount::parse("-1"));
    EXPECT_FALSE(TokenAmount::parse(""));
}

TEST(TokenAmount, CheckedArithmetic) {
    const TokenAmount max{static_cast<u128>(-1)};
    EXPECT_THROW(max + T(1), OverflowError);
    EXPECT_THROW(T(1) - T(2), UnderflowError);
    EXPECT_THROW(max * 2, OverflowError);
    EXPECT_EQ(saturating_sub(T(1), T(2)), T(0));
    EXPECT_EQ(T(7) * 3, T(21));
}

TEST(Hash256, ParseForms) {
    const auto h = Hash256::parse("0x01");
    ASSERT_TRUE(h);
    EXPECT_EQ(h->hex(), std::string(62, '0') + "01");
    EXPECT_EQ(Hash256::parse("255")->hex(), std::string(62, '0') + "ff");
    EXPECT_FALSE(Hash256::parse("0x" + std::string(65, 'a')));
    EXPECT_FALSE(Hash256::parse("0xzz"));
}

TEST(Sha256, KnownVectors) {
    EXPECT_EQ(Sha256{}.update(std::string_view("abc")).finish().hex(),
              "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    EXPECT_EQ(Sha256{}.finish().hex(), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

// ---------------------------------------------------------------- spenditure log

TEST(SpenditureLog, EpochBucketing) {
    SpenditureLog log(EpochConfig{1000, 24000});
    EXPECT_EQ(log.record(A, B, T(1), 0), (SpenditureRef{0, A, 0}));
    EXPECT_EQ(log.record(A, B, T(1), 1500), (SpenditureRef{1, A, 0}));
    EXPECT_EQ(log.record(A, C, T(2), 1600), (SpenditureRef{1, A, 1}));
    EXPECT_EQ(log.resolve({1, A, 1}).to, C);
    EXPECT_THROW(log.resolve({1, A, 2}), UnknownSpenditureError);
    EXPECT_THROW(log.resolve({5, B, 0}), UnknownSpenditureError);
    EXPECT_THROW(log.record(A, B, T(1), 1499), BlockRegressionError);
}

TEST(SpenditureLog, OutgoingMostRecentFirst) {
    SpenditureLog log(EpochConfig{});
    for (int i = 0; i < 10; ++i) log.record(i % 2 ? B : A, C, T(i), 10);
    log.record(A, std::nullopt, T(3), 11);  // burns are part of the stream
    std::vector<Seq> seqs;
    for (const auto& [ref, s] : log.outgoing_between(A, 2, UINT64_MAX)) seqs.push_back(s.seq);
    EXPECT_EQ(seqs, (std::vector<Seq>{10, 8, 6, 4}));
    EXPECT_TRUE(log.outgoing_between(A, 8, 10).empty());
    EXPECT_TRUE(log.outgoing_between(C, 0, UINT64_MAX).empty());
}

TEST(SpenditureLog, DebitAndCreditBack) {
    SpenditureLog log(EpochConfig{});
    const auto r = log.record(A, B, T(50), 1);
    log.debit(r, T(30));
    EXPECT_EQ(log.resolve(r).amount, T(20));
    EXPECT_EQ(log.resolve(r).original_amount, T(50));
    EXPECT_TRUE(log.credit_back(r, T(30)));
    EXPECT_THROW(log.credit_back(r, T(1)), OverflowError);
    EXPECT_FALSE(log.credit_back({7, A, 0}, T(1)));
}

// ---------------------------------------------------------------- ledger

TEST(Ledger, MintBasics) {
    Ledger l;
    l.mint(A, T(100), 1);
    EXPECT_EQ(l.account(A), (AccountState{T(0), T(100), T(0)}));
    const Ledger before = l;
    l.mint(B, T(0), 1);
    EXPECT_EQ(l.accounts(), before.accounts());
    l.mint(A, T(50), 2);
    EXPECT_EQ(l.account(A).nrbalance, T(150));
    EXPECT_EQ(l.total_supply(), T(150));
}

TEST(Ledger, TransferSpendsNonReversible) {
    Ledger l;
    l.mint(A, T(100), 1);
    const auto ref = l.transfer(A, B, T(40), 10);
    EXPECT_EQ(l.account(A), (AccountState{T(0), T(60), T(0)}));
    EXPECT_EQ(l.account(B), (AccountState{T(40), T(0), T(0)}));
    const Spenditure& s = l.log().resolve(ref);
    EXPECT_EQ(s.to, B);
    EXPECT_EQ(s.amount, T(40));
    EXPECT_EQ(s.block, 10u);

    const auto zero = l.transfer(A, B, T(0), 10);
    EXPECT_EQ(l.log().resolve(zero).amount, T(0));
    EXPECT_EQ(l.account(B).rbalance, T(40));
}

TEST(Ledger, TransferGuardLeavesStateUnchanged) {
    Ledger l;
    l.mint(A, T(30), 1);
    const Ledger before = l;
    EXPECT_THROW(l.transfer(A, B, T(40), 10), InsufficientNonReversibleError);
    EXPECT_EQ(l, before);
}

TEST(Ledger, RTransferAndAvailable) {
    Ledger l;
    l.mint(A, T(100), 1);
    l.transfer(A, B, T(40), 10);
    l.rtransfer(B, C, T(40), 11);
    EXPECT_EQ(l.account(B).rbalance, T(0));
    EXPECT_EQ(l.account(C).rbalance, T(40));
    EXPECT_EQ(l.available_rbalance(Address{"nobody"}), T(0));
    EXPECT_THROW(l.rtransfer(B, C, T(1), 11), InsufficientReversibleError);
}

TEST(Ledger, SelfTransfersAreLogged) {
    Ledger l;
    l.mint(A, T(100), 1);
    l.transfer(A, B, T(40), 2);
    l.rtransfer(B, B, T(15), 3);
    EXPECT_EQ(l.account(B).rbalance, T(40));
    l.transfer(A, A, T(10), 4);
    EXPECT_EQ(l.account(A), (AccountState{T(10), T(50), T(0)}));
    EXPECT_EQ(l.log().live_records(), 3u);
}

TEST(Ledger, BurnSources) {
    Ledger l;
    l.mint(A, T(100), 1);
    EXPECT_FALSE(l.burn(A, T(30), 5, BurnSource::NonReversible));
    EXPECT_EQ(l.account(A).nrbalance, T(70));
    EXPECT_EQ(l.total_supply(), T(70));
    l.transfer(A, B, T(50), 6);
    const auto ref = l.burn(B, T(10), 6, BurnSource::Reversible);
    ASSERT_TRUE(ref);
    EXPECT_TRUE(l.log().resolve(*ref).is_burn());
    EXPECT_EQ(l.account(B).rbalance, T(40));
    EXPECT_EQ(l.total_burned(), T(40));
    const Ledger before = l;
    EXPECT_THROW(l.burn(B, T(41), 7, BurnSource::Reversible), InsufficientBalanceError);
    EXPECT_THROW(l.burn(A, T(21), 7, BurnSource::NonReversible), InsufficientBalanceError);
    EXPECT_EQ(l, before);
}

TEST(Ledger, BlockRegressionRejected) {
    Ledger l;
    l.mint(A, T(10), 5);
    const Ledger before = l;
    EXPECT_THROW(l.mint(A, T(1), 4), BlockRegressionError);
    EXPECT_THROW(l.transfer(A, B, T(1), 4), BlockRegressionError);
    EXPECT_EQ(l, before);
}

TEST(Ledger, CleanMaturesAfterWindow) {
    Ledger l(EpochConfig{1000, 100});
    l.mint(A, T(100), 1);
    l.transfer(A, B, T(40), 50);
    auto skipped = l.clean(0, {A}, 100);
    EXPECT_EQ(skipped.buckets.at(0).status, BucketCleanResult::Status::Skipped);
    EXPECT_EQ(l.account(B).rbalance, T(40));
    auto done = l.clean(0, {A}, 200);
    EXPECT_EQ(done.buckets.at(0).status, BucketCleanResult::Status::Cleaned);
    EXPECT_EQ(done.total_matured(), T(40));
    EXPECT_EQ(l.account(B), (AccountState{T(0), T(40), T(0)}));
    EXPECT_EQ(l.log().live_records(), 0u);
    EXPECT_THROW(l.log().resolve({0, A, 0}), UnknownSpenditureError);

    // Indices keep counting after the bucket was emptied.
    EXPECT_EQ(l.transfer(A, B, T(1), 201), (SpenditureRef{0, A, 1}));
}

TEST(Ledger, CleanIsIdempotent) {
    Ledger l(EpochConfig{10, 20});
    l.mint(A, T(100), 1);
    for (BlockNumber b = 1; b < 30; b += 3) l.transfer(A, b % 2 ? B : C, T(3), b);
    l.clean(0, {A, B}, 100);
    l.clean(1, {A}, 100);
    const Ledger once = l;
    const auto again = l.clean(0, {A, B}, 100);
    EXPECT_EQ(again.total_removed(), 0u);
    EXPECT_EQ(again.total_matured(), T(0));
    EXPECT_EQ(l.accounts(), once.accounts());
}

// Random operation streams: failures are atomic, supply is conserved and
// non-reversible / reversible sides only move the way each op allows.
TEST(LedgerProperty, RandomStreams) {
    std::mt19937_64 rng(7);
    const Address addrs[] = {A, B, C, Address{"D"}};
    for (int run = 0; run < 200; ++run) {
        Ledger l(EpochConfig{10, 30});
        BlockNumber block = 0;
        for (int step = 0; step < 60; ++step) {
            const Address& x = addrs[rng() % 4];
            const Address& y = addrs[rng() % 4];
            const TokenAmount amt{rng() % 60};
            const Ledger before = l;
            block += rng() % 5;
            try {
                switch (rng() % 5) {
                    case 0: l.mint(x, amt, block); break;
                    case 1:
                        l.transfer(x, y, amt, block);
                        if (x != y) { EXPECT_EQ(l.account(x).rbalance, before.account(x).rbalance); }
                        break;
                    case 2:
                        l.rtransfer(x, y, amt, block);
                        for (const auto& a : addrs) EXPECT_EQ(l.account(a).nrbalance, before.account(a).nrbalance);
                        break;
                    case 3: l.burn(x, amt, block, rng() % 2 ? BurnSource::Reversible : BurnSource::NonReversible); break;
                    default: {
                        const auto report = l.clean(rng() % 10, {x, y}, block);
                        for (const auto& a : addrs) EXPECT_EQ(l.account(a).total(), before.account(a).total());
                        (void)report;
                    }
                }
            } catch (const Error&) {
                EXPECT_EQ(l, before);
            }
            TokenAmount sum;
            for (const auto& [a, s] : l.accounts()) sum += s.total();
            ASSERT_EQ(sum, l.total_supply());
            ASSERT_EQ(l.total_supply(), l.total_minted() - l.total_burned());
        }
    }
}
