#include <gtest/gtest.h>

#include "rledger/oracle.hpp"
#include "rledger/replay.hpp"

using namespace rledger;
using namespace rledger::scenario;

namespace {

std::string scn(const std::string& name) { return std::string(RLEDGER_SCENARIO_DIR) + "/" + name + ".scn"; }

std::string render(const std::vector<ScenarioOp>& ops) {
    std::string s;
    for (const auto& op : ops) s += op.text() + "\n";
    return s;
}

}  // namespace

TEST(Parser, RoundTrip) {
    const auto ops = parse_scenario(scn("fig5_g1"));
    ASSERT_FALSE(ops.empty());
    const std::string once = render(ops);
    EXPECT_EQ(render(parse_scenario_text(once)), once);
}

TEST(Parser, ErrorsCarryPosition) {
    try {
        parse_scenario_text("mint to=a amount=1\nabc\n", "s.scn");
        FAIL() << "no ParseError";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("s.scn:2:1"), std::string::npos) << e.what();
    }
    EXPECT_THROW(parse_scenario_text("mint to=a amount=x1"), ParseError);
    EXPECT_THROW(parse_scenario_text("mint to=a"), ParseError);
    EXPECT_THROW(parse_scenario_text("mint to=a amount=1 amount=2"), ParseError);
    EXPECT_THROW(parse_scenario_text("mint to=a amount=1 colour=red"), ParseError);
    EXPECT_THROW(parse_scenario_text("advanceBlock to=3 by=1"), ParseError);
    EXPECT_THROW(parse_scenario_text("expect nonsense"), ParseError);
    EXPECT_THROW(parse_scenario_text("mint to=a amount=1 to"), ParseError);
}

TEST(Parser, CommentsAndBlankLines) {
    EXPECT_TRUE(parse_scenario_text("").empty());
    EXPECT_TRUE(parse_scenario_text("\n   \n# only a comment\n").empty());
    const auto ops = parse_scenario_text("mint to=a amount=5 # trailing\r\n");
    ASSERT_EQ(ops.size(), 1u);
    EXPECT_EQ(ops[0].raw("amount"), "5");
}

TEST(Replay, EmptyScenarioPasses) {
    const auto r = replay({}, "empty");
    EXPECT_TRUE(r.passed());
    EXPECT_EQ(r.state["supply"]["total"], "0");
}

TEST(Replay, FailedExpectationFailsRun) {
    const auto r = replay(parse_scenario_text("mint to=a amount=5 block=1\nexpect balance addr=a nr=6\n"), "x");
    EXPECT_FALSE(r.passed());
    EXPECT_EQ(r.check_failures(), 1u);
}

TEST(Replay, ExpectErrorMismatchIsFailure) {
    const auto ok = replay(parse_scenario_text("transfer from=a to=b amount=5 expectError=InsufficientNonReversibleError\n"), "x");
    EXPECT_TRUE(ok.passed());
    const auto wrong = replay(parse_scenario_text("transfer from=a to=b amount=5 expectError=FrozenFloorError\n"), "x");
    EXPECT_FALSE(wrong.passed());
    const auto none = replay(parse_scenario_text("mint to=a amount=5 expectError=FrozenFloorError\n"), "x");
    EXPECT_FALSE(none.passed());
}

class Golden : public ::testing::TestWithParam<std::string> {};

TEST_P(Golden, Passes) {
    const auto r = replay_file(scn(GetParam()));
    EXPECT_TRUE(r.passed()) << to_text(r);
}

TEST_P(Golden, ReportIsByteStable) {
    const auto a = to_json(replay_file(scn(GetParam()))).dump(2);
    const auto b = to_json(replay_file(scn(GetParam()))).dump(2);
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.find("wallTime"), std::string::npos);
}

INSTANTIATE_TEST_SUITE_P(Scenarios, Golden,
                         ::testing::Values("example1", "example2", "example3", "fig5_g1", "fig5_g2", "cycle_basic",
                                           "double_freeze", "nft_lifecycle", "governance_lifecycle"));

TEST(Oracle, SameSeedSameReport) {
    oracle::Options o;
    o.trials = 300;
    o.seed = 42;
    EXPECT_EQ(oracle::run(o).to_json().dump(), oracle::run(o).to_json().dump());
    o.seed = 43;
    oracle::Options p = o;
    p.seed = 42;
    EXPECT_NE(oracle::run(o).to_json().dump(), oracle::run(p).to_json().dump());
}

// A trial's emitted scenario replays to the same freeze the oracle computed.
TEST(Oracle, TrialScenariosReplay) {
    oracle::Options o;
    for (std::uint64_t i = 0; i < 40; ++i) {
        oracle::BuiltTrial bt;
        bt.trial.index = i;
        bt.trial.seed = oracle::splitmix64(i + 99);
        bt.trial.shape = i % 2 ? oracle::Shape::Interleaved : oracle::Shape::Random;
        oracle::build_trial(bt, o);
        const auto r = replay(parse_scenario_text(bt.trial.scenario()), "trial");
        ASSERT_TRUE(r.passed()) << bt.trial.scenario() << to_text(r);
        const auto plan = bt.engine.analyze(bt.disputed).plan;
        EXPECT_EQ(r.state["claims"]["c"]["plan"]["totalFrozen"], plan.total_frozen().to_string()) << bt.trial.scenario();
    }
}
