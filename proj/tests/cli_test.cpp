#include <gtest/gtest.h>

#include "cli_support.hpp"

using namespace lhits;
using namespace lhits::testing;

namespace {

class CliWorkflow : public ::testing::Test {
protected:
    void SetUp() override
    {
        dir = fs::temp_directory_path() / ("lhits_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir);
        fs::create_directories(dir);
        config = (dir / "tiny.json").string();
        write_text(config, kTinyConfig);
    }

    std::string p(const std::string& name) const { return (dir / name).string(); }

    fs::path dir;
    std::string config;
};

} // namespace

TEST(CliHelp, EverySubcommandListsItsFlags)
{
    const std::vector<std::pair<std::string, std::vector<std::string>>> expected{
        {"generate", {}},
        {"train", {"--data", "--baseline"}},
        {"predict", {"--model", "--data", "--trajectory"}},
        {"evaluate", {"--pred", "--data", "--trajectory"}},
        {"sweep", {"--data"}},
        {"compare", {"--model", "--data"}},
        {"benchmark", {"--model", "--data", "--baseline"}},
    };
    const auto top = run({"--help"});
    EXPECT_EQ(top.code, 0);
    for (const auto& [cmd, flags] : expected) {
        EXPECT_NE(top.out.find(cmd), std::string::npos) << cmd;
        const auto r = run({cmd, "--help"});
        EXPECT_EQ(r.code, 0) << cmd;
        std::vector<std::string> all{"--config", "--out", "--seed", "--threads", "--horizon", "--z", "--set"};
        all.insert(all.end(), flags.begin(), flags.end());
        for (const auto& f : all)
            EXPECT_NE(r.out.find(f), std::string::npos) << cmd << " help lacks " << f;
    }
}

TEST(CliUsage, UnknownFlagsAndCommandsAreUsageErrors)
{
    EXPECT_EQ(run({"train", "--bogus"}).code, 2);
    EXPECT_EQ(run({"frobnicate"}).code, 2);
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"predict", "--horizon", "abc"}).code, 2);
}

TEST_F(CliWorkflow, ExitCodesForBadInputs)
{
    EXPECT_EQ(run({"generate", "--out", p("d.lhts")}).code, 3);
    EXPECT_EQ(run({"generate", "--config", p("missing.json"), "--out", p("d.lhts")}).code, 5);
    write_text(p("bad.json"), R"({"system": "fhn", "trian.epochs": 3})");
    const auto r = run({"generate", "--config", p("bad.json"), "--out", p("d.lhts")});
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.err.find("trian.epochs"), std::string::npos);
    EXPECT_EQ(run({"generate", "--config", config, "--set", "latent_dim=99", "--out", p("d.lhts")}).code, 3);
    write_text(p("junk.lhts"), "not a dataset at all, just text");
    EXPECT_EQ(run({"train", "--config", config, "--data", p("junk.lhts"), "--out", p("m.lhtm")}).code, 4);
    EXPECT_EQ(run({"train", "--config", config, "--data", p("absent.lhts"), "--out", p("m.lhtm")}).code, 5);
    EXPECT_EQ(run({"train", "--config", config, "--out", p("m.lhtm")}).code, 3);
    ASSERT_EQ(run({"generate", "--config", config, "--out", p("d.lhts")}).code, 0);
    EXPECT_EQ(run({"train", "--config", config, "--data", p("d.lhts"), "--out", p("m.lhtm"), "--set", "data.train=30"}).code,
              9);
}

TEST_F(CliWorkflow, PredictHorizonZeroWritesOneRow)
{
    ASSERT_EQ(run({"generate", "--config", config, "--out", p("d.lhts")}).code, 0);
    ASSERT_EQ(run({"train", "--config", config, "--data", p("d.lhts"), "--out", p("m.lhtm")}).code, 0);
    const auto r = run({"predict", "--model", p("m.lhtm"), "--data", p("d.lhts"), "--horizon", "0", "--out", p("p.lhts")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto pred = persist::load_dataset(p("p.lhts"));
    ASSERT_EQ(pred.count(), 1u);
    EXPECT_EQ(pred.steps(), 1u);
    const auto model = persist::load_model(p("m.lhtm")).model;
    const auto data = persist::load_dataset(p("d.lhts"));
    const Matrix expected = lhits_predict(model, data.trajectories[3].row(0), 0);
    EXPECT_EQ(0, std::memcmp(expected.data(), pred.trajectories[0].data(), sizeof(double) * 22));
    EXPECT_EQ(run({"predict", "--model", p("m.lhtm"), "--data", p("d.lhts"), "--trajectory", "1", "--out", p("x.lhts")})
                  .code,
              9);
}

TEST_F(CliWorkflow, FullChainIsDeterministic)
{
    ASSERT_EQ(run_cli_chain(dir, config, "a_"), "");
    ASSERT_EQ(run_cli_chain(dir, config, "b_"), "");
    EXPECT_EQ(chain_difference(dir, "a_", "b_"), "");
    const auto compare = slurp(p("a_compare.csv"));
    EXPECT_TRUE(compare.starts_with("model,step,mse,evaluations,diverged,prediction_seconds\nRN_1,1,"));
    EXPECT_NE(compare.find("\nL-HiTS,"), std::string::npos);
    const auto sweep = persist::Json::parse(slurp(p("a_sweep.json")));
    ASSERT_EQ(sweep.size(), 2u);
    EXPECT_EQ(sweep[0]["z"], 1);
    const auto bench = persist::Json::parse(slurp(p("a_bench.json")));
    EXPECT_EQ(bench[0]["method"], "HiTS");
    EXPECT_EQ(bench[0]["latent_dim"], 22);
    EXPECT_EQ(bench[1]["latent_dim"], 2);
}

TEST_F(CliWorkflow, SeedFlagChangesModel)
{
    ASSERT_EQ(run({"generate", "--config", config, "--out", p("d.lhts")}).code, 0);
    ASSERT_EQ(run({"train", "--config", config, "--data", p("d.lhts"), "--out", p("m1.lhtm")}).code, 0);
    ASSERT_EQ(run({"train", "--config", config, "--data", p("d.lhts"), "--out", p("m2.lhtm"), "--seed", "99"}).code, 0);
    EXPECT_NE(slurp(p("m1.lhtm")), slurp(p("m2.lhtm")));
    EXPECT_EQ(persist::load_model(p("m2.lhtm")).metadata.seed, 99u);
}
