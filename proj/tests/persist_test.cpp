#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <limits>

#include "gradient_check.hpp"
#include "lhits/persist/config.hpp"
#include "lhits/persist/dataset.hpp"
#include "lhits/persist/model_file.hpp"
#include "lhits/persist/reports.hpp"

using namespace lhits;
using namespace lhits::persist;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name)
{
    fs::path dir = fs::temp_directory_path() / ("lhits_persist_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

pde::TrajectorySet random_set(std::size_t p, std::size_t t, std::size_t n, std::uint64_t seed)
{
    CounterRng rng(seed, 0);
    pde::TrajectorySet set;
    set.dt = 0.025;
    set.system = pde::SystemTag::KS;
    for (std::size_t i = 0; i < p; ++i)
        set.trajectories.push_back(lhits::testing::random_matrix(t, n, rng));
    return set;
}

bool same_bits(const Matrix& a, const Matrix& b)
{
    return a.rows() == b.rows() && a.cols() == b.cols() &&
           std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

LhitsModel small_model(bool identity, std::uint64_t seed = 1)
{
    CounterRng rng(seed, 7);
    LhitsModel m;
    m.system = pde::SystemTag::FHN;
    const std::size_t n = 6;
    const std::size_t z = identity ? n : 2;
    m.normalizer = pde::Normalizer::fit(pde::NormalizerMode::PerFeatureStandardize,
                                        lhits::testing::random_matrix(20, n, rng));
    if (!identity)
        m.coder = nn::make_autoencoder(n, {5, 4}, z, nn::Activation::ReLU, seed);
    std::vector<nn::ResNetStepper> steppers;
    for (std::size_t s : {1, 2, 4})
        steppers.push_back(nn::make_stepper(z, {7, 7}, s, nn::Activation::ReLU, seed + s));
    m.bank = hits::StepperBank::from(std::move(steppers), 0.01);
    m.plan = hits::CouplingPlan::range(1, 2, hits::Interpolant::Linear, 30);
    return m;
}

Bytes with_header(const Bytes& file, const std::function<void(Json&)>& edit)
{
    Reader in(file);
    in.text(4, "magic");
    in.u8("version");
    const auto len = static_cast<std::size_t>(in.u64("length"));
    Json h = Json::parse(in.text(len, "header"));
    edit(h);
    const std::string text = h.dump();
    Bytes out(file.begin(), file.begin() + 5);
    put_u64(out, text.size());
    out.insert(out.end(), text.begin(), text.end());
    out.insert(out.end(), file.begin() + static_cast<std::ptrdiff_t>(13 + len), file.end());
    return out;
}

} // namespace

TEST(Dataset, RoundTripIsBitExact)
{
    const auto set = random_set(2, 3, 4, 1);
    const auto back = decode_dataset(encode_dataset(set));
    ASSERT_EQ(back.count(), 2u);
    EXPECT_EQ(back.system, pde::SystemTag::KS);
    EXPECT_EQ(std::bit_cast<std::uint64_t>(back.dt), std::bit_cast<std::uint64_t>(set.dt));
    for (std::size_t i = 0; i < 2; ++i)
        EXPECT_TRUE(same_bits(back.trajectories[i], set.trajectories[i]));
}

TEST(Dataset, RoundTripPropertyOverShapes)
{
    CounterRng rng(2, 0);
    for (int trial = 0; trial < 25; ++trial) {
        const auto p = 1 + rng.below(4);
        const auto t = 1 + rng.below(9);
        const auto n = 1 + rng.below(7);
        auto set = random_set(p, t, n, 100 + static_cast<std::uint64_t>(trial));
        set.trajectories[0](0, 0) = std::numeric_limits<double>::denorm_min();
        set.trajectories[0](t - 1, n - 1) = -0.0;
        const Bytes bytes = encode_dataset(set);
        EXPECT_EQ(bytes.size(), kDatasetHeaderBytes + 8 * p * t * n);
        const auto back = decode_dataset(bytes);
        for (std::size_t i = 0; i < p; ++i)
            EXPECT_TRUE(same_bits(back.trajectories[i], set.trajectories[i]));
        EXPECT_EQ(encode_dataset(back), bytes);
    }
}

TEST(Dataset, TruncatedPayloadReportsOffset)
{
    Bytes bytes = encode_dataset(random_set(2, 3, 4, 3));
    bytes.resize(bytes.size() - 8);
    try {
        decode_dataset(bytes);
        FAIL();
    } catch (const FormatError& e) {
        EXPECT_EQ(e.offset(), bytes.size());
    }
    bytes.resize(10);
    EXPECT_THROW(decode_dataset(bytes), FormatError);
}

TEST(Dataset, BadMagicVersionTagAndTrailingBytes)
{
    const Bytes good = encode_dataset(random_set(1, 2, 2, 4));
    Bytes bad = good;
    bad[0] = 'X';
    try {
        decode_dataset(bad);
        FAIL();
    } catch (const FormatError& e) {
        EXPECT_EQ(e.offset(), 0u);
    }
    bad = good;
    bad[4] = 9;
    try {
        decode_dataset(bad);
        FAIL();
    } catch (const FormatError& e) {
        EXPECT_EQ(e.offset(), 4u);
    }
    bad = good;
    bad[kDatasetHeaderBytes - 1] = 0x7f;
    EXPECT_THROW(decode_dataset(bad), FormatError);
    bad = good;
    bad.push_back(0);
    EXPECT_THROW(decode_dataset(bad), FormatError);
    bad = good;
    for (std::size_t i = 5; i < 13; ++i)
        bad[i] = 0xff;
    EXPECT_THROW(decode_dataset(bad), FormatError);
}

TEST(Dataset, SaveLoadAtomically)
{
    const auto dir = temp_dir("dataset");
    const auto set = random_set(3, 5, 2, 5);
    save_dataset(dir / "d.lhts", set);
    save_dataset(dir / "d.lhts", set);
    EXPECT_FALSE(fs::exists(dir / "d.lhts.tmp"));
    const auto back = load_dataset(dir / "d.lhts");
    EXPECT_TRUE(same_bits(back.trajectories[2], set.trajectories[2]));
    EXPECT_THROW(load_dataset(dir / "missing.lhts"), IoError);
    EXPECT_THROW(save_dataset(dir / "no_such_dir" / "d.lhts", set), IoError);
}

TEST(ModelFile, RoundTripGivesIdenticalPredictions)
{
    const auto model = small_model(false);
    ModelMetadata meta{42, "abc", Json{{"seed", 42}}};
    const Bytes bytes = encode_model(model, meta);
    const auto loaded = decode_model(bytes);
    EXPECT_EQ(encode_model(loaded.model, loaded.metadata), bytes);
    EXPECT_EQ(loaded.metadata.seed, 42u);
    EXPECT_EQ(loaded.metadata.fingerprint, "abc");
    EXPECT_EQ(loaded.model.plan.active_indices, model.plan.active_indices);
    EXPECT_EQ(loaded.model.plan.interpolant, hits::Interpolant::Linear);
    EXPECT_EQ(loaded.model.bank.step_multiples(), model.bank.step_multiples());
    const RowVector x0 = RowVector::LinSpaced(6, -1.0, 1.0);
    EXPECT_TRUE(same_bits(lhits_predict(loaded.model, x0, 45), lhits_predict(model, x0, 45)));
}

TEST(ModelFile, IdentityCoderFlagPreserved)
{
    const auto model = small_model(true);
    const auto loaded = decode_model(encode_model(model));
    EXPECT_TRUE(loaded.model.identity_coder());
    EXPECT_EQ(loaded.model.latent_dim(), 6u);
    const RowVector x0 = RowVector::LinSpaced(6, 0.0, 1.0);
    EXPECT_TRUE(same_bits(lhits_predict(loaded.model, x0, 10), lhits_predict(model, x0, 10)));
}

TEST(ModelFile, SaveLoad)
{
    const auto dir = temp_dir("model");
    const auto model = small_model(false, 3);
    save_model(dir / "m.lhtm", model);
    const auto loaded = load_model(dir / "m.lhtm");
    const RowVector x0 = RowVector::Ones(6);
    EXPECT_TRUE(same_bits(lhits_predict(loaded.model, x0, 8), lhits_predict(model, x0, 8)));
    EXPECT_THROW(load_model(dir / "none.lhtm"), IoError);
}

TEST(ModelFile, EditedHeaderDimsRejected)
{
    const Bytes good = encode_model(small_model(false));
    EXPECT_THROW(decode_model(with_header(good, [](Json& h) { h["encoder"]["dims"][1] = 6; })), FormatError);
    EXPECT_THROW(decode_model(with_header(good, [](Json& h) { h["steppers"][0]["dims"][1] = 8; })), FormatError);
    EXPECT_THROW(decode_model(with_header(good, [](Json& h) { h["blob_doubles"] = 3; })), FormatError);
    EXPECT_THROW(decode_model(with_header(good, [](Json& h) { h["latent_dim"] = 3; })), FormatError);
    EXPECT_THROW(decode_model(with_header(good, [](Json& h) { h.erase("plan"); })), FormatError);
    EXPECT_THROW(decode_model(with_header(good, [](Json& h) { h["steppers"][1]["step"] = 4; })), FormatError);
    EXPECT_NO_THROW(decode_model(with_header(good, [](Json&) {})));
}

TEST(ModelFile, TruncatedOrPaddedBlobRejected)
{
    const Bytes good = encode_model(small_model(false));
    Bytes bad(good.begin(), good.end() - 8);
    EXPECT_THROW(decode_model(bad), FormatError);
    bad = good;
    bad.push_back(1);
    EXPECT_THROW(decode_model(bad), FormatError);
    bad = good;
    bad[1] = 'X';
    EXPECT_THROW(decode_model(bad), FormatError);
    bad = Bytes(good.begin(), good.begin() + 20);
    EXPECT_THROW(decode_model(bad), FormatError);
}

TEST(Config, FhnDefaults)
{
    const auto c = parse_config(R"({"system": "fhn"})");
    EXPECT_EQ(c.system(), pde::SystemTag::FHN);
    EXPECT_EQ(c.u("grid.points"), 101u);
    EXPECT_EQ(c.state_dim(), 202u);
    EXPECT_EQ(c.u("latent_dim"), 2u);
    EXPECT_EQ(c.u("train.batch"), 32u);
    EXPECT_DOUBLE_EQ(c.f("train.lr"), 1e-3);
    EXPECT_DOUBLE_EQ(c.f("dt"), 0.01);
    EXPECT_EQ(c.s("activation"), "relu");
    EXPECT_EQ(c.list("ae.hidden"), (std::vector<std::size_t>{100, 100, 100}));
    EXPECT_EQ(c.list("stepper.steps"), (std::vector<std::size_t>{1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024}));
    EXPECT_EQ(c.list("baseline.stepper.hidden"), c.list("stepper.hidden"));
    EXPECT_EQ(c.u("baseline.epochs"), c.u("train.epochs"));
}

TEST(Config, KsDefaults)
{
    const auto c = parse_config(R"({"system": "ks"})");
    EXPECT_EQ(c.state_dim(), 120u);
    EXPECT_EQ(c.u("latent_dim"), 8u);
    EXPECT_DOUBLE_EQ(c.f("grid.length"), 22.0);
    EXPECT_EQ(c.list("stepper.hidden"), (std::vector<std::size_t>{1024, 1024, 1024}));
}

TEST(Config, NestedObjectsFlatten)
{
    const auto c = parse_config(R"({"system": "fhn", "train": {"epochs": 7, "lr": 0.5}, "grid": {"points": 21}})");
    EXPECT_EQ(c.u("train.epochs"), 7u);
    EXPECT_DOUBLE_EQ(c.f("train.lr"), 0.5);
    EXPECT_EQ(c.state_dim(), 42u);
}

TEST(Config, Rejections)
{
    auto rejects = [](const std::string& text, const std::string& key) {
        try {
            parse_config(text);
            ADD_FAILURE() << "accepted: " << text;
        } catch (const ConfigError& e) {
            EXPECT_EQ(e.key(), key) << e.what();
        }
    };
    rejects(R"({"system": "fhn", "train.epochz": 3})", "train.epochz");
    rejects(R"({"grid.points": 11})", "system");
    rejects(R"({"system": "heat"})", "system");
    rejects(R"({"system": "fhn", "latent_dim": 202})", "latent_dim");
    rejects(R"({"system": "fhn", "stepper.steps": [1, 3]})", "stepper.steps");
    rejects(R"({"system": "fhn", "stepper.steps": [2, 2]})", "stepper.steps");
    rejects(R"({"system": "fhn", "train.lr": "fast"})", "train.lr");
    rejects(R"({"system": "fhn", "train.batch": 0})", "train.batch");
    rejects(R"({"system": "fhn", "activation": "tanh"})", "activation");
    rejects(R"({"system": "fhn", "steps": 512})", "stepper.steps");
    rejects(R"({"system": "fhn", "z_list": [1, 300]})", "z_list");
    EXPECT_THROW(parse_config("{not json"), ConfigError);
}

TEST(Config, Overrides)
{
    const auto c = parse_config(R"({"system": "fhn"})",
                                {"train.epochs=2000", "stepper.steps=1,2,4", "activation=identity", "train.lr=0.01"});
    EXPECT_EQ(c.u("train.epochs"), 2000u);
    EXPECT_EQ(c.list("stepper.steps"), (std::vector<std::size_t>{1, 2, 4}));
    EXPECT_EQ(c.s("activation"), "identity");
    EXPECT_DOUBLE_EQ(c.f("train.lr"), 0.01);
    EXPECT_THROW(parse_config(R"({"system": "fhn"})", {"bogus.key=1"}), ConfigError);
    EXPECT_THROW(parse_config(R"({"system": "fhn"})", {"train.epochs"}), ConfigError);
    EXPECT_THROW(parse_config(R"({"system": "fhn"})", {"stepper.steps=1,3"}), ConfigError);
}

TEST(Config, FingerprintTracksValues)
{
    const auto a = parse_config(R"({"system": "fhn", "seed": 1})");
    const auto b = parse_config(R"({"seed": 1, "system": "fhn"})");
    const auto c = parse_config(R"({"system": "fhn", "seed": 2})");
    EXPECT_EQ(a.fingerprint().size(), 16u);
    EXPECT_EQ(a.fingerprint(), b.fingerprint());
    EXPECT_NE(a.fingerprint(), c.fingerprint());
}

TEST(Config, PipelineMapping)
{
    const auto c = parse_config(R"({"system": "fhn", "latent_dim": 3, "stepper.steps": [1, 4, 2]})");
    const auto p = pipeline_config(c, 2);
    EXPECT_EQ(p.latent_dim, 3u);
    EXPECT_EQ(p.threads, 2u);
    EXPECT_FALSE(p.identity_coder);
    const auto base = pipeline_config(c, 1, true);
    EXPECT_TRUE(base.identity_coder);
    const auto spec = simulation_spec(c);
    EXPECT_EQ(spec.grid.n, 101u);
    EXPECT_EQ(spec.burn_in, 10000u);
}

TEST(Reports, NonFiniteAndStepFormatting)
{
    EXPECT_EQ(num(std::numeric_limits<double>::infinity()), "inf");
    EXPECT_EQ(num(0.5), "0.5");
    EXPECT_EQ(join_steps({4, 2, 1}), "4;2;1");
    EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
    std::vector<CompareRow> rows{{"RN_1", 1, std::numeric_limits<double>::infinity(), 0.25, 10, true}};
    const std::string csv = compare_csv(rows);
    EXPECT_EQ(csv, "model,step,mse,evaluations,diverged,prediction_seconds\nRN_1,1,inf,10,1,0.25\n");
    EXPECT_EQ(compare_json(rows)[0]["mse"], "inf");
}

TEST(Reports, WriteReportCreatesJsonSibling)
{
    const auto dir = temp_dir("reports");
    write_report(dir / "r.csv", "a\n1\n", Json{{"a", 1}});
    EXPECT_TRUE(fs::exists(dir / "r.csv"));
    EXPECT_EQ(Json::parse(std::string(reinterpret_cast<const char*>(read_file(dir / "r.json").data()),
                                      read_file(dir / "r.json").size()))["a"],
              1);
}
