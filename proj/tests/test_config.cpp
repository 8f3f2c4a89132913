#include <gtest/gtest.h>

#include "sectorlab/config.hpp"

using namespace sectorlab;

TEST(Config, Defaults) {
    const RunConfig c;
    EXPECT_EQ(c.trials, 2000u);
    EXPECT_EQ(c.slack, 0.08);
    EXPECT_EQ(c.outer_samples, 10000u);
    EXPECT_EQ(c.truncation_cap, 1e-8);
}

TEST(Config, ParseAllKeys) {
    const auto c = parse_config(R"(# comment
n = 5000
alpha = 3pi/2
mu_target = 1.5   # trailing comment
v = 0.1
q = 0.25
mode = both
seed = 18446744073709551615
trials = 10
parallelism = 3
epsilon = 0.5
slack = 0.05
a_sets = tail:4; set:0,2
side = in
outer_samples = 100
area_samples = 200
pair_area_samples = 300
truncation_cap = 1e-9
n_grid = 100,200
r_list = 0.1,0.2
k_override = 6
bootstrap_reps = 50
out = results/x
)");
    EXPECT_EQ(c.n, 5000u);
    EXPECT_DOUBLE_EQ(c.alpha, 1.5 * kPi);
    EXPECT_EQ(c.mu_target, 1.5);
    EXPECT_FALSE(c.r);
    EXPECT_EQ(c.mode, ModeSelection::both);
    EXPECT_EQ(c.seed, 18446744073709551615ull);
    EXPECT_EQ(c.side, SideSelection::in);
    ASSERT_EQ(c.a_sets.size(), 2u);
    EXPECT_EQ(c.a_sets[0], DegreeSet::tail(4));
    EXPECT_EQ(c.a_sets[1], DegreeSet::finite({0, 2}));
    EXPECT_EQ(c.n_grid, (std::vector<std::uint64_t>{100, 200}));
    EXPECT_EQ(c.r_list, (std::vector<double>{0.1, 0.2}));
    EXPECT_EQ(c.k_override, 6u);
    EXPECT_EQ(c.out, "results/x");
}

TEST(Config, AngleForms) {
    EXPECT_DOUBLE_EQ(parse_config("alpha = pi").alpha, kPi);
    EXPECT_DOUBLE_EQ(parse_config("alpha = 2pi").alpha, kTwoPi);
    EXPECT_DOUBLE_EQ(parse_config("alpha = pi/2").alpha, kPi / 2);
    EXPECT_DOUBLE_EQ(parse_config("alpha = 1.25").alpha, 1.25);
    EXPECT_THROW(parse_config("alpha = pix"), ConfigError);
}

TEST(Config, RoundTrip) {
    RunConfig c;
    c.n = 1234;
    c.alpha = 2.0 / 3.0;
    c.r = 0.1 + 0.2;
    c.v = 1.0 / 3.0;
    c.q = 0.2;
    c.mode = ModeSelection::binomial;
    c.seed = 99;
    c.a_sets = {DegreeSet::tail(7), DegreeSet{}, DegreeSet::finite({1, 3})};
    c.n_grid = {10, 20};
    c.r_list = {0.01, 1.0 / 7.0};
    c.k_override = 3;
    c.out = "out dir";
    const std::string text = serialize_config(c);
    const RunConfig back = parse_config(text);
    EXPECT_EQ(back, c);
    EXPECT_EQ(serialize_config(back), text);
    EXPECT_EQ(parse_config(serialize_config(RunConfig{})), RunConfig{});
}

TEST(Config, Errors) {
    try {
        parse_config("bogus = 1");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.field(), "bogus");
    }
    EXPECT_THROW(parse_config("n = -3"), ConfigError);
    EXPECT_THROW(parse_config("v = abc"), ConfigError);
    EXPECT_THROW(parse_config("just a line"), ConfigError);
    EXPECT_THROW(parse_config("mode = sideways"), ConfigError);
    EXPECT_THROW(parse_config("a_sets = tail:x"), ConfigError);
}

TEST(Config, ValidateRadiusChoice) {
    RunConfig c;
    EXPECT_THROW(validate(c), ConfigError);
    c.r = 0.01;
    EXPECT_NO_THROW(validate(c));
    c.mu_target = 1.0;
    EXPECT_THROW(validate(c), ConfigError);
    c.r.reset();
    EXPECT_NO_THROW(validate(c));
    c.alpha = 3 * kPi;
    try {
        validate(c);
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.field(), "alpha");
    }
}

TEST(Config, ValidateSweep) {
    RunConfig c;
    c.mu_target = 1.0;
    EXPECT_THROW(validate(c, true), ConfigError);
    c.n_grid = {100, 1000};
    EXPECT_NO_THROW(validate(c, true));
    c.mu_target.reset();
    c.r_list = {0.1};
    EXPECT_THROW(validate(c, true), ConfigError);
    c.r_list = {0.1, 0.05};
    EXPECT_NO_THROW(validate(c, true));
}

TEST(Config, ModelParamsFromMuTarget) {
    RunConfig c;
    c.mu_target = 1.0;
    c.v = 0.1;
    c.q = 0.2;
    const auto p = model_params(c, Mode::binomial);
    EXPECT_NEAR(mu(p), 1.0, 1e-12);
    EXPECT_EQ(p.master_seed, c.seed);
    c.mu_target = 1e6;
    EXPECT_THROW(model_params(c, Mode::poisson), RadiusOutOfRange);
}
