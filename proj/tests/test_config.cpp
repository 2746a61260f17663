#include <doctest.h>

#include <stdexcept>

#include <filesystem>
#include <fstream>

#include "snrlab/config.hpp"

using namespace snrlab;

TEST_CASE("config parsing basics") {
    const auto cfg = Config::from_string(
        "# comment\n"
        "experiment = sample\n"
        "schedule.T = 25   # trailing comment\n"
        "run.seed = 42\n"
        "correction.lambda_l = 0.05\n");
    CHECK(cfg.get_string("experiment") == "sample");
    CHECK(cfg.get_int("schedule.T") == 25);
    CHECK(cfg.get_double("correction.lambda_l") == 0.05);
    CHECK(cfg.get_int("run.n_chains", 7) == 7);
    CHECK_FALSE(cfg.has("schedule.kind"));
}

TEST_CASE("config rejects malformed input") {
    CHECK_THROWS_WITH_AS(Config::from_string("experiment sample\n"),
                         doctest::Contains("expected 'key = value'"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(Config::from_string("a = 1\na = 2\n"), doctest::Contains("duplicate"),
                         std::invalid_argument);
    const auto cfg = Config::from_string("schedule.T = abc\n");
    CHECK_THROWS_WITH_AS(cfg.get_int("schedule.T"), doctest::Contains("schedule.T"),
                         std::invalid_argument);
}

TEST_CASE("unknown keys are named in the error") {
    const auto cfg = Config::from_string("corection.mode = dcw\n");
    CHECK_THROWS_WITH_AS(parse_experiment(cfg), doctest::Contains("corection.mode"),
                         std::invalid_argument);
}

TEST_CASE("experiment defaults") {
    const auto spec = parse_experiment(Config::from_string(""));
    CHECK(spec.kind == ExperimentKind::sample);
    CHECK(spec.sched.steps() == 100);
    CHECK(spec.grid == GridShape{1, 8, 8});
    CHECK(spec.data.modes().size() == 1);
    CHECK(spec.data.modes().front().var == 1.0);
    CHECK(spec.denoiser_kind == DenoiserKind::exact);
    CHECK(spec.correction.mode == CorrectionMode::none);
    CHECK(spec.n_chains == 1000);
    CHECK(spec.data_seed == spec.seed + 1);
    // desk default scaling of the beta range
    CHECK(spec.sched.beta(1) == doctest::Approx(1e-3).epsilon(1e-12));
    CHECK(spec.sched.beta(100) == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("mean specs") {
    const auto checker = parse_experiment(Config::from_string(
        "grid.height = 4\ngrid.width = 4\ndata.mode.0.mean = checker:0.5\n"));
    const Grid& m = checker.data.modes().front().mean;
    CHECK(m.at(0, 0, 0) == 0.5);
    CHECK(m.at(0, 0, 1) == -0.5);
    CHECK(m.at(0, 1, 0) == -0.5);
    CHECK(m.at(0, 1, 1) == 0.5);

    const auto path = std::filesystem::temp_directory_path() / "snrlab_mean_test.csv";
    Grid g(GridShape{1, 4, 4});
    for (int i = 0; i < g.size(); ++i) {
        g[i] = i * 0.25;
    }
    write_grid_csv(path, g);
    const auto fromcsv = parse_experiment(Config::from_string(
        "grid.height = 4\ngrid.width = 4\ndata.mode.0.mean = csv:" + path.string() + "\n"));
    for (int i = 0; i < g.size(); ++i) {
        CHECK(fromcsv.data.modes().front().mean[i] == g[i]);
    }
    std::filesystem::remove(path);

    CHECK_THROWS_WITH_AS(
        parse_experiment(Config::from_string("data.mode.0.mean = blob:1\n")),
        doctest::Contains("data.mode.0.mean"), std::invalid_argument);
}

TEST_CASE("multi-mode data and weight validation") {
    const auto spec = parse_experiment(Config::from_string(
        "data.modes = 2\n"
        "data.mode.0.weight = 0.5\ndata.mode.0.mean = constant:1\ndata.mode.0.var = 0.25\n"
        "data.mode.1.weight = 0.5\ndata.mode.1.mean = constant:-1\ndata.mode.1.var = 0.25\n"));
    CHECK(spec.data.modes().size() == 2);
    CHECK_THROWS_AS(parse_experiment(Config::from_string(
                        "data.modes = 2\n"
                        "data.mode.0.weight = 0.6\ndata.mode.0.mean = constant:1\n"
                        "data.mode.1.weight = 0.6\ndata.mode.1.mean = constant:-1\n")),
                    std::invalid_argument);
}

TEST_CASE("per-timestep bias profile from csv") {
    const auto path = std::filesystem::temp_directory_path() / "snrlab_phi_test.csv";
    {
        std::ofstream out(path);
        for (int t = 0; t < 10; ++t) {
            out << 0.01 * t << "\n";
        }
    }
    const auto spec = parse_experiment(Config::from_string(
        "schedule.T = 10\ndenoiser.kind = biased\ndenoiser.gamma = 0.97\n"
        "denoiser.phi = csv:" + path.string() + "\n"));
    CHECK(spec.profile.phi(1) == 0.0);
    CHECK(spec.profile.phi(10) == doctest::Approx(0.09));
    CHECK(spec.profile.gamma(5) == 0.97);
    std::filesystem::remove(path);
}

TEST_CASE("record flags and enums") {
    const auto spec = parse_experiment(Config::from_string(
        "experiment = forward-vs-reverse\n"
        "run.record = states, eps_hat\n"
        "denoiser.kind = assumption\ndenoiser.gamma = 0.98\ndenoiser.phi = 0.1\n"
        "correction.mode = dcw\ncorrection.weight_kind = piecewise\n"
        "correction.t_s = 40\ncorrection.w_l = 0.1\ncorrection.w_h = 0.2\n"
        "schedule.sigma_mode = large\n"));
    CHECK(spec.kind == ExperimentKind::forward_vs_reverse);
    CHECK(spec.record.states);
    CHECK(spec.record.eps_hat);
    CHECK_FALSE(spec.record.x0_hat);
    CHECK(spec.denoiser_kind == DenoiserKind::assumption);
    CHECK(spec.correction.weight_kind == WeightKind::piecewise);
    CHECK(spec.sched.sigma_mode() == SigmaMode::large);

    CHECK_THROWS_WITH_AS(
        parse_experiment(Config::from_string("run.record = everything\n")),
        doctest::Contains("run.record"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_experiment(Config::from_string("experiment = dance\n")),
                         doctest::Contains("experiment"), std::invalid_argument);
}
