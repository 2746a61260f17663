#include "snrlab/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include <json.hpp>

#include "snrlab/diagnostics.hpp"
#include "snrlab/metrics.hpp"
#include "snrlab/sampler.hpp"
#include "snrlab/theory.hpp"
#include "snrlab/threading.hpp"
#include "snrlab/wavelet.hpp"

namespace snrlab::harness {

namespace {

using json = nlohmann::ordered_json;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

class CsvWriter {
  public:
    CsvWriter(const std::filesystem::path& path, const std::string& header) : out_(path) {
        if (!out_) {
            throw std::runtime_error("cannot open for writing: " + path.string());
        }
        out_ << header << "\n";
    }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) {
                out_ << ",";
            }
            out_ << cells[i];
        }
        out_ << "\n";
    }

  private:
    std::ofstream out_;
};

struct RunContext {
    ExperimentSpec spec;
    std::filesystem::path dir;
    ExperimentReport report;
    std::chrono::steady_clock::time_point started;
};

RunContext begin_run(const Config& cfg, const std::filesystem::path& out_root,
                     const std::string& experiment) {
    RunContext ctx{parse_experiment(cfg), out_root / cfg.name(), {}, std::chrono::steady_clock::now()};
    std::filesystem::create_directories(ctx.dir);
    ctx.report.experiment = experiment;
    ctx.report.out_dir = ctx.dir;
    return ctx;
}

void write_manifest(RunContext& ctx, const Config& cfg) {
    ctx.report.wall_clock_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - ctx.started).count();
    json j;
    j["experiment"] = ctx.report.experiment;
    j["config_name"] = cfg.name();
    json conf = json::object();
    for (const auto& [k, v] : cfg.entries()) {
        conf[k] = v;
    }
    j["config"] = conf;
    j["seeds"] = {{"run", ctx.spec.seed}, {"data", ctx.spec.data_seed}};
    j["n_chains"] = ctx.spec.n_chains;
    j["workers"] = worker_count();
    j["wall_clock_s"] = ctx.report.wall_clock_s;
    json outs = json::array();
    for (const auto& p : ctx.report.outputs) {
        outs.push_back(p.filename().string());
    }
    j["outputs"] = outs;
    json mets = json::array();
    for (const auto& m : ctx.report.metrics) {
        mets.push_back({{"name", m.name},
                        {"value", m.value},
                        {"stderr", m.stderr_},
                        {"n_a", m.n_a},
                        {"n_b", m.n_b},
                        {"seed", m.seed}});
    }
    j["metrics"] = mets;
    std::ofstream out(ctx.dir / "manifest.json");
    out << j.dump(2) << "\n";
}

void write_curve_csv(RunContext& ctx, const std::string& name, const diag::Curve& a,
                     const diag::Curve& b, const std::string& header,
                     const std::vector<double>* extra = nullptr) {
    const auto path = ctx.dir / name;
    CsvWriter csv(path, header);
    for (std::size_t i = 0; i < a.t.size(); ++i) {
        std::vector<std::string> row{std::to_string(a.t[i]), fmt(a.mean[i]), fmt(b.mean[i]),
                                     fmt(a.se[i]), fmt(b.se[i])};
        if (extra) {
            row.push_back(fmt((*extra)[i]));
        }
        csv.row(row);
    }
    ctx.report.outputs.push_back(path);
}

void write_trajectories_csv(RunContext& ctx, const std::vector<Trajectory>& trajs) {
    const auto path = ctx.dir / "trajectories.csv";
    CsvWriter csv(path, "chain_id,t,mean_sq_norm");
    for (const auto& tr : trajs) {
        const int T = static_cast<int>(tr.state_msq.size());
        for (int t = T; t >= 1; --t) {
            csv.row({std::to_string(tr.chain_id), std::to_string(t),
                     fmt(tr.state_msq[static_cast<std::size_t>(t - 1)])});
        }
    }
    ctx.report.outputs.push_back(path);
}

void write_states_csv(RunContext& ctx, const std::vector<Trajectory>& trajs) {
    const auto path = ctx.dir / "states.csv";
    CsvWriter csv(path, "chain_id,t,index,value");
    for (const auto& tr : trajs) {
        const int T = static_cast<int>(tr.state_msq.size());
        for (std::size_t k = 0; k < tr.states.size(); ++k) {
            const int t = T - static_cast<int>(k);
            const Grid& g = tr.states[k];
            for (int i = 0; i < g.size(); ++i) {
                csv.row({std::to_string(tr.chain_id), std::to_string(t), std::to_string(i),
                         fmt(g[i])});
            }
        }
    }
    ctx.report.outputs.push_back(path);
}

std::vector<Grid> draw_data(const GaussianMixture& data, int n, std::uint64_t seed) {
    std::vector<Grid> out(static_cast<std::size_t>(n));
    parallel_for(n, [&](int i) {
        out[static_cast<std::size_t>(i)] = data.sample(seed, static_cast<std::uint32_t>(i));
    });
    return out;
}

std::vector<Grid> terminals(const std::vector<Trajectory>& trajs) {
    std::vector<Grid> out;
    out.reserve(trajs.size());
    for (const auto& tr : trajs) {
        out.push_back(tr.terminal);
    }
    return out;
}

double batch_se(const std::vector<double>& batch_values) {
    const double n = static_cast<double>(batch_values.size());
    double m = 0.0;
    for (double v : batch_values) {
        m += v;
    }
    m /= n;
    double q = 0.0;
    for (double v : batch_values) {
        q += (v - m) * (v - m);
    }
    return std::sqrt(q / (n - 1.0) / n);
}

}  // namespace

ExperimentReport run_experiment(const Config& cfg, const std::filesystem::path& out_root) {
    const std::string kind = cfg.get_string("experiment", "sample");
    RunContext ctx = begin_run(cfg, out_root, kind);
    ExperimentSpec& spec = ctx.spec;
    const auto model = spec.make_denoiser();

    switch (spec.kind) {
        case ExperimentKind::sample: {
            RunOptions opt{spec.n_chains, spec.seed, spec.record};
            const auto trajs = run_reverse(*model, spec.sched, spec.correction, opt);
            write_trajectories_csv(ctx, trajs);
            if (spec.record.states) {
                write_states_csv(ctx, trajs);
            }
            break;
        }
        case ExperimentKind::sliding_window: {
            const auto sw = diag::sliding_window(*model, spec.sched, spec.data, spec.sliding_s,
                                                 spec.sliding_t, spec.n_chains, spec.seed);
            const auto path = ctx.dir / "sliding_window.csv";
            CsvWriter csv(path, "s,t,mean,stderr,n");
            for (std::size_t sj = 0; sj < sw.s_list.size(); ++sj) {
                for (std::size_t tj = 0; tj < sw.t_list.size(); ++tj) {
                    csv.row({std::to_string(sw.s_list[sj]), std::to_string(sw.t_list[tj]),
                             fmt(sw.mean[sj][tj]), fmt(sw.se[sj][tj]), std::to_string(sw.n)});
                }
            }
            ctx.report.outputs.push_back(path);
            break;
        }
        case ExperimentKind::forward_vs_reverse: {
            const auto fr = diag::forward_vs_reverse(*model, spec.sched, spec.data,
                                                     spec.correction, spec.n_chains, spec.seed);
            write_curve_csv(ctx, "norms.csv", fr.forward, fr.reverse,
                            "t,forward,reverse,stderr_f,stderr_r");
            int dominated = 0;
            for (std::size_t i = 0; i < fr.forward.t.size(); ++i) {
                if (fr.reverse.mean[i] >= fr.forward.mean[i]) {
                    ++dominated;
                }
            }
            ctx.report.metrics.push_back({"reverse_dominance_fraction",
                                          static_cast<double>(dominated) /
                                              static_cast<double>(fr.forward.t.size()),
                                          0.0, spec.n_chains, spec.n_chains, spec.seed});
            break;
        }
        case ExperimentKind::recon_norms: {
            const auto rn =
                diag::reconstruction_norms(*model, spec.sched, spec.data, spec.n_chains, spec.seed);
            std::vector<double> data_col(rn.forward.t.size(), rn.data_msq);
            write_curve_csv(ctx, "recon_norms.csv", rn.forward, rn.reverse,
                            "t,forward,reverse,stderr_f,stderr_r,data_msq", &data_col);
            if (spec.theory_t >= 1) {
                const auto est = diag::estimate_gamma_psi(spec.sched, spec.data, spec.profile,
                                                          spec.theory_t, spec.n_chains, spec.seed);
                const auto law = theory::biased_step_law(spec.profile.gamma(spec.theory_t),
                                                         spec.profile.phi(spec.theory_t),
                                                         spec.theory_t, spec.sched);
                const auto path = ctx.dir / "gamma_psi.csv";
                CsvWriter csv(path,
                              "t,gamma_hat_emp,gamma_hat_se,noise_std_emp,noise_std_se,"
                              "coef_x0_theory,noise_std_theory,n");
                csv.row({std::to_string(spec.theory_t), fmt(est.gamma_hat), fmt(est.gamma_hat_se),
                         fmt(est.noise_std), fmt(est.noise_std_se), fmt(law.coef_x0),
                         fmt(law.noise_std), std::to_string(est.n)});
                ctx.report.outputs.push_back(path);
            }
            break;
        }
        case ExperimentKind::theory_curves: {
            const auto curves = theory::compute_curves(spec.profile, spec.sched);
            const auto path = ctx.dir / "theory_curves.csv";
            CsvWriter csv(path, "t,gamma_hat,psi,snr_forward,snr_reverse,eta");
            for (std::size_t i = 0; i < curves.t.size(); ++i) {
                csv.row({std::to_string(curves.t[i]), fmt(curves.gamma_hat[i]),
                         fmt(curves.psi[i]), fmt(curves.snr_forward[i]),
                         fmt(curves.snr_reverse[i]), fmt(curves.eta[i])});
            }
            ctx.report.outputs.push_back(path);
            break;
        }
        case ExperimentKind::metrics: {
            RunOptions opt{spec.n_chains, spec.seed, {}};
            const auto trajs = run_reverse(*model, spec.sched, spec.correction, opt);
            const auto gen = terminals(trajs);
            const auto ref = draw_data(spec.data, spec.n_chains, spec.data_seed);
            const double ed = metrics::energy_distance(gen, ref);
            const auto batches = metrics::energy_distance_batches(gen, ref, spec.search_batches);
            const double sw =
                metrics::sliced_wasserstein(gen, ref, spec.metrics_n_proj, spec.seed);
            const auto path = ctx.dir / "metrics.csv";
            CsvWriter csv(path, "metric_name,value,n_a,n_b,seed");
            csv.row({"energy_distance", fmt(ed), std::to_string(gen.size()),
                     std::to_string(ref.size()), std::to_string(spec.seed)});
            csv.row({"sliced_wasserstein", fmt(sw), std::to_string(gen.size()),
                     std::to_string(ref.size()), std::to_string(spec.seed)});
            ctx.report.outputs.push_back(path);
            ctx.report.metrics.push_back({"energy_distance", ed, batch_se(batches),
                                          static_cast<long long>(gen.size()),
                                          static_cast<long long>(ref.size()), spec.seed});
            ctx.report.metrics.push_back({"sliced_wasserstein", sw, 0.0,
                                          static_cast<long long>(gen.size()),
                                          static_cast<long long>(ref.size()), spec.seed});
            break;
        }
    }

    write_manifest(ctx, cfg);
    return ctx.report;
}

namespace {

// Objective evaluation for one correction setting under common random numbers.
struct SearchEvaluator {
    const ExperimentSpec& spec;
    std::shared_ptr<const Denoiser> model;
    std::vector<Grid> reference;

    std::pair<double, std::vector<double>> operator()(double lam_l, double high_mult) const {
        CorrectionConfig corr;
        corr.mode = CorrectionMode::dcw;
        corr.weight_kind = WeightKind::variance;
        corr.lambda_l = lam_l;
        corr.lambda_h = 1.0 - high_mult;
        RunOptions opt{spec.n_chains, spec.seed, {}};
        const auto trajs = run_reverse(*model, spec.sched, corr, opt);
        const auto gen = terminals(trajs);
        const double ed = metrics::energy_distance(gen, reference);
        const auto batches = metrics::energy_distance_batches(gen, reference, spec.search_batches);
        return {ed, batches};
    }
};

struct StageResult {
    double best = 0.0;
    double objective = 0.0;
    std::vector<double> batches;
};

StageResult search_stage(int stage, double coarse_max, double coarse_step, double fine_step,
                         const std::function<std::pair<double, std::vector<double>>(double)>& probe,
                         std::vector<SearchPoint>& trace) {
    struct Point {
        double v;
        double obj;
        std::vector<double> batches;
    };
    std::vector<Point> coarse;
    for (double v = 0.0; v <= coarse_max + 1e-12; v += coarse_step) {
        auto [obj, batches] = probe(v);
        coarse.push_back({v, obj, std::move(batches)});
        trace.push_back({stage, v, obj, batch_se(coarse.back().batches)});
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < coarse.size(); ++i) {
        if (coarse[i].obj < coarse[best].obj) {
            best = i;  // strict: ties keep the smaller value
        }
    }
    // refine around the turning point
    const double lo = best > 0 ? coarse[best - 1].v : coarse[best].v;
    const double hi = best + 1 < coarse.size() ? coarse[best + 1].v : coarse[best].v;
    Point winner = coarse[best];
    for (double v = lo; v <= hi + 1e-12; v += fine_step) {
        // skip points already probed on the coarse grid
        const double rel = std::fmod(v + 1e-12, coarse_step);
        if (rel < 2e-12 || coarse_step - rel < 2e-12) {
            continue;
        }
        auto [obj, batches] = probe(v);
        trace.push_back({stage, v, obj, batch_se(batches)});
        if (obj < winner.obj || (obj == winner.obj && v < winner.v)) {
            winner = {v, obj, std::move(batches)};
        }
    }
    return {winner.v, winner.obj, winner.batches};
}

}  // namespace

SearchResult two_stage_search(const Config& cfg, const std::filesystem::path& out_root) {
    RunContext ctx = begin_run(cfg, out_root, "search");
    ExperimentSpec& spec = ctx.spec;

    SearchEvaluator eval{spec, spec.make_denoiser(),
                         draw_data(spec.data, spec.n_chains, spec.data_seed)};

    SearchResult result;
    auto [base_obj, base_batches] = eval(0.0, 0.0);
    result.objective_baseline = base_obj;
    result.trace.push_back({0, 0.0, base_obj, batch_se(base_batches)});

    const auto stage1 = search_stage(
        1, spec.search_coarse_max_l, spec.search_coarse_step, spec.search_fine_step,
        [&](double v) { return eval(v, 0.0); }, result.trace);
    result.lambda_l_star = stage1.best;

    const auto stage2 = search_stage(
        2, spec.search_coarse_max_h, spec.search_coarse_step, spec.search_fine_step,
        [&](double v) { return eval(stage1.best, v); }, result.trace);
    result.lambda_h_star = 1.0 - stage2.best;
    result.objective_star = stage2.objective;

    // paired SE of (baseline - best) from common-random-number batches
    std::vector<double> diffs(base_batches.size());
    for (std::size_t i = 0; i < diffs.size(); ++i) {
        diffs[i] = base_batches[i] - stage2.batches[i];
    }
    result.improvement_se = batch_se(diffs);

    const auto path = ctx.dir / "search_trace.csv";
    CsvWriter csv(path, "stage,value,objective,stderr");
    for (const auto& p : result.trace) {
        csv.row({std::to_string(p.stage), fmt(p.value), fmt(p.objective), fmt(p.stderr_)});
    }
    ctx.report.outputs.push_back(path);
    ctx.report.metrics.push_back({"objective_baseline", result.objective_baseline,
                                  batch_se(base_batches), spec.n_chains, spec.n_chains,
                                  spec.seed});
    ctx.report.metrics.push_back({"objective_star", result.objective_star,
                                  batch_se(stage2.batches), spec.n_chains, spec.n_chains,
                                  spec.seed});
    ctx.report.metrics.push_back(
        {"lambda_l_star", result.lambda_l_star, 0.0, 0, 0, spec.seed});
    ctx.report.metrics.push_back(
        {"lambda_h_star", result.lambda_h_star, 0.0, 0, 0, spec.seed});
    ctx.report.metrics.push_back(
        {"improvement_se", result.improvement_se, 0.0, 0, 0, spec.seed});
    write_manifest(ctx, cfg);
    return result;
}

ExperimentReport schedule_dump(const Config& cfg, const std::filesystem::path& out_root) {
    RunContext ctx = begin_run(cfg, out_root, "schedule-dump");
    const NoiseSchedule& s = ctx.spec.sched;
    const auto path = ctx.dir / "schedule.csv";
    CsvWriter csv(path, "t,beta,alpha_bar,beta_tilde,sigma,snr");
    for (int t = 1; t <= s.steps(); ++t) {
        csv.row({std::to_string(t), fmt(s.beta(t)), fmt(s.alpha_bar(t)), fmt(s.beta_tilde(t)),
                 fmt(s.sigma(t)), fmt(s.snr(t))});
    }
    ctx.report.outputs.push_back(path);
    write_manifest(ctx, cfg);
    return ctx.report;
}

ExperimentReport theory_dump(const Config& cfg, const std::filesystem::path& out_root) {
    RunContext ctx = begin_run(cfg, out_root, "theory-curves");
    const auto curves = theory::compute_curves(ctx.spec.profile, ctx.spec.sched);
    const auto path = ctx.dir / "theory_curves.csv";
    CsvWriter csv(path, "t,gamma_hat,psi,snr_forward,snr_reverse,eta");
    for (std::size_t i = 0; i < curves.t.size(); ++i) {
        csv.row({std::to_string(curves.t[i]), fmt(curves.gamma_hat[i]), fmt(curves.psi[i]),
                 fmt(curves.snr_forward[i]), fmt(curves.snr_reverse[i]), fmt(curves.eta[i])});
    }
    ctx.report.outputs.push_back(path);
    write_manifest(ctx, cfg);
    return ctx.report;
}

int selftest() {
    int failures = 0;
    auto check = [&](const char* name, bool ok) {
        std::printf("%-44s %s\n", name, ok ? "pass" : "FAIL");
        if (!ok) {
            ++failures;
        }
    };

    const NoiseSchedule sched = NoiseSchedule::desk_default(100);

    {
        bool ok = true;
        for (int t = 1; t <= sched.steps(); ++t) {
            const double lhs = sched.alpha_bar(t);
            const double rhs = sched.alpha_bar(t - 1) * sched.alpha(t);
            ok = ok && std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs));
            ok = ok && sched.beta_tilde(t) <= sched.beta(t) + 1e-15;
            if (t > 1) {
                ok = ok && sched.snr(t) < sched.snr(t - 1);
            }
        }
        check("schedule product/monotonicity identities", ok);
    }

    const GridShape shape{1, 8, 8};
    {
        bool ok = true;
        double worst_resid = 0.0, worst_ratio_err = 0.0;
        for (int rep = 0; rep < 32; ++rep) {
            Grid x(shape);
            rng::NormalStream s({7, static_cast<std::uint32_t>(rep), 0, rng::Purpose::data_x0});
            s.fill(x.values());
            const Grid back = idwt_haar(dwt_haar(x));
            for (int i = 0; i < x.size(); ++i) {
                worst_resid = std::max(worst_resid, std::abs(back[i] - x[i]));
            }
            const auto sb = dwt_haar(x);
            const double energy = sb.ll.mean_sq() + sb.lh.mean_sq() + sb.hl.mean_sq() +
                                  sb.hh.mean_sq();
            worst_ratio_err = std::max(worst_ratio_err,
                                       std::abs(energy / 4.0 / x.mean_sq() - 1.0));
        }
        ok = worst_resid < 1e-12 && worst_ratio_err < 1e-10;
        std::printf("  round-trip residual %.3g, energy ratio error %.3g\n", worst_resid,
                    worst_ratio_err);
        check("wavelet round trip and energy", ok);
    }

    {
        bool ok = true;
        for (int t = 1; t <= sched.steps() && ok; ++t) {
            Grid x(shape), x0(shape), z(shape);
            rng::NormalStream s({11, static_cast<std::uint32_t>(t), 0, rng::Purpose::data_x0});
            s.fill(x.values());
            s.fill(x0.values());
            s.fill(z.values());
            const Grid eps = x0_to_eps(x, x0, t, sched);
            const Grid a = ancestral_step(x, eps, &z, t, sched);
            const Grid b = posterior_step(x, x0, &z, t, sched);
            for (int i = 0; i < a.size(); ++i) {
                ok = ok && std::abs(a[i] - b[i]) < 1e-10;
            }
        }
        check("eps-form vs x0-form reverse step", ok);
    }

    {
        Grid x(shape), x0(shape);
        rng::NormalStream s({13, 0, 0, rng::Purpose::data_x0});
        s.fill(x.values());
        s.fill(x0.values());
        const Grid same = dcw_apply(x, x0, {0.0, 0.0, 0.0, 0.0});
        bool ok = true;
        for (int i = 0; i < x.size(); ++i) {
            ok = ok && same[i] == x[i];
        }
        const Grid via_dcw = dcw_apply(x, x0, {0.3, 0.3, 0.3, 0.3});
        const Grid via_dc = dc_pixel(x, x0, 0.3);
        for (int i = 0; i < x.size(); ++i) {
            ok = ok && std::abs(via_dcw[i] - via_dc[i]) < 1e-10;
        }
        check("zero-lambda identity and equal-lambda theorem", ok);
    }

    {
        bool ok = true;
        for (int t = 1; t < sched.steps(); ++t) {
            const double snr_rev = theory::snr_theorem(1.0, 0.0, t, sched);
            ok = ok && std::abs(snr_rev - sched.snr(t)) <= 1e-12 * sched.snr(t);
        }
        check("theorem degeneracy at (1, 0)", ok);
    }

    {
        Grid mean(shape, 0.0);
        GaussianMixture gmm({GmmMode{1.0, mean, 1.0}});
        AssumptionDenoiser model(gmm, BiasProfile::constant(sched.steps(), 0.98, 0.1));
        RunOptions opt{8, 99, {}};
        CorrectionConfig none;
        const auto a = run_reverse(model, sched, none, opt);
        const auto b = run_reverse(model, sched, none, opt);
        bool ok = true;
        for (std::size_t i = 0; i < a.size(); ++i) {
            for (int j = 0; j < a[i].terminal.size(); ++j) {
                ok = ok && a[i].terminal[j] == b[i].terminal[j];
            }
        }
        check("reverse run determinism", ok);
    }

    std::printf("selftest: %s\n", failures == 0 ? "all checks passed" : "FAILURES present");
    return failures;
}

}  // namespace snrlab::harness
