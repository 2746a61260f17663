#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "snrlab/correction.hpp"
#include "snrlab/diagnostics.hpp"
#include "snrlab/harness.hpp"
#include "snrlab/metrics.hpp"
#include "snrlab/sampler.hpp"
#include "snrlab/theory.hpp"
#include "snrlab/wavelet.hpp"

namespace py = pybind11;
using namespace snrlab;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Grid to_grid(const Array& a) {
    const auto buf = a.request();
    GridShape shape;
    if (buf.ndim == 2) {
        shape = {1, static_cast<int>(buf.shape[0]), static_cast<int>(buf.shape[1])};
    } else if (buf.ndim == 3) {
        shape = {static_cast<int>(buf.shape[0]), static_cast<int>(buf.shape[1]),
                 static_cast<int>(buf.shape[2])};
    } else {
        throw std::invalid_argument("expected a (H,W) or (C,H,W) array");
    }
    Grid g(shape);
    const double* src = static_cast<const double*>(buf.ptr);
    std::copy(src, src + g.size(), g.data());
    return g;
}

Array from_grid(const Grid& g) {
    const auto& s = g.shape();
    Array out({s.channels, s.height, s.width});
    std::copy(g.data(), g.data() + g.size(), static_cast<double*>(out.request().ptr));
    return out;
}

std::vector<Grid> to_grid_set(const Array& a) {
    const auto buf = a.request();
    if (buf.ndim != 4) {
        throw std::invalid_argument("expected a (N,C,H,W) array");
    }
    const GridShape shape{static_cast<int>(buf.shape[1]), static_cast<int>(buf.shape[2]),
                          static_cast<int>(buf.shape[3])};
    const double* src = static_cast<const double*>(buf.ptr);
    std::vector<Grid> out(static_cast<std::size_t>(buf.shape[0]), Grid(shape));
    for (auto& g : out) {
        std::copy(src, src + g.size(), g.data());
        src += g.size();
    }
    return out;
}

NoiseSchedule make_schedule(const std::string& kind, int T, double beta_start, double beta_end,
                            double cosine_s, const std::string& sigma_mode) {
    const SigmaMode mode = sigma_mode == "large" ? SigmaMode::large : SigmaMode::small;
    if (kind == "cosine") {
        return NoiseSchedule::cosine(T, cosine_s, mode);
    }
    if (kind == "linear") {
        if (beta_start <= 0.0) {
            return NoiseSchedule::desk_default(T, mode);
        }
        return NoiseSchedule::linear(T, beta_start, beta_end, mode);
    }
    throw std::invalid_argument("schedule kind must be 'linear' or 'cosine'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Analytic diffusion-sampling laboratory: schedules, exact denoisers, "
              "reverse steps, Haar subband correction, and bias theory curves.";

    py::class_<NoiseSchedule>(m, "NoiseSchedule")
        .def(py::init([](const std::string& kind, int T, double beta_start, double beta_end,
                         double cosine_s, const std::string& sigma_mode) {
                 return make_schedule(kind, T, beta_start, beta_end, cosine_s, sigma_mode);
             }),
             py::arg("kind") = "linear", py::arg("T") = 100, py::arg("beta_start") = 0.0,
             py::arg("beta_end") = 0.0, py::arg("cosine_s") = 0.008,
             py::arg("sigma_mode") = "small")
        .def_property_readonly("T", &NoiseSchedule::steps)
        .def("beta", &NoiseSchedule::beta)
        .def("alpha", &NoiseSchedule::alpha)
        .def("alpha_bar", &NoiseSchedule::alpha_bar)
        .def("beta_tilde", &NoiseSchedule::beta_tilde)
        .def("sigma", &NoiseSchedule::sigma)
        .def("snr", &NoiseSchedule::snr);

    py::class_<GaussianMixture>(m, "GaussianMixture")
        .def(py::init([](const std::vector<std::tuple<double, Array, double>>& modes) {
            std::vector<GmmMode> ms;
            for (const auto& [w, mean, var] : modes) {
                ms.push_back({w, to_grid(mean), var});
            }
            return GaussianMixture(std::move(ms));
        }))
        .def("sample",
             [](const GaussianMixture& g, std::uint64_t seed, std::uint32_t index) {
                 return from_grid(g.sample(seed, index));
             })
        .def("posterior_x0",
             [](const GaussianMixture& g, const Array& x, int t, const NoiseSchedule& s) {
                 return from_grid(g.posterior_x0(to_grid(x), t, s));
             })
        .def("mean_sq_per_dim", &GaussianMixture::mean_sq_per_dim);

    m.def("dwt_haar", [](const Array& x) {
        const auto s = dwt_haar(to_grid(x));
        return py::make_tuple(from_grid(s.ll), from_grid(s.lh), from_grid(s.hl),
                              from_grid(s.hh));
    });
    m.def("idwt_haar", [](const Array& ll, const Array& lh, const Array& hl, const Array& hh) {
        return from_grid(idwt_haar({to_grid(ll), to_grid(lh), to_grid(hl), to_grid(hh)}));
    });

    m.def("forward_perturb",
          [](const Array& x0, int t, const Array& eps, const NoiseSchedule& s) {
              return from_grid(forward_perturb(to_grid(x0), t, to_grid(eps), s));
          });
    m.def("ancestral_step", [](const Array& x, const Array& eps_hat, const Array& z, int t,
                               const NoiseSchedule& s) {
        const Grid zg = to_grid(z);
        return from_grid(ancestral_step(to_grid(x), to_grid(eps_hat), &zg, t, s));
    });
    m.def("posterior_step", [](const Array& x, const Array& x0_hat, const Array& z, int t,
                               const NoiseSchedule& s) {
        const Grid zg = to_grid(z);
        return from_grid(posterior_step(to_grid(x), to_grid(x0_hat), &zg, t, s));
    });
    m.def("ddim_step",
          [](const Array& x, const Array& eps_hat, int t, int t_prev, const NoiseSchedule& s) {
              return from_grid(ddim_step(to_grid(x), to_grid(eps_hat), t, t_prev, s));
          });
    m.def("x0_to_eps", [](const Array& x, const Array& x0, int t, const NoiseSchedule& s) {
        return from_grid(x0_to_eps(to_grid(x), to_grid(x0), t, s));
    });
    m.def("eps_to_x0", [](const Array& x, const Array& eps, int t, const NoiseSchedule& s) {
        return from_grid(eps_to_x0(to_grid(x), to_grid(eps), t, s));
    });

    m.def("dc_pixel", [](const Array& x, const Array& x0, double lam) {
        return from_grid(dc_pixel(to_grid(x), to_grid(x0), lam));
    });
    m.def("dcw_apply",
          [](const Array& x, const Array& x0, double ll, double lh, double hl, double hh) {
              return from_grid(dcw_apply(to_grid(x), to_grid(x0), {ll, lh, hl, hh}));
          });
    m.def("weights_variance", [](int t, const NoiseSchedule& s, double ll, double lh) {
        const auto w = weights_variance(t, s, ll, lh);
        return py::make_tuple(w.low, w.high);
    });
    m.def("weights_piecewise", [](int t, int t_s, double w_l, double w_h) {
        const auto w = weights_piecewise(t, t_s, w_l, w_h);
        return py::make_tuple(w.low, w.high);
    });

    m.def("gamma_hat_step", &theory::gamma_hat_step);
    m.def("biased_step_law", [](double gamma, double phi, int t, const NoiseSchedule& s) {
        const auto law = theory::biased_step_law(gamma, phi, t, s);
        return py::make_tuple(law.coef_x0, law.noise_std);
    });
    m.def("psi", &theory::psi);
    m.def("snr_theorem", &theory::snr_theorem);
    m.def("eta", &theory::eta);
    m.def("theory_curves", [](double gamma, double phi, const NoiseSchedule& s) {
        const auto c = theory::compute_curves(BiasProfile::constant(s.steps(), gamma, phi), s);
        py::dict out;
        out["t"] = c.t;
        out["gamma_hat"] = c.gamma_hat;
        out["psi"] = c.psi;
        out["snr_forward"] = c.snr_forward;
        out["snr_reverse"] = c.snr_reverse;
        out["eta"] = c.eta;
        return out;
    });

    m.def(
        "run_reverse",
        [](const GaussianMixture& data, const NoiseSchedule& s, const std::string& kind,
           double gamma, double phi, int n_chains, std::uint64_t seed,
           const std::string& corr_mode, double lambda_l, double lambda_h) {
            const auto profile = BiasProfile::constant(s.steps(), gamma, phi);
            std::shared_ptr<const Denoiser> model;
            if (kind == "exact") {
                model = std::make_shared<ExactDenoiser>(data, s);
            } else if (kind == "biased") {
                model = std::make_shared<BiasedDenoiser>(
                    std::make_shared<ExactDenoiser>(data, s), profile);
            } else if (kind == "assumption") {
                model = std::make_shared<AssumptionDenoiser>(data, profile);
            } else {
                throw std::invalid_argument("denoiser kind must be exact|biased|assumption");
            }
            CorrectionConfig corr;
            if (corr_mode == "dcw") {
                corr.mode = CorrectionMode::dcw;
            } else if (corr_mode == "dc") {
                corr.mode = CorrectionMode::dc;
            } else if (corr_mode == "dh") {
                corr.mode = CorrectionMode::dh;
            } else if (corr_mode == "dl") {
                corr.mode = CorrectionMode::dl;
            } else if (corr_mode != "none") {
                throw std::invalid_argument("correction mode must be none|dc|dh|dl|dcw");
            }
            corr.lambda_l = lambda_l;
            corr.lambda_h = lambda_h;
            const auto trajs = run_reverse(*model, s, corr, {n_chains, seed, {}});
            const GridShape shape = model->shape();
            Array out({n_chains, shape.channels, shape.height, shape.width});
            double* dst = static_cast<double*>(out.request().ptr);
            for (const auto& tr : trajs) {
                std::copy(tr.terminal.data(), tr.terminal.data() + tr.terminal.size(), dst);
                dst += tr.terminal.size();
            }
            return out;
        },
        py::arg("data"), py::arg("schedule"), py::arg("kind") = "exact",
        py::arg("gamma") = 1.0, py::arg("phi") = 0.0, py::arg("n_chains") = 100,
        py::arg("seed") = 0, py::arg("correction") = "none", py::arg("lambda_l") = 0.0,
        py::arg("lambda_h") = 1.0);

    m.def("energy_distance", [](const Array& a, const Array& b) {
        return metrics::energy_distance(to_grid_set(a), to_grid_set(b));
    });
    m.def("sliced_wasserstein",
          [](const Array& a, const Array& b, int n_proj, std::uint64_t seed) {
              return metrics::sliced_wasserstein(to_grid_set(a), to_grid_set(b), n_proj, seed);
          });

    m.def("selftest", &harness::selftest);
}
