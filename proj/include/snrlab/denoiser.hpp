#pragma once

#include <memory>
#include <vector>

#include "snrlab/grid.hpp"
#include "snrlab/rng.hpp"
#include "snrlab/schedule.hpp"

namespace snrlab {

// Isotropic Gaussian mixture over grids: q(x0) = sum_k w_k N(mu_k, s_k^2 I).
// Closed-form posterior means make every denoiser in the lab exact.
struct GmmMode {
    double weight = 1.0;
    Grid mean;
    double var = 1.0;
};

class GaussianMixture {
  public:
    explicit GaussianMixture(std::vector<GmmMode> modes);

    const std::vector<GmmMode>& modes() const { return modes_; }
    const GridShape& shape() const { return shape_; }

    // E ||x0||^2 / dim, exact.
    double mean_sq_per_dim() const;

    // draw x0 for (seed, index); mode choice and the normal grid come from
    // separate purpose streams so draws stay aligned when modes change
    Grid sample(std::uint64_t seed, std::uint32_t index) const;

    // E[x0 | x_t] under the forward marginal at timestep t. Responsibilities
    // are computed in log space with max subtraction; never NaN.
    Grid posterior_x0(const Grid& x, int t, const NoiseSchedule& sched) const;

  private:
    std::vector<GmmMode> modes_;
    GridShape shape_;
};

// Per-timestep reconstruction bias (gamma_t, phi_t): the controllable stand-in
// for a network whose x0-prediction is gamma_t * (ideal output) + phi_t * noise.
class BiasProfile {
  public:
    BiasProfile(std::vector<double> gamma, std::vector<double> phi);

    static BiasProfile constant(int T, double gamma, double phi);
    static BiasProfile identity(int T);

    int steps() const { return static_cast<int>(gamma_.size()); }
    double gamma(int t) const;
    double phi(int t) const;
    double max_phi() const;  // the uniform bound M
    bool is_identity() const;

  private:
    std::vector<double> gamma_, phi_;
};

// eps-form <-> x0-form duality of a prediction at timestep t.
Grid x0_to_eps(const Grid& x, const Grid& x0_hat, int t, const NoiseSchedule& sched);
Grid eps_to_x0(const Grid& x, const Grid& eps_hat, int t, const NoiseSchedule& sched);

// gamma_t * inner_output + phi_t * noise (noise drawn by the caller from the
// bias_noise stream so the composition stays pure).
Grid biased_x0(const Grid& inner_output, double gamma_t, double phi_t, const Grid& noise);

// A reverse-process reconstruction model: given the current state x at
// timestep t it produces the x0-prediction. Implementations are pure given
// the (seed, chain) stream addressing, hence safe to call concurrently.
class Denoiser {
  public:
    virtual ~Denoiser() = default;
    virtual Grid predict_x0(const Grid& x, int t, std::uint64_t seed,
                            std::uint32_t chain) const = 0;
    virtual GridShape shape() const = 0;
};

// The Bayes-optimal reconstruction E[x0 | x] for mixture data.
class ExactDenoiser final : public Denoiser {
  public:
    ExactDenoiser(GaussianMixture gmm, NoiseSchedule sched);
    Grid predict_x0(const Grid& x, int t, std::uint64_t seed, std::uint32_t chain) const override;
    GridShape shape() const override { return gmm_.shape(); }
    const GaussianMixture& gmm() const { return gmm_; }

  private:
    GaussianMixture gmm_;
    NoiseSchedule sched_;
};

// gamma_t * inner(x, t) + phi_t * xi with xi keyed (seed, chain, t, bias_noise).
// With the identity profile this is bitwise the inner denoiser.
class BiasedDenoiser final : public Denoiser {
  public:
    BiasedDenoiser(std::shared_ptr<const Denoiser> inner, BiasProfile profile);
    Grid predict_x0(const Grid& x, int t, std::uint64_t seed, std::uint32_t chain) const override;
    GridShape shape() const override { return inner_->shape(); }
    const BiasProfile& profile() const { return profile_; }

  private:
    std::shared_ptr<const Denoiser> inner_;
    BiasProfile profile_;
};

// The analytic bias law: the reconstruction is gamma_t * x0 + phi_t * xi where
// x0 is the chain's own clean sample, redrawn deterministically from
// (seed, chain, data_x0). Ignores the state entirely; this is the reference
// process behind the reverse-step law and its SNR formula.
class AssumptionDenoiser final : public Denoiser {
  public:
    AssumptionDenoiser(GaussianMixture gmm, BiasProfile profile);
    Grid predict_x0(const Grid& x, int t, std::uint64_t seed, std::uint32_t chain) const override;
    GridShape shape() const override { return gmm_.shape(); }
    Grid chain_x0(std::uint64_t seed, std::uint32_t chain) const;
    const BiasProfile& profile() const { return profile_; }

  private:
    GaussianMixture gmm_;
    BiasProfile profile_;
};

}  // namespace snrlab
