#pragma once

#include <vector>

namespace snrlab {

// Which reverse-step standard deviation to use: sigma_t^2 = beta_t (large) or
// sigma_t^2 = beta_tilde_t (small). The small choice makes sigma_1 = 0.
enum class SigmaMode { large, small };

// Per-timestep scalars of a discrete variance-preserving noise schedule.
// Indexing: t runs 1..T for beta/alpha/beta_tilde/sigma/snr; alpha_bar(t) is
// defined for 0..T with alpha_bar(0) = 1.
class NoiseSchedule {
  public:
    static NoiseSchedule linear(int T, double beta_start, double beta_end,
                                SigmaMode mode = SigmaMode::small);
    static NoiseSchedule from_betas(std::vector<double> betas,
                                    SigmaMode mode = SigmaMode::small);
    static NoiseSchedule cosine(int T, double s = 0.008, SigmaMode mode = SigmaMode::small,
                                double beta_clip = 0.999);

    // T-step linear schedule whose beta range is scaled from the canonical
    // 1000-step (1e-4, 0.02) endpoints, preserving the terminal alpha_bar.
    // The scaled endpoints are clamped below 1 for very short horizons.
    static NoiseSchedule desk_default(int T = 100, SigmaMode mode = SigmaMode::small);

    int steps() const { return T_; }
    SigmaMode sigma_mode() const { return mode_; }

    double beta(int t) const;
    double alpha(int t) const;
    double alpha_bar(int t) const;  // t in 0..T
    double beta_tilde(int t) const;
    double sigma2(int t) const;
    double sigma(int t) const;
    double snr(int t) const;

  private:
    NoiseSchedule(std::vector<double> beta, SigmaMode mode);
    void check_t(int t, int lo) const;

    int T_ = 0;
    SigmaMode mode_ = SigmaMode::small;
    std::vector<double> beta_;        // [t-1]
    std::vector<double> alpha_;       // [t-1]
    std::vector<double> alpha_bar_;   // [t], size T+1, alpha_bar_[0] = 1
    std::vector<double> beta_tilde_;  // [t-1]
};

}  // namespace snrlab
