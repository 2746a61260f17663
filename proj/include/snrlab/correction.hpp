#pragma once

#include "snrlab/grid.hpp"
#include "snrlab/schedule.hpp"

namespace snrlab {

enum class CorrectionMode { none, dc, dh, dl, dcw };
enum class WeightKind { variance, piecewise, constant };

// One low weight (ll) and one shared high weight (lh/hl/hh).
struct BandWeights {
    double low = 0.0;
    double high = 0.0;
};

struct SubbandLambdas {
    double ll = 0.0, lh = 0.0, hl = 0.0, hh = 0.0;
};

struct CorrectionConfig {
    CorrectionMode mode = CorrectionMode::none;
    WeightKind weight_kind = WeightKind::variance;
    double lambda_l = 0.0;  // variance kind, low weight scale
    double lambda_h = 1.0;  // variance kind, high weight (1 - lambda_h) * sigma_t
    int t_s = 0;            // piecewise threshold
    double w_l = 0.0;       // piecewise / constant low
    double w_h = 0.0;       // piecewise / constant high

    void validate() const;
};

// lambda_t^l = lambda_l * sigma_t, lambda_t^h = (1 - lambda_h) * sigma_t.
BandWeights weights_variance(int t, const NoiseSchedule& sched, double lambda_l, double lambda_h);

// low = w_l * 1{t >= t_s}, high = w_h * 1{t < t_s}.
BandWeights weights_piecewise(int t, int t_s, double w_l, double w_h);

BandWeights weights_constant(double w_l, double w_h);

BandWeights weights_for(const CorrectionConfig& cfg, int t, const NoiseSchedule& sched);

// x + lambda * (x - x0_hat), i.e. (1 + lambda) x - lambda x0_hat.
Grid dc_pixel(const Grid& x_next, const Grid& x0_hat, double lambda);

// Differential correction per subband, then inverse transform.
Grid dcw_apply(const Grid& x_next, const Grid& x0_hat, const SubbandLambdas& lambdas);

// DC: pixel correction with the low weight. DL: ll only. DH: lh/hl/hh only.
// DCW: low on ll, high on the three detail bands.
Grid apply_variant(CorrectionMode mode, const Grid& x_next, const Grid& x0_hat, BandWeights w);

// Full per-step correction hook used by the sampler.
Grid apply_correction(const CorrectionConfig& cfg, const Grid& x_next, const Grid& x0_hat,
                      int t, const NoiseSchedule& sched);

}  // namespace snrlab
