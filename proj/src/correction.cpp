#include "snrlab/correction.hpp"

#include <stdexcept>

#include "snrlab/wavelet.hpp"

namespace snrlab {

void CorrectionConfig::validate() const {
    if (mode == CorrectionMode::none) {
        return;
    }
    if (weight_kind == WeightKind::variance) {
        if (!(lambda_l >= 0.0)) {
            throw std::invalid_argument("correction: lambda_l must be >= 0");
        }
        if (!(lambda_h >= 0.0 && lambda_h <= 1.0)) {
            throw std::invalid_argument("correction: lambda_h must lie in [0,1]");
        }
    } else {
        if (!(w_l >= 0.0) || !(w_h >= 0.0)) {
            throw std::invalid_argument("correction: w_l and w_h must be >= 0");
        }
        if (weight_kind == WeightKind::piecewise && t_s < 0) {
            throw std::invalid_argument("correction: t_s must be >= 0");
        }
    }
}

BandWeights weights_variance(int t, const NoiseSchedule& sched, double lambda_l,
                             double lambda_h) {
    const double s = sched.sigma(t);
    return {lambda_l * s, (1.0 - lambda_h) * s};
}

BandWeights weights_piecewise(int t, int t_s, double w_l, double w_h) {
    return {t >= t_s ? w_l : 0.0, t < t_s ? w_h : 0.0};
}

BandWeights weights_constant(double w_l, double w_h) { return {w_l, w_h}; }

BandWeights weights_for(const CorrectionConfig& cfg, int t, const NoiseSchedule& sched) {
    switch (cfg.weight_kind) {
        case WeightKind::variance:
            return weights_variance(t, sched, cfg.lambda_l, cfg.lambda_h);
        case WeightKind::piecewise:
            return weights_piecewise(t, cfg.t_s, cfg.w_l, cfg.w_h);
        case WeightKind::constant:
            return weights_constant(cfg.w_l, cfg.w_h);
    }
    throw std::invalid_argument("correction: unknown weight kind");
}

Grid dc_pixel(const Grid& x_next, const Grid& x0_hat, double lambda) {
    if (lambda == 0.0) {
        return x_next;
    }
    return axpy(1.0 + lambda, x_next, -lambda, x0_hat);
}

Grid dcw_apply(const Grid& x_next, const Grid& x0_hat, const SubbandLambdas& lam) {
    if (!(x_next.shape() == x0_hat.shape())) {
        throw std::invalid_argument("dcw: shape mismatch");
    }
    if (lam.ll == 0.0 && lam.lh == 0.0 && lam.hl == 0.0 && lam.hh == 0.0) {
        return x_next;
    }
    SubbandSet sx = dwt_haar(x_next);
    const SubbandSet s0 = dwt_haar(x0_hat);
    sx.ll = dc_pixel(sx.ll, s0.ll, lam.ll);
    sx.lh = dc_pixel(sx.lh, s0.lh, lam.lh);
    sx.hl = dc_pixel(sx.hl, s0.hl, lam.hl);
    sx.hh = dc_pixel(sx.hh, s0.hh, lam.hh);
    return idwt_haar(sx);
}

Grid apply_variant(CorrectionMode mode, const Grid& x_next, const Grid& x0_hat, BandWeights w) {
    switch (mode) {
        case CorrectionMode::none:
            return x_next;
        case CorrectionMode::dc:
            return dc_pixel(x_next, x0_hat, w.low);
        case CorrectionMode::dl:
            return dcw_apply(x_next, x0_hat, {w.low, 0.0, 0.0, 0.0});
        case CorrectionMode::dh:
            return dcw_apply(x_next, x0_hat, {0.0, w.high, w.high, w.high});
        case CorrectionMode::dcw:
            return dcw_apply(x_next, x0_hat, {w.low, w.high, w.high, w.high});
    }
    throw std::invalid_argument("correction: unknown mode");
}

Grid apply_correction(const CorrectionConfig& cfg, const Grid& x_next, const Grid& x0_hat,
                      int t, const NoiseSchedule& sched) {
    if (cfg.mode == CorrectionMode::none) {
        return x_next;
    }
    return apply_variant(cfg.mode, x_next, x0_hat, weights_for(cfg, t, sched));
}

}  // namespace snrlab
