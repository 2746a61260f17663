"""Analytic diffusion-sampling laboratory.

Exact Gaussian-mixture denoisers, reverse-process samplers, Haar subband
correction, and the reverse-SNR bias theory, backed by the C++ core.
"""

try:
    from ._core import *  # noqa: F401,F403
except ImportError:  # build-tree layout: the extension sits on PYTHONPATH
    from _core import *  # noqa: F401,F403

__all__ = [
    "NoiseSchedule",
    "GaussianMixture",
    "dwt_haar",
    "idwt_haar",
    "forward_perturb",
    "ancestral_step",
    "posterior_step",
    "ddim_step",
    "x0_to_eps",
    "eps_to_x0",
    "dc_pixel",
    "dcw_apply",
    "weights_variance",
    "weights_piecewise",
    "gamma_hat_step",
    "biased_step_law",
    "psi",
    "snr_theorem",
    "eta",
    "theory_curves",
    "run_reverse",
    "energy_distance",
    "sliced_wasserstein",
    "selftest",
]
