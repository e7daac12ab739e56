"""Adaptive GMRF binary regression on 2-D lattices."""

from ._core import (
    __version__,
    bimodal_truth,
    fit,
    link_cdf,
    main,
    miscoding_probability,
    mspe,
    sample_peaks,
    two_disc_truth,
)

__all__ = [
    "__version__",
    "bimodal_truth",
    "fit",
    "link_cdf",
    "main",
    "miscoding_probability",
    "mspe",
    "sample_peaks",
    "two_disc_truth",
]
