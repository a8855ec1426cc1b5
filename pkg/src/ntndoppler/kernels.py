"""Backend selection for the hot kernels.

The compiled extension is used when it was built; otherwise, or when the
environment variable ``NTNDOPPLER_PURE_PYTHON`` is set to a non-empty value
other than ``0``, the numpy fallback is used. ``BACKEND`` names the choice.
"""
import os

from . import _fallback as fallback

try:
    from . import _kernels as compiled
except ImportError:  # extension not built
    compiled = None

if compiled is not None and os.environ.get("NTNDOPPLER_PURE_PYTHON", "") in ("", "0"):
    _impl = compiled
    BACKEND = "cython"
else:
    _impl = fallback
    BACKEND = "python"

corr_diff_metric = _impl.corr_diff_metric
apply_taps_ramp = _impl.apply_taps_ramp
sinc_resample = _impl.sinc_resample

__all__ = ["BACKEND", "compiled", "fallback", "corr_diff_metric", "apply_taps_ramp", "sinc_resample"]
