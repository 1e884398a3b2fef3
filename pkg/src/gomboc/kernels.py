"""Backend selection for the pointwise surface kernels.

The compiled extension is used when it is importable; otherwise the numpy
implementation is used.  Setting ``GOMBOC_PURE_PYTHON=1`` forces numpy.
The wrappers below accept anything broadcastable and restore the
broadcast shape on output.
"""

import os

import numpy as np

from gomboc import _pykernels

_compiled = None
if os.environ.get("GOMBOC_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from gomboc import _ckernels as _compiled
    except ImportError:  # extension not built
        _compiled = None

_impl = _compiled if _compiled is not None else _pykernels
BACKEND = "cython" if _compiled is not None else "numpy"


def available_backends():
    """Map of backend name to kernel module for every importable backend."""
    out = {"numpy": _pykernels}
    if _compiled is not None:
        out["cython"] = _compiled
    else:
        try:
            from gomboc import _ckernels
            out["cython"] = _ckernels
        except ImportError:
            pass
    return out


def _call(fn, nout, beta, theta, phi, p, dp, d2p):
    arrs = np.broadcast_arrays(*(np.asarray(a, dtype=np.float64) for a in (theta, phi, p, dp, d2p)))
    shape = arrs[0].shape
    flat = [np.ascontiguousarray(a).ravel() for a in arrs]
    out = fn(float(beta), *flat)
    return out.reshape((nout,) + shape)


def quartic_jet(beta, theta, phi, p, dp, d2p, backend=None):
    mod = _impl if backend is None else available_backends()[backend]
    return _call(mod.quartic_jet, 6, beta, theta, phi, p, dp, d2p)


def radius_jet(beta, theta, phi, p, dp, d2p, backend=None):
    mod = _impl if backend is None else available_backends()[backend]
    return _call(mod.radius_jet, 6, beta, theta, phi, p, dp, d2p)


def principal_curvatures(beta, theta, phi, p, dp, d2p, backend=None):
    mod = _impl if backend is None else available_backends()[backend]
    return _call(mod.principal_curvatures, 2, beta, theta, phi, p, dp, d2p)
