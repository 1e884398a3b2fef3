"""Pure numpy implementation of the pointwise surface kernels.

Every function takes flat float64 arrays of equal length: polar angle,
azimuth and the phase law sampled at the polar angle (value, first and
second derivative).  The compiled module ``_ckernels`` exposes the same
functions with the same signatures.
"""

import numpy as np


def quartic_jet(beta, theta, phi, p, dp, d2p):
    """Value and partials of Q = F**4 = 1 + 4 beta sin(theta) cos(phi - P).

    Returns an array of shape (6, n): Q, Q_t, Q_p, Q_tt, Q_pp, Q_tp.
    """
    s = np.sin(theta)
    ct = np.cos(theta)
    u = phi - p
    c = np.cos(u)
    sn = np.sin(u)
    b4 = 4.0 * beta
    out = np.empty((6, theta.shape[0]))
    out[0] = 1.0 + b4 * s * c
    out[1] = b4 * (ct * c + s * sn * dp)
    out[2] = -b4 * s * sn
    out[3] = b4 * (-s * c * (1.0 + dp * dp) + 2.0 * ct * sn * dp + s * sn * d2p)
    out[4] = -b4 * s * c
    out[5] = b4 * (-ct * sn + s * c * dp)
    return out


def radius_jet(beta, theta, phi, p, dp, d2p):
    """Value and partials of F = Q**(1/4), obtained from the Q jet.

    Returns an array of shape (6, n): F, F_t, F_p, F_tt, F_pp, F_tp.
    """
    q, qt, qp, qtt, qpp, qtp = quartic_jet(beta, theta, phi, p, dp, d2p)
    f = np.sqrt(np.sqrt(q))
    a = 1.0 / (4.0 * f * f * f)
    b = 3.0 / (16.0 * f ** 7)
    out = np.empty((6, q.shape[0]))
    out[0] = f
    out[1] = qt * a
    out[2] = qp * a
    out[3] = qtt * a - qt * qt * b
    out[4] = qpp * a - qp * qp * b
    out[5] = qtp * a - qt * qp * b
    return out


def principal_curvatures(beta, theta, phi, p, dp, d2p):
    """Principal curvatures (k1 <= k2) of the embedding F(theta, phi) r_hat.

    Sign convention: the unit sphere has k = +1.  Returns shape (2, n).
    """
    f, ft, fp, ftt, fpp, ftp = radius_jet(beta, theta, phi, p, dp, d2p)
    s = np.sin(theta)
    ct = np.cos(theta)

    # components in the local (r_hat, theta_hat, phi_hat) frame
    nr, nt, nph = f * s, -ft * s, -fp
    inv = 1.0 / np.sqrt(nr * nr + nt * nt + nph * nph)
    # inward unit normal, so that the sphere gets positive curvature
    nr, nt, nph = -nr * inv, -nt * inv, -nph * inv

    e = ft * ft + f * f
    fm = ft * fp
    g = fp * fp + f * f * s * s
    det = e * g - fm * fm

    ll = (ftt - f) * nr + 2.0 * ft * nt
    mm = ftp * nr + fp * nt + (ft * s + f * ct) * nph
    nn = (fpp - f * s * s) * nr - f * s * ct * nt + 2.0 * fp * s * nph

    # shape operator in the orthonormal tangent frame (X_t/|X_t|, n x that)
    r = fm / e
    a = ll / e
    b = (mm - ll * r) / np.sqrt(det)
    c = (nn - 2.0 * mm * r + ll * r * r) * e / det
    half = 0.5 * (a + c)
    rad = np.hypot(0.5 * (a - c), b)
    return np.stack([half - rad, half + rad])
