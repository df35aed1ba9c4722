"""Compiled coordinate-descent sweeps.

Gram-form cyclic coordinate descent for two update rules: weighted soft
thresholding (Lasso, and the reweighted Lasso rounds of SCAD LLA) and the
one-dimensional SCAD solution.
"""
import numba as nb
import numpy as np

SOFT = 0
SCAD = 1


@nb.njit(cache=True, nogil=True)
def _soft(z, t):
    if z > t:
        return z - t
    if z < -t:
        return z + t
    return 0.0


@nb.njit(cache=True, nogil=True)
def _scad(z, lam, a):
    az = abs(z)
    if az <= 2.0 * lam:
        return _soft(z, lam)
    if az <= a * lam:
        if z > 0.0:
            return ((a - 1.0) * z - a * lam) / (a - 2.0)
        return ((a - 1.0) * z + a * lam) / (a - 2.0)
    return z


@nb.njit(cache=True, nogil=True)
def _nonzero(beta, coords):
    count = 0
    for i in range(coords.shape[0]):
        if beta[coords[i]] != 0.0:
            count += 1
    out = np.empty(count, dtype=np.int64)
    k = 0
    for i in range(coords.shape[0]):
        if beta[coords[i]] != 0.0:
            out[k] = coords[i]
            k += 1
    return out


@nb.njit(cache=True, nogil=True)
def coordinate_descent(gram, cross, beta, weights, full, rule, scad_a, tol, max_iter):
    """Run sweeps in place on beta; returns (sweeps, converged).

    Full sweeps over `full` alternate with sweeps over the nonzero
    coordinates; converged once a full sweep moves nothing by tol or more.
    """
    d = beta.shape[0]
    grad = cross.copy()
    for l in range(d):
        b = beta[l]
        if b != 0.0:
            for m in range(d):
                grad[m] -= gram[l, m] * b

    coords = full
    on_full = True
    for sweep in range(1, max_iter + 1):
        max_change = 0.0
        for i in range(coords.shape[0]):
            l = coords[i]
            old = beta[l]
            z = grad[l] + old
            if rule == SCAD:
                new = _scad(z, weights[l], scad_a)
            else:
                new = _soft(z, weights[l])
            delta = new - old
            if delta != 0.0:
                for m in range(d):
                    grad[m] -= delta * gram[l, m]
                beta[l] = new
                if abs(delta) > max_change:
                    max_change = abs(delta)
        if max_change < tol:
            if on_full:
                return sweep, True
            coords = full
            on_full = True
        elif on_full:
            nonzero = _nonzero(beta, full)
            if nonzero.shape[0] > 0:
                coords = nonzero
                on_full = False
    return max_iter, False
