"""Compiled inner loops for hit-and-run and rejection on lifted polynomial bodies.

The state is ``q = (x, d)``.  Facets ``A x <= b`` are handled in closed form,
``0 <= d`` likewise, and ``d <= w(x)`` by a bracketed root search
(:func:`dnfwmi.geometry.chord` is the plain-bisection reference).  Linear
weights get the surface crossing in closed form.  Walk status codes: 0 ok,
1 stuck (too many degenerate chords in a row).
"""
import numpy as np
from numba import njit

BISECT_TOL = 1e-10
DEGENERATE_CHORD = 1e-12
MAX_RETRIES = 50
MAX_SHRINK = 200
REFRESH = 64


@njit(cache=True, nogil=True)
def poly_eval(coefs, powers, x):
    s = 0.0
    for t in range(coefs.shape[0]):
        v = coefs[t]
        for j in range(powers.shape[1]):
            e = powers[t, j]
            if e == 1:
                v *= x[j]
            elif e > 1:
                v *= x[j] ** e
        s += v
    return s


@njit(cache=True, nogil=True)
def _surface_gap(coefs, powers, q, u, t, buf):
    n = buf.shape[0]
    for j in range(n):
        buf[j] = q[j] + t * u[j]
    return poly_eval(coefs, powers, buf) - (q[n] + t * u[n])


@njit(cache=True, nogil=True)
def _bisect(coefs, powers, q, u, outer, g_lo, g_hi, buf):
    """Surface crossing on ``[0, outer]`` to within ``BISECT_TOL``.

    Keeps a bracket with the inside end at ``lo``.  Steps are false-position
    with the Illinois correction; plain midpoints take over if that has not
    converged after 60 steps.
    """
    lo = 0.0
    hi = outer
    side = 0
    it = 0
    while abs(hi - lo) > BISECT_TOL:
        it += 1
        t = 0.5 * (lo + hi)
        if it <= 60 and g_lo != g_hi:
            t = hi - g_hi * (hi - lo) / (g_hi - g_lo)
            if not (min(lo, hi) < t < max(lo, hi)):
                t = 0.5 * (lo + hi)
        g = _surface_gap(coefs, powers, q, u, t, buf)
        if g >= 0.0:
            lo = t
            g_lo = g
            if side == 1:
                g_hi *= 0.5
            side = 1
        else:
            hi = t
            g_hi = g
            if side == -1:
                g_lo *= 0.5
            side = -1
    return lo


@njit(cache=True, nogil=True)
def _cut(coefs, powers, q, u, outer, g0, g1, buf, linear):
    """Crossing of the weight surface between ``0`` (inside) and ``outer`` (outside)."""
    if linear:
        return outer * g0 / (g0 - g1)
    return _bisect(coefs, powers, q, u, outer, g0, g1, buf)


@njit(cache=True, nogil=True)
def is_linear(powers):
    for t in range(powers.shape[0]):
        total = 0
        for j in range(powers.shape[1]):
            total += powers[t, j]
        if total > 1:
            return False
    return True


@njit(cache=True, nogil=True)
def _refresh(A, b, q, slack):
    n = q.shape[0] - 1
    for r in range(A.shape[0]):
        s = 0.0
        for j in range(n):
            s += A[r, j] * q[j]
        slack[r] = b[r] - s


@njit(cache=True, nogil=True)
def _step(A, coefs, powers, height, q, slack, au, u, cand, buf, linear):
    """One move; ``slack`` holds ``b - A x`` for the current point and is kept in sync."""
    dim = q.shape[0]
    n = dim - 1
    rows = A.shape[0]
    retries = 0
    while True:
        norm = 0.0
        for j in range(dim):
            u[j] = np.random.standard_normal()
            norm += u[j] * u[j]
        norm = np.sqrt(norm)
        for j in range(dim):
            u[j] /= norm

        t_lo = -np.inf
        t_hi = np.inf
        for r in range(rows):
            s = 0.0
            for j in range(n):
                s += A[r, j] * u[j]
            au[r] = s
            if s > 0.0:
                t = slack[r] / s
                if t < t_hi:
                    t_hi = t
            elif s < 0.0:
                t = slack[r] / s
                if t > t_lo:
                    t_lo = t
        ud = u[n]
        if ud > 0.0:
            t_lo = max(t_lo, -q[n] / ud)
            t_hi = min(t_hi, (height - q[n]) / ud)
        elif ud < 0.0:
            t_hi = min(t_hi, -q[n] / ud)
            t_lo = max(t_lo, (height - q[n]) / ud)
        t_hi = max(t_hi, 0.0)
        t_lo = min(t_lo, 0.0)
        g0 = _surface_gap(coefs, powers, q, u, 0.0, buf)
        g_hi = _surface_gap(coefs, powers, q, u, t_hi, buf)
        if g_hi < 0.0:
            t_hi = _cut(coefs, powers, q, u, t_hi, g0, g_hi, buf, linear)
        g_lo = _surface_gap(coefs, powers, q, u, t_lo, buf)
        if g_lo < 0.0:
            t_lo = _cut(coefs, powers, q, u, t_lo, g0, g_lo, buf, linear)
        if t_hi - t_lo >= DEGENERATE_CHORD:
            break
        retries += 1
        if retries > MAX_RETRIES:
            return 1

    # Uniform point on the chord; shrink towards the current point if the
    # candidate fails the exact membership test (rounding, or a weight that
    # is not concave along this line).
    for _ in range(MAX_SHRINK):
        t = t_lo + np.random.random() * (t_hi - t_lo)
        ok = True
        for r in range(rows):
            if t * au[r] > slack[r]:
                ok = False
                break
        if ok:
            for j in range(dim):
                cand[j] = q[j] + t * u[j]
            if cand[n] >= 0.0:
                for j in range(n):
                    buf[j] = cand[j]
                ok = cand[n] <= poly_eval(coefs, powers, buf)
            else:
                ok = False
        if ok:
            for j in range(dim):
                q[j] = cand[j]
            for r in range(rows):
                slack[r] -= t * au[r]
            return 0
        if t > 0.0:
            t_hi = t
        else:
            t_lo = t
    return 0


@njit(cache=True, nogil=True)
def walk(A, b, coefs, powers, height, q0, steps, seed, chain):
    """Run ``steps`` iterations from ``q0``; fills ``chain`` if it has rows.

    Facet slacks are updated incrementally and recomputed exactly every
    ``REFRESH`` steps so rounding cannot accumulate.
    """
    np.random.seed(seed)
    dim = q0.shape[0]
    q = q0.copy()
    u = np.empty(dim)
    cand = np.empty(dim)
    buf = np.empty(dim - 1)
    slack = np.empty(A.shape[0])
    au = np.empty(A.shape[0])
    record = chain.shape[0] > 0
    linear = is_linear(powers)
    for i in range(steps):
        if i % REFRESH == 0:
            _refresh(A, b, q, slack)
        status = _step(A, coefs, powers, height, q, slack, au, u, cand, buf, linear)
        if status != 0:
            return q, status
        if record:
            for j in range(dim):
                chain[i, j] = q[j]
    return q, 0


@njit(cache=True, nogil=True)
def walk_many(A, b, coefs, powers, height, q0, steps, seeds):
    """Independent walks from a common start; one final point per seed."""
    dim = q0.shape[0]
    out = np.empty((seeds.shape[0], dim))
    empty = np.empty((0, dim))
    for r in range(seeds.shape[0]):
        q, status = walk(A, b, coefs, powers, height, q0, steps, seeds[r], empty)
        if status != 0:
            return out, status
        out[r] = q
    return out, 0


@njit(cache=True, nogil=True)
def rejection(A, b, coefs, powers, lo, hi, height, need, limit, seed):
    """Uniform draws from ``[lo, hi] x [0, height]`` until ``need`` hits or ``limit`` draws.

    Returns ``(draws, hits, status)``; status 1 flags a weight above
    ``height`` and 2 a negative weight inside the base polytope.
    """
    np.random.seed(seed)
    n = lo.shape[0]
    x = np.empty(n)
    hits = 0
    draws = 0
    slack = 1e-9 * max(1.0, height)
    while draws < limit and hits < need:
        draws += 1
        for j in range(n):
            x[j] = lo[j] + np.random.random() * (hi[j] - lo[j])
        d = np.random.random() * height
        inside = True
        for r in range(A.shape[0]):
            s = 0.0
            for j in range(n):
                s += A[r, j] * x[j]
            if s > b[r]:
                inside = False
                break
        if not inside:
            continue
        w = poly_eval(coefs, powers, x)
        if w > height + slack:
            return draws, hits, 1
        if w < -slack:
            return draws, hits, 2
        if d <= w:
            hits += 1
    return draws, hits, 0
