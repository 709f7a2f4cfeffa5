"""Independent reference computations used only by the tests.

Nothing here calls the code it checks: Bernstein sums instead of de
Casteljau, dense sampling instead of adaptive quadrature, ``arccos``
instead of ``atan2``.
"""

from math import comb

import numpy as np


def bernstein_eval(points, t):
    pts = np.asarray(points, dtype=float)
    n = len(pts) - 1
    w = np.array([comb(n, m) * t**m * (1 - t) ** (n - m) for m in range(n + 1)])
    return w @ pts


def bernstein_eval_many(points, ts):
    return np.array([bernstein_eval(points, t) for t in ts])


def finite_difference(points, t, h=1e-6):
    """Second-order difference: central inside, three-point one-sided near 0 and 1."""
    f = lambda s: bernstein_eval(points, s)
    if t - h < 0.0:
        return (-3 * f(t) + 4 * f(t + h) - f(t + 2 * h)) / (2 * h)
    if t + h > 1.0:
        return (3 * f(t) - 4 * f(t - h) + f(t - 2 * h)) / (2 * h)
    return (f(t + h) - f(t - h)) / (2 * h)


def power_basis_derivatives(points, ts):
    """C'(t), C''(t) from the expanded Bernstein polynomial via numpy.polynomial."""
    pts = np.asarray(points, dtype=float)
    n = len(pts) - 1
    coeffs = np.zeros((n + 1, pts.shape[1]))
    for m in range(n + 1):
        # C(n, m) t^m (1-t)^(n-m) in the power basis
        basis = np.polynomial.polynomial.polypow([1.0, -1.0], n - m)
        basis = np.polynomial.polynomial.polymul(basis, [0.0] * m + [1.0]) * comb(n, m)
        coeffs[: len(basis)] += np.outer(basis, pts[m])
    d1 = np.polynomial.polynomial.polyder(coeffs, 1, axis=0)
    d2 = np.polynomial.polynomial.polyder(coeffs, 2, axis=0)
    ts = np.asarray(ts, dtype=float)
    v1 = np.stack([np.polynomial.polynomial.polyval(ts, d1[:, k]) for k in range(pts.shape[1])], axis=-1)
    v2 = np.stack([np.polynomial.polynomial.polyval(ts, d2[:, k]) for k in range(pts.shape[1])], axis=-1)
    return v1, v2


def dense_midpoint(f, samples=1_000_000, chunk=200_000):
    """Composite midpoint rule for a vectorised f on [0, 1]."""
    total = 0.0
    h = 1.0 / samples
    for s in range(0, samples, chunk):
        ts = (np.arange(s, min(samples, s + chunk)) + 0.5) * h
        total += f(ts).sum() * h
    return total


def curvature_oracle(points):
    def f(ts):
        d1, d2 = power_basis_derivatives(points, ts)
        return np.linalg.norm(np.cross(d1, d2), axis=-1) / np.linalg.norm(d1, axis=-1) ** 3

    return f


def arccos_angles(vertices, closed):
    v = np.asarray(vertices, dtype=float)
    if closed:
        v = np.concatenate([v[-1:], v, v[:1]])
    out = []
    for m in range(1, len(v) - 1):
        a, b = v[m] - v[m - 1], v[m + 1] - v[m]
        c = a @ b / (np.linalg.norm(a) * np.linalg.norm(b))
        out.append(np.arccos(np.clip(c, -1.0, 1.0)))
    return np.array(out)


def sampled_segment_min_distance(p1, q1, p2, q2, n=2001):
    """Minimum distance between two segments by dense sampling of both."""
    s = np.linspace(0, 1, n)[:, None]
    a = p1 + s * (q1 - p1)
    b = p2 + s * (q2 - p2)
    from scipy.spatial import cKDTree

    d, _ = cKDTree(b).query(a)
    return d.min()


def gauss_code(vertices):
    """Crossings of the xy-projection of a closed polygon in traversal order.

    Returns a list of ``(crossing_id, is_over)``.
    """
    V = np.asarray(vertices, dtype=float)
    n = len(V)
    events = []
    cid = 0
    for a in range(n):
        for b in range(a + 2, n):
            if a == 0 and b == n - 1:
                continue
            p, q = V[a, :2], V[(a + 1) % n, :2]
            r, s = V[b, :2], V[(b + 1) % n, :2]
            d1, d2 = q - p, s - r
            den = d1[0] * d2[1] - d1[1] * d2[0]
            if abs(den) < 1e-14:
                continue
            w = r - p
            u = (w[0] * d2[1] - w[1] * d2[0]) / den
            v = (w[0] * d1[1] - w[1] * d1[0]) / den
            if 0 < u < 1 and 0 < v < 1:
                za = V[a, 2] + u * (V[(a + 1) % n, 2] - V[a, 2])
                zb = V[b, 2] + v * (V[(b + 1) % n, 2] - V[b, 2])
                events.append((a + u, cid, za > zb))
                events.append((b + v, cid, zb > za))
                cid += 1
    events.sort()
    return [(c, bool(o)) for _, c, o in events]


def in_convex_hull(points, x):
    """LP feasibility: x = sum lambda_m P_m with lambda >= 0, sum lambda = 1."""
    from scipy.optimize import linprog

    P = np.asarray(points, dtype=float)
    A_eq = np.vstack([P.T, np.ones(len(P))])
    b_eq = np.concatenate([x, [1.0]])
    res = linprog(np.zeros(len(P)), A_eq=A_eq, b_eq=b_eq, bounds=[(0, None)] * len(P), method="highs")
    return res.status == 0
