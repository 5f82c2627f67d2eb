"""Small deterministic numerical kernels.

Everything here is dependency-free on purpose: spectral norms and
eigenvalues feed smoothness/strong-convexity constants that the
analytical bounds consume, so the results must be reproducible
bit-for-bit across runs.
"""

import math

import numpy as np


def spectral_norm(a, max_iter=200, rel_tol=1e-12):
    """Largest singular value of ``a`` by power iteration on ``a.T @ a``.

    Starts from the all-ones vector; stops after ``max_iter`` iterations
    or when the Rayleigh quotient changes by less than ``rel_tol``
    relatively, whichever comes first.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.size == 0:
        raise ValueError("expected a non-empty 2-D array")
    m = a.T @ a
    n = m.shape[0]
    v = np.ones(n)
    # Fall back to basis vectors if the start is orthogonal to the range.
    for fallback in range(n + 1):
        w = m @ v
        norm_w = float(np.linalg.norm(w))
        if norm_w > 0.0:
            break
        if fallback == n:
            return 0.0
        v = np.zeros(n)
        v[fallback] = 1.0
    else:
        return 0.0
    lam = 0.0
    for _ in range(max_iter):
        v = w / norm_w
        w = m @ v
        norm_w = float(np.linalg.norm(w))
        if norm_w == 0.0:
            return 0.0
        lam_new = float(v @ w)
        if abs(lam_new - lam) <= rel_tol * abs(lam_new):
            lam = lam_new
            break
        lam = lam_new
    return math.sqrt(max(lam, 0.0))


def symmetric_eigenvalues(m, rel_tol=1e-12, max_sweeps=60):
    """Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.

    Sweeps the strict upper triangle in row-major order until the
    off-diagonal Frobenius norm drops below ``rel_tol`` times the full
    Frobenius norm. Returns the eigenvalues sorted ascending.
    """
    a = np.array(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expected a square matrix")
    n = a.shape[0]
    if n == 1:
        return np.array([a[0, 0]])
    norm_full = float(np.linalg.norm(a))
    if norm_full == 0.0:
        return np.zeros(n)
    for _ in range(max_sweeps):
        off = math.sqrt(max(float(np.sum(a * a) - np.sum(np.diag(a) ** 2)), 0.0))
        if off <= rel_tol * norm_full:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-300 or abs(apq) <= 1e-18 * (
                    abs(a[p, p]) + abs(a[q, q])
                ):
                    # negligible coupling; zeroing it directly avoids an
                    # overflowing rotation angle
                    a[p, q] = a[q, p] = 0.0
                    continue
                # Classic stable rotation angle selection; the large-theta
                # branch avoids overflow in theta*theta.
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = math.copysign(1.0, theta) / (
                        abs(theta) + math.sqrt(theta * theta + 1.0)
                    )
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                rot_p = c * a[:, p] - s * a[:, q]
                rot_q = s * a[:, p] + c * a[:, q]
                a[:, p] = rot_p
                a[:, q] = rot_q
                rot_p = c * a[p, :] - s * a[q, :]
                rot_q = s * a[p, :] + c * a[q, :]
                a[p, :] = rot_p
                a[q, :] = rot_q
    return np.sort(np.diag(a))


def kahan_cumsum(values):
    """Compensated running sums of a 1-D array.

    Sequential accumulation error stays near one ulp of the running
    total, which the timeline sandwich checks (1e-12 absolute slack over
    1e4 terms) rely on.
    """
    values = np.asarray(values, dtype=float)
    out = np.empty_like(values)
    total = 0.0
    carry = 0.0
    for i, v in enumerate(values):
        y = v - carry
        t = total + y
        carry = (t - total) - y
        total = t
        out[i] = total
    return out


def adaptive_simpson(func, a, b, rel_tol=1e-8, max_depth=40):
    """Adaptive Simpson quadrature of ``func`` over ``[a, b]``.

    Tolerance is relative to the running estimate with a tiny absolute
    floor so that integrals near zero terminate.
    """
    fa = func(a)
    fb = func(b)
    fm = func(0.5 * (a + b))
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    scale = max(abs(whole), 1e-300)

    def recurse(lo, hi, flo, fmid, fhi, approx, depth):
        mid = 0.5 * (lo + hi)
        lm = 0.5 * (lo + mid)
        rm = 0.5 * (mid + hi)
        flm = func(lm)
        frm = func(rm)
        left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid)
        right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi)
        if depth >= max_depth or abs(left + right - approx) <= 15.0 * rel_tol * scale:
            return left + right + (left + right - approx) / 15.0
        return recurse(lo, mid, flo, flm, fmid, left, depth + 1) + recurse(
            mid, hi, fmid, frm, fhi, right, depth + 1
        )

    return recurse(a, b, fa, fm, fb, whole, 0)
