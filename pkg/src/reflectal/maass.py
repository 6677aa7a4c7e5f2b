"""Even Maass cusp forms for the modular group by two-height collocation.

A form is carried as a truncated cosine expansion

    phi(z) = sqrt(y) sum_{n=1}^{M} a_n Kb_{it}(2 pi n y) 2 cos(2 pi n x),

where Kb is the e^{pi t/2}-rescaled Bessel kernel (an overall positive
constant; a_1 = 1 fixes the scale, so nothing downstream sees it).
Enforcing automorphy at collocation points on a low horocycle and
projecting onto cosine frequencies gives a linear system for the a_n.
Away from an eigenvalue the systems computed at two different heights
disagree; the difference of a marker coefficient changes sign at an
eigenvalue, so roots are bracketed on a scan grid, polished by secant
steps, and certified by full inter-height coefficient agreement.

Sign changes of phi are counted along the closed boundary curve of the
positive-x half of the fundamental domain: the imaginary-axis segment
above i, the x = 1/2 ray, and the unit-circle arc between them.  The
curve closes through the cusp; the two rays approach the cusp with
opposite dominant signs exactly when the expansion forces a sign change
there, which is counted once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from .specfun import k_bessel_batch

__all__ = [
    "MaassForm",
    "SignChangeRecord",
    "hejhal_solve",
    "maass_window",
    "maass_evaluate",
    "pullback",
    "automorphy_residual",
    "count_sign_changes",
    "dominance_height",
]

_CORNER_Y = math.sqrt(3.0) / 2.0


@dataclass(frozen=True)
class MaassForm:
    """Even cusp form in truncated-cosine form, a_1 = 1."""
    t: float
    coeffs: Tuple[float, ...]
    M: int
    heights: Tuple[float, float]
    certified_digits: int
    mismatch: float
    condition: float
    hecke_defect: float
    parity: str = "even"

    def as_dict(self) -> dict:
        return {
            "t": self.t,
            "lambda": 0.25 + self.t * self.t,
            "parity": self.parity,
            "M": self.M,
            "heights": list(self.heights),
            "certified_digits": self.certified_digits,
            "mismatch": self.mismatch,
            "condition": self.condition,
            "hecke_defect": self.hecke_defect,
            "coeffs": list(self.coeffs),
        }


@dataclass(frozen=True)
class SignChangeRecord:
    """Sign changes of a form along the closed fixed curve.

    zeros maps each arc to refined parameter locations: height y on the
    two vertical pieces, angle theta on the circle piece.  A sign flip
    between the two rays' cusp limits is recorded separately and counts
    once.  n_phi is the total around the closed curve."""
    n_phi: int
    zeros: Dict[str, Tuple[float, ...]]
    cusp_sign_change: bool
    step: float
    top_height: float
    flagged: Tuple[Tuple[str, float], ...] = ()

    def as_dict(self) -> dict:
        return {
            "n_phi": self.n_phi,
            "zeros": {k: list(v) for k, v in self.zeros.items()},
            "cusp_sign_change": self.cusp_sign_change,
            "step": self.step,
            "top_height": self.top_height,
            "flagged": [list(f) for f in self.flagged],
        }


def pullback(x: float, y: float, max_steps: int = 200
             ) -> Tuple[float, float]:
    """Standard-domain representative of a point of the upper half
    plane: translate into |x| <= 1/2, invert while |z| < 1."""
    if y <= 0:
        raise ValueError("points must lie in the upper half plane")
    for _ in range(max_steps):
        x -= round(x)
        r2 = x * x + y * y
        if r2 >= 1.0 - 1e-15:
            return x, y
        x, y = -x / r2, y / r2
    raise RuntimeError(f"pullback did not settle for x={x}, y={y}")


def _expansion_args(M: int, ys: np.ndarray) -> np.ndarray:
    return 2.0 * math.pi * np.arange(1, M + 1)[:, None] * ys[None, :]


def maass_evaluate(form: MaassForm, xs, ys) -> np.ndarray:
    """phi at given points, from the expansion directly.  The points
    must sit high enough that the truncated tail is negligible; the
    fundamental domain and its vicinity are safe."""
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    ys = np.atleast_1d(np.asarray(ys, dtype=float))
    if xs.shape != ys.shape:
        raise ValueError("xs and ys must have matching shapes")
    kv, _ = k_bessel_batch(form.t, _expansion_args(form.M, ys).ravel())
    kv = kv.reshape(form.M, ys.size)
    a = np.asarray(form.coeffs)
    ns = np.arange(1, form.M + 1)
    phases = 2.0 * math.pi * ns[:, None] * xs[None, :]
    return np.sqrt(ys) * 2.0 * np.einsum("n,nj,nj->j", a, kv,
                                         np.cos(phases))


def maass_grid_eval(form: MaassForm, xs_1d: np.ndarray, ys_1d: np.ndarray
                    ) -> np.ndarray:
    """phi on a cartesian grid, shaped (len(ys_1d), len(xs_1d)).  One
    Bessel batch covers the whole grid since rows share heights."""
    xs_1d = np.asarray(xs_1d, dtype=float)
    ys_1d = np.asarray(ys_1d, dtype=float)
    kv, _ = k_bessel_batch(form.t, _expansion_args(form.M, ys_1d).ravel())
    kv = kv.reshape(form.M, ys_1d.size)
    a = np.asarray(form.coeffs)
    ns = np.arange(1, form.M + 1)
    cosx = np.cos(2.0 * math.pi * ns[:, None] * xs_1d[None, :])
    return np.sqrt(ys_1d)[:, None] * 2.0 * ((a[:, None] * kv).T @ cosx)


def automorphy_residual(form: MaassForm, n_points: int = 50,
                        seed: int = 7) -> float:
    """sup |phi(z) - phi(gz)| / sup |phi| over a random test set, for g
    the inversion z -> -1/z.  Translation invariance is exact in the
    expansion, so the inversion is the only informative generator."""
    rng = np.random.default_rng(seed)
    xs, ys = [], []
    while len(xs) < n_points:
        x = rng.uniform(-0.5, 0.5)
        y = rng.uniform(0.6, 0.95)
        r2 = x * x + y * y
        if 0.86 <= r2 <= 1.35 and y / r2 >= 0.45:
            xs.append(x)
            ys.append(y)
    xs = np.array(xs)
    ys = np.array(ys)
    r2 = xs * xs + ys * ys
    vals = maass_evaluate(form, xs, ys)
    vals_s = maass_evaluate(form, -xs / r2, ys / r2)
    return float(np.max(np.abs(vals - vals_s)) / np.max(np.abs(vals)))


# -- collocation solver ---------------------------------------------------------

class _Collocation:
    """Fixed geometry of the two-height systems: collocation nodes, their
    standard-domain representatives, and the cosine projection matrices.
    Only the Bessel values change with t."""

    def __init__(self, M: int, heights: Tuple[float, float]):
        y1, y2 = heights
        if not (0 < y1 < _CORNER_Y and 0 < y2 < _CORNER_Y and y1 != y2):
            raise ValueError(
                "heights must be distinct and below the domain corner")
        self.M = M
        self.Q = M + 20
        j = np.arange(1, self.Q + 1)
        self.xj = (2.0 * j - 1.0) / (4.0 * self.Q)
        ns = np.arange(1, M + 1)
        # projection onto cos(2 pi m x) over the half-period node set
        self.proj = np.cos(2.0 * math.pi * ns[:, None] * self.xj[None, :])
        self.heights = (float(y1), float(y2))
        self.pulls = []
        for Y in self.heights:
            px = np.empty(self.Q)
            py = np.empty(self.Q)
            for k, x in enumerate(self.xj):
                px[k], py[k] = pullback(float(x), Y)
            cosn = np.cos(2.0 * math.pi * ns[:, None] * px[None, :])
            self.pulls.append({
                "x": px, "y": py,
                "sqrty_cos": np.sqrt(py)[None, :] * cosn,
                "grid_args": _expansion_args(M, py),
                "diag_args": 2.0 * math.pi * ns * Y,
            })

    def all_args(self) -> np.ndarray:
        parts = []
        for p in self.pulls:
            parts.append(p["diag_args"])
            parts.append(p["grid_args"].ravel())
        return np.concatenate(parts)

    def coefficient_vectors(self, t: float
                            ) -> Tuple[np.ndarray, np.ndarray, float]:
        """Least-squares coefficients at each height, and the larger of
        the two column-equilibrated condition numbers."""
        kv, _ = k_bessel_batch(t, self.all_args())
        out = []
        cond = 0.0
        pos = 0
        for Y, p in zip(self.heights, self.pulls):
            kdiag = kv[pos:pos + self.M]
            pos += self.M
            kgrid = kv[pos:pos + self.M * self.Q].reshape(self.M, self.Q)
            pos += self.M * self.Q
            w = p["sqrty_cos"] * kgrid  # (M, Q), rows indexed by n
            v = (np.diag(math.sqrt(Y) * kdiag)
                 - (2.0 / self.Q) * self.proj @ w.T)
            a_mat = v[:, 1:]
            rhs = -v[:, 0]
            scale = np.linalg.norm(a_mat, axis=0)
            scale[scale == 0] = 1.0
            sol, _, _, sv = np.linalg.lstsq(a_mat / scale, rhs, rcond=None)
            cond = max(cond, float(sv[0] / sv[-1]) if sv[-1] > 0 else
                       math.inf)
            out.append(np.concatenate(([1.0], sol / scale)))
        return out[0], out[1], cond


def _diff_vector(a1: np.ndarray, a2: np.ndarray) -> np.ndarray:
    top = min(10, len(a1))
    return a1[:top] - a2[:top]


def _default_m(t_hi: float, y1: float) -> int:
    return int(math.ceil(t_hi / (2.0 * math.pi * y1))) + 20


_COND_LIMIT = 1e10


def _form_at(t: float, coll: _Collocation) -> Tuple[np.ndarray, MaassForm]:
    a1, a2, cond = coll.coefficient_vectors(t)
    if not math.isfinite(cond) or cond > _COND_LIMIT:
        raise RuntimeError(
            f"collocation system ill-conditioned at t={t:.6f}: "
            f"condition estimate {cond:.3e}")
    diffs = _diff_vector(a1, a2)
    mism = float(np.max(np.abs(diffs)))
    coeffs = tuple(0.5 * (a1 + a2))
    digits = int(max(0, math.floor(-math.log10(mism + 1e-300))))
    hecke = abs(coeffs[1] * coeffs[2] - coeffs[5]) if len(coeffs) > 5 \
        else math.nan
    form = MaassForm(t=float(t), coeffs=coeffs, M=coll.M,
                     heights=coll.heights, certified_digits=digits,
                     mismatch=mism, condition=cond, hecke_defect=hecke)
    return diffs, form


def _secant_refine(coll: _Collocation, marker: int, lo: float, hi: float,
                   flo: float, fhi: float) -> MaassForm:
    """Root of one marker-coefficient difference inside a sign-change
    bracket; secant steps with bisection safeguard, run to rounding
    level since the steep markers trade 1e6 per unit of t."""
    best: Optional[MaassForm] = None
    t_prev, f_prev = lo, flo
    t_cur, f_cur = hi, fhi
    for _ in range(90):
        if hi - lo <= 4.0 * np.spacing(hi):
            break
        denom = f_cur - f_prev
        if denom != 0.0:
            t_next = t_cur - f_cur * (t_cur - t_prev) / denom
        else:
            t_next = 0.5 * (lo + hi)
        if not (lo < t_next < hi):
            t_next = 0.5 * (lo + hi)
        diffs, form = _form_at(t_next, coll)
        if best is None or form.mismatch < best.mismatch:
            best = form
        f_next = float(diffs[marker])
        if f_next == 0.0:
            break
        if (f_next > 0) == (flo > 0):
            lo, flo = t_next, f_next
        else:
            hi, fhi = t_next, f_next
        t_prev, f_prev = t_cur, f_cur
        t_cur, f_cur = t_next, f_next
    if best is None:
        _, best = _form_at(0.5 * (lo + hi), coll)
    return best


def maass_window(t1: float, t2: float, M: Optional[int] = None,
                 heights: Tuple[float, float] = (0.53, 0.61),
                 scan_step: Optional[float] = None,
                 certify_tol: float = 1e-6) -> List[MaassForm]:
    """All certified even forms with spectral parameter inside (t1, t2).

    Scans the inter-height differences of the first ten coefficients on
    a grid.  At an eigenvalue every difference vanishes at once, so any
    single difference changing sign marks a candidate bracket; the
    steepest one is refined by secant steps and the root is kept only
    when the full coefficient vectors agree to certify_tol.  Isolated
    zeros of one marker fail that certification and are dropped."""
    if not (1.0 < t1 < t2 < 200.0):
        raise ValueError("window must satisfy 1 < t1 < t2 < 200")
    if M is None:
        M = _default_m(t2, min(heights))
    coll = _Collocation(M, heights)
    if scan_step is None:
        scan_step = min(0.02, 1.2 / t2)
    n_steps = max(2, int(math.ceil((t2 - t1) / scan_step)))
    ts = np.linspace(t1, t2, n_steps + 1)
    marks = [_form_at(float(t), coll)[0] for t in ts]
    forms: List[MaassForm] = []
    for i in range(n_steps):
        flips = np.nonzero((marks[i] != 0.0)
                           & (np.sign(marks[i]) != np.sign(marks[i + 1])))[0]
        if len(flips) == 0:
            continue
        gaps = np.abs(marks[i][flips] - marks[i + 1][flips])
        marker = int(flips[np.argmax(gaps)])
        form = _secant_refine(coll, marker, float(ts[i]), float(ts[i + 1]),
                              float(marks[i][marker]),
                              float(marks[i + 1][marker]))
        if form.mismatch <= certify_tol:
            if forms and abs(form.t - forms[-1].t) < 1e-8:
                if form.mismatch < forms[-1].mismatch:
                    forms[-1] = form
            else:
                forms.append(form)
    return forms


def hejhal_solve(t_guess: float, M: Optional[int] = None,
                 heights: Tuple[float, float] = (0.53, 0.61),
                 bracket: float = 0.15,
                 certify_tol: float = 1e-6) -> MaassForm:
    """Certified even form nearest t_guess within +- bracket.

    Raises ValueError("no eigenvalue in window ...") when no certified
    sign change of the mismatch exists in the bracket, and RuntimeError
    with a condition estimate if the collocation systems degenerate."""
    if not (1.0 < t_guess < 200.0):
        raise ValueError("t_guess must lie in (1, 200)")
    forms = maass_window(t_guess - bracket, t_guess + bracket, M=M,
                         heights=heights, certify_tol=certify_tol)
    if not forms:
        raise ValueError(
            f"no eigenvalue in window ({t_guess - bracket:.4f}, "
            f"{t_guess + bracket:.4f}): no certified sign change of the "
            f"two-height mismatch")
    return min(forms, key=lambda f: abs(f.t - t_guess))


# -- sign changes along the fixed curve -----------------------------------------

def dominance_height(form: MaassForm, safety: float = 2.0) -> float:
    """Height above which the first expansion term dominates the tail,
    so phi keeps a constant sign on each vertical ray.  Every
    tail-to-lead ratio decreases in y, so one ladder scan suffices."""
    y_max = (form.t + 12.0 * form.t ** (1.0 / 3.0) + 40.0) / (2.0 * math.pi)
    n_rungs = max(8, int(math.ceil(math.log(max(y_max, 1.3)) /
                                   math.log(1.05))) + 1)
    ladder = np.minimum(1.05 ** np.arange(n_rungs), y_max)
    kv, _ = k_bessel_batch(form.t,
                           _expansion_args(form.M, ladder).ravel())
    kv = kv.reshape(form.M, ladder.size)
    lead = abs(form.coeffs[0]) * kv[0]
    tail = np.abs(np.asarray(form.coeffs[1:])) @ kv[1:]
    ok = np.nonzero((lead > safety * tail) & (lead > 0))[0]
    if len(ok) == 0:
        raise RuntimeError("no dominance height found; coefficients suspect")
    return float(ladder[ok[0]])


def _bisect_zeros(f, params: np.ndarray, vals: np.ndarray,
                  tol: float = 1e-9) -> List[float]:
    """Refine every sign flip of vals to tol in the parameter; f
    evaluates the batched parameter array."""
    signs = np.sign(vals)
    flips = np.nonzero(signs[:-1] * signs[1:] < 0)[0]
    lo = params[flips].copy()
    hi = params[flips + 1].copy()
    slo = signs[flips].copy()
    if len(lo) == 0:
        return []
    while np.max(hi - lo) > tol:
        mid = 0.5 * (lo + hi)
        smid = np.sign(f(mid))
        left = smid == slo
        lo = np.where(left, mid, lo)
        hi = np.where(left, hi, mid)
    return [float(v) for v in 0.5 * (lo + hi)]


def count_sign_changes(form: MaassForm, step: Optional[float] = None
                       ) -> SignChangeRecord:
    """Sign changes of phi along the closed fixed curve, each bracketed
    and bisected to 1e-9 in the arc parameter.  Points where |phi| dips
    below 1e-9 of the arc maximum without a sign flip are flagged as
    suspected even-order zeros and not counted."""
    if form.certified_digits < 6:
        raise ValueError("form must be certified to at least 6 digits")
    t = form.t
    if step is None:
        step = min(0.01, 1.0 / (4.0 * t))
    y_top = dominance_height(form)

    def axis_phi(ys):
        return maass_evaluate(form, np.zeros_like(ys), ys)

    def ray_phi(ys):
        return maass_evaluate(form, np.full_like(ys, 0.5), ys)

    def arc_phi(thetas):
        return maass_evaluate(form, np.cos(thetas), np.sin(thetas))

    arcs = {
        "imaginary-axis": (axis_phi, 1.0, y_top),
        "half-line": (ray_phi, _CORNER_Y, y_top),
        "unit-circle-arc": (arc_phi, math.pi / 3.0, math.pi / 2.0),
    }
    zeros: Dict[str, Tuple[float, ...]] = {}
    flagged: List[Tuple[str, float]] = []
    end_vals: Dict[str, Tuple[float, float]] = {}
    for name, (f, a, b) in arcs.items():
        n = max(8, int(math.ceil((b - a) / step)))
        params = np.linspace(a, b, n + 1)
        vals = f(params)
        zeros[name] = tuple(_bisect_zeros(f, params, vals))
        end_vals[name] = (float(vals[0]), float(vals[-1]))
        floor = 1e-9 * float(np.max(np.abs(vals)))
        signs = np.sign(vals)
        for i in range(1, n):
            if (abs(vals[i]) < floor and signs[i - 1] == signs[i + 1]
                    and abs(vals[i - 1]) > floor < abs(vals[i + 1])):
                flagged.append((name, float(params[i])))

    # the two rays meet at the cusp; opposite dominant signs there make
    # the glued point a sign change, counted once
    cusp_flip = (math.copysign(1.0, end_vals["imaginary-axis"][1])
                 != math.copysign(1.0, end_vals["half-line"][1]))

    # junction continuity: axis bottom is z=i, the arc's theta=pi/2 end;
    # arc's theta=pi/3 end is the ray's bottom corner.  Same points, so
    # the concatenated cycle needs no extra flips beyond the arcs' own.
    n_phi = sum(len(z) for z in zeros.values()) + int(cusp_flip)
    return SignChangeRecord(
        n_phi=n_phi,
        zeros=zeros,
        cusp_sign_change=cusp_flip,
        step=step,
        top_height=y_top,
        flagged=tuple(flagged),
    )
