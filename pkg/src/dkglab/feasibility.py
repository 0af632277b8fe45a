"""Parameter-region logic for local well-posedness in Fourier-Lebesgue spaces.

Two layers:

* four main conditions on ``(p, s, r)``;
* seventeen working conditions W1-W17, linear in ``(sigma, rho)`` once
  ``(p, s, r, eps)`` is fixed, solved by exact interval intersection inside
  the box ``1/p < sigma, rho < 1``.

Rational inputs (``fractions.Fraction`` or ints) are evaluated exactly with
open-set semantics for strict inequalities.  Float inputs use a margin: a
strict ``a > b`` means ``a - b > margin`` (default 1e-12), a non-strict
``a >= b`` has zero tolerance.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational

import numpy as np

MARGIN = 1e-12
DEFAULT_EPS = 0.01


def _is_exact(*vals) -> bool:
    return all(isinstance(v, Rational) for v in vals)


@dataclass(frozen=True)
class FeasibilityProblem:
    p: float
    s: float
    r: float
    eps: float = DEFAULT_EPS

    def __post_init__(self):
        if not 1 < self.p <= 2:
            raise ValueError(f"p must lie in (1, 2], got {self.p}")
        if not self.eps > 0:
            raise ValueError(f"eps must be positive, got {self.eps}")

    @property
    def exact(self) -> bool:
        return _is_exact(self.p, self.s, self.r, self.eps)

    @property
    def inv_p(self):
        return Fraction(1) / self.p if self.exact else 1.0 / self.p


@dataclass(frozen=True)
class ExponentPair:
    sigma: float
    rho: float
    rho_choice: str = "interval"  # "1/p+eps" when rho = 1/p + eps itself worked


@dataclass
class Comparison:
    """``lhs (> | >=) rhs`` evaluated under the problem's arithmetic."""

    lhs: object
    rhs: object
    strict: bool

    def holds(self, exact: bool, margin: float = MARGIN) -> bool:
        d = self.lhs - self.rhs
        if exact:
            return d > 0 if self.strict else d >= 0
        return d > margin if self.strict else d >= 0


# --- main conditions ---------------------------------------------------------------

def main_conditions(prob: FeasibilityProblem) -> dict:
    p, s, r = prob.p, prob.s, prob.r
    q = prob.inv_p
    half = Fraction(1, 2) if prob.exact else 0.5
    return {
        "s>-1/2+1/(2p)": Comparison(s, -half + half * q, True),
        "r<=1+s": Comparison(1 + s, r, False),
        "r>=|s|": Comparison(r, abs(s), False),
        "r>2/p-1": Comparison(r, 2 * q - 1, True),
    }


@dataclass
class MainCheck:
    ok: bool
    conditions: dict

    def __bool__(self):
        return self.ok


def check_main(prob: FeasibilityProblem, margin: float = MARGIN) -> MainCheck:
    """Evaluate the four main conditions; truthy when all hold."""
    ex = prob.exact
    res = {k: c.holds(ex, margin) for k, c in main_conditions(prob).items()}
    return MainCheck(all(res.values()), res)


def p2_predicate(s, r) -> bool:
    """The p = 2 region written out: s > -1/4, r > 0, |s| <= r <= 1 + s."""
    return s > -Fraction(1, 4) and r > 0 and abs(s) <= r <= 1 + s


# --- the seventeen working conditions ------------------------------------------------

def working_conditions(prob: FeasibilityProblem, sigma, rho) -> dict:
    """Conditions W1-W17 at ``(sigma, rho)``, transcribed term by term."""
    s, r, e = prob.s, prob.r, prob.eps
    q = prob.inv_p
    C = Comparison
    return {
        "W1": C(s + 1 - rho - e, 0, False),
        "W2": C(s + 1 - r, 0, False),
        "W3": C(2 * s + 1 - rho - e, 0, False),
        "W4": C(2 * s + 1 - rho - e + 1 - r, 0, False),
        "W5": C(2 * s + sigma + 1 - r, q, True),
        "W6": C(2 * s + sigma, 0, False),
        "W7": C(s + sigma + 1 - r, 0, False),
        "W8": C(s + 1 - r, 0, False),
        "W9": C(sigma + 1 - rho - e, q, True),
        "W10": C(1 - e, rho, False),
        "W11": C(1 - e, sigma, False),
        "W12": C(s - s + r + 1 - sigma - e, q, True),
        "W13": C(s - s + 1 - sigma - e, 0, False),
        "W14": C(s + r, 0, False),
        "W15": C(-s + r, 0, False),
        "W16": C(s + 1 - sigma - e + r, 0, False),
        "W17": C(-s + 1 - sigma - e + r, 0, False),
    }


def box_conditions(prob: FeasibilityProblem, sigma, rho) -> dict:
    q = prob.inv_p
    C = Comparison
    return {"sigma>1/p": C(sigma, q, True), "sigma<1": C(1, sigma, True),
            "rho>1/p": C(rho, q, True), "rho<1": C(1, rho, True)}


def validate_pair(prob: FeasibilityProblem, sigma, rho, margin: float = MARGIN) -> dict:
    """Per-condition truth values of W1-W17 and the box at ``(sigma, rho)``."""
    ex = prob.exact and _is_exact(sigma, rho)
    out = {k: c.holds(ex, margin) for k, c in working_conditions(prob, sigma, rho).items()}
    out.update({k: c.holds(ex, margin) for k, c in box_conditions(prob, sigma, rho).items()})
    return out


# --- interval engine ---------------------------------------------------------------------

@dataclass
class Interval:
    lo: object = -math.inf
    hi: object = math.inf
    lo_strict: bool = True
    hi_strict: bool = True
    notes: list = field(default_factory=list)

    def above(self, v, strict: bool, tag=None):
        if v > self.lo or (v == self.lo and strict and not self.lo_strict):
            self.lo, self.lo_strict = v, strict
        if tag is not None:
            self.notes.append(("lo", tag, v))
        return self

    def below(self, v, strict: bool, tag=None):
        if v < self.hi or (v == self.hi and strict and not self.hi_strict):
            self.hi, self.hi_strict = v, strict
        if tag is not None:
            self.notes.append(("hi", tag, v))
        return self

    def empty(self, exact: bool, margin: float = MARGIN) -> bool:
        gap = self.hi - self.lo
        if exact:
            return gap < 0 or (gap == 0 and (self.lo_strict or self.hi_strict))
        need = margin * (self.lo_strict + self.hi_strict)
        return gap < need

    def midpoint(self):
        return (self.lo + self.hi) / 2


def _rho_interval(prob: FeasibilityProblem) -> Interval:
    """Constraints on rho alone: W1, W3, W4, W10 and the box."""
    s, r, e, q = prob.s, prob.r, prob.eps, prob.inv_p
    iv = Interval().above(q, True, "box").below(1, True, "box")
    iv.below(s + 1 - e, False, "W1")
    iv.below(2 * s + 1 - e, False, "W3")
    iv.below(2 * s + 2 - r - e, False, "W4")
    iv.below(1 - e, False, "W10")
    return iv


def _sigma_interval(prob: FeasibilityProblem, rho=None) -> Interval:
    """Constraints on sigma; with ``rho`` given, W9 is a bound on sigma.

    Without ``rho`` the coupling W9 is replaced by its projection
    ``sigma > 2/p - 1 + eps`` (there must be room for some rho > 1/p).
    """
    s, r, e, q = prob.s, prob.r, prob.eps, prob.inv_p
    iv = Interval().above(q, True, "box").below(1, True, "box")
    iv.above(q - 2 * s - 1 + r, True, "W5")
    iv.above(-2 * s, False, "W6")
    iv.above(r - s - 1, False, "W7")
    if rho is None:
        iv.above(2 * q - 1 + e, True, "W9")
    else:
        iv.above(q + rho - 1 + e, True, "W9")
    iv.below(1 - e, False, "W11")
    iv.below(r + 1 - e - q, True, "W12")
    iv.below(1 - e, False, "W13")
    iv.below(s + 1 - e + r, False, "W16")
    iv.below(-s + 1 - e + r, False, "W17")
    return iv


def _sigma_only_ok(prob: FeasibilityProblem) -> bool:
    """W2, W8, W14, W15 do not involve the exponents at all."""
    ex = prob.exact
    wc = working_conditions(prob, 0, 0)
    return all(wc[k].holds(ex) for k in ("W2", "W8", "W14", "W15"))


def find_sigma_rho(prob: FeasibilityProblem, margin: float = MARGIN) -> ExponentPair | None:
    """A pair satisfying W1-W17 inside the box, or ``None``.

    The choice ``rho = 1/p + eps`` is tried first; otherwise rho is eliminated
    and the midpoints of the resulting intervals are returned.
    """
    ex = prob.exact
    if not _sigma_only_ok(prob):
        return None
    rho_iv = _rho_interval(prob)
    if rho_iv.empty(ex, margin):
        return None

    rho0 = prob.inv_p + prob.eps
    if rho0 < rho_iv.hi or (rho0 == rho_iv.hi and not rho_iv.hi_strict):
        iv = _sigma_interval(prob, rho0)
        if not iv.empty(ex, margin):
            pair = ExponentPair(iv.midpoint(), rho0, "1/p+eps")
            if all(validate_pair(prob, pair.sigma, pair.rho, margin).values()):
                return pair

    iv = _sigma_interval(prob)
    if iv.empty(ex, margin):
        return None
    sigma = iv.midpoint()
    # W9: rho < sigma + 1 - 1/p - eps
    rho_iv.below(sigma + 1 - prob.inv_p - prob.eps, True, "W9")
    if rho_iv.empty(ex, margin):
        return None
    pair = ExponentPair(sigma, rho_iv.midpoint(), "interval")
    if not all(validate_pair(prob, pair.sigma, pair.rho, margin).values()):
        return None
    return pair


# --- sweep of the reduction claim ----------------------------------------------------

def inside_with_margin(p, s, r, delta: float) -> bool:
    """The main conditions hold with slack at least ``delta`` each."""
    return (s - (-0.5 + 0.5 / p) >= delta and (1 + s) - r >= delta
            and r - abs(s) >= delta and r - (2.0 / p - 1.0) >= delta)


@dataclass
class SweepReport:
    points: int = 0
    inside: int = 0
    successes: int = 0
    revalidated: int = 0
    rho_choice_counts: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    eps: float = 0.0
    delta: float = 0.0

    @property
    def success_rate(self) -> float:
        return self.successes / self.inside if self.inside else float("nan")

    def as_dict(self) -> dict:
        return {"points": self.points, "inside": self.inside, "successes": self.successes,
                "revalidated": self.revalidated, "success_rate": self.success_rate,
                "rho_choice_counts": self.rho_choice_counts,
                "failures": [list(map(float, f)) for f in self.failures[:20]],
                "eps": self.eps, "delta": self.delta}


def sweep_grid(n: int = 50, p_range=(1.0, 2.0), s_range=(-0.5, 2.0), r_range=(0.0, 3.0)):
    """Uniform grid; the open left end of the p range is excluded."""
    ps = np.linspace(p_range[0], p_range[1], n + 1)[1:]
    ss = np.linspace(s_range[0], s_range[1], n)
    rs = np.linspace(r_range[0], r_range[1], n)
    return ps, ss, rs


def verify_prop11(n: int = 50, delta: float = 1e-3, eps: float | None = None,
                  grid=None) -> SweepReport:
    """Run ``find_sigma_rho`` at every grid point inside the main region by ``delta``.

    ``eps`` defaults to ``delta / 4``: W12 needs ``eps`` below the
    slack in ``r > 2/p - 1``, so a fixed ``eps`` larger than ``delta`` would fail near
    that boundary for reasons unrelated to the claim.
    """
    eps = delta / 4 if eps is None else eps
    ps, ss, rs = grid if grid is not None else sweep_grid(n)
    rep = SweepReport(eps=eps, delta=delta)
    for p in ps:
        for s in ss:
            for r in rs:
                rep.points += 1
                p_, s_, r_ = float(p), float(s), float(r)
                if not inside_with_margin(p_, s_, r_, delta):
                    continue
                rep.inside += 1
                prob = FeasibilityProblem(p_, s_, r_, eps)
                pair = find_sigma_rho(prob)
                if pair is None:
                    rep.failures.append((p_, s_, r_))
                    continue
                rep.successes += 1
                rep.rho_choice_counts[pair.rho_choice] = rep.rho_choice_counts.get(pair.rho_choice, 0) + 1
                if all(validate_pair(prob, pair.sigma, pair.rho).values()):
                    rep.revalidated += 1
    return rep


# --- scaling ----------------------------------------------------------------------

@dataclass(frozen=True)
class ScalingReport:
    sigma_scale: float
    lambda_scale: float
    sigma_min: float
    s_at_sigma_min: float
    lambda_min: float
    r_at_lambda_min: float
    lambda_regime: str


def scaling_exponents(prob: FeasibilityProblem) -> ScalingReport:
    """L^2-Sobolev scaling indices and their infima over the admissible region.

    The infima are endpoint values (approached, not attained): the s-infimum
    is at ``s = -1/2 + 1/(2p)``; with that s, the r-infimum comes from ``r > 2/p - 1``
    for ``p <= 5/3`` and from ``r >= |s|`` above.
    """
    q = prob.inv_p
    half = Fraction(1, 2) if prob.exact else 0.5
    s_min = -half + half * q
    if prob.p <= Fraction(5, 3):
        r_min, regime = 2 * q - 1, "p<=5/3: r > 2/p - 1"
    else:
        r_min, regime = abs(s_min), "p>5/3: r > |s|"
    return ScalingReport(
        sigma_scale=prob.s + half - q,
        lambda_scale=prob.r + half - q,
        sigma_min=s_min + half - q,
        s_at_sigma_min=s_min,
        lambda_min=r_min + half - q,
        r_at_lambda_min=r_min,
        lambda_regime=regime,
    )


# --- region boundary ---------------------------------------------------------------

# each half-plane a*s + b*r >= c (closed versions of the main conditions)
def _half_planes(p) -> list:
    q = Fraction(1) / p if isinstance(p, Rational) else 1.0 / p
    half = Fraction(1, 2) if isinstance(p, Rational) else 0.5
    return [
        ("s = -1/2 + 1/(2p)", (1, 0, -half + half * q)),
        ("r = 1 + s", (1, -1, -1)),
        ("r = s", (-1, 1, 0)),
        ("r = -s", (1, 1, 0)),
        ("r = 2/p - 1", (0, 1, 2 * q - 1)),
    ]


@dataclass
class BoundarySegment:
    label: str
    start: tuple
    end: tuple
    points: np.ndarray = field(repr=False, default=None)

    @property
    def degenerate(self) -> bool:
        return self.start == self.end


def region_boundary(p, resolution: int = 64, s_max=3, r_max=4) -> list:
    """Pieces of each main-condition line that bound the closed region, clipped to a window.

    Lines touching the region in a single point (e.g. ``r = 0`` at p = 2) give a
    degenerate segment.  Rational ``p`` gives exact endpoints.
    """
    if resolution < 16:
        raise ValueError("resolution must be at least 16")
    planes = _half_planes(p)
    clip = [("clip s", (-1, 0, -s_max)), ("clip r", (0, -1, -r_max))]
    allp = planes + clip
    out = []
    for i, (label, (a, b, c)) in enumerate(planes):
        # point on the line and direction
        if b != 0:
            base = (0, Fraction(c) / b if isinstance(c, Rational) else c / b)
        else:
            base = (Fraction(c) / a if isinstance(c, Rational) else c / a, 0)
        d = (-b, a)
        lo, hi = -math.inf, math.inf
        feasible = True
        for j, (_, (a2, b2, c2)) in enumerate(allp):
            if j == i:
                continue
            # a2*(base + t d) ... >= c2  ->  k t >= m
            k = a2 * d[0] + b2 * d[1]
            m = c2 - (a2 * base[0] + b2 * base[1])
            if k == 0:
                if m > 0:
                    feasible = False
                continue
            t = Fraction(m) / k if isinstance(m, Rational) and isinstance(k, Rational) else m / k
            if k > 0:
                lo = max(lo, t)
            else:
                hi = min(hi, t)
        if not feasible or lo > hi:
            continue
        start = (base[0] + lo * d[0], base[1] + lo * d[1])
        end = (base[0] + hi * d[0], base[1] + hi * d[1])
        ts = np.linspace(float(lo), float(hi), resolution)
        pts = np.stack([float(base[0]) + ts * d[0], float(base[1]) + ts * d[1]], axis=1)
        out.append(BoundarySegment(label, start, end, pts))
    return out


def region_csv_rows(p, resolution: int = 200, s_range=(-1.0, 2.0), r_range=(-0.5, 3.0),
                    eps: float = DEFAULT_EPS):
    """Rows (s, r, admissible, sigma, rho) over a resolution x resolution grid."""
    rows = []
    for s in np.linspace(*s_range, resolution):
        for r in np.linspace(*r_range, resolution):
            prob = FeasibilityProblem(p, float(s), float(r), eps)
            ok = bool(check_main(prob))
            pair = find_sigma_rho(prob) if ok else None
            rows.append((float(s), float(r), ok,
                         None if pair is None else float(pair.sigma),
                         None if pair is None else float(pair.rho)))
    return rows
