"""Extended-value Orlicz functions, the norm functional, and Young conjugates.

An Orlicz function is a left-continuous convex M: [0, inf) -> [0, inf] with
M(0) = 0, neither identically 0 nor the 0/inf indicator. The associated norm
on R^n is the implicit scaling

    ||x||_M = inf { rho > 0 : sum_i M(|x_i| / rho) <= 1 },

computed here by bisection on rho (the modular sum is nonincreasing in rho).
+inf is an explicit value: a single infinite term makes the modular sum
infinite, which keeps bisection brackets well-defined near domain bounds.

The same functional is defined for merely positive increasing functions; such
handles carry ``is_orlicz=False`` and the functional need not be a norm (it
can even be 0 when the function is bounded and the modular sum never reaches
1 -- the solver returns that infimum honestly).

Distribution-derived instances:

  expected_overshoot_function(model)   M(s) = E(s|xi| - 1)_+
  neg_log_survival_function(model)     N(t) = -ln F(t)
  reciprocal_survival_function(model,k)  F(1/t) / (4(k-1)), increasing, not convex
  gaussian_comparison_function()       t below 1, t^2 from 1 on

M is evaluated through the identity M(s) = s * tail_integral(1/s) - F(1/s)
(integration by parts of the defining double integral), so no quadrature is
needed per call beyond what the model itself does.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .distributions import DistributionModel
from .errors import (
    DomainError,
    NonConvexError,
    NumericError,
    RangeError,
    UnboundedNormError,
)

__all__ = [
    "OrliczFunction",
    "Weights",
    "linear_function",
    "power_function",
    "gaussian_comparison_function",
    "from_callable",
    "expected_overshoot_function",
    "neg_log_survival_function",
    "reciprocal_survival_function",
    "scale_function",
    "orlicz_norm",
    "young_conjugate",
]

NORM_REL_TOL = 1e-12
_CONJUGATE_TOL = 1e-10
_MAX_DOUBLINGS = 200


@dataclass(frozen=True)
class OrliczFunction:
    """Immutable handle for an extended-value function on [0, inf).

    ``kind`` names the construction; ``is_orlicz`` records convexity (handles
    built from non-convex data carry False and are treated as functionals,
    not norms). ``model`` is set for distribution-derived moment functions
    and enables the analytic conjugate shortcut.
    """

    kind: str
    label: str
    evaluate: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    is_orlicz: bool = True
    domain_bound: float = math.inf
    model: Optional[DistributionModel] = field(default=None, repr=False)

    def values(self, t) -> np.ndarray:
        arr = np.asarray(t, dtype=float)
        if arr.size and float(np.min(arr)) < 0:
            raise DomainError(f"{self.label} is defined on [0, inf); got {np.min(arr)}")
        out = np.asarray(self.evaluate(arr), dtype=float)
        if math.isfinite(self.domain_bound):
            out = np.where(arr > self.domain_bound, math.inf, out)
        return out

    def __call__(self, t: float) -> float:
        return float(self.values(np.atleast_1d(np.asarray(t, dtype=float)))[0])

    def scaled(self, factor: float) -> "OrliczFunction":
        """Pointwise factor * self. Convexity is preserved."""
        if not (factor > 0) or not math.isfinite(factor):
            raise DomainError(f"scale factor must be positive, got {factor}")
        if factor == 1.0:
            return self
        base = self

        def _eval(t, _b=base, _f=factor):
            return _f * _b.evaluate(t)

        return OrliczFunction(
            kind="scaled",
            label=f"{factor:g}*{base.label}",
            evaluate=_eval,
            is_orlicz=base.is_orlicz,
            domain_bound=base.domain_bound,
        )


def scale_function(fun: OrliczFunction, factor: float) -> OrliczFunction:
    """Free-function form of ``OrliczFunction.scaled``."""
    return fun.scaled(factor)


def linear_function() -> OrliczFunction:
    return OrliczFunction(kind="linear", label="t", evaluate=lambda t: t)


def power_function(q: float) -> OrliczFunction:
    """M(t) = t**q for q >= 1."""
    if q < 1:
        raise RangeError(f"power function requires exponent q >= 1, got {q}")
    return OrliczFunction(kind="power", label=f"t^{q:g}", evaluate=lambda t: t**q)


def gaussian_comparison_function() -> OrliczFunction:
    """Two-piece comparison function: t on [0, 1), t^2 from 1 on."""
    return OrliczFunction(
        kind="gaussian_comparison",
        label="min(t,t^2)-kink",
        evaluate=lambda t: np.where(t < 1.0, t, t * t),
    )


def from_callable(
    fn: Callable[[np.ndarray], np.ndarray],
    *,
    label: str = "custom",
    is_orlicz: bool = True,
    domain_bound: float = math.inf,
) -> OrliczFunction:
    """Wrap a vectorized callable. The caller asserts convexity via ``is_orlicz``."""
    return OrliczFunction(
        kind="explicit",
        label=label,
        evaluate=fn,
        is_orlicz=is_orlicz,
        domain_bound=domain_bound,
    )


def expected_overshoot_function(model: DistributionModel) -> OrliczFunction:
    """The Orlicz function M(s) = E(s|xi| - 1)_+ of a model with E|xi| < inf.

    Evaluated via M(s) = s * tail_integral(1/s) - F(1/s); M(0) = 0. For
    tabulated models, thresholds 1/s beyond the table contribute at most the
    table's certified truncation bound, so the value is 0 there.
    """
    limit = model.upper_limit()

    def _eval(t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.zeros(t.shape)
        if math.isfinite(limit):
            pos = t > 1.0 / limit
        else:
            pos = t > 0.0
        tp = t[pos]
        if tp.size:
            thr = 1.0 / tp
            out[pos] = tp * model.tail_integral(thr) - model.survival(thr)
        return np.maximum(out, 0.0)

    return OrliczFunction(
        kind="moment",
        label=f"M[{model.describe()}]",
        evaluate=_eval,
        is_orlicz=True,
        model=model,
    )


def neg_log_survival_function(
    model: DistributionModel, *, require_convex: bool = True
) -> OrliczFunction:
    """N(t) = -ln F(t). Convex exactly when the model is log-concave.

    With ``require_convex`` (default) a model failing the grid convexity
    check is rejected; pass False to obtain the functional anyway, flagged
    ``is_orlicz=False``. Beyond a tabulated model's range the value is +inf
    (a loaded table guarantees N(t_max) > 1, so this cannot flip a modular
    sum across the budget 1).
    """
    convex = model.n_is_convex()
    if require_convex and not convex:
        raise NonConvexError(
            f"negative log-survival of {model.describe()} fails the grid convexity check"
        )

    def _eval(t):
        return model.neg_log_survival(t, beyond="inf")

    return OrliczFunction(
        kind="neg_log_survival",
        label=f"N[{model.describe()}]",
        evaluate=_eval,
        is_orlicz=convex,
    )


def reciprocal_survival_function(model: DistributionModel, k: int) -> OrliczFunction:
    """F(1/t) / (4(k-1)) for k >= 2: positive and increasing, not convex.

    The associated functional is computed with the non-norm flag; it is
    bounded by 1/(4(k-1)), so the functional can legitimately be 0.
    """
    if k < 2:
        raise RangeError(f"reciprocal survival function requires k >= 2, got {k}")
    limit = model.upper_limit()
    lo_t = 1.0 / limit if math.isfinite(limit) else 0.0

    def _eval(t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.zeros(t.shape)
        pos = t > lo_t
        tp = t[pos]
        if tp.size:
            out[pos] = model.survival(1.0 / tp) / (4.0 * (k - 1))
        return out

    return OrliczFunction(
        kind="reciprocal_survival",
        label=f"NF{k}[{model.describe()}]",
        evaluate=_eval,
        is_orlicz=False,
    )


@dataclass(frozen=True)
class Weights:
    """Validated vector of positive weights with a declared sort order."""

    values: np.ndarray
    order: str  # "ascending" | "descending"

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", arr)
        if self.order not in ("ascending", "descending"):
            raise DomainError(f"order must be ascending or descending, got {self.order!r}")
        if arr.ndim != 1 or arr.size == 0:
            raise DomainError("weights must be a nonempty 1-d vector")
        bad = np.flatnonzero(~(np.isfinite(arr) & (arr > 0)))
        if bad.size:
            i = int(bad[0])
            raise DomainError(f"weights must be positive and finite: entry {i + 1} is {arr[i]}")
        diffs = np.diff(arr)
        viol = diffs < 0 if self.order == "ascending" else diffs > 0
        where = np.flatnonzero(viol)
        if where.size:
            i = int(where[0])
            raise DomainError(
                f"weights not in {self.order} order: entry {i + 2} ({arr[i + 1]}) "
                f"violates entry {i + 1} ({arr[i]})"
            )

    @classmethod
    def ascending(cls, values) -> "Weights":
        return cls(np.asarray(values, dtype=float), "ascending")

    @classmethod
    def descending(cls, values) -> "Weights":
        return cls(np.asarray(values, dtype=float), "descending")

    def __len__(self) -> int:
        return int(self.values.size)


def _double_until(pred, start: float, factor: float, limit: int = _MAX_DOUBLINGS):
    """First start*factor^i (i <= limit) satisfying pred, else None."""
    t = start
    for _ in range(limit):
        if pred(t):
            return t
        t *= factor
    return None


def orlicz_norm(x, fun: OrliczFunction, *, rel_tol: float = NORM_REL_TOL) -> float:
    """The norm functional inf { rho > 0 : sum_i fun(|x_i| / rho) <= 1 }.

    Bisection on rho. The returned rho is on the feasible side of a bracket
    of relative width ``rel_tol``, so the infimum is never overshot from
    below; where the modular sum is continuous the residual |sum - 1| is
    well below 1e-9.

    Raises DomainError for the zero vector, UnboundedNormError when no
    scaling brings the modular sum down to 1 (e.g. infinite entries). For
    bounded functions whose modular sum never reaches 1 the infimum is 0 and
    0.0 is returned.
    """
    if isinstance(x, Weights):
        x = x.values
    v = np.abs(np.asarray(x, dtype=float).ravel())
    if v.size == 0 or not np.any(v > 0):
        raise DomainError("norm of the zero vector is undefined")
    if np.any(np.isnan(v)):
        raise DomainError("weights must not contain NaN")
    if np.any(np.isinf(v)):
        raise UnboundedNormError("norm is infinite: input contains infinite entries")
    v = v[v > 0]
    n = v.size
    vmax = float(v.max())

    evaluate = fun.evaluate
    bound = fun.domain_bound
    finite_bound = math.isfinite(bound)

    def modular(rho: float) -> float:
        t = v / rho
        vals = evaluate(t)
        if finite_bound and vmax / rho > bound:
            vals = np.where(t > bound, math.inf, vals)
        return float(np.sum(vals))

    with np.errstate(over="ignore", invalid="ignore"):
        # Initial bracket from per-element probes: fun(t_hi) >= 1 gives an
        # infeasible rho, fun(t_lo) <= 1/n gives a feasible one.
        t_hi = _double_until(lambda t: fun(t) >= 1.0, 1.0, 2.0)
        t_lo = _double_until(lambda t: fun(t) <= 1.0 / n, 1.0, 0.5)
        hi = n * vmax / t_lo if t_lo else vmax
        lo = vmax / t_hi if t_hi else vmax

        for _ in range(_MAX_DOUBLINGS):
            if modular(hi) <= 1.0:
                break
            hi *= 2.0
        else:
            raise UnboundedNormError(
                f"no scaling with modular sum <= 1 after {_MAX_DOUBLINGS} doublings "
                f"({fun.label})"
            )
        lo = min(lo, hi)
        for _ in range(_MAX_DOUBLINGS):
            if modular(lo) > 1.0:
                break
            lo *= 0.5
        else:
            # Bounded function, modular sum <= 1 for every rho: the infimum is 0.
            return 0.0

        while hi - lo > rel_tol * hi:
            mid = 0.5 * (lo + hi)
            if modular(mid) <= 1.0:
                hi = mid
            else:
                lo = mid
    return hi


def young_conjugate(
    fun: OrliczFunction, s: float, *, method: str = "auto", tol: float = _CONJUGATE_TOL
) -> float:
    """The conjugate fun*(s) = sup_{t >= 0} (t*s - fun(t)), extended-valued.

    ``method``:
      * "auto": analytic tail-threshold shortcut for distribution-derived
        moment functions, golden-section search otherwise;
      * "tail": force the shortcut (moment functions only);
      * "search": force the derivative-free search (always available).
    """
    if not (s >= 0):
        raise DomainError(f"conjugate argument must be >= 0, got {s}")
    if s == 0.0:
        return 0.0
    if method not in ("auto", "tail", "search"):
        raise DomainError(f"unknown conjugate method {method!r}")
    if method in ("auto", "tail") and fun.kind == "moment" and fun.model is not None:
        return _conjugate_by_tail(fun.model, s)
    if method == "tail":
        raise DomainError("tail method requires a distribution-derived moment function")
    return _conjugate_by_search(fun, s, tol)


def _conjugate_by_tail(model: DistributionModel, s: float) -> float:
    """fun*(s) = F(t) at the threshold t where tail_integral(t) = s."""
    mean = model.mean_abs()
    if s > mean:
        return math.inf
    if s >= mean:
        return 1.0
    lo, hi = 0.0, 1.0
    for _ in range(_MAX_DOUBLINGS):
        if model.tail_integral(hi) <= s:
            break
        lo, hi = hi, 2.0 * hi
    else:
        raise NumericError("tail threshold search failed to bracket")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if model.tail_integral(mid) > s:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-13 * max(1.0, hi):
            break
    return float(model.survival(0.5 * (lo + hi)))


_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _conjugate_by_search(fun: OrliczFunction, s: float, tol: float) -> float:
    def phi(t: float) -> float:
        value = fun(t)
        return -math.inf if math.isinf(value) else t * s - value

    best = 0.0  # phi(0) = 0

    if math.isfinite(fun.domain_bound):
        right = fun.domain_bound
    else:
        # Expand until phi stops increasing; persistent positive slope at a
        # huge abscissa means the supremum is infinite.
        right = 1.0
        f_r = phi(right)
        best = max(best, f_r)
        while True:
            f_next = phi(2.0 * right)
            if not (f_next > f_r + 1e-14 * max(1.0, abs(f_r))):
                right *= 2.0
                break
            right *= 2.0
            f_r = f_next
            best = max(best, f_r)
            if right > 1e15:
                slope = (phi(2.0 * right) - f_r) / right
                if slope > 1e-12:
                    return math.inf
                break

    a, b = 0.0, right
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = phi(c), phi(d)
    best = max(best, fc, fd)
    while b - a > tol * max(1.0, b):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = phi(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = phi(d)
        best = max(best, fc, fd)
    return best
