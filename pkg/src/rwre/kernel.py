"""Exact quenched probabilities via dynamic programming over site occupation.

All computations propagate occupation mass step by step through a fixed
environment window.  Mass is stored linearly but rescaled whenever it
drifts out of comfortable floating-point range, with the accumulated log
scale folded back into every returned value, so results are exact log
probabilities down to extremely small magnitudes (the practical floor is a
relative spread of about 1e-300 within a single time slice, far below
anything the supported workloads produce).

Step-count conventions: :func:`bridge_log_prob` and
:func:`max_disp_bridge_cdf` take the half length ``n`` of a ``2n``-step
bridge; :func:`confined_log_prob` and :func:`hitting_cdf` take a total
step count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .environment import Environment
from .errors import (
    DegenerateBridgeError,
    DomainError,
    OrderingError,
    ParityError,
)

__all__ = [
    "DpTable",
    "IntervalSpec",
    "forward_table",
    "bridge_log_prob",
    "confined_log_prob",
    "max_disp_bridge_cdf",
    "bridge_max_quantile",
    "hitting_cdf",
    "exit_prob_closed_form",
]

# Rescale the linear mass vector when its maximum leaves this band.
_RESCALE_LO = 1e-100
_RESCALE_HI = 1e100

# Above this half length, bridge computations drop relatively negligible
# sites by default (see bridge_log_prob).
_AUTO_TRUNCATION_N = 4096
_AUTO_TRUNCATION_THRESHOLD = 1e-300

# Cap on materialized table entries (DpTable construction only).
_MAX_TABLE_ENTRIES = 150_000_000


@dataclass(frozen=True)
class IntervalSpec:
    """Open interval ``(lo, hi)`` with a boundary behavior tag.

    ``killing`` removes any mass that steps onto an endpoint;
    ``absorbing`` freezes it there.  Both endpoints share one behavior.
    """

    lo: int
    hi: int
    boundary: str = "killing"

    def __post_init__(self):
        if self.lo >= self.hi:
            raise OrderingError(f"interval ({self.lo}, {self.hi}) is empty")
        if self.boundary not in ("killing", "absorbing"):
            raise DomainError(f"unknown boundary behavior {self.boundary!r}")


@dataclass(frozen=True, eq=False)
class DpTable:
    """Occupation or backward-probability table in the log domain.

    ``log_mass[k, i]`` is the fully folded log value at step ``k`` and site
    ``site_lo + i``; unreachable cells hold ``-inf``.  ``total_log_scale``
    records any rescaling not yet folded into the stored values; tables
    built by this package always fold eagerly, so it is 0.

    For ``kind == "occupation"`` row ``k`` is the mass distribution after
    ``k`` steps (summing to at most 1, and to exactly 1 for an
    unrestricted walk).  For ``kind == "backward"`` cell ``(k, x)`` is the
    probability that a walk sitting at ``x`` with ``n_steps - k`` steps
    remaining finishes at the origin, and rows are not distributions.
    """

    kind: str
    n_steps: int
    site_lo: int
    site_hi: int
    log_mass: np.ndarray
    total_log_scale: float = 0.0

    def __post_init__(self):
        expected = (self.n_steps + 1, self.site_hi - self.site_lo + 1)
        if self.log_mass.shape != expected:
            raise DomainError(
                f"log_mass shape {self.log_mass.shape} != expected {expected}"
            )
        if self.kind not in ("occupation", "backward"):
            raise DomainError(f"unknown table kind {self.kind!r}")

    def site_index(self, x: int) -> int:
        if x < self.site_lo or x > self.site_hi:
            raise DomainError(
                f"site {x} outside table range [{self.site_lo}, {self.site_hi}]"
            )
        return x - self.site_lo

    def log_at(self, k: int, x: int) -> float:
        if k < 0 or k > self.n_steps:
            raise DomainError(f"step {k} outside [0, {self.n_steps}]")
        return float(self.log_mass[k, self.site_index(x)])

    def row(self, k: int) -> np.ndarray:
        return self.log_mass[k]

    def row_mass_sums(self) -> np.ndarray:
        """Per-row sums of ``exp(log_mass)`` plus the outstanding scale."""
        with np.errstate(over="ignore"):
            return np.exp(self.log_mass + self.total_log_scale).sum(axis=1)


def _forward_killing(
    om: np.ndarray,
    start: int,
    steps: int,
    trunc: float = 0.0,
    record: bool = False,
):
    """Propagate mass through ``om`` with killing outside its index range.

    Returns ``(mass, log_scale, disc_log, rows)``: the final scaled linear
    mass vector, the log factor to add back, a log-domain upper bound on
    all truncated mass (``-inf`` when nothing was dropped), and the
    fully folded log rows when ``record`` is set.
    """
    w = om.size
    p = om
    q = 1.0 - om
    mass = np.zeros(w)
    mass[start] = 1.0
    right = np.empty(w)
    left = np.empty(w)
    new = np.empty(w)
    scale = 0.0
    disc_log = -np.inf
    rows = []

    def snapshot():
        with np.errstate(divide="ignore"):
            rows.append(np.log(mass) + scale)

    if record:
        snapshot()
    for _ in range(steps):
        np.multiply(mass, p, out=right)
        np.multiply(mass, q, out=left)
        new[0] = 0.0
        new[1:] = right[:-1]
        new[:-1] += left[1:]
        mass, new = new, mass
        m = mass.max()
        if m == 0.0:
            # everything was killed; later rows stay empty
            if record:
                for _ in range(len(rows), steps + 1):
                    rows.append(np.full(w, -np.inf))
            return mass, scale, disc_log, rows
        if trunc > 0.0:
            small = mass < m * trunc
            if small.any():
                dropped = float(mass[small].sum())
                if dropped > 0.0:
                    disc_log = np.logaddexp(disc_log, np.log(dropped) + scale)
                    mass[small] = 0.0
        if m < _RESCALE_LO or m > _RESCALE_HI:
            mass /= m
            scale += float(np.log(m))
        if record:
            snapshot()
    return mass, scale, disc_log, rows


def _forward_absorbing(om_interior: np.ndarray, start: int, steps: int):
    """Propagate with sticky endpoints just outside the interior range.

    Returns per-step arrays of mass newly absorbed at the left and right
    endpoints (index k = mass absorbed on step k+1), plus the final
    interior mass vector.  Runs in plain linear arithmetic; callers keep
    horizons modest so no rescaling is needed.
    """
    w = om_interior.size
    p = om_interior
    q = 1.0 - om_interior
    mass = np.zeros(w)
    mass[start] = 1.0
    right = np.empty(w)
    left = np.empty(w)
    new = np.empty(w)
    absorbed_left = np.zeros(steps)
    absorbed_right = np.zeros(steps)
    for k in range(steps):
        np.multiply(mass, p, out=right)
        np.multiply(mass, q, out=left)
        absorbed_left[k] = left[0]
        absorbed_right[k] = right[-1]
        new[0] = 0.0
        new[1:] = right[:-1]
        new[:-1] += left[1:]
        mass, new = new, mass
    return absorbed_left, absorbed_right, mass


def _logsumexp(values: np.ndarray) -> float:
    if values.size == 0:
        return -np.inf
    return float(np.logaddexp.reduce(values))


def _final_log(mass: np.ndarray, scale: float, index: int | None) -> float:
    if index is None:
        total = float(mass.sum())
        return -np.inf if total == 0.0 else float(np.log(total)) + scale
    v = float(mass[index])
    return -np.inf if v == 0.0 else float(np.log(v)) + scale


def forward_table(
    env: Environment,
    steps: int,
    interval: IntervalSpec | None = None,
    start: int = 0,
) -> DpTable:
    """Materialize the full occupation table for a walk from ``start``.

    With no interval the walk is unrestricted and the table covers the
    reachable cone ``start +- steps``; rows then sum to 1.  A killing
    interval restricts the table to the open interval's interior; an
    absorbing interval additionally keeps the frozen endpoint masses in the
    boundary columns.

    Intended for moderate sizes (tests, sampling preparation, diagnostics);
    the table must stay under about 1.5e8 cells.
    """
    if steps < 0:
        raise DomainError("steps must be nonnegative")
    if interval is None:
        lo, hi = start - steps, start + steps
        env.require_window(lo, hi)
        om = env.slice(lo, hi)
        _check_table_size(steps, om.size)
        mass, scale, _, rows = _forward_killing(
            om, start - lo, steps, record=True
        )
        return DpTable("occupation", steps, lo, hi, np.asarray(rows))

    if start <= interval.lo or start >= interval.hi:
        raise OrderingError(
            f"start {start} not inside interval ({interval.lo}, {interval.hi})"
        )
    if interval.boundary == "killing":
        lo, hi = interval.lo + 1, interval.hi - 1
        env.require_window(lo, hi)
        om = env.slice(lo, hi)
        _check_table_size(steps, om.size)
        _, _, _, rows = _forward_killing(om, start - lo, steps, record=True)
        return DpTable("occupation", steps, lo, hi, np.asarray(rows))

    # absorbing: interior scan plus sticky boundary columns
    lo, hi = interval.lo, interval.hi
    env.require_window(lo + 1, hi - 1)
    om = env.slice(lo + 1, hi - 1)
    _check_table_size(steps, om.size + 2)
    w = om.size
    p, q = om, 1.0 - om
    mass = np.zeros(w)
    mass[start - (lo + 1)] = 1.0
    frozen_lo = 0.0
    frozen_hi = 0.0
    rows = np.full((steps + 1, w + 2), -np.inf)
    with np.errstate(divide="ignore"):
        rows[0, 1:-1] = np.log(mass)
    for k in range(1, steps + 1):
        right = mass * p
        left = mass * q
        frozen_lo += left[0]
        frozen_hi += right[-1]
        new = np.zeros(w)
        new[1:] = right[:-1]
        new[:-1] += left[1:]
        mass = new
        with np.errstate(divide="ignore"):
            rows[k, 1:-1] = np.log(mass)
            rows[k, 0] = np.log(frozen_lo) if frozen_lo > 0.0 else -np.inf
            rows[k, -1] = np.log(frozen_hi) if frozen_hi > 0.0 else -np.inf
    return DpTable("occupation", steps, lo, hi, rows)


def _check_table_size(steps: int, width: int) -> None:
    if (steps + 1) * width > _MAX_TABLE_ENTRIES:
        raise DomainError(
            f"table of {(steps + 1)} x {width} cells exceeds the materialization "
            "cap; use the streaming operations instead"
        )


def bridge_log_prob(
    env: Environment,
    n: int,
    truncation: float | None = None,
    with_error_bound: bool = False,
):
    """Log probability that the walk returns to the origin after 2n steps.

    Parameters
    ----------
    env : Environment
        Window must cover ``[-2n, 2n]``.
    n : int
        Half length of the bridge; the event is ``X_{2n} = 0``.
    truncation : float, optional
        Relative per-step floor below which sites are dropped, with the
        total dropped mass tracked rigorously.  ``None`` selects the
        default policy: no truncation below ``n = 4096``, a floor of
        1e-300 at or above it.  Pass ``0.0`` to force truncation off.
    with_error_bound : bool
        When set, return ``(log_prob, log_discarded_bound)`` where the
        second element bounds from above the log of all probability mass
        unaccounted for by truncation (``-inf`` when nothing was dropped).
        The true probability ``P`` then satisfies
        ``exp(log_prob) <= P <= exp(log_prob) + exp(log_discarded_bound)``.

    Notes
    -----
    Every bridge path stays within ``[-n, n]``, so the propagation runs on
    that sub-window even though the documented window requirement is the
    conservative ``[-2n, 2n]``.
    """
    if n < 0:
        raise DomainError("n must be nonnegative")
    env.require_window(-2 * n, 2 * n)
    if n == 0:
        return (0.0, -np.inf) if with_error_bound else 0.0
    if truncation is None:
        truncation = _AUTO_TRUNCATION_THRESHOLD if n >= _AUTO_TRUNCATION_N else 0.0
    om = env.slice(-n, n)
    mass, scale, disc_log, _ = _forward_killing(om, n, 2 * n, trunc=truncation)
    logp = _final_log(mass, scale, n)
    return (logp, disc_log) if with_error_bound else logp


def confined_log_prob(
    env: Environment, steps: int, M: int, require_bridge: bool = False
) -> float:
    """Log probability that ``max |X_k|`` over ``k <= steps`` stays below M.

    Parameters
    ----------
    env : Environment
        Window must cover ``[-M, M]``.
    steps : int
        Total number of steps (pass an even count ``2n`` when combining
        with the return event).
    M : int
        Strict confinement threshold; the walk is killed on first touching
        ``+-M``.
    require_bridge : bool
        When set, additionally require ``X_steps = 0``; ``steps`` must then
        be even.

    Returns
    -------
    float
        ``log P``; ``-inf`` when the event is impossible (for example
        ``M = 1`` with any positive number of steps).
    """
    if steps < 0:
        raise DomainError("steps must be nonnegative")
    if M < 1:
        raise DomainError("M must be at least 1")
    if require_bridge and steps % 2 != 0:
        raise ParityError(f"bridge event needs an even step count, got {steps}")
    env.require_window(-M, M)
    om = env.slice(-(M - 1), M - 1)
    mass, scale, _, _ = _forward_killing(om, M - 1, steps)
    return _final_log(mass, scale, M - 1 if require_bridge else None)


def max_disp_bridge_cdf(
    env: Environment, n: int, m_values: np.ndarray | None = None
) -> np.ndarray:
    """CDF of the maximal displacement of a 2n-step bridge.

    Entry ``i`` is ``P(max_k |X_k| < M_i | X_{2n} = 0)`` where ``M_i`` is
    ``m_values[i]``, or ``i + 1`` when ``m_values`` is omitted (the full
    grid ``M = 1 .. 2n+1``).  The conditional CDF is exactly 1 for every
    ``M > n`` since a bridge cannot stray past ``n``; those entries are
    filled without propagation.

    Raises
    ------
    DegenerateBridgeError
        If the bridge event itself has zero probability, which uniform
        ellipticity rules out for genuine environments.
    """
    if n < 1:
        raise DomainError("n must be at least 1")
    env.require_window(-2 * n, 2 * n)
    bridge_lp = bridge_log_prob(env, n)
    if bridge_lp == -np.inf:
        raise DegenerateBridgeError(
            "conditioning event X_{2n} = 0 has zero probability"
        )
    if m_values is None:
        ms = np.arange(1, 2 * n + 2)
    else:
        ms = np.asarray(m_values, dtype=np.int64)
        if ms.size == 0 or np.any(ms < 1):
            raise DomainError("m_values must be positive integers")
    out = np.empty(ms.size)
    for i, m in enumerate(ms):
        if m > n:
            out[i] = 1.0
        else:
            joint = confined_log_prob(env, 2 * n, int(m), require_bridge=True)
            out[i] = min(1.0, float(np.exp(joint - bridge_lp)))
    return out


def bridge_max_quantile(env: Environment, n: int, q: float) -> int:
    """Smallest m with ``P(max |X_k| <= m | X_{2n} = 0) >= q``.

    Exact integer quantile of the conditional maximal displacement,
    located by bisection over confinement propagations (each probe is one
    exact computation, so the result carries no sampling error).
    """
    if not (0.0 < q < 1.0):
        raise DomainError("q must lie strictly between 0 and 1")
    if n < 1:
        raise DomainError("n must be at least 1")
    env.require_window(-2 * n, 2 * n)
    bridge_lp = bridge_log_prob(env, n)
    if bridge_lp == -np.inf:
        raise DegenerateBridgeError(
            "conditioning event X_{2n} = 0 has zero probability"
        )

    def cdf_at(m: int) -> float:
        joint = confined_log_prob(env, 2 * n, m + 1, require_bridge=True)
        return float(np.exp(joint - bridge_lp))

    lo, hi = 1, n
    while lo < hi:
        mid = (lo + hi) // 2
        if cdf_at(mid) >= q:
            hi = mid
        else:
            lo = mid + 1
    return lo


def hitting_cdf(env: Environment, target: int, horizon: int) -> np.ndarray:
    """CDF of the first passage time to ``target``: entry k is P(T <= k).

    The hitting time counts from 0, so ``P(T <= 0) = 1`` exactly when the
    target is the origin.  Probabilities are accumulated in plain linear
    arithmetic; values below roughly 1e-300 underflow to 0, which is far
    outside the supported horizons.

    Parameters
    ----------
    env : Environment
        Window must cover ``[-horizon, target]`` for a positive target or
        ``[target, horizon]`` for a negative one (the reachable set).
    target : int
    horizon : int
        Largest step count in the returned array (length ``horizon + 1``).
    """
    if horizon < 0:
        raise DomainError("horizon must be nonnegative")
    cdf = np.zeros(horizon + 1)
    if target == 0:
        cdf[:] = 1.0
        return cdf
    if horizon == 0:
        return cdf
    if target > 0:
        env.require_window(-horizon, target)
        om = env.slice(-horizon, target - 1)
        _, absorbed, _ = _forward_absorbing(om, horizon, horizon)
    else:
        env.require_window(target, horizon)
        om = env.slice(target + 1, horizon)
        absorbed, _, _ = _forward_absorbing(om, -target - 1, horizon)
    cdf[1:] = np.cumsum(absorbed)
    return cdf


def exit_prob_closed_form(
    env: Environment, a: int, x: int, b: int, first: str = "a"
) -> float:
    """Probability that a walk from x hits a before b (or b before a).

    Evaluates the summed products of odds closed form in the log domain:
    with ``S_j = sum of log rho_i for i in (a, j]`` the probability of
    hitting ``a`` first is ``sum_{j=x..b-1} exp(S_j) / sum_{j=a..b-1}
    exp(S_j)``, and the complementary formula replaces the numerator range
    with ``j = a..x-1``.  ``first`` selects which endpoint's probability is
    returned; both are computed independently rather than as one minus the
    other.

    Parameters
    ----------
    env : Environment
        Window must cover ``[a, b]``.
    a, x, b : int
        Strictly ordered ``a < x < b``.
    first : {"a", "b"}
    """
    if not (a < x < b):
        raise OrderingError(f"need a < x < b, got a={a}, x={x}, b={b}")
    if first not in ("a", "b"):
        raise DomainError(f"first must be 'a' or 'b', got {first!r}")
    env.require_window(a, b)
    interior = env.slice(a + 1, b - 1)
    if np.any(interior <= 0.0) or np.any(interior >= 1.0):
        raise DomainError("interior sites must have omega strictly in (0, 1)")
    log_rho = np.log1p(-interior) - np.log(interior)
    # S[j - a] = sum of log rho over sites a+1 .. j, with S[0] = 0
    s = np.concatenate(([0.0], np.cumsum(log_rho)))
    den = _logsumexp(s)
    if first == "a":
        num = _logsumexp(s[x - a :])
    else:
        num = _logsumexp(s[: x - a])
    return float(np.exp(num - den))
