"""Stationary gap distributions: products of independent exponentials.

Three families are constructed exactly from a drift sequence:

* the unique stationary gap law of an N-particle system (exists iff the
  stability condition holds), with rates 2k(gbar_k - gbar_N);
* the one-parameter family for the infinite system, with rates
  2(g_1+...+g_k) + ka for any a above the stationarity bound
  -2 inf_k gbar_k (a = 0 is admitted separately, see ``infinite_rates``);
* the m^2-particle approximating system whose uniform tail drift is chosen
  so the average drift is exactly -a/2, making its stationary gap law agree
  with the infinite family on the first m gaps.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from .drifts import DriftSpec, drift_values, inf_mean_drift, mean_drifts, partial_sums
from .rng import RngSpec

__all__ = [
    "GapLaw",
    "ApproximantSpec",
    "StabilityError",
    "StationarityBoundError",
    "stability_check",
    "finite_stationary_rates",
    "infinite_rates",
    "approximant",
    "approximant_rates_direct",
    "sample_gaps",
    "positions_from_gaps",
]

#: Default truncation depth for laws of the infinite system.
DEFAULT_DEPTH = 1000


class StabilityError(ValueError):
    """The finite system has no stationary gap distribution."""

    def __init__(self, message: str, first_violation: int):
        super().__init__(message)
        self.first_violation = first_violation


class StationarityBoundError(ValueError):
    """The parameter a does not exceed -2 inf_k gbar_k."""

    def __init__(self, message: str, bound: float):
        super().__init__(message)
        self.bound = bound


@dataclass(frozen=True)
class GapLaw:
    """Product of independent exponentials, one rate per gap index."""

    rates: np.ndarray

    def __post_init__(self):
        rates = np.asarray(self.rates, dtype=float)
        if rates.ndim != 1:
            raise ValueError("rates must be a 1-d vector")
        if not np.all(np.isfinite(rates)) or np.any(rates <= 0.0):
            raise ValueError("all rates must be positive and finite")
        rates.setflags(write=False)
        object.__setattr__(self, "rates", rates)

    def __len__(self) -> int:
        return self.rates.size

    @property
    def means(self) -> np.ndarray:
        """Expected gap sizes 1/lambda_k."""
        return 1.0 / self.rates

    def to_csv(self, path_or_file) -> None:
        """Write rows (k, lambda_k, mean_k) with a header line."""
        if hasattr(path_or_file, "write"):
            self._write_csv(path_or_file)
        else:
            with open(path_or_file, "w", newline="") as fh:
                self._write_csv(fh)

    def _write_csv(self, fh: io.TextIOBase) -> None:
        fh.write("k,lambda_k,mean_k\n")
        for k, rate in enumerate(self.rates, start=1):
            fh.write(f"{k},{float(rate)!r},{float(1.0 / rate)!r}\n")


def stability_check(spec: DriftSpec, n_particles: int) -> bool:
    """True iff gbar_k > gbar_N strictly for every k < N."""
    if n_particles < 2:
        raise ValueError(f"need at least 2 particles, got {n_particles}")
    gbar = mean_drifts(spec, n_particles)
    return bool(np.all(gbar[:-1] > gbar[-1]))


def finite_stationary_rates(spec: DriftSpec, n_particles: int) -> GapLaw:
    """Rates 2k(gbar_k - gbar_N) of the unique N-particle stationary gap law.

    Raises StabilityError naming the first rank at which the strict
    inequality gbar_k > gbar_N fails.
    """
    if n_particles < 2:
        raise ValueError(f"need at least 2 particles, got {n_particles}")
    gbar = mean_drifts(spec, n_particles)
    diffs = gbar[:-1] - gbar[-1]
    bad = np.nonzero(diffs <= 0.0)[0]
    if bad.size:
        k = int(bad[0]) + 1
        raise StabilityError(
            f"no stationary gap distribution for N={n_particles}: "
            f"mean drift over the first {k} ranks ({gbar[k - 1]!r}) does not "
            f"exceed the overall mean ({gbar[-1]!r})",
            first_violation=k,
        )
    k = np.arange(1, n_particles)
    return GapLaw(2.0 * k * diffs)


def stationarity_bound(spec: DriftSpec) -> float:
    """The strict lower bound -2 inf_k gbar_k that a must exceed."""
    return -2.0 * inf_mean_drift(spec)


def infinite_rates(
    spec: DriftSpec,
    a: float,
    n: int = DEFAULT_DEPTH,
    *,
    allow_degenerate: bool = False,
) -> GapLaw:
    """First n rates 2(g_1+...+g_k) + ka of the infinite-system family.

    Requires a strictly above -2 inf_k gbar_k.  The boundary member a = 0
    (rates twice the drift partial sums) is only constructed when
    ``allow_degenerate`` is set; it needs every partial sum positive, which
    is checked up to the truncation depth n.
    """
    if n < 1:
        raise ValueError(f"truncation depth must be >= 1, got {n}")
    a = float(a)
    bound = stationarity_bound(spec)
    if a == 0.0 and allow_degenerate:
        if inf_mean_drift(spec) != 0.0:
            raise StationarityBoundError(
                f"the a=0 law needs inf mean drift exactly 0, got {inf_mean_drift(spec)!r}",
                bound=bound,
            )
        sums = partial_sums(spec, n)
        if np.any(sums <= 0.0):
            k = int(np.nonzero(sums <= 0.0)[0][0]) + 1
            raise StationarityBoundError(
                f"the a=0 law needs positive drift partial sums; sum over the "
                f"first {k} ranks is {sums[k - 1]!r} (checked up to depth {n})",
                bound=bound,
            )
        return GapLaw(2.0 * sums)
    if not a > bound:
        raise StationarityBoundError(
            f"a={a!r} is not above the stationarity bound: need "
            f"a > -2*inf(mean drifts) = {bound!r}",
            bound=bound,
        )
    k = np.arange(1, n + 1)
    return GapLaw(2.0 * partial_sums(spec, n) + k * a)


def _tail_drift(spec: DriftSpec, a: float, m: int) -> float:
    s_m = float(partial_sums(spec, m)[-1])
    return -(m * m) * a / (2.0 * (m * m - m)) - s_m / (m * m - m)


@dataclass(frozen=True)
class ApproximantSpec:
    """The m^2-particle system approximating the infinite one.

    ``drifts`` keeps the original drifts on ranks 1..m and the balancing
    value ``tail_drift`` on ranks m+1..m^2; ``rates`` is its stationary gap
    law (m^2 - 1 entries), whose first m rates coincide with the infinite
    family at the same a.
    """

    base: DriftSpec
    a: float
    m: int
    drifts: np.ndarray = field(repr=False)
    tail_drift: float
    rates: np.ndarray = field(repr=False)

    def __post_init__(self):
        for name in ("drifts", "rates"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n_particles(self) -> int:
        return self.m * self.m

    def gap_law(self) -> GapLaw:
        return GapLaw(self.rates)


def approximant(spec: DriftSpec, a: float, m: int) -> ApproximantSpec:
    """Build the m^2-particle approximating system for parameter a.

    The tail drift is the unique value making the average of all m^2 drifts
    equal -a/2 exactly; the stationary rates then extend the infinite family:
    identical on the first m gaps and decaying linearly to the top,
    lambda_k = (m^2-k)/(m-1) * (2 gbar_m + a) for k > m.
    """
    if m < 2:
        raise ValueError(f"m must be >= 2, got {m}")
    a = float(a)
    bound = stationarity_bound(spec)
    if not a > bound:
        raise StationarityBoundError(
            f"a={a!r} is not above the stationarity bound: need "
            f"a > -2*inf(mean drifts) = {bound!r}",
            bound=bound,
        )
    n = m * m
    b_m = _tail_drift(spec, a, m)
    drifts = np.full(n, b_m)
    drifts[:m] = drift_values(spec, m)

    head = infinite_rates(spec, a, m).rates
    gbar_m = float(mean_drifts(spec, m)[-1])
    k_tail = np.arange(m + 1, n, dtype=float)
    tail = (n - k_tail) / (m - 1) * (2.0 * gbar_m + a)
    rates = np.concatenate([head, tail])
    if np.any(rates <= 0.0):
        k = int(np.nonzero(rates <= 0.0)[0][0]) + 1
        raise StationarityBoundError(
            f"rate {k} of the approximating system is not positive; "
            f"a={a!r} is too close to the bound {bound!r}",
            bound=bound,
        )
    return ApproximantSpec(base=spec, a=a, m=m, drifts=drifts, tail_drift=b_m, rates=rates)


def approximant_rates_direct(approx: ApproximantSpec) -> np.ndarray:
    """Rates recomputed from the defining formula 2(G_k - k*mean(drifts)).

    G_k are partial sums of the approximant's own drift vector and the mean
    is its empirical average.  Used to cross-check the closed forms stored
    in ``ApproximantSpec.rates``; the two agree to ~1e-12 relative error.
    """
    g = approx.drifts
    mean = g.mean()
    k = np.arange(1, g.size)
    return 2.0 * (np.cumsum(g)[:-1] - k * mean)


def exponential_from_uniform(u: np.ndarray, rates: np.ndarray) -> np.ndarray:
    """Inverse-CDF map of uniforms on [0,1) to Exp(rate) samples.

    u = 0 is nudged to the smallest positive uniform so samples stay
    strictly positive.
    """
    u = np.maximum(u, 2.0 ** -53)
    return -np.log(u) / rates


def sample_gaps(law: GapLaw, count: int, rng: RngSpec) -> np.ndarray:
    """Draw ``count`` independent gap configurations, one per row.

    Column k is Exp(lambda_k) via the inverse CDF -log(U)/lambda_k, so the
    output is a deterministic function of (master seed, stream).
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    gen = rng.generator()
    u = gen.random((count, len(law)))
    return exponential_from_uniform(u, law.rates)


def positions_from_gaps(gaps) -> np.ndarray:
    """Cumulative positions 0, z_1, z_1+z_2, ... from nonnegative gaps."""
    arr = np.asarray(gaps, dtype=float)
    if arr.ndim != 1:
        raise ValueError("gaps must be a 1-d vector")
    if arr.size and (not np.all(np.isfinite(arr)) or np.any(arr < 0.0)):
        raise ValueError("gaps must be finite and nonnegative")
    out = np.empty(arr.size + 1)
    out[0] = 0.0
    np.cumsum(arr, out=out[1:])
    return out
