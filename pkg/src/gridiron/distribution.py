"""Best-fit score distributions: a registry of density families fit by
maximum likelihood, selected by minimum negative log-likelihood, then
simulated to produce empirical percentile bands.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy import optimize, stats

DEFAULT_MIN_SAMPLE = 4
SIMPLEX_MAX_ITER = 500
SIMPLEX_TOL = 1e-8
BETA_MARGIN = 0.025


class DistributionError(ValueError):
    pass


class DegenerateSample(DistributionError):
    pass


class Unfittable(DistributionError):
    pass


@dataclass
class FitResult:
    family: str
    params: tuple[float, ...]
    loss: float  # negative log-likelihood
    converged: bool
    n: int


@dataclass
class ScoreSample:
    player_id: str
    values: tuple[float, ...]
    donors: tuple[str, ...] = ()
    cross_position_fallback: bool = False

    def __post_init__(self) -> None:
        if not self.values:
            raise DistributionError("score sample must be non-empty")
        if not all(math.isfinite(v) for v in self.values):
            raise DistributionError("score sample must be finite")


class DistributionFamily:
    """One fittable density family.

    ``fitter`` maps samples to params (closed form or numeric MLE);
    ``frozen`` maps params to a scipy frozen distribution used for logpdf,
    sampling and quantiles; ``supports`` guards infeasible samples.
    """

    def __init__(
        self,
        name: str,
        param_names: tuple[str, ...],
        fitter: Callable[[np.ndarray], tuple[float, ...]],
        frozen: Callable[[tuple[float, ...]], object],
        supports: Callable[[np.ndarray], bool] = lambda x: True,
        has_quantile: bool = True,
    ):
        self.name = name
        self.param_names = param_names
        self._fitter = fitter
        self._frozen = frozen
        self.supports = supports
        self.has_quantile = has_quantile

    def fit(self, samples: np.ndarray) -> tuple[float, ...]:
        return self._fitter(np.asarray(samples, dtype=float))

    def log_pdf(self, params: tuple[float, ...], x) -> np.ndarray:
        return self._frozen(params).logpdf(np.asarray(x, dtype=float))

    def nll(self, params: tuple[float, ...], samples) -> float:
        lp = self.log_pdf(params, samples)
        if not np.all(np.isfinite(lp)):
            return float("inf")
        return float(-np.sum(lp))

    def sample(self, params: tuple[float, ...], rng: np.random.Generator, n: int) -> np.ndarray:
        if n == 0:
            return np.array([])
        return np.asarray(self._frozen(params).rvs(size=n, random_state=rng))

    def quantile(self, params: tuple[float, ...], p) -> np.ndarray:
        if not self.has_quantile:
            raise DistributionError(f"{self.name} has no closed-form quantile")
        return np.asarray(self._frozen(params).ppf(p))


def _simplex_mle(
    nll: Callable[[np.ndarray], float], x0: Sequence[float]
) -> tuple[np.ndarray, bool]:
    """Derivative-free Nelder-Mead minimization from a moment-matched start."""
    result = optimize.minimize(
        nll,
        np.asarray(x0, dtype=float),
        method="Nelder-Mead",
        options={"maxiter": SIMPLEX_MAX_ITER, "xatol": SIMPLEX_TOL, "fatol": SIMPLEX_TOL},
    )
    return result.x, bool(np.isfinite(result.fun))


def _positive(x: np.ndarray) -> bool:
    return bool(np.min(x) > 0)


def _non_negative(x: np.ndarray) -> bool:
    return bool(np.min(x) >= 0)


def _fit_normal(x: np.ndarray) -> tuple[float, ...]:
    return (float(np.mean(x)), float(np.std(x)))


def _fit_lognormal(x: np.ndarray) -> tuple[float, ...]:
    logs = np.log(x)
    return (float(np.mean(logs)), float(np.std(logs)))


def _fit_exponential(x: np.ndarray) -> tuple[float, ...]:
    return (float(np.mean(x)),)


def _fit_uniform(x: np.ndarray) -> tuple[float, ...]:
    return (float(np.min(x)), float(np.max(x)))


def _fit_rayleigh(x: np.ndarray) -> tuple[float, ...]:
    return (float(np.sqrt(np.mean(x**2) / 2.0)),)


def _fit_wald(x: np.ndarray) -> tuple[float, ...]:
    mu = float(np.mean(x))
    lam = float(len(x) / np.sum(1.0 / x - 1.0 / mu))
    return (mu, lam)


def _numeric_fitter(
    make_nll: Callable[[np.ndarray], Callable[[np.ndarray], float]],
    init: Callable[[np.ndarray], Sequence[float]],
) -> Callable[[np.ndarray], tuple[float, ...]]:
    def fit(x: np.ndarray) -> tuple[float, ...]:
        theta, ok = _simplex_mle(make_nll(x), init(x))
        if not ok:
            raise DistributionError("numeric MLE failed to converge")
        return tuple(float(t) for t in theta)

    return fit


def _logistic_nll(x: np.ndarray):
    def nll(theta: np.ndarray) -> float:
        loc, log_scale = theta
        lp = stats.logistic.logpdf(x, loc=loc, scale=np.exp(log_scale))
        return float(-np.sum(lp))

    return nll


def _gamma_nll(x: np.ndarray):
    def nll(theta: np.ndarray) -> float:
        lp = stats.gamma.logpdf(x, a=np.exp(theta[0]), scale=np.exp(theta[1]))
        total = -np.sum(lp)
        return float(total) if np.isfinite(total) else float("inf")

    return nll


def _weibull_nll(x: np.ndarray):
    def nll(theta: np.ndarray) -> float:
        lp = stats.weibull_min.logpdf(x, c=np.exp(theta[0]), scale=np.exp(theta[1]))
        total = -np.sum(lp)
        return float(total) if np.isfinite(total) else float("inf")

    return nll


def _chi_nll(x: np.ndarray):
    def nll(theta: np.ndarray) -> float:
        lp = stats.chi.logpdf(x, df=np.exp(theta[0]), scale=np.exp(theta[1]))
        total = -np.sum(lp)
        return float(total) if np.isfinite(total) else float("inf")

    return nll


def _vonmises_nll(x: np.ndarray):
    def nll(theta: np.ndarray) -> float:
        kappa, loc, log_scale = theta
        if kappa <= 0:
            return float("inf")
        scale = np.exp(log_scale)
        # the density is circular with period 2*pi*scale; keep the whole
        # sample inside one period or shrinking the scale wraps the data
        # onto itself and the likelihood diverges
        if np.max(np.abs(x - loc)) > math.pi * scale:
            return float("inf")
        lp = stats.vonmises.logpdf(x, kappa=kappa, loc=loc, scale=scale)
        total = -np.sum(lp)
        return float(total) if np.isfinite(total) else float("inf")

    return nll


def _beta_bounds(x: np.ndarray) -> tuple[float, float]:
    span = float(np.max(x) - np.min(x))
    margin = BETA_MARGIN * span
    return float(np.min(x) - margin), float(np.max(x) + margin)


def _fit_beta_scaled(x: np.ndarray) -> tuple[float, ...]:
    lo, hi = _beta_bounds(x)
    u = (x - lo) / (hi - lo)
    m, v = float(np.mean(u)), float(np.var(u))
    v = max(v, 1e-6)
    common = max(m * (1 - m) / v - 1.0, 0.1)
    init = [math.log(max(m * common, 0.05)), math.log(max((1 - m) * common, 0.05))]

    def nll(theta: np.ndarray) -> float:
        lp = stats.beta.logpdf(u, a=np.exp(theta[0]), b=np.exp(theta[1])) - math.log(hi - lo)
        total = -np.sum(lp)
        return float(total) if np.isfinite(total) else float("inf")

    theta, ok = _simplex_mle(nll, init)
    if not ok:
        raise DistributionError("beta fit failed")
    return (float(np.exp(theta[0])), float(np.exp(theta[1])), lo, hi)


def registry() -> list[DistributionFamily]:
    """The shipped density families, extensible by appending new entries."""
    fams = [
        DistributionFamily(
            "normal", ("mu", "sigma"), _fit_normal,
            lambda p: stats.norm(loc=p[0], scale=p[1]),
        ),
        DistributionFamily(
            "lognormal", ("mu_log", "sigma_log"), _fit_lognormal,
            lambda p: stats.lognorm(s=p[1], scale=math.exp(p[0])),
            supports=_positive,
        ),
        DistributionFamily(
            "gamma", ("shape", "scale"),
            _numeric_fitter(
                _gamma_nll,
                lambda x: [
                    math.log(max(np.mean(x) ** 2 / max(np.var(x), 1e-9), 1e-3)),
                    math.log(max(np.var(x) / max(np.mean(x), 1e-9), 1e-6)),
                ],
            ),
            lambda p: stats.gamma(a=math.exp(p[0]), scale=math.exp(p[1])),
            supports=_positive,
        ),
        DistributionFamily(
            "weibull", ("shape", "scale"),
            _numeric_fitter(_weibull_nll, lambda x: [math.log(1.2), math.log(max(np.mean(x), 1e-9))]),
            lambda p: stats.weibull_min(c=math.exp(p[0]), scale=math.exp(p[1])),
            supports=_positive,
        ),
        DistributionFamily(
            "rayleigh", ("sigma",), _fit_rayleigh,
            lambda p: stats.rayleigh(scale=p[0]),
            supports=_non_negative,
        ),
        DistributionFamily(
            "exponential", ("mean",), _fit_exponential,
            lambda p: stats.expon(scale=p[0]),
            supports=_non_negative,
        ),
        DistributionFamily(
            "uniform", ("lo", "hi"), _fit_uniform,
            lambda p: stats.uniform(loc=p[0], scale=p[1] - p[0]),
        ),
        DistributionFamily(
            "logistic", ("loc", "scale"),
            _numeric_fitter(
                _logistic_nll,
                lambda x: [float(np.mean(x)), math.log(max(np.std(x) * math.sqrt(3) / math.pi, 1e-9))],
            ),
            lambda p: stats.logistic(loc=p[0], scale=math.exp(p[1])),
        ),
        DistributionFamily(
            "chi", ("df", "scale"),
            _numeric_fitter(_chi_nll, lambda x: [math.log(2.0), math.log(max(np.std(x), 1e-9))]),
            lambda p: stats.chi(df=math.exp(p[0]), scale=math.exp(p[1])),
            supports=_positive,
        ),
        DistributionFamily(
            "wald", ("mu", "lam"), _fit_wald,
            lambda p: stats.invgauss(mu=p[0] / p[1], scale=p[1]),
            supports=_positive,
        ),
        DistributionFamily(
            "vonmises", ("kappa", "loc", "log_scale"),
            _numeric_fitter(
                _vonmises_nll,
                lambda x: [
                    1.0,
                    float(np.mean(x)),
                    # start wide enough that the sample fits in one period
                    math.log(max(np.std(x), 1.05 * np.max(np.abs(x - np.mean(x))) / math.pi, 1e-9)),
                ],
            ),
            lambda p: stats.vonmises(kappa=p[0], loc=p[1], scale=math.exp(p[2])),
        ),
        DistributionFamily(
            "beta_scaled", ("a", "b", "lo", "hi"), _fit_beta_scaled,
            lambda p: _ScaledBeta(p[0], p[1], p[2], p[3]),
        ),
    ]
    return fams


class _ScaledBeta:
    """Beta density rescaled from [0, 1] to [lo, hi]."""

    def __init__(self, a: float, b: float, lo: float, hi: float):
        self.a, self.b, self.lo, self.hi = a, b, lo, hi
        self._span = hi - lo

    def logpdf(self, x):
        u = (np.asarray(x, dtype=float) - self.lo) / self._span
        return stats.beta.logpdf(u, a=self.a, b=self.b) - math.log(self._span)

    def rvs(self, size: int, random_state=None):
        u = stats.beta.rvs(a=self.a, b=self.b, size=size, random_state=random_state)
        return self.lo + u * self._span

    def ppf(self, p):
        return self.lo + stats.beta.ppf(p, a=self.a, b=self.b) * self._span


def registry_by_name() -> dict[str, DistributionFamily]:
    return {f.name: f for f in registry()}


def fit_best(
    sample: ScoreSample,
    families: Sequence[DistributionFamily] | None = None,
    min_size: int = DEFAULT_MIN_SAMPLE,
) -> tuple[FitResult, list[FitResult]]:
    """Fit every feasible family by maximum likelihood and return the
    converged fit with minimum negative log-likelihood, plus all candidates."""
    values = np.asarray(sample.values, dtype=float)
    if len(values) < min_size:
        raise DistributionError(f"need at least {min_size} scores, got {len(values)}")
    if float(np.max(values) - np.min(values)) == 0.0:
        raise DegenerateSample("all sample values are identical")
    if families is None:
        families = registry()
    candidates: list[FitResult] = []
    for family in families:
        if not family.supports(values):
            continue
        try:
            params = family.fit(values)
            loss = family.nll(params, values)
            converged = math.isfinite(loss)
        except (DistributionError, FloatingPointError, ValueError):
            candidates.append(FitResult(family.name, (), float("inf"), False, len(values)))
            continue
        candidates.append(FitResult(family.name, params, loss, converged, len(values)))
    converged = [c for c in candidates if c.converged]
    if not converged:
        raise Unfittable("no density family converged on this sample")
    best = min(converged, key=lambda c: (c.loss, c.family))
    return best, candidates


def similar_players(
    player_id: str,
    position: str,
    mean_projection: float,
    pool: Mapping[str, tuple[str, float, Sequence[float]]],
    k: int = 3,
) -> ScoreSample:
    """Concatenate histories of the k donors whose mean projection is closest
    to the player's; same-position first, any position as a flagged fallback.

    ``pool`` maps player_id to (position, mean_projection, score history).
    """
    if not pool:
        raise DistributionError("empty donor pool")
    entries = [(pid, pos, proj, hist) for pid, (pos, proj, hist) in sorted(pool.items()) if pid != player_id]
    same_pos = [e for e in entries if e[1] == position]
    fallback = not same_pos
    chosen_from = entries if fallback else same_pos
    ranked = sorted(chosen_from, key=lambda e: (abs(e[2] - mean_projection), e[0]))[:k]
    values: list[float] = []
    donors = []
    for pid, _, _, hist in ranked:
        values.extend(float(v) for v in hist)
        donors.append(pid)
    if not values:
        raise DistributionError("donor histories are empty")
    return ScoreSample(
        player_id=player_id,
        values=tuple(values),
        donors=tuple(donors),
        cross_position_fallback=fallback,
    )


def simulate(fit: FitResult, n: int = 1000, seed: int = 0,
             families: Mapping[str, DistributionFamily] | None = None) -> np.ndarray:
    """n seeded draws from the fitted family."""
    if not fit.converged:
        raise DistributionError("cannot simulate from a non-converged fit")
    if families is None:
        families = registry_by_name()
    family = families[fit.family]
    rng = np.random.default_rng(seed)
    return family.sample(fit.params, rng, n)


def percentiles(samples: Sequence[float], probs: Sequence[float] = (0.15, 0.85)) -> list[float]:
    """Linear-interpolation empirical quantiles at index p * (n - 1)."""
    values = np.sort(np.asarray(samples, dtype=float))
    if len(values) == 0:
        raise DistributionError("empty sample")
    out = []
    for p in probs:
        if not (0.0 < p < 1.0):
            raise DistributionError(f"probability {p} outside (0, 1)")
        idx = p * (len(values) - 1)
        lo = int(math.floor(idx))
        hi = int(math.ceil(idx))
        frac = idx - lo
        out.append(float(values[lo] * (1 - frac) + values[hi] * frac))
    return out


def curve_export(
    fit: FitResult,
    sample_min: float,
    sample_max: float,
    sample_std: float,
    points: int = 200,
    families: Mapping[str, DistributionFamily] | None = None,
) -> list[tuple[float, float]]:
    """Evenly spaced (x, pdf(x)) points over the padded sample range."""
    if families is None:
        families = registry_by_name()
    family = families[fit.family]
    xs = np.linspace(sample_min - sample_std, sample_max + sample_std, points)
    lp = family.log_pdf(fit.params, xs)
    ys = np.where(np.isfinite(lp), np.exp(lp), 0.0)
    return [(float(x), float(y)) for x, y in zip(xs, ys)]
