"""Complex Gaussian process regression on frequency-response data.

Given noisy observations y_i = g(z_i) + e_i of a transfer function at sites
z_i on or outside the unit circle, with a ComplexKernel prior on g and proper
noise of variance sigma_e^2, this module provides

* the strictly linear posterior (``fit`` / ``predict_sl``): the complex LMMSE
  estimator using y only,
    mean(z) = sum_i k(z, z_i) [K_yy^{-1} y]_i,
    var(z)  = k(z, z) - u K_yy^{-1} u^H,   u_i = k(z, z_i),
  with K_yy = k(z_i, z_j) + sigma_e^2 I;

* the widely linear refinement (``predict_wl``): conditioning on both y and
  y* through the augmented covariance [[A, B], [B*, A*]] with A = K_yy and
  B = Kt_yy the complementary Gram.  Writing W = A^{-1}B, the Schur complement
  P = A - B W* measures the refinement's advantage (``schur_P``); the widely
  linear mean and variances reduce to the strictly linear ones plus
  corrections through the Hermitian matrix P* = conj(P):

    mean_wl(z) = mean_sl(z) + d Pbar^+ s,      d = v - (u A^{-1}) B,
    var_wl(z)  = var_sl(z) - d Pbar^+ d^H,     s = conj(y - B conj(alpha)),

  where v_i = kt(z, z_i) and Pbar^+ is a truncated pseudo-inverse of
  conj(P) (eigenvalues below p_floor * ||P|| are dropped — P is typically
  near-singular for conjugate-symmetric priors, which is exactly the regime in
  which the plain inverse is numerically unstable);

* confidence ellipsoids (``ellipsoid``): disks |w - mean(z)| <= eta * sigma(z)
  which cover the true response with probability >= 1 - 1/eta^2 (Markov bound,
  no Gaussianity needed), summarized as magnitude/phase intervals;

* the log marginal likelihood and a derivative-free hyperparameter search
  (``log_marginal_likelihood`` / ``optimize_hyperparameters``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, NamedTuple, Sequence

import numpy as np
import scipy.linalg
import scipy.optimize

from ._linalg import ConditioningError, chol_factor_with_jitter
from .kernels import ComplexKernel, gram

__all__ = [
    "FrequencyDataset",
    "Posterior",
    "EllipsoidBound",
    "Domain",
    "Hyperparameters",
    "SchurComplement",
    "WidelyLinearPrediction",
    "ConditioningError",
    "fit",
    "predict_sl",
    "predict_sl_many",
    "schur_P",
    "predict_wl",
    "ellipsoid",
    "log_marginal_likelihood",
    "optimize_hyperparameters",
]

_SITE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class FrequencyDataset:
    """Observation sites z_i (|z_i| >= 1), complex responses y_i, noise variance."""

    sites: np.ndarray
    responses: np.ndarray
    noise_var: float = 0.0

    def __post_init__(self) -> None:
        sites = np.asarray(self.sites, dtype=complex)
        responses = np.asarray(self.responses, dtype=complex)
        if sites.ndim != 1 or responses.ndim != 1:
            raise ValueError("sites and responses must be one-dimensional")
        if sites.size != responses.size:
            raise ValueError(
                f"sites and responses disagree in length: {sites.size} vs {responses.size}"
            )
        if self.noise_var < 0.0:
            raise ValueError(f"noise_var must be nonnegative, got {self.noise_var}")
        if np.any(np.abs(sites) < 1.0 - _SITE_TOL):
            raise ValueError("all observation sites must satisfy |z| >= 1")
        if self.noise_var == 0.0 and sites.size != np.unique(sites).size:
            raise ConditioningError(
                "duplicate observation sites with zero noise give a singular Gram matrix"
            )
        object.__setattr__(self, "sites", sites)
        object.__setattr__(self, "responses", responses)
        object.__setattr__(self, "noise_var", float(self.noise_var))

    def __len__(self) -> int:
        return int(self.sites.size)


@dataclass(eq=False)
class Posterior:
    """Fitted regression state: kernel, data, cached K_yy factorization and K_yy^{-1} y."""

    kernel: ComplexKernel
    dataset: FrequencyDataset
    gram_yy: np.ndarray
    factorization: tuple
    alpha_vec: np.ndarray
    _wl_cache: dict = field(default_factory=dict, repr=False)


class WidelyLinearPrediction(NamedTuple):
    mean: complex
    hermitian_var: float
    complementary_var: complex
    used_fallback: bool


@dataclass(frozen=True)
class SchurComplement:
    """P = K_yy - Kt_yy (K_yy*)^{-1} Kt_yy* and the impropriety diagnostic ||P||_2/||K_yy||_2."""

    matrix: np.ndarray
    impropriety: float


@dataclass(frozen=True)
class EllipsoidBound:
    """Disk |w - center| <= radius summarized as magnitude and phase intervals.

    ``phase_interval`` is ``None`` when the disk contains the origin (every
    phase is possible); otherwise it is centered on the principal-value phase
    of ``center`` with half-width asin(radius/|center|), so its endpoints may
    leave (-pi, pi] when the disk straddles the branch cut.
    """

    center: complex
    radius: float
    eta: float
    mag_interval: tuple[float, float]
    phase_interval: tuple[float, float] | None

    @property
    def phase_is_full_circle(self) -> bool:
        return self.phase_interval is None

    def contains(self, value: complex) -> bool:
        return abs(value - self.center) <= self.radius


def fit(kernel: ComplexKernel, data: FrequencyDataset) -> Posterior:
    """Factor K_yy = k(z_i, z_j) + sigma_e^2 I once and cache K_yy^{-1} y.

    If the factorization fails, a single jitter of 1e-10 times the mean
    diagonal is added before giving up with a ConditioningError.
    """
    if len(data) == 0:
        raise ValueError("cannot fit an empty dataset")
    gram_yy = gram(kernel, data.sites, "hermitian", data.noise_var)
    jitter = 1e-10 * float(np.mean(np.real(np.diag(gram_yy))))
    factorization = chol_factor_with_jitter(gram_yy, jitter)
    alpha_vec = scipy.linalg.cho_solve(factorization, data.responses)
    return Posterior(kernel, data, gram_yy, factorization, alpha_vec)


def _cross_row(post: Posterior, z, part: str = "hermitian") -> np.ndarray:
    evalfn = post.kernel.hermitian_eval if part == "hermitian" else post.kernel.complementary_eval
    return np.asarray(evalfn(z, post.dataset.sites), dtype=complex)


def _check_query(post: Posterior, z: complex) -> None:
    if abs(z) < post.kernel.domain_radius - _SITE_TOL:
        raise ValueError(f"query point {z} lies inside the kernel domain")


def predict_sl(post: Posterior, z: complex) -> tuple[complex, float]:
    """Strictly linear posterior mean and (clamped nonnegative) variance at z."""
    _check_query(post, z)
    u = _cross_row(post, z)
    mean = complex(u @ post.alpha_vec)
    prior = float(np.real(post.kernel.hermitian_eval(z, z)))
    quad = float(np.real(u @ scipy.linalg.cho_solve(post.factorization, np.conj(u))))
    return mean, max(prior - quad, 0.0)


def predict_sl_many(post: Posterior, zs: Sequence[complex]) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized :func:`predict_sl` over a grid of query points."""
    pts = np.asarray(zs, dtype=complex)
    if np.any(np.abs(pts) < post.kernel.domain_radius - _SITE_TOL):
        raise ValueError("query points must lie on or outside the kernel domain")
    cross = np.asarray(
        post.kernel.hermitian_eval(pts[:, None], post.dataset.sites[None, :]), dtype=complex
    )
    means = cross @ post.alpha_vec
    solved = scipy.linalg.cho_solve(post.factorization, np.conj(cross).T)
    quad = np.real(np.einsum("ij,ji->i", cross, solved))
    prior = np.real(np.asarray(post.kernel.hermitian_eval(pts, pts)))
    return means, np.maximum(prior - quad, 0.0)


def _wl_state(post: Posterior, p_floor: float):
    """Cached widely linear solve state for one p_floor (None when P is numerically zero)."""
    key = float(p_floor)
    if key in post._wl_cache:
        return post._wl_cache[key]
    comp = gram(post.kernel, post.dataset.sites, "complementary")
    w_mat = scipy.linalg.cho_solve(post.factorization, comp)  # A^{-1} B
    p_mat = post.gram_yy - comp @ np.conj(w_mat)
    pbar = np.conj(p_mat)
    pbar = 0.5 * (pbar + pbar.conj().T)
    eigvals, eigvecs = np.linalg.eigh(pbar)
    lam_max = float(eigvals[-1])
    scale = float(np.linalg.norm(post.gram_yy, 2))
    if lam_max <= 1e-14 * scale:
        state = None
    else:
        keep = eigvals >= p_floor * lam_max
        basis = eigvecs[:, keep]
        inv_lam = 1.0 / eigvals[keep]
        residual = np.conj(
            post.dataset.responses - comp @ np.conj(post.alpha_vec)
        )  # s = y* - B* A^{-1} y
        correction = basis @ (inv_lam * (basis.conj().T @ residual))  # Pbar^+ s
        state = (comp, basis, inv_lam, correction)
    post._wl_cache[key] = state
    return state


def schur_P(post: Posterior) -> SchurComplement:
    """Schur complement P = A - B (A*)^{-1} B* of the augmented covariance.

    P is Hermitian PSD; its spectral norm relative to ||K_yy||_2 measures how
    much the widely linear estimator can improve on the strictly linear one
    (P = 0 is the maximally improper case: y* is perfectly predictable from y).
    """
    comp = gram(post.kernel, post.dataset.sites, "complementary")
    w_mat = scipy.linalg.cho_solve(post.factorization, comp)
    p_mat = post.gram_yy - comp @ np.conj(w_mat)
    p_mat = 0.5 * (p_mat + p_mat.conj().T)
    ratio = float(np.linalg.norm(p_mat, 2) / np.linalg.norm(post.gram_yy, 2))
    return SchurComplement(p_mat, ratio)


def predict_wl(post: Posterior, z: complex, p_floor: float = 1e-8) -> WidelyLinearPrediction:
    """Widely linear posterior at z: mean, Hermitian variance, complementary variance.

    Eigenvalues of P below ``p_floor * ||P||_2`` are dropped from the inverse
    (truncated pseudo-inverse).  When P is numerically zero altogether —
    nothing survives the floor — the strictly linear prediction is returned
    with ``used_fallback=True`` and a NaN complementary variance.
    """
    _check_query(post, z)
    state = _wl_state(post, p_floor)
    if state is None:
        mean, var = predict_sl(post, z)
        return WidelyLinearPrediction(mean, var, complex(math.nan, math.nan), True)
    comp_gram, basis, inv_lam, correction = state

    u = _cross_row(post, z, "hermitian")
    v = _cross_row(post, z, "complementary")
    mean_sl = complex(u @ post.alpha_vec)
    u_ainv = np.conj(scipy.linalg.cho_solve(post.factorization, np.conj(u)))  # u A^{-1}
    prior = float(np.real(post.kernel.hermitian_eval(z, z)))
    quad_sl = float(np.real(u_ainv @ np.conj(u)))

    d = v - u_ainv @ comp_gram
    d_proj = d @ basis
    mean = mean_sl + complex(d @ correction)
    hermitian_var = max(prior - quad_sl - float(np.sum(inv_lam * np.abs(d_proj) ** 2)), 0.0)

    # complementary error variance: kt(z,z) - u A^{-1} v^T - d Pbar^+ (u^T - B* A^{-1} v^T)
    prior_comp = complex(np.asarray(post.kernel.complementary_eval(z, z)))
    t_vec = scipy.linalg.cho_solve(post.factorization, v)  # A^{-1} v^T
    e_vec = u - np.conj(comp_gram) @ t_vec
    e_proj = basis.conj().T @ e_vec
    complementary_var = prior_comp - complex(u @ t_vec) - complex(d_proj @ (inv_lam * e_proj))
    return WidelyLinearPrediction(mean, hermitian_var, complementary_var, False)


def ellipsoid(post: Posterior, z: complex, eta: float) -> EllipsoidBound:
    """Confidence disk of radius eta * sigma_g(z) around the strictly linear mean.

    By the Markov bound the true response lies inside with probability at
    least 1 - 1/eta^2.  The magnitude interval is [max(0, |c| - r), |c| + r];
    the phase interval has half-width asin(r/|c|) unless the disk contains the
    origin, in which case every phase is possible.
    """
    if eta <= 0.0:
        raise ValueError(f"eta must be positive, got {eta}")
    mean, var = predict_sl(post, z)
    return _disk_bounds(mean, eta * math.sqrt(var), eta)


def _disk_bounds(center: complex, radius: float, eta: float) -> EllipsoidBound:
    mag = abs(center)
    mag_interval = (max(0.0, mag - radius), mag + radius)
    if radius < mag:
        half_width = math.asin(radius / mag)
        phase = math.atan2(center.imag, center.real)
        phase_interval = (phase - half_width, phase + half_width)
    else:
        phase_interval = None
    return EllipsoidBound(center, radius, eta, mag_interval, phase_interval)


@dataclass(frozen=True)
class Domain:
    """Allowed range of one hyperparameter: the positive half-line or an interval.

    Values are validated against the closed hull; the optimizer works in
    unconstrained coordinates (log for positive parameters, logit for
    intervals), so search never leaves the open interior.
    """

    kind: str  # "positive" | "interval"
    lo: float = 0.0
    hi: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in ("positive", "interval"):
            raise ValueError(f"unknown domain kind {self.kind!r}")
        if self.kind == "interval" and not self.lo < self.hi:
            raise ValueError(f"empty interval domain [{self.lo}, {self.hi}]")

    @classmethod
    def positive(cls) -> "Domain":
        return cls("positive")

    @classmethod
    def interval(cls, lo: float, hi: float) -> "Domain":
        return cls("interval", float(lo), float(hi))

    def contains(self, x: float) -> bool:
        if self.kind == "positive":
            return x >= 0.0
        return self.lo <= x <= self.hi

    def to_unconstrained(self, x: float) -> float:
        if self.kind == "positive":
            if x <= 0.0:
                raise ValueError(f"positive-domain value must be > 0 to transform, got {x}")
            return math.log(x)
        frac = (x - self.lo) / (self.hi - self.lo)
        if not 0.0 < frac < 1.0:
            raise ValueError(f"interval-domain value must be strictly interior, got {x}")
        return math.log(frac / (1.0 - frac))

    def from_unconstrained(self, t: float) -> float:
        if self.kind == "positive":
            return math.exp(min(max(t, -690.0), 690.0))
        frac = 1.0 / (1.0 + math.exp(-min(max(t, -36.0), 36.0)))
        return self.lo + (self.hi - self.lo) * frac


@dataclass(frozen=True, eq=False)
class Hyperparameters:
    """Named real parameters, each constrained to its declared domain."""

    values: Mapping[str, float]
    domains: Mapping[str, Domain]

    def __post_init__(self) -> None:
        values = dict(self.values)
        domains = dict(self.domains)
        if set(values) != set(domains):
            raise ValueError(
                f"hyperparameter names {sorted(values)} do not match domains {sorted(domains)}"
            )
        for name, val in values.items():
            if not domains[name].contains(val):
                raise ValueError(f"hyperparameter {name}={val} outside its domain")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "domains", domains)

    def as_dict(self) -> dict[str, float]:
        return dict(self.values)

    def replace(self, **updates: float) -> "Hyperparameters":
        merged = {**self.values, **updates}
        return Hyperparameters(merged, self.domains)


KernelFamily = Callable[[Mapping[str, float]], ComplexKernel]


def log_marginal_likelihood(
    kernel_family: KernelFamily,
    theta: Hyperparameters | Mapping[str, float],
    data: FrequencyDataset,
) -> float:
    """L(theta) = -1/2 (y^H K_yy^{-1} y + log det K_yy + n log 2 pi).

    A failed factorization returns -inf, which the optimizer treats as the
    worst possible value.
    """
    values = theta.as_dict() if isinstance(theta, Hyperparameters) else dict(theta)
    kernel = kernel_family(values)
    n = len(data)
    if n == 0:
        raise ValueError("cannot evaluate the likelihood of an empty dataset")
    gram_yy = gram(kernel, data.sites, "hermitian", data.noise_var)
    try:
        factor = scipy.linalg.cho_factor(gram_yy, lower=True)
    except (np.linalg.LinAlgError, ValueError):
        return -math.inf
    quad = float(np.real(np.conj(data.responses) @ scipy.linalg.cho_solve(factor, data.responses)))
    logdet = 2.0 * float(np.sum(np.log(np.real(np.diag(factor[0])))))
    return -0.5 * (quad + logdet + n * math.log(2.0 * math.pi))


def optimize_hyperparameters(
    kernel_family: KernelFamily,
    data: FrequencyDataset,
    init: Hyperparameters,
    budget: int = 2000,
    seed: int = 0,
) -> tuple[Hyperparameters, float]:
    """Maximize the marginal likelihood with Nelder-Mead in transformed coordinates.

    The search runs from ``init`` plus 4 jittered restarts (Philox stream keyed
    by ``seed``, unit-scale jitter in unconstrained coordinates), splitting a
    total budget of likelihood evaluations across the starts.  ``budget=1``
    evaluates and returns ``init``.  Raises if every evaluation is -inf.
    """
    if budget < 1:
        raise ValueError(f"budget must be >= 1, got {budget}")
    names = list(init.values)
    domains = [init.domains[name] for name in names]
    if not names:
        raise ValueError("init must declare at least one hyperparameter")

    def unpack(vec: np.ndarray) -> dict[str, float]:
        return {n: d.from_unconstrained(t) for n, d, t in zip(names, domains, vec)}

    evals = 0
    best: dict = {"L": -math.inf, "values": init.as_dict()}

    def objective(vec: np.ndarray) -> float:
        nonlocal evals
        if evals >= budget:
            return math.inf
        values = unpack(vec)
        try:
            score = log_marginal_likelihood(kernel_family, values, data)
        except ValueError:
            score = -math.inf
        evals += 1
        if score > best["L"]:
            best["L"] = score
            best["values"] = values
        return -score if math.isfinite(score) else math.inf

    start = np.array([d.to_unconstrained(init.values[n]) for n, d in zip(names, domains)])
    objective(start)  # budget=1 stops here, with init recorded as the incumbent
    if best["L"] == -math.inf:
        best["values"] = init.as_dict()

    rng = np.random.Generator(np.random.Philox(key=seed))
    starts = [start] + [start + rng.standard_normal(start.size) for _ in range(4)]
    share = max(1, (budget - 1) // len(starts))
    for point in starts:
        remaining = budget - evals
        if remaining < 1:
            break
        scipy.optimize.minimize(
            objective,
            point,
            method="Nelder-Mead",
            options={"maxfev": min(share, remaining), "xatol": 1e-6, "fatol": 1e-9},
        )
    if best["L"] == -math.inf:
        raise RuntimeError("hyperparameter optimization failed: every evaluation was -inf")
    return Hyperparameters(best["values"], init.domains), float(best["L"])
