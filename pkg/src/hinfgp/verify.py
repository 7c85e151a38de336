"""Numerical probes for H-infinity membership and conjugate symmetry of a kernel.

Whether the sample paths of a Gaussian process are almost surely bounded
analytic functions outside the unit disk is a zero-one property.  Sufficient
conditions come in two parts, and this module probes both numerically:

1. a boundary continuity condition on the real/imaginary-part kernels
   (``continuity_probe``), and
2. Driscoll's RKHS criterion (``driscoll_test``): the paths of a GP with real
   kernel k lie in the reproducing kernel Hilbert space of a reference kernel
   r exactly when traces of K_n R_n^{-1} over growing Gram matrices stay
   bounded.  Here the reference space is the Hardy space H2, whose kernel is
   r(z, w) = zw*/(zw* - 1).

``symmetry_test`` checks the exact covariance identities k(z, z) = k(z*, z*)
and k(z, z) = kt(z, z*) that characterize processes with real impulse
responses.

Candidate kernels fed to ``driscoll_test``/``continuity_probe`` are the *real*
covariances of the real or imaginary part of the process (see
:func:`hinfgp.kernels.real_imag_kernels`); Gram matrices are assembled from the
real part of the kernel values, matching the realified-space construction in
which both K_n and R_n are real symmetric matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.linalg

from ._linalg import ConditioningError
from .kernels import ComplexKernel

__all__ = [
    "DriscollReport",
    "SymmetryReport",
    "ContinuityReport",
    "h2_kernel",
    "dense_spiral",
    "driscoll_test",
    "symmetry_test",
    "continuity_probe",
    "continuity_search",
]


@dataclass(frozen=True)
class DriscollReport:
    """Trace sequence of the RKHS-membership test and its classification."""

    n_values: tuple[int, ...]
    traces: tuple[float, ...]
    verdict: str  # "converging" | "diverging" | "inconclusive"
    growth_slope: float

    def to_record(self) -> dict:
        return {
            "n_values": list(self.n_values),
            "traces": list(self.traces),
            "verdict": self.verdict,
            "growth_slope": self.growth_slope,
        }


@dataclass(frozen=True)
class SymmetryReport:
    """Worst-case errors of the real-impulse-response covariance identities."""

    max_err_diag: float  # max |k(z,z) - k(z*,z*)|
    max_err_cross: float  # max |k(z,z) - kt(z,z*)|
    grid: tuple[complex, ...]

    def to_record(self) -> dict:
        return {
            "max_err_diag": self.max_err_diag,
            "max_err_cross": self.max_err_cross,
            "grid_size": len(self.grid),
        }


@dataclass(frozen=True)
class ContinuityReport:
    """Outcome of the boundary-continuity bound check for one (C, alpha)."""

    passed: bool
    worst_margin: float
    worst_pair: tuple[float, float]
    C: float
    alpha: float


def h2_kernel(z, w):
    """Reproducing kernel of the Hardy space H2: r(z, w) = zw*/(zw* - 1).

    Defined for |zw*| > 1; the point zw* = 1 is the kernel's singularity.
    """
    p = np.multiply(z, np.conj(w))
    if np.any(p == 1.0):
        raise ValueError("h2 kernel is singular at zw* = 1")
    return p / (p - 1.0)


def dense_spiral(count: int, r_lo: float = 1.05, r_hi: float = 3.0) -> np.ndarray:
    """Deterministic low-discrepancy points in the annulus r_lo <= |z| <= r_hi.

    Golden-angle rotation with radii accumulating toward the inner circle,
    where the H2 Gram is hardest to handle: z_m = r_m e^{j m pi (3 - sqrt 5)}
    with r_m = r_lo + (r_hi - r_lo)/(1 + m), m = 1..count.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    m = np.arange(1, count + 1, dtype=float)
    theta = m * (math.pi * (3.0 - math.sqrt(5.0)))
    radii = r_lo + (r_hi - r_lo) / (1.0 + m)
    return radii * np.exp(1j * theta)


def _real_gram(k_real: Callable, points: np.ndarray) -> np.ndarray:
    z = points[:, None]
    w = points[None, :]
    return np.real(np.asarray(k_real(z, w)))


def driscoll_test(
    k_real: Callable,
    n_max: int = 200,
    points: Sequence[complex] | None = None,
    slope_tol: float = 0.01,
    trace_tol: float = 1e-3,
) -> DriscollReport:
    """Zero-one RKHS membership probe: traces of K_n R_n^{-1} for n = 10, 20, ..., n_max.

    ``k_real`` is the real candidate covariance (typically ``k_r`` or ``k_i``
    of a complex kernel); complex return values are projected to their real
    part.  R_n is the H2 Gram on the same points.  Each trace is computed
    through a symmetric factorization, trace(L^{-1} K_n L^{-T}) with
    R_n = L L^T, which keeps the product congruent to a PSD matrix.

    A bounded trace sequence is evidence the paths lie in H2 (hence extend to
    H-infinity under the continuity condition); growth linear in n is evidence
    they do not.  Classification is heuristic and thresholded: ``diverging``
    when the least-squares slope over the final third exceeds ``slope_tol``
    per point, ``converging`` when that tail is Cauchy within ``trace_tol``
    (relative), else ``inconclusive``.
    """
    if n_max < 10:
        raise ValueError(f"n_max must be >= 10, got {n_max}")
    if points is None:
        pts = dense_spiral(n_max)
    else:
        pts = np.asarray(points, dtype=complex)
        if pts.size < n_max:
            raise ValueError(f"need at least n_max={n_max} points, got {pts.size}")
    if np.any(np.abs(pts[:n_max]) <= 1.0):
        raise ValueError("all points must lie strictly outside the unit circle")

    n_values = list(range(10, n_max + 1, 10))
    traces = []
    for n in n_values:
        sub = pts[:n]
        r_gram = _real_gram(h2_kernel, sub)
        k_gram = _real_gram(k_real, sub)
        jitter = 1e-12 * np.trace(r_gram) / n
        try:
            chol = scipy.linalg.cholesky(r_gram, lower=True)
        except np.linalg.LinAlgError:
            try:
                chol = scipy.linalg.cholesky(r_gram + jitter * np.eye(n), lower=True)
            except np.linalg.LinAlgError as exc:
                raise ConditioningError(
                    f"H2 Gram on {n} points is numerically singular (duplicate points?)"
                ) from exc
        half = scipy.linalg.solve_triangular(chol, k_gram, lower=True)
        congruent = scipy.linalg.solve_triangular(chol, half.T, lower=True)
        traces.append(float(np.trace(congruent)))

    tail = max(2, math.ceil(len(n_values) / 3))
    tail_n = np.asarray(n_values[-tail:], dtype=float)
    tail_tr = np.asarray(traces[-tail:])
    slope = float(np.polyfit(tail_n, tail_tr, 1)[0])
    if slope > slope_tol:
        verdict = "diverging"
    elif float(np.max(tail_tr) - np.min(tail_tr)) <= trace_tol * max(1.0, abs(traces[-1])):
        verdict = "converging"
    else:
        verdict = "inconclusive"
    return DriscollReport(tuple(n_values), tuple(traces), verdict, slope)


def symmetry_test(kernel: ComplexKernel, grid: Sequence[complex]) -> SymmetryReport:
    """Check the real-impulse-response identities over ``grid``.

    Reports max |k(z,z) - k(z*,z*)| and max |k(z,z) - kt(z,z*)|; both vanish
    exactly when the process has conjugate-symmetric paths.
    """
    pts = np.asarray(grid, dtype=complex)
    if pts.size == 0:
        raise ValueError("symmetry grid must be nonempty")
    diag = np.asarray(kernel.hermitian_eval(pts, pts))
    diag_conj = np.asarray(kernel.hermitian_eval(np.conj(pts), np.conj(pts)))
    cross = np.asarray(kernel.complementary_eval(pts, np.conj(pts)))
    return SymmetryReport(
        float(np.max(np.abs(diag - diag_conj))),
        float(np.max(np.abs(diag - cross))),
        tuple(complex(z) for z in pts),
    )


def continuity_probe(
    k_real: Callable,
    angle_pairs: Sequence[tuple[float, float]],
    C: float,
    alpha: float,
) -> ContinuityReport:
    """Check the boundary-continuity bound for one constant pair (C, alpha).

    For every angle pair the variance increment of the real-part process on
    the circle, k(e^{jt}, e^{jt}) + k(e^{js}, e^{js}) - 2 k(e^{jt}, e^{js}),
    must stay below C / |log|t - s||^{1 + alpha}.  Pairs need 0 < |t - s| < 1.
    Returns the worst (smallest) margin bound - increment.
    """
    pairs = [(float(t), float(s)) for t, s in angle_pairs]
    if not pairs:
        raise ValueError("angle_pairs must be nonempty")
    worst = math.inf
    worst_pair = pairs[0]
    passed = True
    for t, s in pairs:
        gap = abs(t - s)
        if gap == 0.0:
            raise ValueError(f"degenerate pair (theta = phi = {t}) rejected")
        if gap >= 1.0:
            raise ValueError(f"angle pairs must satisfy |theta - phi| < 1, got {gap}")
        zt = complex(math.cos(t), math.sin(t))
        zs = complex(math.cos(s), math.sin(s))
        increment = float(
            np.real(k_real(zt, zt)) + np.real(k_real(zs, zs)) - 2.0 * np.real(k_real(zt, zs))
        )
        bound = C / abs(math.log(gap)) ** (1.0 + alpha)
        margin = bound - increment
        if margin < worst:
            worst = margin
            worst_pair = (t, s)
        if margin < 0.0:
            passed = False
    return ContinuityReport(passed, worst, worst_pair, float(C), float(alpha))


def continuity_search(
    k_real: Callable,
    angle_pairs: Sequence[tuple[float, float]],
) -> list[ContinuityReport]:
    """Grid-search helper over C in {1e-2..1e3} (decades) and alpha in {0.1, 1, 2}.

    The continuity condition only asserts *existence* of constants, so the
    computable surrogate is to return the reports of every probed combination;
    any passing entry is evidence for the condition.
    """
    reports = []
    for exp10 in range(-2, 4):
        for alpha in (0.1, 1.0, 2.0):
            reports.append(continuity_probe(k_real, angle_pairs, 10.0 ** exp10, alpha))
    return reports
