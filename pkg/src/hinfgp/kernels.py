"""Covariance functions of complex Gaussian processes on the exterior of the unit disk.

A zero-mean complex Gaussian process f(z) indexed by points of the closed
exterior disk E = {z : |z| >= 1} is specified by a *pair* of covariance
functions: the Hermitian covariance k(z, w) = E[f(z) f(w)*] and the
complementary covariance kt(z, w) = E[f(z) f(w)].  Realizations of such a
process are candidate transfer functions; processes whose paths have real
impulse responses satisfy the conjugate symmetry f(z*) = f(z)*, which at the
covariance level reads k(z, z) = k(z*, z*) and k(z, z) = kt(z, z*).

This module provides the built-in covariance families

* ``geometric_kernel`` / ``exponential_kernel`` / ``stationary_kernel`` —
  Hermitian stationary processes f(z) = sum_n a_n w_n z^{-n} with nonnegative
  l1 coefficient sequences {a_n^2},
* ``cozine_kernel`` — a random damped-cosine (second-order resonance) process,
* ``mixture_kernel`` — nonnegative combinations,

plus Gram-matrix assembly and the real/imaginary part decomposition used by
the H-infinity membership checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

__all__ = [
    "ComplexKernel",
    "StationarySequence",
    "CozineParams",
    "geometric_kernel",
    "exponential_kernel",
    "stationary_kernel",
    "cozine_kernel",
    "mixture_kernel",
    "real_imag_kernels",
    "gram",
    "from_config",
]

KernelFn = Callable[..., np.ndarray]


@dataclass(frozen=True, eq=False)
class ComplexKernel:
    """A paired Hermitian/complementary covariance over the closed exterior disk.

    ``hermitian_eval(z, w)`` evaluates k(z, w) = E[f(z) f(w)*] and
    ``complementary_eval(z, w)`` evaluates kt(z, w) = E[f(z) f(w)].  Both
    callables accept scalars or broadcastable numpy arrays and are pure
    functions, safe to call concurrently.  Evaluation is valid for
    |z|, |w| >= ``domain_radius`` (default 1; every built-in family is finite
    on the unit circle itself).
    """

    hermitian_eval: KernelFn
    complementary_eval: KernelFn
    hyperparams: Mapping[str, float] = field(default_factory=dict)
    domain_radius: float = 1.0


@dataclass(frozen=True)
class StationarySequence:
    """Nonnegative l1 coefficients {a_n^2} of a Hermitian stationary process.

    The process is f(z) = sum_{n>=0} a_n w_n z^{-n} with i.i.d. standard real
    normal w_n, so k(z, w) = sum_n a_n^2 (zw*)^{-n}.  ``kind`` selects either a
    closed-form family ("geometric": a_n^2 = alpha^n; "exponential":
    a_n^2 = 1/n!) or an explicit finite list of a_n^2 values.
    """

    kind: str
    alpha: float | None = None
    a_sq: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if self.kind == "geometric":
            if self.alpha is None or not 0.0 < self.alpha < 1.0:
                raise ValueError(f"geometric sequence needs alpha in (0, 1), got {self.alpha}")
        elif self.kind == "exponential":
            pass
        elif self.kind == "explicit":
            if self.a_sq is None or len(self.a_sq) == 0:
                raise ValueError("explicit sequence needs at least one coefficient")
            if any(c < 0.0 for c in self.a_sq):
                raise ValueError("sequence coefficients a_n^2 must be nonnegative")
        else:
            raise ValueError(f"unknown sequence kind {self.kind!r}")

    @classmethod
    def geometric(cls, alpha: float) -> "StationarySequence":
        return cls("geometric", alpha=float(alpha))

    @classmethod
    def exponential(cls) -> "StationarySequence":
        return cls("exponential")

    @classmethod
    def explicit(cls, a_sq: Sequence[float]) -> "StationarySequence":
        return cls("explicit", a_sq=tuple(float(c) for c in a_sq))

    def coefficients(self, count: int) -> np.ndarray:
        """First ``count`` amplitude coefficients a_n = sqrt(a_n^2), n = 0..count-1."""
        n = np.arange(count, dtype=float)
        if self.kind == "geometric":
            return self.alpha ** (n / 2.0)
        if self.kind == "exponential":
            # a_n = 1/sqrt(n!), built iteratively to avoid factorial overflow
            a = np.empty(count)
            val = 1.0
            for i in range(count):
                a[i] = val
                val /= math.sqrt(i + 1.0)
            return a
        out = np.zeros(count)
        stored = np.sqrt(np.asarray(self.a_sq[:count]))
        out[: stored.size] = stored
        return out

    @property
    def sum_a(self) -> float:
        """sum_n a_n (finite: the amplitude sequence is summable for all kinds)."""
        if self.kind == "geometric":
            return 1.0 / (1.0 - math.sqrt(self.alpha))
        if self.kind == "exponential":
            total, term, n = 0.0, 1.0, 0
            while term > 1e-18:
                total += term
                n += 1
                term /= math.sqrt(n)
            return total
        return float(np.sum(np.sqrt(self.a_sq)))

    def describe(self) -> str:
        if self.kind == "geometric":
            return f"geometric(alpha={self.alpha})"
        if self.kind == "exponential":
            return "exponential"
        return f"explicit(n={len(self.a_sq)})"


@dataclass(frozen=True)
class CozineParams:
    """Damped-resonance parameters: pole radius ``a`` in (0,1), angle ``omega0`` in [0, pi]."""

    a: float
    omega0: float

    def __post_init__(self) -> None:
        if not 0.0 < self.a < 1.0:
            raise ValueError(f"pole radius a must lie in (0, 1), got {self.a}")
        if not 0.0 <= self.omega0 <= math.pi:
            raise ValueError(f"omega0 must lie in [0, pi], got {self.omega0}")


def geometric_kernel(alpha: float) -> ComplexKernel:
    """Stationary kernel with a_n^2 = alpha^n: k(z,w) = zw*/(zw* - alpha).

    The complementary part sums the same series in zw instead of zw*:
    kt(z,w) = zw/(zw - alpha).  Note kt(z, w) = k(z, w*), the structural
    signature of a real impulse response.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    alpha = float(alpha)

    def herm(z, w):
        p = np.multiply(z, np.conj(w))
        return p / (p - alpha)

    def comp(z, w):
        p = np.multiply(z, w)
        return p / (p - alpha)

    return ComplexKernel(herm, comp, {"alpha": alpha})


def exponential_kernel() -> ComplexKernel:
    """Stationary kernel with a_n^2 = 1/n!: k(z,w) = exp(1/(zw*)), kt(z,w) = exp(1/(zw)).

    These are the closed forms of the series sum_n (zw*)^{-n} / n!.
    """

    def herm(z, w):
        p = np.multiply(z, np.conj(w))
        if np.any(p == 0):
            raise ValueError("exponential kernel is undefined at zw* = 0")
        return np.exp(1.0 / p)

    def comp(z, w):
        p = np.multiply(z, w)
        if np.any(p == 0):
            raise ValueError("exponential kernel is undefined at zw = 0")
        return np.exp(1.0 / p)

    return ComplexKernel(herm, comp, {})


def _power_series(coeffs: np.ndarray, p):
    """sum_n coeffs[n] * p^{-n}, evaluated by Horner's rule in 1/p."""
    return np.polynomial.polynomial.polyval(1.0 / np.asarray(p, dtype=complex), coeffs)


def stationary_kernel(seq: StationarySequence) -> ComplexKernel:
    """Kernel of the stationary process defined by ``seq``.

    Closed-form tags delegate to the analytic formulas; explicit lists are
    summed exactly over their stored coefficients (n = 0..N).
    """
    if seq.kind == "geometric":
        return geometric_kernel(seq.alpha)
    if seq.kind == "exponential":
        return exponential_kernel()

    coeffs = np.asarray(seq.a_sq, dtype=float)

    def herm(z, w):
        return _power_series(coeffs, np.multiply(z, np.conj(w)))

    def comp(z, w):
        return _power_series(coeffs, np.multiply(z, w))

    return ComplexKernel(herm, comp, {})


def cozine_kernel(params: CozineParams) -> ComplexKernel:
    """Covariance of the random damped-cosine process.

    The process is the second-order rational transfer function

        f(z) = (X - a (X cos w0 - Y sin w0) z^{-1}) / (1 - 2 a cos(w0) z^{-1} + a^2 z^{-2})

    with X, Y i.i.d. standard normal; its impulse response is
    h(n) = a^n (X cos(n w0) + Y sin(n w0)).  Both covariance parts are rational:

        k(z, w)  = (1 - a cos(w0) (z^{-1} + (w*)^{-1}) + a^2 (z w*)^{-1}) / (D(z^{-1}) D((w*)^{-1}))

    with D(x) = 1 - 2 a cos(w0) x + a^2 x^2, and kt(z, w) = k(z, w*).  The poles
    a e^{+-j w0} lie strictly inside the unit disk, so evaluation is finite for
    |z|, |w| >= 1.
    """
    a = float(params.a)
    c = math.cos(params.omega0)

    def _quad(x):
        return 1.0 - 2.0 * a * c * x + (a * x) ** 2

    def _rational(zi, wi):
        num = 1.0 - a * c * (zi + wi) + a * a * zi * wi
        return num / (_quad(zi) * _quad(wi))

    def herm(z, w):
        return _rational(1.0 / np.asarray(z, dtype=complex), 1.0 / np.conj(w))

    def comp(z, w):
        return _rational(1.0 / np.asarray(z, dtype=complex), 1.0 / np.asarray(w, dtype=complex))

    return ComplexKernel(herm, comp, {"a": a, "omega0": float(params.omega0)})


def mixture_kernel(k1: ComplexKernel, w1: float, k2: ComplexKernel, w2: float) -> ComplexKernel:
    """Pointwise nonnegative combination w1*k1 + w2*k2 of both covariance parts."""
    if w1 < 0.0 or w2 < 0.0:
        raise ValueError(f"mixture weights must be nonnegative, got {w1}, {w2}")
    w1, w2 = float(w1), float(w2)

    def herm(z, w):
        return w1 * k1.hermitian_eval(z, w) + w2 * k2.hermitian_eval(z, w)

    def comp(z, w):
        return w1 * k1.complementary_eval(z, w) + w2 * k2.complementary_eval(z, w)

    return ComplexKernel(
        herm,
        comp,
        {"weight1": w1, "weight2": w2},
        domain_radius=max(k1.domain_radius, k2.domain_radius),
    )


def real_imag_kernels(kernel: ComplexKernel):
    """Real-valued covariances of Re f and Im f.

    Returns callables ``(k_r, k_i)`` with k_r = Re{k + kt}/2 and
    k_i = Re{k - kt}/2; both are real symmetric PSD kernels, and
    k_r(z, w) + k_i(z, w) = Re k(z, w) by construction.
    """

    def k_r(z, w):
        return 0.5 * np.real(kernel.hermitian_eval(z, w) + kernel.complementary_eval(z, w))

    def k_i(z, w):
        return 0.5 * np.real(kernel.hermitian_eval(z, w) - kernel.complementary_eval(z, w))

    return k_r, k_i


def gram(
    kernel: ComplexKernel,
    points: Sequence[complex],
    part: str = "hermitian",
    noise_var: float = 0.0,
) -> np.ndarray:
    """Covariance matrix of the process at ``points``.

    ``part="hermitian"`` gives K[i,j] = k(z_i, z_j) plus ``noise_var`` on the
    diagonal; ``part="complementary"`` gives Kt[i,j] = kt(z_i, z_j).
    Observation noise is modeled as proper (circular), so it never enters the
    complementary part — requesting it there is an error.
    """
    pts = np.asarray(points, dtype=complex)
    if pts.ndim != 1:
        raise ValueError("points must be a one-dimensional sequence of complex numbers")
    if noise_var < 0.0:
        raise ValueError(f"noise_var must be nonnegative, got {noise_var}")
    if np.any(np.abs(pts) < kernel.domain_radius - 1e-12):
        bad = pts[np.abs(pts) < kernel.domain_radius - 1e-12][0]
        raise ValueError(
            f"point {bad} lies inside the kernel domain (|z| >= {kernel.domain_radius})"
        )
    z = pts[:, None]
    w = pts[None, :]
    if part == "hermitian":
        mat = np.asarray(kernel.hermitian_eval(z, w), dtype=complex)
        if noise_var > 0.0:
            mat = mat + noise_var * np.eye(pts.size)
        return mat
    if part == "complementary":
        if noise_var > 0.0:
            raise ValueError("observation noise is proper: no noise term on the complementary Gram")
        return np.asarray(kernel.complementary_eval(z, w), dtype=complex)
    raise ValueError(f"part must be 'hermitian' or 'complementary', got {part!r}")


_CONFIG_PARAMS = {
    "geometric": {"alpha"},
    "exponential": set(),
    "cozine": {"a", "omega0"},
    "stationary_list": {"coefficients"},
    "mixture": {"weight1", "weight2"},
}


def from_config(record: Mapping) -> ComplexKernel:
    """Build a kernel from a declarative config record.

    The record holds ``name`` (one of "geometric", "exponential", "cozine",
    "stationary_list", "mixture") and a ``params`` map; mixtures additionally
    carry nested ``component1``/``component2`` records.  Unknown keys anywhere
    are errors, so configs fail fast instead of silently ignoring typos.
    """
    if not isinstance(record, Mapping):
        raise ValueError(f"kernel config must be a mapping, got {type(record).__name__}")
    name = record.get("name")
    if name not in _CONFIG_PARAMS:
        raise ValueError(
            f"unknown kernel name {name!r}; expected one of {sorted(_CONFIG_PARAMS)}"
        )
    allowed_keys = {"name", "params"} | ({"component1", "component2"} if name == "mixture" else set())
    unknown = set(record) - allowed_keys
    if unknown:
        raise ValueError(f"unknown kernel config key(s) {sorted(unknown)} for kernel {name!r}")
    params = dict(record.get("params", {}))
    unknown_params = set(params) - _CONFIG_PARAMS[name]
    if unknown_params:
        raise ValueError(f"unknown parameter(s) {sorted(unknown_params)} for kernel {name!r}")

    if name == "geometric":
        if "alpha" not in params:
            raise ValueError("geometric kernel config requires 'alpha'")
        return geometric_kernel(params["alpha"])
    if name == "exponential":
        return exponential_kernel()
    if name == "cozine":
        missing = {"a", "omega0"} - set(params)
        if missing:
            raise ValueError(f"cozine kernel config requires {sorted(missing)}")
        return cozine_kernel(CozineParams(params["a"], params["omega0"]))
    if name == "stationary_list":
        if "coefficients" not in params:
            raise ValueError("stationary_list kernel config requires 'coefficients'")
        return stationary_kernel(StationarySequence.explicit(params["coefficients"]))
    # mixture
    for key in ("component1", "component2"):
        if key not in record:
            raise ValueError(f"mixture kernel config requires nested record {key!r}")
    return mixture_kernel(
        from_config(record["component1"]),
        params.get("weight1", 1.0),
        from_config(record["component2"]),
        params.get("weight2", 1.0),
    )
