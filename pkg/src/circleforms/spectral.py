"""Band-limited calculus for real periodic functions on the circle.

The circle is parameterized by t in [0, 2*pi); a function is stored as N
uniform samples f(2*pi*j/N).  Differentiation multiplies Fourier mode n by
i*n and zeroes the Nyquist mode, so it is exact for inputs whose modes lie
strictly below N/2.  The uniform rule (2*pi/N) * sum(samples) integrates
exactly every integrand with fewer than N modes.  All values are immutable
and every operation is pure, so objects may be shared freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Union

import numpy as np

TWO_PI = 2.0 * np.pi

#: Functions whose magnitude dips below this bound may not be divided by, and
#: maps whose speed dips below it are rejected as non-immersive.
EPS_REG = 1e-8


class ResolutionMismatchError(ValueError):
    """Operands sampled at different resolutions were combined."""


class RegularityError(ValueError):
    """A quantity required to stay away from zero came too close to it."""


def grid(resolution: int) -> np.ndarray:
    """Sample points 2*pi*j/N for j = 0..N-1."""
    return TWO_PI * np.arange(resolution) / resolution


@dataclass(frozen=True, eq=False)
class PeriodicFunction:
    """A real function on the circle held as uniform samples.

    The resolution N must be even and at least 8 (the spectral derivative
    needs a well-defined Nyquist mode), and all samples must be finite.
    """

    samples: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.samples, dtype=float, copy=True)
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)
        if arr.ndim != 1:
            raise ValueError("samples must be a one-dimensional array")
        n = arr.shape[0]
        if n < 8 or n % 2 != 0:
            raise ValueError(f"resolution must be even and >= 8, got {n}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("samples must all be finite")

    @property
    def resolution(self) -> int:
        return self.samples.shape[0]

    @classmethod
    def from_callable(cls, fn: Callable[[np.ndarray], np.ndarray], resolution: int) -> "PeriodicFunction":
        return cls(np.asarray(fn(grid(resolution)), dtype=float))

    @classmethod
    def constant(cls, value: float, resolution: int) -> "PeriodicFunction":
        return cls(np.full(resolution, float(value)))

    @classmethod
    def zero(cls, resolution: int) -> "PeriodicFunction":
        return cls(np.zeros(resolution))

    @cached_property
    def _interp_weights(self) -> tuple[np.ndarray, np.ndarray]:
        # Trigonometric-interpolation weights: f(t) = sum_k cw[k] cos(kt) + sw[k] sin(kt).
        spec = np.fft.rfft(self.samples)
        w = np.full(spec.shape, 2.0)
        w[0] = 1.0
        w[-1] = 1.0
        return spec.real * w / self.resolution, -spec.imag * w / self.resolution

    def __call__(self, t: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
        """Evaluate the trigonometric interpolant at arbitrary angles.

        Exact (to rounding) for band-limited data; reproduces the samples on
        the grid.  Accepts scalars or arrays.
        """
        cw, sw = self._interp_weights
        t_arr = np.asarray(t, dtype=float)
        angles = np.multiply.outer(t_arr, np.arange(cw.shape[0]))
        values = np.cos(angles) @ cw + np.sin(angles) @ sw
        if t_arr.ndim == 0:
            return float(values)
        return values

    def derivative(self) -> "PeriodicFunction":
        return derivative(self)

    @property
    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.samples)))

    # -- sample-wise arithmetic sugar (delegates to ``pointwise``) ----------

    def _coerce(self, other: Union["PeriodicFunction", float]) -> np.ndarray:
        if isinstance(other, PeriodicFunction):
            if other.resolution != self.resolution:
                raise ResolutionMismatchError(
                    f"resolutions differ: {self.resolution} vs {other.resolution}"
                )
            return other.samples
        return np.full(self.resolution, float(other))

    def __add__(self, other: Union["PeriodicFunction", float]) -> "PeriodicFunction":
        return PeriodicFunction(self.samples + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other: Union["PeriodicFunction", float]) -> "PeriodicFunction":
        return PeriodicFunction(self.samples - self._coerce(other))

    def __rsub__(self, other: float) -> "PeriodicFunction":
        return PeriodicFunction(self._coerce(other) - self.samples)

    def __mul__(self, other: Union["PeriodicFunction", float]) -> "PeriodicFunction":
        return PeriodicFunction(self.samples * self._coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other: Union["PeriodicFunction", float]) -> "PeriodicFunction":
        divisor = self._coerce(other)
        if np.min(np.abs(divisor)) < EPS_REG:
            raise RegularityError("division by a function with samples below the regularity floor")
        return PeriodicFunction(self.samples / divisor)

    def __neg__(self) -> "PeriodicFunction":
        return PeriodicFunction(-self.samples)


@dataclass(frozen=True, eq=False)
class CircleVectorField:
    """A vector field f(t) d/dt on the circle."""

    coeff: PeriodicFunction

    @property
    def resolution(self) -> int:
        return self.coeff.resolution


def derivative(f: PeriodicFunction) -> PeriodicFunction:
    """Spectral derivative: multiply mode n by i*n, zero the Nyquist mode."""
    n = f.resolution
    spec = np.fft.rfft(f.samples)
    spec *= 1j * np.arange(n // 2 + 1)
    spec[-1] = 0.0
    return PeriodicFunction(np.fft.irfft(spec, n))


def integrate(f: PeriodicFunction) -> float:
    """Integral over the circle by the uniform rule (2*pi/N) * sum."""
    return float(TWO_PI * np.mean(f.samples))


def mean(f: PeriodicFunction) -> float:
    return integrate(f) / TWO_PI


def pointwise(
    f: PeriodicFunction,
    g: Union[PeriodicFunction, float],
    op: str,
) -> PeriodicFunction:
    """Sample-wise arithmetic: one of ``add``, ``sub``, ``mul``, ``div``, ``scale``.

    ``scale`` expects a scalar second operand; ``div`` rejects divisors whose
    magnitude falls below the regularity floor at any sample.
    """
    if op == "add":
        return f + g
    if op == "sub":
        return f - g
    if op == "mul":
        return f * g
    if op == "div":
        return f / g
    if op == "scale":
        return f * float(g)
    raise ValueError(f"unknown pointwise operation {op!r}")


def bracket(x: CircleVectorField, y: CircleVectorField) -> CircleVectorField:
    """Lie bracket [f d/dt, g d/dt] = (f g' - g f') d/dt."""
    if x.resolution != y.resolution:
        raise ResolutionMismatchError(
            f"resolutions differ: {x.resolution} vs {y.resolution}"
        )
    f, g = x.coeff, y.coeff
    return CircleVectorField(f * g.derivative() - g * f.derivative())


def random_band_limited(
    rng: np.random.Generator,
    resolution: int,
    max_mode: int = 4,
    amplitude: float = 1.0,
    include_constant: bool = True,
) -> PeriodicFunction:
    """A random trigonometric polynomial with modes up to ``max_mode``."""
    t = grid(resolution)
    values = np.zeros(resolution)
    if include_constant:
        values += rng.uniform(-amplitude, amplitude)
    for n in range(1, max_mode + 1):
        values += rng.uniform(-amplitude, amplitude) * np.cos(n * t)
        values += rng.uniform(-amplitude, amplitude) * np.sin(n * t)
    return PeriodicFunction(values)
