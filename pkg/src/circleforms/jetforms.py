"""Exterior calculus on second-order jet charts over the circle.

A chart is an ordered list of coordinate names whose first entry is the base
coordinate t; the remaining entries come in blocks (fiber values, first
derivatives, second derivatives).  Points are plain float arrays in chart
order.  Differential forms carry a sparse coefficient map keyed by strictly
increasing index tuples; vector fields carry one component callable per
coordinate.  The exterior derivative and Lie derivative differentiate the
coefficient callables numerically (fourth-order central differences with a
coordinate-scaled step), which keeps the engine free of closed forms and lets
symbolic identities serve as independent test oracles.

``im_eval`` turns a (1+k)-form on the chart into a number: it contracts the
form with k prolonged vertical directions (first listed direction into the
first slot), pulls the remaining 1-form back along the jet curve of a
holonomic section, and integrates over the circle.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .spectral import (
    PeriodicFunction,
    ResolutionMismatchError,
    TWO_PI,
    grid,
    integrate,
)

#: Points of a jet chart are bare coordinate arrays in chart order.
JetPoint = np.ndarray

CoeffMap = dict[tuple[int, ...], float]

DEFAULT_FORM_STEP = 1e-4


class DomainError(ValueError):
    """A form was evaluated outside its declared domain."""


@dataclass(frozen=True)
class JetChart:
    """Coordinate labels of a jet chart; label 0 is always the base t."""

    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("chart labels must be distinct")
        if not self.labels or self.labels[0] != "t":
            raise ValueError("label 0 must be the base coordinate 't'")

    @property
    def dim(self) -> int:
        return len(self.labels)

    @property
    def fiber_count(self) -> int:
        """Number of fiber coordinates in a (t, q, dq, ddq) second-order chart."""
        if self.dim < 4 or (self.dim - 1) % 3 != 0:
            raise ValueError(
                f"chart of dimension {self.dim} is not a second-order jet chart "
                "with exactly one base coordinate"
            )
        return (self.dim - 1) // 3


@dataclass(frozen=True)
class ChartForm:
    """A degree-k form with callable coefficients on a jet chart.

    ``coeff(point)`` returns a sparse map from strictly increasing k-tuples of
    coordinate indices to floats; missing keys are zero.  The optional domain
    predicate guards evaluation (e.g. nonvanishing first derivative).
    """

    chart: JetChart
    degree: int
    coeff: Callable[[JetPoint], CoeffMap]
    domain: Optional[Callable[[JetPoint], bool]] = None

    def __post_init__(self) -> None:
        if not 0 <= self.degree <= self.chart.dim:
            raise ValueError(f"degree {self.degree} outside 0..{self.chart.dim}")

    def coefficients(self, point: JetPoint) -> CoeffMap:
        point = np.asarray(point, dtype=float)
        if self.domain is not None and not self.domain(point):
            raise DomainError("point outside the form's domain")
        return self.coeff(point)

    def __call__(self, point: JetPoint, *vectors: np.ndarray) -> float:
        """Fully evaluate on ``degree`` tangent vectors (alternating multilinear)."""
        if len(vectors) != self.degree:
            raise ValueError(f"expected {self.degree} vectors, got {len(vectors)}")
        cmap = self.coefficients(point)
        if self.degree == 0:
            return cmap.get((), 0.0)
        cols = np.column_stack([np.asarray(v, dtype=float) for v in vectors])
        total = 0.0
        for key, c in cmap.items():
            total += c * np.linalg.det(cols[list(key), :])
        return float(total)


def _conjoin(
    a: Optional[Callable[[JetPoint], bool]],
    b: Optional[Callable[[JetPoint], bool]],
) -> Optional[Callable[[JetPoint], bool]]:
    if a is None:
        return b
    if b is None:
        return a
    return lambda p: a(p) and b(p)


def coordinate_form(chart: JetChart, index: int) -> ChartForm:
    """The coordinate one-form dx^index."""
    if not 0 <= index < chart.dim:
        raise ValueError(f"coordinate index {index} outside the chart")
    return ChartForm(chart, 1, lambda p, _k=(index,): {_k: 1.0})


def constant_form(chart: JetChart, entries: CoeffMap, degree: int) -> ChartForm:
    fixed = {tuple(k): float(v) for k, v in entries.items()}
    return ChartForm(chart, degree, lambda p: dict(fixed))


def form_sum(*forms: ChartForm) -> ChartForm:
    if not forms:
        raise ValueError("need at least one form")
    chart, degree = forms[0].chart, forms[0].degree
    domain = None
    for f in forms:
        if f.chart != chart or f.degree != degree:
            raise ValueError("summands must share chart and degree")
        domain = _conjoin(domain, f.domain)

    def coeff(point: JetPoint) -> CoeffMap:
        out: CoeffMap = {}
        for f in forms:
            for key, c in f.coeff(point).items():
                out[key] = out.get(key, 0.0) + c
        return out

    return ChartForm(chart, degree, coeff, domain)


def scale_form(
    form: ChartForm,
    factor: Union[float, Callable[[JetPoint], float]],
    domain: Optional[Callable[[JetPoint], bool]] = None,
) -> ChartForm:
    """Multiply a form by a constant or by a scalar function of the point."""
    if callable(factor):
        def coeff(point: JetPoint) -> CoeffMap:
            s = float(factor(point))
            return {k: s * c for k, c in form.coeff(point).items()}
    else:
        s0 = float(factor)

        def coeff(point: JetPoint) -> CoeffMap:
            return {k: s0 * c for k, c in form.coeff(point).items()}

    return ChartForm(form.chart, form.degree, coeff, _conjoin(form.domain, domain))


def _merge_sign(left: tuple[int, ...], right: tuple[int, ...]) -> int:
    # Shuffle sign of dx^left ^ dx^right for increasing disjoint tuples.
    inversions = sum(1 for i in left for j in right if j < i)
    return -1 if inversions % 2 else 1


def wedge(a: ChartForm, b: ChartForm) -> ChartForm:
    """Exterior product; returns the zero form past the chart dimension."""
    if a.chart != b.chart:
        raise ValueError("wedge operands must share a chart")
    degree = a.degree + b.degree
    domain = _conjoin(a.domain, b.domain)
    if degree > a.chart.dim:
        return ChartForm(a.chart, a.chart.dim, lambda p: {}, domain)

    def coeff(point: JetPoint) -> CoeffMap:
        out: CoeffMap = {}
        right = b.coeff(point)
        for ka, ca in a.coeff(point).items():
            if ca == 0.0:
                continue
            seen = set(ka)
            for kb, cb in right.items():
                if cb == 0.0 or seen & set(kb):
                    continue
                key = tuple(sorted(ka + kb))
                out[key] = out.get(key, 0.0) + _merge_sign(ka, kb) * ca * cb
        return out

    return ChartForm(a.chart, degree, coeff, domain)


@dataclass(frozen=True)
class ProlongedField:
    """A vector field on a jet chart, one component callable per coordinate.

    Components accept a single point ``(dim,)`` or a batch ``(..., dim)`` and
    return matching scalars/arrays; they must be reentrant.
    """

    chart: JetChart
    components: tuple[Callable[[np.ndarray], np.ndarray], ...]

    def __post_init__(self) -> None:
        if len(self.components) != self.chart.dim:
            raise ValueError("one component per chart coordinate is required")

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        return np.stack([np.asarray(c(pts), dtype=float) for c in self.components], axis=-1)

    @classmethod
    def from_constant(cls, chart: JetChart, vector: Sequence[float]) -> "ProlongedField":
        vec = tuple(float(v) for v in vector)
        comps = tuple(
            (lambda pts, _v=v: np.full(np.shape(np.asarray(pts))[:-1], _v))
            for v in vec
        )
        return cls(chart, comps)


def coordinate_field(chart: JetChart, index: int) -> ProlongedField:
    vec = [0.0] * chart.dim
    vec[index] = 1.0
    return ProlongedField.from_constant(chart, vec)


def _zero_component(pts: np.ndarray) -> np.ndarray:
    return np.zeros(np.shape(np.asarray(pts))[:-1])


def _affine_component(
    c0: Optional[PeriodicFunction],
    c1: Optional[PeriodicFunction],
    c2: Optional[PeriodicFunction],
    idx1: int,
    idx2: int,
) -> Callable[[np.ndarray], np.ndarray]:
    # Component c0(t) + c1(t)*x[idx1] + c2(t)*x[idx2]; evaluation off the grid
    # goes through the trigonometric interpolant, so it stays exact for
    # band-limited coefficient data.
    def component(points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        t = pts[..., 0]
        val = np.zeros(np.shape(t))
        if c0 is not None:
            val = val + c0(t)
        if c1 is not None:
            val = val + c1(t) * pts[..., idx1]
        if c2 is not None:
            val = val + c2(t) * pts[..., idx2]
        return val

    return component


def prolong2(
    chart: JetChart,
    base_coeff: Optional[PeriodicFunction],
    vertical_coeffs: Sequence[Optional[PeriodicFunction]],
) -> ProlongedField:
    """Second-order prolongation of f(t) d/dt + sum_a phi_a(t) d/dq_a.

    Each fiber component is lifted by the total-derivative recursion
    phi^(1) = D_t(phi) - dq * D_t(f) and phi^(2) = D_t(phi^(1)) - ddq * D_t(f),
    carried out algebraically on coefficients that depend on t alone (every
    shipped field is of this shape), so the lift is exact for band-limited
    data rather than a finite-difference approximation.
    """
    m = chart.fiber_count
    if len(vertical_coeffs) != m:
        raise ValueError(f"expected {m} vertical coefficients, got {len(vertical_coeffs)}")

    f = base_coeff
    fp = f.derivative() if f is not None else None

    components: list[Callable[[np.ndarray], np.ndarray]] = []
    if f is None:
        components.append(_zero_component)
    else:
        components.append(_affine_component(f, None, None, 0, 0))

    level0: list[Optional[PeriodicFunction]] = []
    level1: list[tuple[Optional[PeriodicFunction], Optional[PeriodicFunction]]] = []
    level2: list[tuple[Optional[PeriodicFunction], Optional[PeriodicFunction], Optional[PeriodicFunction]]] = []
    for phi in vertical_coeffs:
        # level 1: D_t(phi) - dq*f' ; level 2: D_t(level 1) - ddq*f'.
        c0 = phi.derivative() if phi is not None else None
        c1 = -fp if fp is not None else None
        d0 = c0.derivative() if c0 is not None else None
        d1 = c1.derivative() if c1 is not None else None
        d2 = (c1 - fp) if (c1 is not None and fp is not None) else None
        level0.append(phi)
        level1.append((c0, c1))
        level2.append((d0, d1, d2))

    for a in range(m):
        phi = level0[a]
        components.append(
            _affine_component(phi, None, None, 0, 0) if phi is not None else _zero_component
        )
    for a in range(m):
        c0, c1 = level1[a]
        if c0 is None and c1 is None:
            components.append(_zero_component)
        else:
            components.append(_affine_component(c0, c1, None, 1 + m + a, 0))
    for a in range(m):
        d0, d1, d2 = level2[a]
        if d0 is None and d1 is None and d2 is None:
            components.append(_zero_component)
        else:
            components.append(_affine_component(d0, d1, d2, 1 + m + a, 1 + 2 * m + a))

    return ProlongedField(chart, tuple(components))


def interior(x: ProlongedField, a: ChartForm) -> ChartForm:
    """Interior product: (i_X a)(V_1, ..., V_{k-1}) = a(X, V_1, ..., V_{k-1})."""
    if a.degree < 1:
        raise ValueError("interior product needs a form of degree >= 1")
    if x.chart != a.chart:
        raise ValueError("field and form must share a chart")

    def coeff(point: JetPoint) -> CoeffMap:
        comps = x.evaluate(point)
        out: CoeffMap = {}
        for key, c in a.coeff(point).items():
            if c == 0.0:
                continue
            for pos, idx in enumerate(key):
                val = c * float(comps[idx])
                if val == 0.0:
                    continue
                rest = key[:pos] + key[pos + 1:]
                out[rest] = out.get(rest, 0.0) + (-val if pos % 2 else val)
        return out

    return ChartForm(a.chart, a.degree - 1, coeff, a.domain)


def _partial_maps(
    a: ChartForm, point: JetPoint, axis: int, step: float
) -> CoeffMap:
    # Fourth-order central difference of the whole coefficient map along one
    # chart coordinate, step scaled by the coordinate magnitude.
    h = step * max(1.0, abs(float(point[axis])))
    shifted = []
    for s in (2.0, 1.0, -1.0, -2.0):
        q = np.array(point, dtype=float)
        q[axis] += s * h
        shifted.append(a.coefficients(q))
    p2, p1, m1, m2 = shifted
    keys = set().union(*shifted)
    out: CoeffMap = {}
    for key in keys:
        der = (
            -p2.get(key, 0.0)
            + 8.0 * p1.get(key, 0.0)
            - 8.0 * m1.get(key, 0.0)
            + m2.get(key, 0.0)
        ) / (12.0 * h)
        if der != 0.0:
            out[key] = der
    return out


def dform(a: ChartForm, step: float = DEFAULT_FORM_STEP) -> ChartForm:
    """Numeric exterior derivative: d(c dx^I) = sum_m (d_m c) dx^m ^ dx^I."""
    if a.degree >= a.chart.dim:
        return ChartForm(a.chart, a.chart.dim, lambda p: {}, a.domain)

    def coeff(point: JetPoint) -> CoeffMap:
        out: CoeffMap = {}
        for m in range(a.chart.dim):
            partial = _partial_maps(a, point, m, step)
            for key, der in partial.items():
                if m in key:
                    continue
                pos = sum(1 for i in key if i < m)
                new = tuple(sorted(key + (m,)))
                out[new] = out.get(new, 0.0) + (-der if pos % 2 else der)
        return out

    return ChartForm(a.chart, a.degree + 1, coeff, a.domain)


def lie_derivative(x: ProlongedField, a: ChartForm, step: float = DEFAULT_FORM_STEP) -> ChartForm:
    """Lie derivative via the Cartan formula i_X(da) + d(i_X a)."""
    parts = [dform(interior(x, a), step)]
    if a.degree < a.chart.dim:
        parts.append(interior(x, dform(a, step)))
    return form_sum(*parts)


def lie_derivative_function(
    x: ProlongedField,
    fn: Callable[[JetPoint], float],
    step: float = DEFAULT_FORM_STEP,
) -> Callable[[JetPoint], float]:
    """Directional derivative of a scalar chart function along a field."""

    def derivative_at(point: JetPoint) -> float:
        p = np.asarray(point, dtype=float)
        v = np.asarray(x.evaluate(p), dtype=float)
        scale = float(np.max(np.abs(v)))
        if scale == 0.0:
            return 0.0
        h = step / scale
        return float(
            (-fn(p + 2 * h * v) + 8 * fn(p + h * v) - 8 * fn(p - h * v) + fn(p - 2 * h * v))
            / (12.0 * h)
        )

    return derivative_at


def pullback(
    a: ChartForm,
    mapping: Callable[[JetPoint], np.ndarray],
    step: float = DEFAULT_FORM_STEP,
) -> ChartForm:
    """Pull a form back through a chart self-map (numeric Jacobian)."""

    dim = a.chart.dim

    def jacobian(point: JetPoint) -> np.ndarray:
        cols = []
        for m in range(dim):
            h = step * max(1.0, abs(float(point[m])))
            images = []
            for s in (2.0, 1.0, -1.0, -2.0):
                q = np.array(point, dtype=float)
                q[m] += s * h
                images.append(np.asarray(mapping(q), dtype=float))
            cols.append((-images[0] + 8 * images[1] - 8 * images[2] + images[3]) / (12.0 * h))
        return np.column_stack(cols)

    def coeff(point: JetPoint) -> CoeffMap:
        p = np.asarray(point, dtype=float)
        image = np.asarray(mapping(p), dtype=float)
        jac = jacobian(p)
        target = a.coefficients(image)
        out: CoeffMap = {}
        for key, c in target.items():
            if c == 0.0:
                continue
            rows = jac[list(key), :]
            for new in itertools.combinations(range(dim), a.degree):
                d = float(np.linalg.det(rows[:, list(new)]))
                if d != 0.0:
                    out[new] = out.get(new, 0.0) + c * d
        return out

    domain = None
    if a.domain is not None:
        domain = lambda p: a.domain(np.asarray(mapping(np.asarray(p, dtype=float)), dtype=float))
    return ChartForm(a.chart, a.degree, coeff, domain)


def field_bracket_fd(
    x: ProlongedField,
    y: ProlongedField,
    point: JetPoint,
    step: float = DEFAULT_FORM_STEP,
) -> np.ndarray:
    """Components of [X, Y] at a point, with numeric component partials."""
    if x.chart != y.chart:
        raise ValueError("fields must share a chart")
    p = np.asarray(point, dtype=float)
    dim = x.chart.dim

    def directional(field: ProlongedField, direction: np.ndarray) -> np.ndarray:
        scale = float(np.max(np.abs(direction)))
        if scale == 0.0:
            return np.zeros(dim)
        h = step / scale
        return (
            -field.evaluate(p + 2 * h * direction)
            + 8 * field.evaluate(p + h * direction)
            - 8 * field.evaluate(p - h * direction)
            + field.evaluate(p - 2 * h * direction)
        ) / (12.0 * h)

    return directional(y, x.evaluate(p)) - directional(x, y.evaluate(p))


def coefficient_distance(a: ChartForm, b: ChartForm, point: JetPoint) -> float:
    """Max absolute difference of the two coefficient maps at a point."""
    ca = a.coefficients(point)
    cb = b.coefficients(point)
    keys = set(ca) | set(cb)
    if not keys:
        return 0.0
    return max(abs(ca.get(k, 0.0) - cb.get(k, 0.0)) for k in keys)


@dataclass(frozen=True, eq=False)
class Section2Jet:
    """The second-order jet curve of a section, with holonomic derivatives.

    Each fiber coordinate carries a linear-in-t part (the winding of a circle
    map; zero for plane curves) plus a periodic part.  Derivative slots are
    spectral derivatives of the fiber data, so the curve is holonomic by
    construction.
    """

    chart: JetChart
    linear: tuple[float, ...]
    periodic: tuple[PeriodicFunction, ...]

    def __post_init__(self) -> None:
        m = self.chart.fiber_count
        if len(self.linear) != m or len(self.periodic) != m:
            raise ValueError(f"expected {m} fiber channels")
        res = {p.resolution for p in self.periodic}
        if len(res) != 1:
            raise ResolutionMismatchError("fiber functions must share a resolution")

    @property
    def resolution(self) -> int:
        return self.periodic[0].resolution

    @cached_property
    def _derivatives(self) -> tuple[tuple[PeriodicFunction, ...], ...]:
        d1 = tuple(lin + p.derivative() for lin, p in zip(self.linear, self.periodic))
        d2 = tuple(f.derivative() for f in d1)
        d3 = tuple(f.derivative() for f in d2)
        return d1, d2, d3

    @cached_property
    def jet_points(self) -> np.ndarray:
        """Array (N, dim) with rows (t, q, dq, ddq) along the grid."""
        t = grid(self.resolution)
        d1, d2, _ = self._derivatives
        cols = [t]
        cols += [lin * t + p.samples for lin, p in zip(self.linear, self.periodic)]
        cols += [f.samples for f in d1]
        cols += [f.samples for f in d2]
        out = np.column_stack(cols)
        out.setflags(write=False)
        return out

    @cached_property
    def velocities(self) -> np.ndarray:
        """Array (N, dim) of jet-curve velocities (1, dq, ddq, dddq)."""
        d1, d2, d3 = self._derivatives
        cols = [np.ones(self.resolution)]
        cols += [f.samples for f in d1]
        cols += [f.samples for f in d2]
        cols += [f.samples for f in d3]
        out = np.column_stack(cols)
        out.setflags(write=False)
        return out

    def perturbed(self, direction: Sequence[PeriodicFunction], eps: float) -> "Section2Jet":
        """Shift the periodic fiber data by eps * direction (one entry per fiber)."""
        if len(direction) != len(self.periodic):
            raise ValueError("direction must supply one function per fiber coordinate")
        return Section2Jet(
            self.chart,
            self.linear,
            tuple(p + eps * h for p, h in zip(self.periodic, direction)),
        )


VerticalTuple = tuple[PeriodicFunction, ...]


def prolong_vertical(chart: JetChart, direction: Sequence[PeriodicFunction]) -> ProlongedField:
    """Prolong a purely vertical direction (no base component)."""
    return prolong2(chart, None, tuple(direction))


def im_eval(
    a: ChartForm,
    section: Section2Jet,
    verticals: Sequence[ProlongedField] = (),
) -> float:
    """Fiber integration: contract, pull back along the jet curve, integrate.

    The first listed vertical is contracted into the form's first slot, the
    remaining slot is paired with the jet-curve velocity, and the resulting
    function of t is integrated with the uniform rule.
    """
    if a.chart != section.chart:
        raise ValueError("form and section must share a chart")
    if a.degree != 1 + len(verticals):
        raise ValueError(
            f"degree mismatch: form of degree {a.degree} needs {a.degree - 1} verticals, "
            f"got {len(verticals)}"
        )
    contracted = a
    for x in verticals:
        contracted = interior(x, contracted)
    pts = section.jet_points
    vels = section.velocities
    values = np.empty(section.resolution)
    for j in range(section.resolution):
        try:
            cmap = contracted.coefficients(pts[j])
        except DomainError as exc:
            raise DomainError(f"section leaves the form's domain at sample {j}") from exc
        values[j] = sum(c * vels[j, key[0]] for key, c in cmap.items())
    return integrate(PeriodicFunction(values))


def functional_derivative(
    a: ChartForm,
    section: Section2Jet,
    verticals: Sequence[ProlongedField],
    direction: VerticalTuple,
    step: float = 1e-5,
    relative: bool = True,
    richardson: bool = False,
) -> float:
    """Derivative of s -> im_eval(a, s, verticals) along a vertical direction.

    Symmetric differences with the step taken relative to the direction's sup
    norm by default; Richardson extrapolation is available behind a flag.
    """
    sup = max((h.sup_norm for h in direction), default=0.0)
    if sup == 0.0:
        return 0.0
    h = step / sup if relative else step

    def diff(hh: float) -> float:
        plus = im_eval(a, section.perturbed(direction, hh), verticals)
        minus = im_eval(a, section.perturbed(direction, -hh), verticals)
        return (plus - minus) / (2.0 * hh)

    if richardson:
        return (4.0 * diff(h / 2.0) - diff(h)) / 3.0
    return diff(h)


def fd_exterior_derivative(
    a: ChartForm,
    section: Section2Jet,
    probes: Sequence[VerticalTuple],
    step: float = 1e-5,
) -> float:
    """Flat-chart exterior derivative of s -> im_eval(a, s, ...) on constant probes.

    For constant directions P_i the bracket terms vanish, leaving the
    alternating sum of directional derivatives
    sum_i (-1)^i D_{P_i} [ F(P_0, ..., no P_i, ..., P_k) ].
    """
    k = a.degree - 1
    if len(probes) != k + 1:
        raise ValueError(f"need {k + 1} probe directions, got {len(probes)}")
    total = 0.0
    for i, direction in enumerate(probes):
        rest = [prolong_vertical(a.chart, p) for j, p in enumerate(probes) if j != i]
        term = functional_derivative(a, section, rest, direction, step)
        total += -term if i % 2 else term
    return total


@dataclass
class NaturalityFixtures:
    """Probe data for the integration-map naturality checks.

    ``probes`` are constant vertical directions (one periodic function per
    fiber coordinate).  ``field`` is a prolonged projectable field and
    ``induced`` maps a section to the vertical representative of the induced
    motion on section space; both are needed for the contraction and Lie
    items.
    """

    probes: Sequence[VerticalTuple]
    step: float = 1e-5
    form_step: float = DEFAULT_FORM_STEP
    field: Optional[ProlongedField] = None
    induced: Optional[Callable[[Section2Jet], VerticalTuple]] = None


@dataclass
class NaturalityReport:
    commutes_with_d: float
    commutes_with_lie: Optional[float]
    commutes_with_contraction: Optional[float]

    @property
    def max_residual(self) -> float:
        vals = [self.commutes_with_d]
        if self.commutes_with_lie is not None:
            vals.append(self.commutes_with_lie)
        if self.commutes_with_contraction is not None:
            vals.append(self.commutes_with_contraction)
        return max(vals)


def _induced_linearization(
    induced: Callable[[Section2Jet], VerticalTuple],
    section: Section2Jet,
    probe: VerticalTuple,
    step: float,
) -> VerticalTuple:
    sup = max((h.sup_norm for h in probe), default=0.0)
    if sup == 0.0:
        return tuple(PeriodicFunction.zero(section.resolution) for _ in probe)
    h = step / sup
    plus = induced(section.perturbed(probe, h))
    minus = induced(section.perturbed(probe, -h))
    return tuple((p - m) * (1.0 / (2.0 * h)) for p, m in zip(plus, minus))


def verify_im_naturality(
    a: ChartForm,
    section: Section2Jet,
    fixtures: NaturalityFixtures,
) -> NaturalityReport:
    """Residuals of the integration map commuting with d, Lie, and contraction.

    The d item compares the fiber integral of the numeric exterior derivative
    with a finite-difference exterior derivative on section space; the
    contraction item compares contracting upstairs with contracting by the
    induced vertical representative downstairs; the Lie item compares the
    fiber integral of the Cartan-formula Lie derivative with the flow-plus-
    transport derivative on section space.
    """
    k = a.degree - 1
    chart = a.chart

    lhs = im_eval(
        dform(a, fixtures.form_step),
        section,
        [prolong_vertical(chart, p) for p in fixtures.probes[: k + 1]],
    )
    rhs = fd_exterior_derivative(a, section, fixtures.probes[: k + 1], fixtures.step)
    item_d = abs(lhs - rhs)

    item_contraction = None
    item_lie = None
    if fixtures.field is not None and fixtures.induced is not None:
        rep = fixtures.induced(section)
        if k >= 1:
            tail = [prolong_vertical(chart, p) for p in fixtures.probes[: k - 1]]
            upstairs = im_eval(interior(fixtures.field, a), section, tail)
            downstairs = im_eval(a, section, [prolong_vertical(chart, rep)] + tail)
            item_contraction = abs(upstairs - downstairs)

        probes_k = list(fixtures.probes[:k])
        prolonged_k = [prolong_vertical(chart, p) for p in probes_k]
        lhs_lie = im_eval(lie_derivative(fixtures.field, a, fixtures.form_step), section, prolonged_k)
        flow = functional_derivative(a, section, prolonged_k, rep, fixtures.step)
        transport = 0.0
        for i, probe in enumerate(probes_k):
            moved = _induced_linearization(fixtures.induced, section, probe, fixtures.step)
            args = list(prolonged_k)
            args[i] = prolong_vertical(chart, moved)
            transport += im_eval(a, section, args)
        item_lie = abs(lhs_lie - (flow + transport))

    return NaturalityReport(item_d, item_lie, item_contraction)
