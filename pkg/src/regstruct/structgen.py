"""Symbol generation by rule closure, subcriticality and the negative sector.

An equation is described by the degrees of its noises and a list of right
hand side *shapes*.  A shape is a monomial pattern

    [noise] * X^k * D^delta u * ... * D^delta u     (up to ``factors`` copies)

where ``u`` stands for the solution.  Two families are built up to the
cutoff ``gamma``: ``F0`` (what is needed to describe ``u``: polynomials and
planted trees) and ``F1`` (what is needed for the right hand side: shape
products of ``F0`` elements).  The shape format is this package's own
contract.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .symbols import (
    ONE,
    ZERO_DEGREE,
    Degree,
    DecoratedTree,
    Grading,
    NoiseCollision,
    as_degree,
    plant,
    product,
    unit_index,
    x_power,
    xi,
)


class SpecError(ValueError):
    """Malformed equation description."""


class NonSubcritical(Exception):
    """The rule closure would be infinite below a fixed degree."""

    def __init__(self, message: str, shape=None, witness=()):
        super().__init__(message)
        self.shape = shape
        self.witness = list(witness)


@dataclass(frozen=True)
class Shape:
    noise: Optional[int] = None  # 1-based noise index, None for none
    factors: int = 0
    derivative: int = 0  # spatial derivative order on each solution factor (0 or 1)
    max_poly: int = 0  # extra X^k decoration, |k| <= max_poly (unweighted)

    def describe(self, noise_names=()) -> str:
        parts = []
        if self.noise is not None:
            parts.append(noise_names[self.noise - 1] if noise_names else f"Xi({self.noise})")
        if self.factors:
            u = "Du" if self.derivative else "u"
            parts.append(f"{u}^{self.factors}")
        if self.max_poly:
            parts.append(f"X^<={self.max_poly}")
        return "*".join(parts) or "1"


@dataclass
class EquationSpec:
    dimension: int
    noises: list  # [(name, Degree)]
    shapes: list  # [Shape]
    kernel_order: Fraction = Fraction(2)
    gamma: Optional[Degree] = None
    name: str = "equation"

    def __post_init__(self):
        self.kernel_order = Fraction(self.kernel_order)
        self.noises = [(n, as_degree(d)) for n, d in self.noises]
        if self.gamma is not None:
            self.gamma = as_degree(self.gamma)
        self.validate()

    def validate(self):
        if self.dimension < 1:
            raise SpecError("dimension must be at least 1")
        if self.kernel_order <= 0:
            raise SpecError("kernel_order must be positive")
        for n, d in self.noises:
            if not d < ZERO_DEGREE:
                raise SpecError(f"noise {n!r} must have negative degree, got {d}")
        if not self.shapes:
            raise SpecError("at least one right hand side shape is required")
        for s in self.shapes:
            if s.factors < 0:
                raise SpecError("shape factor counts must be >= 0")
            if s.noise is not None and not 1 <= s.noise <= len(self.noises):
                raise SpecError(f"shape refers to unknown noise {s.noise}")
            if s.derivative not in (0, 1):
                raise SpecError("only derivative orders 0 and 1 are supported")

    @property
    def grading(self) -> Grading:
        return Grading(tuple(d for _, d in self.noises), self.kernel_order)

    @property
    def noise_names(self) -> list:
        return [n for n, _ in self.noises]

    def default_gamma(self) -> Degree:
        worst = max((d for _, d in self.noises), default=ZERO_DEGREE)
        return Degree(self.kernel_order + 2) + worst

    @property
    def cutoff(self) -> Degree:
        return self.gamma if self.gamma is not None else self.default_gamma()


def white_noise_degree(dimension: int, kernel_order=2) -> Degree:
    """Space-time white noise just below its scaling dimension."""
    return Degree(-(Fraction(dimension) + Fraction(kernel_order)) / 2, -1)


def spec_from_dict(data: dict) -> EquationSpec:
    try:
        d = int(data["dimension"])
        ko = Fraction(str(data.get("kernel_order", 2)))
        noises = []
        for i, nz in enumerate(data.get("noises", [])):
            deg = nz["degree"]
            if deg == "white":
                deg = white_noise_degree(d, ko)
            noises.append((nz.get("name", f"xi{i + 1}"), as_degree(str(deg))))
        names = [n for n, _ in noises]
        shapes = []
        for s in data["shapes"]:
            nz = s.get("noise")
            if isinstance(nz, str):
                if nz not in names:
                    raise SpecError(f"shape refers to unknown noise {nz!r}")
                nz = names.index(nz) + 1
            shapes.append(Shape(nz, int(s.get("factors", 0)), int(s.get("derivative", 0)), int(s.get("max_poly", 0))))
        gamma = data.get("gamma")
        return EquationSpec(d, noises, shapes, ko, as_degree(str(gamma)) if gamma is not None else None, data.get("name", "equation"))
    except SpecError:
        raise
    except KeyError as e:
        raise SpecError(f"missing field {e.args[0]!r}") from None
    except (TypeError, ValueError) as e:
        raise SpecError(str(e)) from None


def load_spec(path) -> EquationSpec:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as e:
            raise SpecError(f"{path}:{e.lineno}:{e.colno}: {e.msg}") from None
    try:
        return spec_from_dict(data)
    except SpecError as e:
        raise SpecError(f"{path}: {e}") from None


# --------------------------------------------------------------------------
# subcriticality


@dataclass(frozen=True)
class ShapeMargin:
    shape: Shape
    margin: Degree  # degree gained by one more application of the shape


def _shape_margins(spec: EquationSpec) -> list:
    ko = spec.kernel_order
    alpha = min(d for _, d in spec.noises) if spec.noises else ZERO_DEGREE
    out = []
    for s in spec.shapes:
        if s.factors < 1:
            continue
        gain = Degree(ko - s.derivative)
        lowest = gain + alpha
        floor = lowest if lowest < ZERO_DEGREE else ZERO_DEGREE
        m = gain + floor * (s.factors - 1)
        if s.noise is not None:
            m = m + spec.noises[s.noise - 1][1]
        out.append(ShapeMargin(s, m))
    return out


def check_subcriticality(spec: EquationSpec):
    """``(subcritical, binding margin)``.

    For each shape, plant a tree and feed it back through the shape with all
    other factors at their lowest possible degree; the margin is the degree
    gained. The equation is subcritical iff every margin is strictly
    positive. With no nonlinear shape the margin is ``None``.
    """
    margins = _shape_margins(spec)
    if not margins:
        return True, None
    worst = min(margins, key=lambda sm: sm.margin)
    return worst.margin > ZERO_DEGREE, worst.margin


def binding_shape(spec: EquationSpec) -> Optional[Shape]:
    margins = _shape_margins(spec)
    if not margins:
        return None
    return min(margins, key=lambda sm: sm.margin).shape


def critical_noise_degree(spec: EquationSpec):
    """Noise degree at which subcriticality is lost (``-inf`` for linear rules)."""
    if not spec.noises:
        raise SpecError("the rule does not depend on a noise")
    ko = spec.kernel_order
    best = -math.inf
    for s in spec.shapes:
        gain = ko - s.derivative
        if s.noise is not None and s.factors >= 1:
            thr = -gain
        elif s.noise is None and s.factors >= 2:
            thr = -gain * s.factors / (s.factors - 1)
        else:
            continue
        if best == -math.inf or thr > best:
            best = thr
    return best if best == -math.inf else Degree(best)


# --------------------------------------------------------------------------
# generation


@dataclass
class SymbolTable:
    spec: EquationSpec
    gamma: Degree
    f0: list
    f1: list
    subcritical: bool
    degrees: dict = field(default_factory=dict)

    @property
    def grading(self) -> Grading:
        return self.spec.grading

    @property
    def trees(self) -> list:
        allt = set(self.f0) | set(self.f1)
        return sorted(allt, key=lambda t: (self.degrees[t], t.sort_key()))

    @property
    def negative_sector(self) -> list:
        return [t for t in self.trees if self.degrees[t] < ZERO_DEGREE and not t.has_poly()]

    def degree(self, t: DecoratedTree) -> Degree:
        return self.degrees.get(t) or self.grading.degree(t)

    def rows(self):
        """``(notation, const, kappa, in_negative_sector)`` per tree."""
        from .notation import format_tree

        neg = set(self.negative_sector)
        for t in self.trees:
            d = self.degrees[t]
            yield format_tree(t), d.const, d.kappa, t in neg

    def __contains__(self, t):
        return t in self.degrees

    def __len__(self):
        return len(self.degrees)


def multi_indices(dim_total: int, weights, bound) -> list:
    """All multi-indices with weighted length strictly below ``bound``."""
    out = []

    def rec(prefix, used):
        i = len(prefix)
        if i == dim_total:
            out.append(tuple(prefix))
            return
        w = weights[i]
        k = 0
        while used + k * w < bound:
            rec(prefix + [k], used + k * w)
            k += 1

    rec([], Fraction(0))
    return out


def _poly_trees(spec: EquationSpec, gamma: Degree) -> list:
    ko = spec.kernel_order
    weights = [ko] + [Fraction(1)] * spec.dimension
    ks = multi_indices(spec.dimension + 1, weights, _upper(gamma))
    trees = []
    for k in ks:
        t = x_power(k)
        if spec.grading.degree(t) < gamma:
            trees.append(t)
    return trees


def _upper(gamma: Degree) -> Fraction:
    # a rational bound B such that weighted |k| < gamma implies |k| < B
    return gamma.const + (1 if gamma.kappa > 0 else 0)


def _small_polys(spec: EquationSpec, max_poly: int) -> list:
    out = [ONE]
    if max_poly <= 0:
        return out
    for k in itertools.product(range(max_poly + 1), repeat=spec.dimension + 1):
        if 0 < sum(k) <= max_poly:
            out.append(x_power(k))
    return out


def generate_symbols(spec: EquationSpec, gamma=None, check: bool = True, max_symbols: int = 20000) -> SymbolTable:
    """Close the shape rules up to ``gamma`` (default: the spec's cutoff)."""
    gamma = as_degree(gamma) if gamma is not None else spec.cutoff
    sub, margin = check_subcriticality(spec)
    if check and not sub:
        shape = binding_shape(spec)
        raise NonSubcritical(
            f"not subcritical: shape {shape.describe(spec.noise_names)} gains {margin} per application",
            shape,
            _witness(spec, shape),
        )
    gr = spec.grading
    deg = gr.degree
    polys = _poly_trees(spec, gamma)
    planted: set = set()
    f1: set = set()
    d = spec.dimension
    while True:
        # solution factors available to the shapes
        factors_by_deriv = {}
        for s in spec.shapes:
            if s.derivative in factors_by_deriv:
                continue
            if s.derivative == 0:
                facs = list(planted) + [p for p in polys if p != ONE]
            else:
                facs = []
                for p in planted:
                    (_, inner), = p.children
                    for i in range(1, d + 1):
                        facs.append(plant(inner, unit_index(i)))
                for p in polys:
                    k = p.label.poly
                    for i in range(1, d + 1):
                        if i < len(k) and k[i] > 0:
                            kk = list(k)
                            kk[i] -= 1
                            facs.append(x_power(kk))
            factors_by_deriv[s.derivative] = sorted(set(facs))
        new_f1 = set()
        for s in spec.shapes:
            base = xi(s.noise) if s.noise is not None else ONE
            facs = factors_by_deriv[s.derivative]
            for extra in _small_polys(spec, s.max_poly):
                head = product([base, extra])
                for m in range(0, s.factors + 1):
                    for combo in itertools.combinations_with_replacement(facs, m):
                        try:
                            t = product((head,) + combo)
                        except NoiseCollision:
                            continue
                        if deg(t) < gamma:
                            new_f1.add(t)
                if len(new_f1) > max_symbols:
                    raise NonSubcritical(f"more than {max_symbols} symbols below {gamma}", s)
        new_planted = {plant(t) for t in new_f1 if not t.is_polynomial() and deg(plant(t)) < gamma}
        if new_f1 == f1 and new_planted == planted:
            break
        f1, planted = new_f1, new_planted
    f0 = sorted(set(polys) | planted, key=lambda t: (deg(t), t.sort_key()))
    f1s = sorted(f1, key=lambda t: (deg(t), t.sort_key()))
    degrees = {t: deg(t) for t in set(f0) | f1}
    return SymbolTable(spec, gamma, f0, f1s, sub, degrees)


def _witness(spec: EquationSpec, shape: Shape, length: int = 4) -> list:
    """Trees from repeatedly feeding a shape its own output."""
    out = []
    t = xi(shape.noise) if shape.noise is not None else xi(1)
    deriv = unit_index(1) if shape.derivative else ()
    for _ in range(length):
        facs = [plant(t, deriv)] + [plant(xi(1), deriv)] * (shape.factors - 1)
        head = xi(shape.noise) if shape.noise is not None else ONE
        t = product([head] + facs)
        out.append(t)
    return out
