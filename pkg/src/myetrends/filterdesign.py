"""Design of concurrent filter families that make mixed-period averages comparable.

Rolling averages of different lengths lag a moving signal by different
amounts, so their raw values at a common endpoint are not comparable. This
module constructs, for a set of averaging lengths (periods) and a polynomial
trend degree ``d``, one concurrent filter per period such that

* every filter uses only present and past values,
* applying period ``k``'s filter to the ``k``-length rolling average of a
  signal yields the *same* composite weights for every ``k`` in the set, and
* that shared composite reproduces any polynomial trend of degree at most
  ``d`` exactly.

The construction solves a small linear system over the rationals: writing
``theta`` for the product of all the rolling-average polynomials, find the
shortest ``phi`` with ``phi * theta`` having weight sum 1 and vanishing
derivatives at ``z = 1`` through order ``d``. The filter for period ``k`` is
then ``phi`` times the product of the *other* periods' averaging
polynomials, and the shared composite is ``phi * theta``. All arithmetic is
exact, and :func:`verify_filter_set` re-checks every property from scratch.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .exceptions import DesignInfeasibleError
from .ratpoly import ONE, RatPoly, sma

__all__ = [
    "DesignSpec",
    "FilterSet",
    "VerificationCheck",
    "VerificationReport",
    "sma_product",
    "constraint_matrix",
    "solve_phi",
    "design_filters",
    "verify_filter_set",
    "variance_inflation",
]

RationalMatrix = list[list[Fraction]]

# Above this trend degree the design is exact but numerically extreme once
# coefficients are floated, and rarely of practical use.
_DEGREE_WARN_THRESHOLD = 10


@dataclass(frozen=True)
class DesignSpec:
    """Periods and trend degree for a filter family.

    Parameters
    ----------
    periods : iterable of int
        Distinct averaging lengths, each at least 1. Stored sorted.
    degree : int
        Highest polynomial trend degree the composite must reproduce.
    """

    periods: tuple[int, ...]
    degree: int

    def __init__(self, periods: Iterable[int], degree: int) -> None:
        ps = tuple(periods)
        if not ps:
            raise ValueError("period set must be nonempty")
        for k in ps:
            if not isinstance(k, int) or isinstance(k, bool) or k < 1:
                raise ValueError(f"periods must be integers >= 1, got {k!r}")
        if len(set(ps)) != len(ps):
            raise ValueError(f"periods must be distinct, got {ps}")
        if not isinstance(degree, int) or isinstance(degree, bool) or degree < 0:
            raise ValueError(f"trend degree must be an integer >= 0, got {degree!r}")
        object.__setattr__(self, "periods", tuple(sorted(ps)))
        object.__setattr__(self, "degree", degree)

    def __str__(self) -> str:
        return f"periods={{{', '.join(map(str, self.periods))}}}, degree={self.degree}"


@dataclass(frozen=True, eq=True)
class FilterSet:
    """A designed filter family.

    Attributes
    ----------
    spec : DesignSpec
        The request this family answers.
    phi : RatPoly
        The shared correction polynomial from the constraint solve.
    psi : dict
        Per-period concurrent filters, keyed by period. ``psi[k]`` applies
        to the ``k``-period rolling-average series.
    common : RatPoly
        The composite weights that every ``psi[k]`` composed with its
        period's averaging polynomial must equal.
    """

    spec: DesignSpec
    phi: RatPoly
    psi: dict[int, RatPoly]
    common: RatPoly

    def to_dict(self) -> dict:
        """Plain-data form with coefficients as exact ``"num/den"`` strings."""
        return {
            "periods": list(self.spec.periods),
            "degree": self.spec.degree,
            "phi": _poly_strings(self.phi),
            "psi": {str(k): _poly_strings(p) for k, p in sorted(self.psi.items())},
            "common": _poly_strings(self.common),
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)

    @classmethod
    def from_dict(cls, data: Mapping) -> "FilterSet":
        """Rebuild a filter set from :meth:`to_dict` output.

        The result is reconstructed as stored; run
        :func:`verify_filter_set` to re-check its properties.
        """
        spec = DesignSpec(tuple(int(k) for k in data["periods"]), int(data["degree"]))
        phi = _poly_from_strings(data["phi"])
        psi = {int(k): _poly_from_strings(v) for k, v in data["psi"].items()}
        if set(psi) != set(spec.periods):
            raise ValueError(
                f"psi keys {sorted(psi)} do not match periods {list(spec.periods)}"
            )
        common = _poly_from_strings(data["common"])
        return cls(spec=spec, phi=phi, psi=psi, common=common)


def _poly_strings(p: RatPoly) -> list[str]:
    return [f"{c.numerator}/{c.denominator}" for c in p.coeffs]


def _poly_from_strings(items: Sequence[str]) -> RatPoly:
    return RatPoly([Fraction(s) for s in items])


def sma_product(periods: Iterable[int]) -> RatPoly:
    """Product of the rolling-average polynomials for the given periods."""
    out = ONE
    for k in periods:
        out = out * sma(k)
    return out


def constraint_matrix(spec: DesignSpec) -> RationalMatrix:
    """Exact matrix of the design constraints for ``spec``.

    Row ``j`` (0-based) holds the ``j``-th derivative at ``z = 1`` of
    ``z**c * theta`` for column ``c``, where ``theta`` is the product of all
    the periods' averaging polynomials. Solving against the unit vector
    ``(1, 0, ..., 0)`` enforces weight sum 1 and vanishing derivatives
    through order ``spec.degree`` on ``phi * theta``.
    """
    return _constraint_matrix_from(sma_product(spec.periods), spec.degree)


def _constraint_matrix_from(theta: RatPoly, degree: int) -> RationalMatrix:
    # By the product rule, the j-th derivative of z**c * theta at z = 1 is
    # sum_i C(j, i) * perm(c, i) * theta^(j-i)(1); precomputing theta's
    # derivatives makes each entry a short integer-weighted sum.
    size = degree + 1
    derivs = [theta.derivative_at_one(j) for j in range(size)]
    return [
        [
            sum(
                (math.comb(j, i) * math.perm(c, i)) * derivs[j - i]
                for i in range(0, min(j, c) + 1)
            )
            for c in range(size)
        ]
        for j in range(size)
    ]


def solve_phi(matrix: RationalMatrix) -> RatPoly:
    """Solve the constraint system for the correction polynomial.

    Runs exact Gaussian elimination on ``matrix`` against the right-hand
    side ``(1, 0, ..., 0)`` and returns the solution as a polynomial.

    Raises
    ------
    DesignInfeasibleError
        If the matrix is singular.
    """
    n = len(matrix)
    if any(len(row) != n for row in matrix):
        raise ValueError("constraint matrix must be square")
    aug = [
        [Fraction(v) for v in row] + [Fraction(1 if i == 0 else 0)]
        for i, row in enumerate(matrix)
    ]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise DesignInfeasibleError(
                f"design infeasible: singular constraint matrix of size {n}"
            )
        aug[col], aug[pivot] = aug[pivot], aug[col]
        for r in range(col + 1, n):
            factor = aug[r][col] / aug[col][col]
            if factor == 0:
                continue
            for c in range(col, n + 1):
                aug[r][c] -= factor * aug[col][c]
    coeffs = [Fraction(0)] * n
    for row in range(n - 1, -1, -1):
        acc = aug[row][n]
        for c in range(row + 1, n):
            acc -= aug[row][c] * coeffs[c]
        coeffs[row] = acc / aug[row][row]
    return RatPoly(coeffs)


def design_filters(spec: DesignSpec) -> FilterSet:
    """Design the concurrent filter family for ``spec``.

    Returns a :class:`FilterSet` whose per-period filters all reduce to the
    same composite weights and whose composite reproduces polynomial trends
    through degree ``spec.degree``. Exact throughout.
    """
    if spec.degree > _DEGREE_WARN_THRESHOLD:
        warnings.warn(
            f"trend degree {spec.degree} yields extreme filter weights; "
            "results are exact but amplify noise enormously",
            stacklevel=2,
        )
    averages = {k: sma(k) for k in spec.periods}
    theta = ONE
    for k in spec.periods:
        theta = theta * averages[k]
    try:
        phi = solve_phi(_constraint_matrix_from(theta, spec.degree))
    except DesignInfeasibleError as exc:
        raise DesignInfeasibleError(f"design infeasible for {spec}: {exc}") from exc
    psi: dict[int, RatPoly] = {}
    for k in spec.periods:
        others = ONE
        for m in spec.periods:
            if m != k:
                others = others * averages[m]
        psi[k] = phi * others
    common = phi * theta
    return FilterSet(spec=spec, phi=phi, psi=psi, common=common)


@dataclass(frozen=True)
class VerificationCheck:
    """One verified property: a name, a pass flag, and the exact residual."""

    name: str
    passed: bool
    residual: str


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of re-deriving every property of a filter set from scratch."""

    checks: tuple[VerificationCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> tuple[VerificationCheck, ...]:
        return tuple(c for c in self.checks if not c.passed)

    def __str__(self) -> str:
        lines = []
        for c in self.checks:
            flag = "ok" if c.passed else "FAIL"
            lines.append(f"[{flag:4s}] {c.name}: {c.residual}")
        return "\n".join(lines)


def verify_filter_set(fs: FilterSet) -> VerificationReport:
    """Independently re-check every designed property of ``fs``.

    Recomputes, with exact arithmetic and without reusing the design path's
    intermediates, that the composite weights sum to one, that derivatives
    at ``z = 1`` vanish through the trend degree, that each period's filter
    composed with its averaging polynomial equals the composite, and that
    the correction polynomial is no longer than the trend degree allows.
    Residuals are reported exactly, so a failure is attributable.
    """
    checks: list[VerificationCheck] = []
    d = fs.spec.degree

    total = fs.common.derivative_at_one(0)
    checks.append(
        VerificationCheck(
            name="weight-sum",
            passed=total == 1,
            residual=f"sum(common) - 1 = {total - 1}",
        )
    )
    for j in range(1, d + 1):
        val = fs.common.derivative_at_one(j)
        checks.append(
            VerificationCheck(
                name=f"vanishing-derivative-{j}",
                passed=val == 0,
                residual=f"d^{j}/dz^{j} common at z=1 = {val}",
            )
        )
    for k in fs.spec.periods:
        if k not in fs.psi:
            checks.append(
                VerificationCheck(
                    name=f"composition-{k}",
                    passed=False,
                    residual=f"no filter stored for period {k}",
                )
            )
            continue
        diff = fs.psi[k] * sma(k) - fs.common
        checks.append(
            VerificationCheck(
                name=f"composition-{k}",
                passed=not diff,
                residual=f"psi[{k}]*avg({k}) - common = {diff}",
            )
        )
    checks.append(
        VerificationCheck(
            name="phi-degree",
            passed=fs.phi.degree <= d,
            residual=f"degree(phi) = {fs.phi.degree}, allowed <= {d}",
        )
    )
    return VerificationReport(checks=tuple(checks))


def variance_inflation(p: RatPoly) -> Fraction:
    """Sum of squared weights: output variance per unit white-noise variance.

    For independent same-variance inputs, a weighted average's variance is
    the input variance times this factor. The identity filter gives 1;
    values above 1 mean the filter amplifies noise.
    """
    return sum((c * c for c in p.coeffs), Fraction(0))
