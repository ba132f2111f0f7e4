"""Exact symbolic core: polynomials with coefficients in a finite graded algebra,
and rational sections with factored linear-form denominators.

Everything is over Q via fractions.Fraction; no floats anywhere.  A polynomial
is a sparse dict mapping (exponent tuple, algebra basis index) -> Fraction.
Cohomological degree of a term is 2*(sum of exponents) + degree of the basis
element, so the variables sit in degree 2.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Iterator, Mapping

Q = Fraction

__all__ = [
    "Q",
    "ValidationError",
    "ExactDivisionError",
    "Variables",
    "LinearForm",
    "GradedAlgebra",
    "POINT_ALGEBRA",
    "EquivariantPolynomial",
    "RationalSection",
    "invert_euler",
]


class ValidationError(ValueError):
    """Raised when input data violates a structural requirement."""


class ExactDivisionError(ArithmeticError):
    """Raised when an exact polynomial division leaves a remainder."""


def _q(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class Variables:
    """Ordered variable names; index 0 is the distinguished circle variable."""

    names: tuple[str, ...]

    def __post_init__(self):
        if not self.names:
            raise ValidationError("need at least one variable")
        if len(set(self.names)) != len(self.names):
            raise ValidationError("variable names must be distinct")

    @property
    def count(self) -> int:
        return len(self.names)

    def zero_exps(self) -> tuple[int, ...]:
        return (0,) * len(self.names)


def monomial_sort_key(exps: tuple[int, ...]):
    """Graded-lex order with the first variable strongest; use for descending sorts."""
    return (-sum(exps), tuple(-e for e in exps))


@dataclass(frozen=True)
class LinearForm:
    """Homogeneous linear form sum(coeffs[i] * variable_i); no constant term."""

    coeffs: tuple[Fraction, ...]

    @staticmethod
    def make(coeffs: Iterable) -> "LinearForm":
        return LinearForm(tuple(_q(c) for c in coeffs))

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def involves(self, var: int) -> bool:
        return self.coeffs[var] != 0

    def pair(self, vector: Iterable) -> Fraction:
        return sum((c * _q(v) for c, v in zip(self.coeffs, vector)), Q(0))

    def normalized(self) -> tuple[Fraction, "LinearForm"]:
        """Write self = scale * primitive where primitive has coprime integer
        coefficients and positive leading (first nonzero) coefficient."""
        if self.is_zero():
            raise ValidationError("cannot normalize the zero linear form")
        den = 1
        for c in self.coeffs:
            den = den * c.denominator // gcd(den, c.denominator)
        ints = [int(c * den) for c in self.coeffs]
        g = 0
        for v in ints:
            g = gcd(g, v)
        lead = next(v for v in ints if v != 0)
        if lead < 0:
            g = -g
        prim = LinearForm(tuple(Q(v // g) for v in ints))
        return Q(g, den), prim

    def render(self, names: tuple[str, ...]) -> str:
        parts = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if c == 1:
                parts.append(names[i])
            elif c == -1:
                parts.append(f"-{names[i]}")
            else:
                parts.append(f"{c}*{names[i]}")
        return "+".join(parts).replace("+-", "-") or "0"

    def __str__(self) -> str:
        return self.render(tuple(f"v{i}" for i in range(len(self.coeffs))))


class GradedAlgebra:
    """Finite-dimensional graded commutative algebra given by structure constants.

    Basis element 0 is the unit.  ``integral`` is the linear functional that is
    nonzero only on the top_degree graded piece.
    """

    __slots__ = ("basis", "degrees", "top_degree", "integral", "_table", "_key")

    def __init__(
        self,
        basis: Iterable[str],
        degrees: Iterable[int],
        mult_table: Mapping[tuple[int, int], Mapping[int, Fraction]],
        integral: Iterable,
        top_degree: int,
    ):
        self.basis = tuple(basis)
        self.degrees = tuple(int(d) for d in degrees)
        self.top_degree = int(top_degree)
        self.integral = tuple(_q(v) for v in integral)
        n = len(self.basis)
        table: dict[tuple[int, int], dict[int, Fraction]] = {}
        for (i, j), row in mult_table.items():
            entry = {int(k): _q(v) for k, v in row.items() if _q(v) != 0}
            table[(int(i), int(j))] = entry
            table.setdefault((int(j), int(i)), entry)
        self._table = table
        self._key = (self.basis, self.degrees, self.top_degree, self.integral,
                     tuple(sorted((ij, tuple(sorted(row.items()))) for ij, row in table.items())))
        self._validate()

    def _validate(self):
        n = len(self.basis)
        if n == 0 or len(self.degrees) != n or len(self.integral) != n:
            raise ValidationError("algebra basis/degrees/integral length mismatch")
        if any(d % 2 or d < 0 for d in self.degrees):
            raise ValidationError("basis degrees must be even and nonnegative")
        if self.degrees[0] != 0:
            raise ValidationError("basis element 0 must have degree 0 (the unit)")
        for i in range(n):
            for j in range(n):
                row = self.mul_basis(i, j)
                want = self.degrees[i] + self.degrees[j]
                for k, v in row.items():
                    if not (0 <= k < n):
                        raise ValidationError(f"multiplication table index out of range at ({i},{j})")
                    if self.degrees[k] != want:
                        raise ValidationError(
                            f"product of basis {i},{j} has a component off degree {want}")
                if self.mul_basis(j, i) != row:
                    raise ValidationError(f"multiplication not commutative at ({i},{j})")
        for j in range(n):
            if self.mul_basis(0, j) != {j: Q(1)}:
                raise ValidationError(f"basis element 0 does not act as unit on {j}")
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    if self._mul_elt(self.mul_basis(i, j), {k: Q(1)}) != \
                            self._mul_elt({i: Q(1)}, self.mul_basis(j, k)):
                        raise ValidationError(
                            "multiplication not associative on triple "
                            f"({self.basis[i]},{self.basis[j]},{self.basis[k]})")
        for k, v in enumerate(self.integral):
            if v != 0 and self.degrees[k] != self.top_degree:
                raise ValidationError(
                    f"integral is nonzero on basis {k} of degree {self.degrees[k]}")
        bound = self.top_degree // 2 + 1
        for i in range(1, n):
            if self.degrees[i] == 0:
                raise ValidationError("only basis element 0 may have degree 0")
            if self.nilpotency_order({i: Q(1)}) > bound:
                raise ValidationError(f"basis element {i} is not nilpotent within degree bound")

    def _mul_elt(self, a: Mapping[int, Fraction], b: Mapping[int, Fraction]) -> dict[int, Fraction]:
        out: dict[int, Fraction] = {}
        for i, ca in a.items():
            for j, cb in b.items():
                for k, s in self.mul_basis(i, j).items():
                    v = out.get(k, Q(0)) + ca * cb * s
                    if v:
                        out[k] = v
                    else:
                        out.pop(k, None)
        return out

    def mul_basis(self, i: int, j: int) -> dict[int, Fraction]:
        return self._table.get((i, j), {})

    def nilpotency_order(self, elt: Mapping[int, Fraction]) -> int:
        """Smallest k with elt^k = 0 for an element of positive degree; 1 if elt = 0."""
        power = dict(elt)
        k = 1
        limit = self.top_degree // 2 + 2
        while power:
            if k > limit:
                return k  # caller treats > bound as failure
            power = self._mul_elt(power, elt)
            k += 1
        return k

    def integrate_elt(self, elt: Mapping[int, Fraction]) -> Fraction:
        return sum((c * self.integral[i] for i, c in elt.items()), Q(0))

    def __eq__(self, other) -> bool:
        return self is other or (isinstance(other, GradedAlgebra) and self._key == other._key)

    def __hash__(self) -> int:
        return hash(self._key)

    def __repr__(self) -> str:
        return f"GradedAlgebra(basis={self.basis}, top_degree={self.top_degree})"


POINT_ALGEBRA = GradedAlgebra(("one",), (0,), {(0, 0): {0: Q(1)}}, (Q(1),), 0)


class EquivariantPolynomial:
    """Sparse polynomial in the torus variables with graded-algebra coefficients."""

    __slots__ = ("vars", "algebra", "terms")

    def __init__(self, vars: Variables, algebra: GradedAlgebra,
                 terms: Mapping[tuple[tuple[int, ...], int], Fraction] | None = None):
        self.vars = vars
        self.algebra = algebra
        self.terms: dict[tuple[tuple[int, ...], int], Fraction] = {}
        if terms:
            for key, c in terms.items():
                c = _q(c)
                if c:
                    self.terms[key] = c

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(vars: Variables, algebra: GradedAlgebra = POINT_ALGEBRA) -> "EquivariantPolynomial":
        return EquivariantPolynomial(vars, algebra)

    @staticmethod
    def constant(vars: Variables, value, algebra: GradedAlgebra = POINT_ALGEBRA) -> "EquivariantPolynomial":
        value = _q(value)
        p = EquivariantPolynomial(vars, algebra)
        if value:
            p.terms[(vars.zero_exps(), 0)] = value
        return p

    @staticmethod
    def one(vars: Variables, algebra: GradedAlgebra = POINT_ALGEBRA) -> "EquivariantPolynomial":
        return EquivariantPolynomial.constant(vars, 1, algebra)

    @staticmethod
    def variable(vars: Variables, index: int, algebra: GradedAlgebra = POINT_ALGEBRA) -> "EquivariantPolynomial":
        exps = [0] * vars.count
        exps[index] = 1
        return EquivariantPolynomial(vars, algebra, {(tuple(exps), 0): Q(1)})

    @staticmethod
    def from_linear_form(vars: Variables, form: LinearForm,
                         algebra: GradedAlgebra = POINT_ALGEBRA) -> "EquivariantPolynomial":
        p = EquivariantPolynomial(vars, algebra)
        for i, c in enumerate(form.coeffs):
            if c:
                exps = [0] * vars.count
                exps[i] = 1
                p.terms[(tuple(exps), 0)] = c
        return p

    @staticmethod
    def from_algebra_element(vars: Variables, algebra: GradedAlgebra,
                             elt: Mapping[int, Fraction]) -> "EquivariantPolynomial":
        z = vars.zero_exps()
        return EquivariantPolynomial(vars, algebra, {(z, i): c for i, c in elt.items()})

    def copy(self) -> "EquivariantPolynomial":
        p = EquivariantPolynomial(self.vars, self.algebra)
        p.terms = dict(self.terms)
        return p

    # -- predicates and views ---------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def degree(self) -> int:
        """Cohomological degree (max over terms); -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(2 * sum(e) + self.algebra.degrees[b] for e, b in self.terms)

    def is_homogeneous(self) -> bool:
        degs = {2 * sum(e) + self.algebra.degrees[b] for e, b in self.terms}
        return len(degs) <= 1

    def homogeneous_part(self, degree: int) -> "EquivariantPolynomial":
        return EquivariantPolynomial(self.vars, self.algebra, {
            (e, b): c for (e, b), c in self.terms.items()
            if 2 * sum(e) + self.algebra.degrees[b] == degree})

    def var_degree(self, var: int) -> int:
        """Max exponent of the given variable; -1 for zero."""
        if not self.terms:
            return -1
        return max(e[var] for e, _ in self.terms)

    def involves(self, var: int) -> bool:
        return any(e[var] for e, _ in self.terms)

    def involves_any_variable(self) -> bool:
        return any(sum(e) for e, _ in self.terms)

    def constant_value(self) -> Fraction:
        """Value of a polynomial that is constant and unit-valued."""
        if not self.terms:
            return Q(0)
        [(key, c)] = self.terms.items()
        if key != (self.vars.zero_exps(), 0):
            raise ValidationError("polynomial is not a scalar constant")
        return c

    def coefficients_in(self, var: int) -> dict[int, "EquivariantPolynomial"]:
        """Slice by the exponent of one variable; slices keep full arity with
        that exponent zeroed."""
        out: dict[int, EquivariantPolynomial] = {}
        for (e, b), c in self.terms.items():
            k = e[var]
            rest = list(e)
            rest[var] = 0
            slot = out.setdefault(k, EquivariantPolynomial(self.vars, self.algebra))
            slot.terms[(tuple(rest), b)] = c
        return out

    def basis_coefficients(self) -> dict[int, "EquivariantPolynomial"]:
        """Split into pure (unit-coefficient) polynomials per algebra basis index."""
        out: dict[int, EquivariantPolynomial] = {}
        for (e, b), c in self.terms.items():
            slot = out.setdefault(b, EquivariantPolynomial(self.vars, POINT_ALGEBRA))
            slot.terms[(e, 0)] = c
        return out

    # -- arithmetic --------------------------------------------------------

    def _check(self, other: "EquivariantPolynomial"):
        if self.vars != other.vars:
            raise ValidationError("variable mismatch")
        if not (self.algebra is other.algebra or self.algebra == other.algebra):
            raise ValidationError("algebra mismatch")

    def __add__(self, other: "EquivariantPolynomial") -> "EquivariantPolynomial":
        self._check(other)
        out = self.copy()
        for key, c in other.terms.items():
            v = out.terms.get(key, Q(0)) + c
            if v:
                out.terms[key] = v
            else:
                out.terms.pop(key, None)
        return out

    def __neg__(self) -> "EquivariantPolynomial":
        return EquivariantPolynomial(self.vars, self.algebra,
                                     {k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "EquivariantPolynomial") -> "EquivariantPolynomial":
        return self + (-other)

    def scale(self, value) -> "EquivariantPolynomial":
        value = _q(value)
        if not value:
            return EquivariantPolynomial(self.vars, self.algebra)
        return EquivariantPolynomial(self.vars, self.algebra,
                                     {k: c * value for k, c in self.terms.items()})

    def __mul__(self, other: "EquivariantPolynomial") -> "EquivariantPolynomial":
        self._check(other)
        out = EquivariantPolynomial(self.vars, self.algebra)
        terms = out.terms
        mul_basis = self.algebra.mul_basis
        for (e1, b1), c1 in self.terms.items():
            for (e2, b2), c2 in other.terms.items():
                c = c1 * c2
                exps = tuple(a + b for a, b in zip(e1, e2))
                for k, s in mul_basis(b1, b2).items():
                    key = (exps, k)
                    v = terms.get(key, Q(0)) + c * s
                    if v:
                        terms[key] = v
                    else:
                        terms.pop(key, None)
        return out

    def mul_pure(self, pure: "EquivariantPolynomial") -> "EquivariantPolynomial":
        """Multiply by a unit-valued polynomial (possibly over another algebra)."""
        out = EquivariantPolynomial(self.vars, self.algebra)
        terms = out.terms
        for (e1, b1), c1 in self.terms.items():
            for (e2, b2), c2 in pure.terms.items():
                if b2 != 0:
                    raise ValidationError("mul_pure needs a unit-valued polynomial")
                key = (tuple(a + b for a, b in zip(e1, e2)), b1)
                v = terms.get(key, Q(0)) + c1 * c2
                if v:
                    terms[key] = v
                else:
                    terms.pop(key, None)
        return out

    def __pow__(self, n: int) -> "EquivariantPolynomial":
        if n < 0:
            raise ValidationError("negative polynomial power")
        out = EquivariantPolynomial.one(self.vars, self.algebra)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        return (isinstance(other, EquivariantPolynomial)
                and self.vars == other.vars
                and self.algebra == other.algebra
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.vars, tuple(sorted(self.terms.items()))))

    # -- calculus-style operations ----------------------------------------

    def derivative(self, var: int) -> "EquivariantPolynomial":
        out = EquivariantPolynomial(self.vars, self.algebra)
        for (e, b), c in self.terms.items():
            k = e[var]
            if k:
                ne = list(e)
                ne[var] = k - 1
                key = (tuple(ne), b)
                v = out.terms.get(key, Q(0)) + c * k
                if v:
                    out.terms[key] = v
                else:
                    out.terms.pop(key, None)
        return out

    def subst_linear(self, var: int, replacement: "EquivariantPolynomial") -> "EquivariantPolynomial":
        """Substitute a unit-valued polynomial (free of var) for one variable."""
        if replacement.involves(var):
            raise ValidationError("replacement must not involve the substituted variable")
        slices = self.coefficients_in(var)
        out = EquivariantPolynomial(self.vars, self.algebra)
        power = EquivariantPolynomial.one(self.vars, POINT_ALGEBRA)
        for k in range(max(slices) + 1 if slices else 0):
            if k:
                power = power.mul_pure(replacement)
            if k in slices:
                out = out + slices[k].mul_pure(power)
        return out

    def substitute_variables(self, images: list["EquivariantPolynomial"]) -> "EquivariantPolynomial":
        """Simultaneously substitute unit-valued polynomials for all variables."""
        out = EquivariantPolynomial(self.vars, self.algebra)
        cache: dict[tuple[int, int], EquivariantPolynomial] = {}

        def var_power(i: int, k: int) -> EquivariantPolynomial:
            if k == 0:
                return EquivariantPolynomial.one(self.vars, POINT_ALGEBRA)
            if (i, k) not in cache:
                cache[(i, k)] = var_power(i, k - 1).mul_pure(images[i])
            return cache[(i, k)]

        for (e, b), c in self.terms.items():
            piece = EquivariantPolynomial.from_algebra_element(self.vars, self.algebra, {b: c})
            for i, k in enumerate(e):
                if k:
                    piece = piece.mul_pure(var_power(i, k))
            out = out + piece
        return out

    def map_basis(self, target_algebra: GradedAlgebra,
                  matrix: list[list[Fraction]]) -> "EquivariantPolynomial":
        """Apply a linear map on algebra coefficients; matrix[i] is the image of
        source basis element i as a coefficient list over the target basis."""
        out = EquivariantPolynomial(self.vars, target_algebra)
        for (e, b), c in self.terms.items():
            for k, m in enumerate(matrix[b]):
                m = _q(m)
                if m:
                    key = (e, k)
                    v = out.terms.get(key, Q(0)) + c * m
                    if v:
                        out.terms[key] = v
                    else:
                        out.terms.pop(key, None)
        return out

    def integrate(self) -> "EquivariantPolynomial":
        """Apply the algebra integral coefficientwise; lands in the point algebra."""
        out = EquivariantPolynomial(self.vars, POINT_ALGEBRA)
        for (e, b), c in self.terms.items():
            w = c * self.algebra.integral[b]
            if w:
                key = (e, 0)
                v = out.terms.get(key, Q(0)) + w
                if v:
                    out.terms[key] = v
                else:
                    out.terms.pop(key, None)
        return out

    def div_exact_linear(self, form: LinearForm) -> "EquivariantPolynomial":
        """Exact division by a linear form via synthetic division; raises
        ExactDivisionError on a nonzero remainder."""
        pivot = next((i for i, c in enumerate(form.coeffs) if c != 0), None)
        if pivot is None:
            raise ZeroDivisionError("division by the zero linear form")
        a = form.coeffs[pivot]
        rest = EquivariantPolynomial.from_linear_form(
            self.vars, LinearForm(tuple(c if i != pivot else Q(0)
                                        for i, c in enumerate(form.coeffs))))
        slices = self.coefficients_in(pivot)
        if not slices:
            return EquivariantPolynomial(self.vars, self.algebra)
        d = max(slices)
        quot_slices: dict[int, EquivariantPolynomial] = {}
        remainder = dict(slices)
        for k in range(d, 0, -1):
            cur = remainder.pop(k, None)
            if cur is None or cur.is_zero():
                continue
            q = cur.scale(Q(1, 1) / a)
            quot_slices[k - 1] = q
            low = remainder.get(k - 1, EquivariantPolynomial(self.vars, self.algebra))
            remainder[k - 1] = low - q.mul_pure(rest)
        tail = remainder.get(0, EquivariantPolynomial(self.vars, self.algebra))
        if not tail.is_zero():
            raise ExactDivisionError("linear form does not divide the polynomial")
        out = EquivariantPolynomial(self.vars, self.algebra)
        for k, sl in quot_slices.items():
            for (e, b), c in sl.terms.items():
                ne = list(e)
                ne[pivot] += k
                out.terms[(tuple(ne), b)] = c
        return out

    def divisible_by_form(self, form: LinearForm) -> bool:
        try:
            self.div_exact_linear(form)
            return True
        except ExactDivisionError:
            return False

    # -- rendering ---------------------------------------------------------

    def sorted_items(self):
        return sorted(self.terms.items(),
                      key=lambda kv: (monomial_sort_key(kv[0][0]), kv[0][1]))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        chunks = []
        for (e, b), c in self.sorted_items():
            factors = []
            for i, k in enumerate(e):
                if k == 1:
                    factors.append(self.vars.names[i])
                elif k > 1:
                    factors.append(f"{self.vars.names[i]}^{k}")
            if b != 0:
                factors.append(self.algebra.basis[b])
            if not factors:
                body = str(c)
            elif c == 1:
                body = "*".join(factors)
            elif c == -1:
                body = "-" + "*".join(factors)
            else:
                body = str(c) + "*" + "*".join(factors)
            chunks.append(body)
        text = chunks[0]
        for body in chunks[1:]:
            text += " - " + body[1:] if body.startswith("-") else " + " + body
        return text

    __repr__ = __str__


class RationalSection:
    """Quotient of an EquivariantPolynomial by a multiset of linear forms.

    The denominator is kept factored and canonical: forms are primitive integer
    vectors with positive leading coefficient, scalars being absorbed into the
    numerator.  Proportional factors therefore always merge, which is what the
    residue routines rely on when grouping poles.
    """

    __slots__ = ("numer", "denom")

    def __init__(self, numer: EquivariantPolynomial,
                 denom: Mapping[LinearForm, int] | Iterable[tuple[LinearForm, int]] = (),
                 cancel: bool = True):
        items = denom.items() if isinstance(denom, Mapping) else denom
        scale = Q(1)
        merged: dict[LinearForm, int] = {}
        for form, mult in items:
            mult = int(mult)
            if mult < 0:
                raise ValidationError("negative denominator multiplicity")
            if mult == 0:
                continue
            if form.is_zero():
                raise ZeroDivisionError("zero linear form in a denominator")
            s, prim = form.normalized()
            scale *= s ** mult
            merged[prim] = merged.get(prim, 0) + mult
        if scale != 1:
            numer = numer.scale(Q(1) / scale)
        if numer.is_zero():
            merged = {}
        elif cancel and merged:
            for form in sorted(merged, key=lambda f: f.coeffs):
                while merged.get(form, 0) > 0:
                    try:
                        numer = numer.div_exact_linear(form)
                    except ExactDivisionError:
                        break
                    merged[form] -= 1
                    if merged[form] == 0:
                        del merged[form]
        self.numer = numer
        self.denom = merged

    # -- constructors ------------------------------------------------------

    @staticmethod
    def from_polynomial(p: EquivariantPolynomial) -> "RationalSection":
        return RationalSection(p, ())

    @staticmethod
    def zero(vars: Variables, algebra: GradedAlgebra = POINT_ALGEBRA) -> "RationalSection":
        return RationalSection(EquivariantPolynomial.zero(vars, algebra), ())

    @staticmethod
    def one(vars: Variables, algebra: GradedAlgebra = POINT_ALGEBRA) -> "RationalSection":
        return RationalSection(EquivariantPolynomial.one(vars, algebra), ())

    @property
    def vars(self) -> Variables:
        return self.numer.vars

    @property
    def algebra(self) -> GradedAlgebra:
        return self.numer.algebra

    def is_zero(self) -> bool:
        return self.numer.is_zero()

    def denominator_polynomial(self) -> EquivariantPolynomial:
        out = EquivariantPolynomial.one(self.vars, POINT_ALGEBRA)
        for form, mult in sorted(self.denom.items(), key=lambda kv: kv[0].coeffs):
            fp = EquivariantPolynomial.from_linear_form(self.vars, form)
            for _ in range(mult):
                out = out * fp
        return out

    def involves(self, var: int) -> bool:
        return self.numer.involves(var) or any(f.involves(var) for f in self.denom)

    # -- arithmetic --------------------------------------------------------

    def _extend_numer_to(self, target: Mapping[LinearForm, int]) -> EquivariantPolynomial:
        p = self.numer
        for form, mult in sorted(target.items(), key=lambda kv: kv[0].coeffs):
            extra = mult - self.denom.get(form, 0)
            if extra < 0:
                raise ValidationError("target denominator does not dominate")
            if extra:
                fp = EquivariantPolynomial.from_linear_form(self.vars, form)
                for _ in range(extra):
                    p = p.mul_pure(fp)
        return p

    def __add__(self, other: "RationalSection") -> "RationalSection":
        common: dict[LinearForm, int] = dict(self.denom)
        for form, mult in other.denom.items():
            common[form] = max(common.get(form, 0), mult)
        return RationalSection(self._extend_numer_to(common) + other._extend_numer_to(common),
                               common)

    def __neg__(self) -> "RationalSection":
        return RationalSection(-self.numer, self.denom, cancel=False)

    def __sub__(self, other: "RationalSection") -> "RationalSection":
        return self + (-other)

    def __mul__(self, other: "RationalSection") -> "RationalSection":
        denom = dict(self.denom)
        for form, mult in other.denom.items():
            denom[form] = denom.get(form, 0) + mult
        return RationalSection(self.numer * other.numer, denom)

    def scale(self, value) -> "RationalSection":
        return RationalSection(self.numer.scale(value), self.denom, cancel=False)

    def mul_polynomial(self, p: EquivariantPolynomial) -> "RationalSection":
        return RationalSection(self.numer.mul_pure(p) if all(b == 0 for _, b in p.terms)
                               else self.numer * p, self.denom)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalSection):
            return NotImplemented
        common: dict[LinearForm, int] = dict(self.denom)
        for form, mult in other.denom.items():
            common[form] = max(common.get(form, 0), mult)
        return self._extend_numer_to(common) == other._extend_numer_to(common)

    def __hash__(self):
        raise TypeError("RationalSection is unhashable; compare with ==")

    # -- calculus ----------------------------------------------------------

    def derivative(self, var: int) -> "RationalSection":
        out = RationalSection(self.numer.derivative(var), self.denom)
        for form, mult in self.denom.items():
            n = form.coeffs[var]
            if n:
                denom = dict(self.denom)
                denom[form] = mult + 1
                out = out + RationalSection(self.numer.scale(-n * mult), denom)
        return out

    def subst_linear(self, var: int, replacement: EquivariantPolynomial,
                     replacement_coeffs: tuple[Fraction, ...] | None = None) -> "RationalSection":
        """Substitute a linear unit-valued polynomial for one variable; every
        denominator factor must stay nonzero."""
        numer = self.numer.subst_linear(var, replacement)
        denom: list[tuple[LinearForm, int]] = []
        scale = Q(1)
        for form, mult in self.denom.items():
            n = form.coeffs[var]
            if n == 0:
                denom.append((form, mult))
                continue
            if replacement_coeffs is None:
                replacement_coeffs = tuple(
                    replacement.terms.get((tuple(1 if j == i else 0 for j in range(self.vars.count)), 0), Q(0))
                    for i in range(self.vars.count))
            nf = LinearForm(tuple(Q(0) if i == var else c + n * r
                                  for i, (c, r) in enumerate(zip(form.coeffs, replacement_coeffs))))
            if nf.is_zero():
                raise ZeroDivisionError("denominator factor vanishes under substitution")
            denom.append((nf, mult))
        return RationalSection(numer, denom)

    def as_polynomial(self) -> EquivariantPolynomial:
        """Clear the denominator by exact division; raises ExactDivisionError
        if the section is not a polynomial."""
        p = self.numer
        for form, mult in sorted(self.denom.items(), key=lambda kv: kv[0].coeffs):
            for _ in range(mult):
                p = p.div_exact_linear(form)
        return p

    def is_polynomial(self) -> bool:
        try:
            self.as_polynomial()
            return True
        except ExactDivisionError:
            return False

    def constant_value(self) -> Fraction:
        if self.denom:
            raise ValidationError("section still has denominator factors")
        return self.numer.constant_value()

    def __str__(self) -> str:
        if not self.denom:
            return str(self.numer)
        parts = []
        for form, mult in sorted(self.denom.items(), key=lambda kv: kv[0].coeffs):
            fp = EquivariantPolynomial.from_linear_form(self.vars, form)
            parts.append(f"({fp})" + (f"^{mult}" if mult > 1 else ""))
        return f"({self.numer}) / ({'*'.join(parts)})"

    __repr__ = __str__


def invert_euler(vars: Variables, algebra: GradedAlgebra,
                 lines: Iterable[tuple[LinearForm, EquivariantPolynomial]]) -> RationalSection:
    """Invert a product of line factors (weight form + degree-2 class).

    Each factor 1/(w + c) expands as the finite sum over r of (-c)^r / w^(r+1),
    cut off by nilpotency of c; the factors are then multiplied out exactly.
    """
    result = RationalSection.one(vars, algebra)
    for form, chern in lines:
        if form.is_zero():
            raise ValidationError("normal line with zero weight has no invertible Euler factor")
        elt = {b: c for (e, b), c in chern.terms.items()}
        if any(sum(e) for e, _ in chern.terms):
            raise ValidationError("line curvature class must be constant in the variables")
        order = algebra.nilpotency_order(elt) if elt else 1
        if order > algebra.top_degree // 2 + 1:
            raise ValidationError("line curvature class is not nilpotent")
        w_poly = EquivariantPolynomial.from_linear_form(vars, form)
        numer = EquivariantPolynomial.zero(vars, algebra)
        minus_c_power = EquivariantPolynomial.one(vars, algebra)
        for r in range(order):
            if r:
                minus_c_power = minus_c_power * (-chern)
            numer = numer + minus_c_power.mul_pure(w_poly ** (order - 1 - r))
        result = result * RationalSection(numer, [(form, order)], cancel=False)
    return result
