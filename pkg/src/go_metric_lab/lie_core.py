"""Matrix Lie algebra core: u(n) bases, brackets, and the trace form.

The compact unitary algebra u(n) is realized over the reals.  Its canonical
basis is

    e_ij  = E_ij - E_ji           (1 <= i < j <= n)
    eb_lm = sqrt(-1)(E_lm + E_ml) (1 <= l <= m <= n)

listed e's first, then eb's, each block in lexicographic index order.  The
complex matrices are stored through the real embedding a+bi -> [[a,-b],[b,a]]
so that every entry stays an exact rational.  The invariant inner product is
B(X, Y) = -Trace(XY) with the complex trace, i.e. -Trace(XrYr)/2 on the real
embedding; the canonical basis is B-orthogonal with squared lengths 2 (and 4
on the diagonal eb_ll).

Vectors over an algebra are plain coordinate lists (Fraction entries in
exact mode, floats in float mode); all operations validate lengths.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from . import linalg
from .linalg import Mat, Vec, ZERO, ONE


class InvalidDimensionError(ValueError):
    """Requested algebra or subspace dimension is out of range."""


class DimensionMismatchError(ValueError):
    """Coordinate vector length does not match the basis size."""


BracketTable = Dict[Tuple[int, int], Dict[int, Fraction]]


@dataclass
class MatrixLieAlgebra:
    """A basis of square matrices with precomputed structure constants.

    Immutable after construction; safe for concurrent reads.
    """

    n: int
    labels: List[str]
    structure: BracketTable
    gram: Mat
    basis: Optional[List[Mat]] = None

    @property
    def dim(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def vector(self, *terms) -> Vec:
        """Build a coordinate vector from (label, coeff) pairs."""
        v = linalg.zero_vec(self.dim)
        for label, coeff in terms:
            v[self.index(label)] = Fraction(coeff)
        return v


def _zeros(n: int) -> Mat:
    return [[ZERO] * n for _ in range(n)]


def _embed(re_part: Mat, im_part: Mat) -> Mat:
    """Real 2n x 2n embedding of the complex matrix re + i*im."""
    n = len(re_part)
    out = _zeros(2 * n)
    for i in range(n):
        for j in range(n):
            out[i][j] = re_part[i][j]
            out[i][j + n] = -im_part[i][j]
            out[i + n][j] = im_part[i][j]
            out[i + n][j + n] = re_part[i][j]
    return out


def _canonical_basis(n: int) -> Tuple[List[str], List[Mat]]:
    labels, mats = [], []
    for i in range(n):
        for j in range(i + 1, n):
            re = _zeros(n)
            re[i][j] = ONE
            re[j][i] = -ONE
            labels.append(f"e_{i + 1}_{j + 1}")
            mats.append(_embed(re, _zeros(n)))
    for l in range(n):
        for m in range(l, n):
            im = _zeros(n)
            im[l][m] += ONE
            im[m][l] += ONE
            labels.append(f"eb_{l + 1}_{m + 1}")
            mats.append(_embed(_zeros(n), im))
    return labels, mats


def trace_form(x_mat: Mat, y_mat: Mat) -> Fraction:
    """B(X, Y) = -Trace(XY), complex trace, on real-embedded matrices."""
    n = len(x_mat)
    s = ZERO
    for i in range(n):
        for k in range(n):
            if x_mat[i][k] != 0:
                s += x_mat[i][k] * y_mat[k][i]
    return -s / 2


def commutator(x_mat: Mat, y_mat: Mat) -> Mat:
    return linalg.mat_sub(linalg.mat_mul(x_mat, y_mat),
                          linalg.mat_mul(y_mat, x_mat))


def expand_in_basis(g: MatrixLieAlgebra, mat: Mat) -> Vec:
    """Coordinates of `mat` over the basis; raises if not in the span."""
    if g.basis is None:
        raise ValueError("algebra carries no matrix realization")
    coords = []
    for b, gb in zip(g.basis, _gram_diag(g)):
        coords.append(trace_form(mat, b) / gb)
    resid = mat
    for c, b in zip(coords, g.basis):
        if c != 0:
            resid = linalg.mat_sub(resid, linalg.mat_scale(c, b))
    if not linalg.mat_is_zero(resid):
        raise ArithmeticError("matrix does not lie in the basis span")
    return coords


def _gram_diag(g: MatrixLieAlgebra) -> List[Fraction]:
    return [g.gram[i][i] for i in range(g.dim)]


def build_un(n: int) -> MatrixLieAlgebra:
    """The compact algebra u(n) with canonical basis and exact tables."""
    if n < 1:
        raise InvalidDimensionError(f"u(n) needs n >= 1, got n={n}")
    labels, mats = _canonical_basis(n)
    dim = len(labels)
    gram = [[trace_form(mats[i], mats[j]) for j in range(dim)] for i in range(dim)]
    g = MatrixLieAlgebra(n=n, labels=labels, structure={}, gram=gram, basis=mats)
    structure: BracketTable = {}
    for i in range(dim):
        for j in range(i + 1, dim):
            coords = expand_in_basis(g, commutator(mats[i], mats[j]))
            entry = {k: c for k, c in enumerate(coords) if c != 0}
            if entry:
                structure[(i, j)] = entry
                structure[(j, i)] = {k: -c for k, c in entry.items()}
    g.structure.update(structure)
    return g


def bracket(g: MatrixLieAlgebra, x: Vec, y: Vec) -> Vec:
    """[x, y] through the structure table; exact in rational mode."""
    if len(x) != g.dim or len(y) != g.dim:
        raise DimensionMismatchError(
            f"expected coordinate length {g.dim}, got {len(x)} and {len(y)}")
    out = linalg.zero_vec(g.dim)
    xs = [(i, c) for i, c in enumerate(x) if c != 0]
    ys = [(j, c) for j, c in enumerate(y) if c != 0]
    for i, xi in xs:
        for j, yj in ys:
            entry = g.structure.get((i, j))
            if entry:
                f = xi * yj
                for k, c in entry.items():
                    out[k] += f * c
    return out


def inner(g: MatrixLieAlgebra, x: Vec, y: Vec) -> Fraction:
    """B(x, y) over the basis Gram matrix."""
    if len(x) != g.dim or len(y) != g.dim:
        raise DimensionMismatchError(
            f"expected coordinate length {g.dim}, got {len(x)} and {len(y)}")
    return linalg.gram_dot(g.gram, x, y)


def ad_matrix(g: MatrixLieAlgebra, z: Vec) -> Mat:
    """Matrix of ad(z) = [z, .] on the algebra basis."""
    cols = [bracket(g, z, linalg.unit_vec(g.dim, j)) for j in range(g.dim)]
    return linalg.transpose(cols)


def random_vector_of_len(dim: int, rng: random.Random, max_num: int = 9,
                         denominators: Tuple[int, ...] = (1, 2, 3)) -> Vec:
    """Seeded random rational coordinate vector with small entries."""
    return [Fraction(rng.randint(-max_num, max_num), rng.choice(denominators))
            for _ in range(dim)]


def random_vector(g: MatrixLieAlgebra, rng: random.Random,
                  max_num: int = 9, denominators: Tuple[int, ...] = (1, 2, 3)) -> Vec:
    return random_vector_of_len(g.dim, rng, max_num, denominators)


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class ValidationReport:
    checks: List[CheckResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def validate_algebra(g: MatrixLieAlgebra, tol: Optional[float] = None) -> ValidationReport:
    """Check closure, antisymmetry, Jacobi, Gram properties, ad-invariance.

    Returns a per-property report with the first counterexample on failure;
    never raises for a bad table.
    """
    report = ValidationReport()
    dim = g.dim

    def table_bracket(i: int, j: int) -> Dict[int, Fraction]:
        return g.structure.get((i, j), {})

    # closure: matrix commutators lie in the span and match the table
    if g.basis is not None:
        ok, detail = True, ""
        for i in range(dim):
            for j in range(i + 1, dim):
                try:
                    coords = expand_in_basis(g, commutator(g.basis[i], g.basis[j]))
                except ArithmeticError:
                    ok, detail = False, f"[{g.labels[i]}, {g.labels[j]}] leaves the span"
                    break
                tab = table_bracket(i, j)
                diff = [coords[k] - tab.get(k, ZERO) for k in range(dim)]
                if not linalg.vec_is_zero(diff, tol):
                    ok, detail = False, (f"table mismatch at "
                                         f"[{g.labels[i]}, {g.labels[j]}]")
                    break
            if not ok:
                break
        report.checks.append(CheckResult("closure", ok, detail))

    ok, detail = True, ""
    for (i, j), entry in g.structure.items():
        rev = g.structure.get((j, i), {})
        keys = set(entry) | set(rev)
        if any(not linalg.is_zero(entry.get(k, ZERO) + rev.get(k, ZERO), tol)
               for k in keys):
            ok, detail = False, f"c[{i}][{j}] != -c[{j}][{i}]"
            break
    report.checks.append(CheckResult("antisymmetry", ok, detail))

    def table_apply(coords: Dict[int, Fraction], k: int) -> Dict[int, Fraction]:
        out: Dict[int, Fraction] = {}
        for i, c in coords.items():
            for l, s in g.structure.get((i, k), {}).items():
                out[l] = out.get(l, ZERO) + c * s
        return out

    ok, detail = True, ""
    for i in range(dim):
        for j in range(i + 1, dim):
            bij = table_bracket(i, j)
            for k in range(dim):
                acc: Dict[int, Fraction] = {}
                for term in (table_apply(bij, k),
                             table_apply(table_bracket(j, k), i),
                             table_apply(table_bracket(k, i), j)):
                    for l, c in term.items():
                        acc[l] = acc.get(l, ZERO) + c
                if any(not linalg.is_zero(c, tol) for c in acc.values()):
                    ok, detail = False, f"Jacobi fails on triple ({i},{j},{k})"
                    break
            if not ok:
                break
        if not ok:
            break
    report.checks.append(CheckResult("jacobi", ok, detail))

    ok, detail = True, ""
    for i in range(dim):
        for j in range(dim):
            if not linalg.is_zero(g.gram[i][j] - g.gram[j][i], tol):
                ok, detail = False, f"gram[{i}][{j}] asymmetric"
                break
            if i != j and not linalg.is_zero(g.gram[i][j], tol):
                ok, detail = False, (f"basis not B-orthogonal at "
                                     f"({g.labels[i]}, {g.labels[j]})")
                break
        if not ok:
            break
    report.checks.append(CheckResult("orthogonality", ok, detail))
    report.checks.append(CheckResult(
        "positive_definite", linalg.sym_positive_definite(g.gram, tol), ""))

    # ad-invariance: B([z,x],y) + B(x,[z,y]) = 0 on basis triples
    ok, detail = True, ""
    gd = _gram_diag(g)
    for z in range(dim):
        for i in range(dim):
            bzi = table_bracket(z, i)
            for j in range(dim):
                s = ZERO
                for k, c in bzi.items():
                    if k == j:
                        s += c * gd[j]
                for k, c in table_bracket(z, j).items():
                    if k == i:
                        s += c * gd[i]
                if not linalg.is_zero(s, tol):
                    ok, detail = False, f"ad-invariance fails on ({z},{i},{j})"
                    break
            if not ok:
                break
        if not ok:
            break
    report.checks.append(CheckResult("ad_invariance", ok, detail))
    return report


# ---------------------------------------------------------------------------
# serialization and backend conversion
# ---------------------------------------------------------------------------

def to_json_dict(g: MatrixLieAlgebra) -> dict:
    """Sparse JSON form; indices 0-based, labels 1-based as documented."""
    structure = []
    for (i, j), entry in sorted(g.structure.items()):
        if i < j:
            for k, c in sorted(entry.items()):
                structure.append([i, j, k, c.numerator, c.denominator])
    gram = []
    for i, row in enumerate(g.gram):
        for j, c in enumerate(row):
            if c != 0:
                gram.append([i, j, Fraction(c).numerator, Fraction(c).denominator])
    return {"n": g.n, "basis_labels": list(g.labels),
            "structure": structure, "gram": gram}


def from_json_dict(data: dict) -> MatrixLieAlgebra:
    labels = list(data["basis_labels"])
    dim = len(labels)
    structure: BracketTable = {}
    for i, j, k, p, q in data["structure"]:
        structure.setdefault((i, j), {})[k] = Fraction(p, q)
        structure.setdefault((j, i), {})[k] = Fraction(-p, q)
    gram = linalg.zeros(dim, dim)
    for i, j, p, q in data["gram"]:
        gram[i][j] = Fraction(p, q)
    return MatrixLieAlgebra(n=int(data["n"]), labels=labels,
                            structure=structure, gram=gram, basis=None)


def algebra_to_float(g: MatrixLieAlgebra) -> MatrixLieAlgebra:
    """Float-backend copy of the algebra (tables and Gram as floats)."""
    structure = {ij: {k: float(c) for k, c in entry.items()}
                 for ij, entry in g.structure.items()}
    gram = [[float(c) for c in row] for row in g.gram]
    basis = None
    if g.basis is not None:
        basis = [[[float(c) for c in row] for row in b] for b in g.basis]
    return replace(g, structure=structure, gram=gram, basis=basis)
