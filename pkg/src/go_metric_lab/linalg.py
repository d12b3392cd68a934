"""Small dense/sparse linear algebra over exact rationals and floats.

Every routine is generic over the scalar backend: entries are either
`fractions.Fraction` (exact mode, `tol=None`) or `float` (tolerance mode,
`tol` a positive float).  Exact mode never rounds; float mode never compares
against literal zero.

Matrices are lists of row lists; vectors are plain lists.  Bilinear forms are
passed as Gram matrices (usually diagonal, but nothing assumes it).
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

Vec = List
Mat = List[List]

ZERO = Fraction(0)
ONE = Fraction(1)


def is_zero(x, tol: Optional[float] = None) -> bool:
    """Zero test: exact for rationals, |x| <= tol for floats."""
    if tol is None:
        return x == 0
    return abs(x) <= tol


def frac(p, q=1) -> Fraction:
    return Fraction(p, q)


def zero_vec(n: int) -> Vec:
    return [ZERO] * n


def unit_vec(n: int, i: int) -> Vec:
    v = [ZERO] * n
    v[i] = ONE
    return v


def vec_add(x: Vec, y: Vec) -> Vec:
    return [a + b for a, b in zip(x, y)]


def vec_sub(x: Vec, y: Vec) -> Vec:
    return [a - b for a, b in zip(x, y)]


def vec_scale(c, x: Vec) -> Vec:
    return [c * a for a in x]


def vec_is_zero(x: Vec, tol: Optional[float] = None) -> bool:
    return all(is_zero(a, tol) for a in x)


def dot(x: Vec, y: Vec):
    s = x[0] * y[0] if x else ZERO
    for a, b in zip(x[1:], y[1:]):
        s += a * b
    return s


def gram_dot(gram: Mat, x: Vec, y: Vec):
    """Bilinear form <x, y> for the given Gram matrix.

    Skips zero entries, so sparse vectors and diagonal Grams cost little.
    """
    s = ZERO
    for i, xi in enumerate(x):
        if xi == 0:
            continue
        row = gram[i]
        t = ZERO
        for j, yj in enumerate(y):
            if yj != 0:
                gij = row[j]
                if gij != 0:
                    t += gij * yj
        s += xi * t
    return s


def identity(n: int) -> Mat:
    return [unit_vec(n, i) for i in range(n)]


def zeros(nrows: int, ncols: int) -> Mat:
    return [[ZERO] * ncols for _ in range(nrows)]


def mat_vec(m: Mat, v: Vec) -> Vec:
    return [dot(row, v) for row in m]


def mat_mul(a: Mat, b: Mat) -> Mat:
    bt = transpose(b)
    return [[dot(row, col) for col in bt] for row in a]


def mat_add(a: Mat, b: Mat) -> Mat:
    return [vec_add(ra, rb) for ra, rb in zip(a, b)]


def mat_sub(a: Mat, b: Mat) -> Mat:
    return [vec_sub(ra, rb) for ra, rb in zip(a, b)]


def mat_scale(c, a: Mat) -> Mat:
    return [vec_scale(c, row) for row in a]


def transpose(m: Mat) -> Mat:
    return [list(col) for col in zip(*m)] if m else []


def mat_is_zero(m: Mat, tol: Optional[float] = None) -> bool:
    return all(vec_is_zero(row, tol) for row in m)


def mat_eq(a: Mat, b: Mat, tol: Optional[float] = None) -> bool:
    return mat_is_zero(mat_sub(a, b), tol)


# ---------------------------------------------------------------------------
# dense row reduction
# ---------------------------------------------------------------------------

def rref(rows: Mat, tol: Optional[float] = None) -> Tuple[Mat, List[int]]:
    """Reduced row echelon form; returns (reduced rows, pivot columns).

    Float mode picks the largest-magnitude pivot in each column and treats
    entries within `tol` as zero.
    """
    m = [list(r) for r in rows]
    if not m:
        return [], []
    nrows, ncols = len(m), len(m[0])
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        if tol is None:
            pr = next((i for i in range(r, nrows) if m[i][c] != 0), None)
        else:
            pr = max(range(r, nrows), key=lambda i: abs(m[i][c]))
            if abs(m[pr][c]) <= tol:
                pr = None
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        piv = m[r][c]
        m[r] = [x / piv for x in m[r]]
        for i in range(nrows):
            if i != r and not is_zero(m[i][c], tol):
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return m[:r] + [[ZERO] * ncols for _ in range(nrows - r)], pivots


def nullspace(rows: Mat, ncols: Optional[int] = None,
              tol: Optional[float] = None) -> List[Vec]:
    """Basis of {x : rows @ x = 0}, one vector per free column."""
    if not rows:
        if ncols is None:
            raise ValueError("ncols required for an empty system")
        return identity(ncols)
    ncols = len(rows[0]) if ncols is None else ncols
    red, pivots = rref(rows, tol)
    pivot_set = set(pivots)
    free = [c for c in range(ncols) if c not in pivot_set]
    basis = []
    for fc in free:
        v = [ZERO] * ncols
        v[fc] = ONE
        for r, pc in enumerate(pivots):
            v[pc] = -red[r][fc]
        basis.append(v)
    return basis


def solve_consistent(a: Mat, b: Vec, tol: Optional[float] = None) -> Optional[Vec]:
    """One solution of a @ x = b (free variables set to 0), or None."""
    if not a:
        return []
    ncols = len(a[0])
    aug = [list(row) + [bi] for row, bi in zip(a, b)]
    red, pivots = rref(aug, tol)
    x = [ZERO] * ncols
    for r, pc in enumerate(pivots):
        if pc == ncols:
            return None
        x[pc] = red[r][ncols]
    return x


def rank(rows: Mat, tol: Optional[float] = None) -> int:
    return len(rref(rows, tol)[1])


def span_contains(basis: List[Vec], v: Vec, tol: Optional[float] = None) -> bool:
    if vec_is_zero(v, tol):
        return True
    if not basis:
        return False
    a = transpose(basis)
    return solve_consistent(a, v, tol) is not None


def same_span(basis_a: List[Vec], basis_b: List[Vec],
              tol: Optional[float] = None) -> bool:
    return (len(rref(basis_a, tol)[1]) == len(rref(basis_b, tol)[1])
            == len(rref(basis_a + basis_b, tol)[1]))


# ---------------------------------------------------------------------------
# sparse row reduction (for the large equivariance systems)
# ---------------------------------------------------------------------------

def sparse_nullspace(rows: Iterable[dict], ncols: int) -> List[Vec]:
    """Exact nullspace of a sparse rational system.

    `rows` yields {col: Fraction} maps.  Rows reduce incrementally against
    the pivots collected so far, followed by one back-substitution sweep;
    intended for systems with a few nonzeros per row (equivariance
    constraints).
    """
    pivot_rows: dict = {}          # pivot col -> normalized row dict
    for raw in rows:
        row = {k: v for k, v in raw.items() if v != 0}
        while row:
            lead = min(row)
            piv = pivot_rows.get(lead)
            if piv is None:
                inv = ONE / row[lead]
                pivot_rows[lead] = {k: v * inv for k, v in row.items()}
                break
            f = row[lead]
            for k, v in piv.items():
                nv = row.get(k, ZERO) - f * v
                if nv == 0:
                    row.pop(k, None)
                else:
                    row[k] = nv
    # back-substitute so each pivot row is reduced against later pivots
    for lead in sorted(pivot_rows, reverse=True):
        row = pivot_rows[lead]
        for other_lead in [k for k in row if k != lead and k in pivot_rows]:
            f = row[other_lead]
            if f == 0:
                continue
            for k, v in pivot_rows[other_lead].items():
                nv = row.get(k, ZERO) - f * v
                if nv == 0:
                    row.pop(k, None)
                else:
                    row[k] = nv
    free = [c for c in range(ncols) if c not in pivot_rows]
    basis = []
    for fc in free:
        v = [ZERO] * ncols
        v[fc] = ONE
        for lead, row in pivot_rows.items():
            coef = row.get(fc)
            if coef is not None:
                v[lead] = -coef
        basis.append(v)
    return basis


# ---------------------------------------------------------------------------
# least squares w.r.t. a Gram matrix
# ---------------------------------------------------------------------------

def least_squares(columns: List[Vec], rhs: Vec, gram: Mat,
                  tol: Optional[float] = None) -> Tuple[Vec, object]:
    """Minimize ||sum_j x_j col_j - rhs||^2 in the `gram` inner product.

    Returns (x, residual_norm_sq).  The normal equations are always
    consistent; free directions are set to zero.  Exact in rational mode.
    """
    p = len(columns)
    if p == 0:
        return [], gram_dot(gram, rhs, rhs)
    normal = [[gram_dot(gram, columns[i], columns[j]) for j in range(p)]
              for i in range(p)]
    b = [gram_dot(gram, columns[i], rhs) for i in range(p)]
    x = solve_consistent(normal, b, tol)
    if x is None:
        raise ArithmeticError("normal equations inconsistent")
    fit = zero_vec(len(rhs))
    for xj, col in zip(x, columns):
        if not is_zero(xj, None if tol is None else 0.0):
            fit = vec_add(fit, vec_scale(xj, col))
    res = vec_sub(rhs, fit)
    return x, gram_dot(gram, res, res)


# ---------------------------------------------------------------------------
# Gram-Schmidt without normalization (keeps rational entries rational)
# ---------------------------------------------------------------------------

def gram_schmidt(vectors: List[Vec], gram: Mat,
                 tol: Optional[float] = None) -> List[Vec]:
    """B-orthogonalize, dropping dependent vectors; no normalization."""
    basis: List[Vec] = []
    norms: List = []
    for v in vectors:
        w = list(v)
        for u, nu in zip(basis, norms):
            c = gram_dot(gram, w, u) / nu
            if not is_zero(c, tol):
                w = vec_sub(w, vec_scale(c, u))
        if not vec_is_zero(w, tol):
            basis.append(w)
            norms.append(gram_dot(gram, w, w))
    return basis


# ---------------------------------------------------------------------------
# positive definiteness (Sylvester, fraction-free)
# ---------------------------------------------------------------------------

def sym_positive_definite(m: Mat, tol: Optional[float] = None) -> bool:
    """Positive definiteness of a symmetric matrix.

    Exact mode checks all leading principal minors via Bareiss pivots; float
    mode checks the smallest eigenvalue of the symmetrized matrix.
    """
    n = len(m)
    if n == 0:
        return True
    if tol is not None:
        import numpy as np
        arr = np.array([[float(x) for x in row] for row in m])
        return bool(np.linalg.eigvalsh((arr + arr.T) / 2).min() > tol)
    a = [[Fraction(x) for x in row] for row in m]
    prev = ONE
    for k in range(n):
        if a[k][k] <= 0:
            return False
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev
        prev = a[k][k]
    return True


# ---------------------------------------------------------------------------
# minimal polynomial and rational eigen-splitting
# ---------------------------------------------------------------------------

def minimal_polynomial(op: Mat) -> List[Fraction]:
    """Monic minimal polynomial of a rational matrix, low degree first.

    Computed as the lcm of the local minimal polynomials of the unit
    vectors (Krylov dependences found by exact elimination).
    """
    n = len(op)
    poly = [ONE]                      # constant 1 = minpoly of the zero space
    for start in range(n):
        v = unit_vec(n, start)
        # apply current poly(op) to v; if already killed, skip
        w = _apply_poly(op, poly, v)
        if vec_is_zero(w):
            continue
        local = _cyclic_minpoly(op, w)
        poly = _poly_mul(poly, local)
    return poly


def _apply_poly(op: Mat, poly: Sequence[Fraction], v: Vec) -> Vec:
    # poly given low degree first
    out = zero_vec(len(v))
    cur = list(v)
    for c in poly:
        if c != 0:
            out = vec_add(out, vec_scale(c, cur))
        cur = mat_vec(op, cur)
    return out


def _cyclic_minpoly(op: Mat, v: Vec) -> List[Fraction]:
    n = len(v)
    krylov = [list(v)]
    while True:
        nxt = mat_vec(op, krylov[-1])
        a = transpose(krylov)
        sol = solve_consistent(a, nxt)
        if sol is not None:
            # nxt = sum sol_i krylov_i  ->  x^d - sum sol_i x^i
            d = len(krylov)
            poly = [-s for s in sol] + [ONE]
            return poly
        krylov.append(nxt)
        if len(krylov) > n:
            raise ArithmeticError("Krylov space exceeded dimension")


def _poly_mul(p: Sequence[Fraction], q: Sequence[Fraction]) -> List[Fraction]:
    out = [ZERO] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            out[i + j] += a * b
    return out


def poly_eval(poly: Sequence[Fraction], x) :
    acc = ZERO
    for c in reversed(poly):
        acc = acc * x + c
    return acc


def rational_roots(poly: Sequence[Fraction],
                   float_hints: Optional[Sequence[float]] = None) -> Optional[List[Fraction]]:
    """All roots of a squarefree rational polynomial, if they are rational.

    Float hints (approximate eigenvalues) are snapped to nearby small
    rationals and certified exactly; returns None when the polynomial does
    not split over the rationals.
    """
    deg = len(poly) - 1
    if deg == 0:
        return []
    candidates: List[Fraction] = []

    def consider(x: Fraction):
        if x not in candidates and poly_eval(poly, x) == 0:
            candidates.append(x)

    if float_hints is not None:
        for h in float_hints:
            for limit in (1, 16, 4096, 10 ** 6, 10 ** 12):
                consider(Fraction(h).limit_denominator(limit))
    # rational root theorem fallback for small coefficients
    if len(candidates) < deg:
        den = 1
        for c in poly:
            den = den * c.denominator // math.gcd(den, c.denominator)
        ints = [int(c * den) for c in poly]
        lead, const = ints[-1], next((c for c in ints if c != 0), 0)
        if const != 0 and abs(const) <= 10 ** 6 and abs(lead) <= 10 ** 6:
            for p in _divisors(abs(const)):
                for q in _divisors(abs(lead)):
                    consider(Fraction(p, q))
                    consider(Fraction(-p, q))
    if len(candidates) == deg:
        return sorted(candidates)
    return None


def _divisors(n: int) -> List[int]:
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            if d != n // d:
                out.append(n // d)
        d += 1
    return sorted(out)


def eigen_split(op: Mat, float_hints: Optional[Sequence[float]] = None
                ) -> Optional[List[Tuple[Fraction, List[Vec]]]]:
    """Exact eigenspace decomposition of a diagonalizable rational matrix.

    Returns [(eigenvalue, eigenbasis)] sorted by eigenvalue, or None when
    the minimal polynomial does not split over the rationals.  The caller
    is responsible for `op` being diagonalizable (symmetric w.r.t. some
    inner product); completeness is verified.
    """
    n = len(op)
    if n == 0:
        return []
    minp = minimal_polynomial(op)
    roots = rational_roots(minp, float_hints)
    if roots is None:
        return None
    out = []
    total = 0
    for lam in roots:
        shifted = [[op[i][j] - (lam if i == j else ZERO) for j in range(n)]
                   for i in range(n)]
        basis = nullspace(shifted, n)
        if basis:
            out.append((lam, basis))
            total += len(basis)
    if total != n:
        return None
    return out


def frac_to_str(x) -> str:
    f = Fraction(x)
    return f"{f.numerator}/{f.denominator}"


def frac_from_str(s: str) -> Fraction:
    if "/" in s:
        p, q = s.split("/")
        return Fraction(int(p), int(q))
    return Fraction(int(s))
