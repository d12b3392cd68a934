"""Invariant metrics as equivariant endomorphisms of m.

A metric endomorphism is B-symmetric, equivariant under the isotropy
action, and positive definite.  The complete cone of candidates is
parameterized over the computed symmetric commutant basis; the per-summand
block form (scalars on members plus intertwiner off-blocks) is recovered as
a view.  Families of metrics -- scalar classes on subspaces, a free
symmetric operator on the trivial-summand center, off-diagonal intertwiner
coordinates -- support the reduction rules and the parameter scans.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import isotropy, linalg
from .isotropy import IsotypicalDecomposition, Subspace
from .linalg import Mat, Vec, ZERO, ONE


class NotEquivariantError(ValueError):
    """Matrix is not in the span of the symmetric commutant."""


@dataclass
class MetricEndomorphism:
    decomp: IsotypicalDecomposition
    matrix: Mat
    params: Vec
    is_pd: bool

    @property
    def dim(self) -> int:
        return len(self.matrix)


def _pd_check(matrix: Mat, gram: Mat, tol: Optional[float] = None) -> bool:
    # bilinear form of the metric: G A must be symmetric positive definite
    ga = linalg.mat_mul(gram, matrix)
    sym_defect = linalg.mat_sub(ga, linalg.transpose(ga))
    if not linalg.mat_is_zero(sym_defect, tol):
        return False
    return linalg.sym_positive_definite(ga, tol)


def from_parameters(decomp: IsotypicalDecomposition, params: Sequence,
                    tol: Optional[float] = None) -> MetricEndomorphism:
    """A = sum params_j * S_j over the symmetric commutant basis."""
    basis = decomp.sym_commutant_basis()
    if len(params) != len(basis):
        raise ValueError(
            f"expected {len(basis)} parameters, got {len(params)}")
    d = decomp.dim
    a = linalg.zeros(d, d)
    for p, s in zip(params, basis):
        if not linalg.is_zero(p, tol):
            a = linalg.mat_add(a, linalg.mat_scale(p, s))
    return MetricEndomorphism(
        decomp=decomp, matrix=a, params=[Fraction(p) if tol is None else p
                                         for p in params],
        is_pd=_pd_check(a, decomp.action.gram, tol))


def from_matrix(decomp: IsotypicalDecomposition, matrix: Mat,
                tol: Optional[float] = None) -> MetricEndomorphism:
    """Wrap an explicit matrix, solving for its commutant coordinates."""
    basis = decomp.sym_commutant_basis()
    d = decomp.dim
    cols = [[s[i][j] for s in basis] for i in range(d) for j in range(d)]
    rhs = [matrix[i][j] for i in range(d) for j in range(d)]
    params = linalg.solve_consistent(cols, rhs, tol)
    if params is None:
        raise NotEquivariantError(
            "matrix is not a symmetric equivariant endomorphism")
    return MetricEndomorphism(decomp=decomp, matrix=[list(r) for r in matrix],
                              params=params,
                              is_pd=_pd_check(matrix, decomp.action.gram, tol))


def identity_metric(decomp: IsotypicalDecomposition) -> MetricEndomorphism:
    return from_matrix(decomp, linalg.identity(decomp.dim))


# ---------------------------------------------------------------------------
# eigenstructure
# ---------------------------------------------------------------------------

def eigenstructure(a: MetricEndomorphism, tol: Optional[float] = None
                   ) -> List[Tuple[object, Subspace]]:
    """B-orthogonal eigenspace decomposition of A on m.

    Exact when the spectrum is rational (certified); otherwise falls back
    to floating point.  Eigenspaces are verified invariant under the
    isotropy action.
    """
    gram = a.decomp.action.gram
    d = a.dim
    norms = [gram[i][i] for i in range(d)]
    out: List[Tuple[object, Subspace]] = []
    check_tol = tol
    if tol is None:
        split = linalg.eigen_split(a.matrix, isotropy._float_hints(a.matrix, norms))
        if split is not None:
            for lam, basis in split:
                out.append((lam, isotropy.make_subspace(basis, gram)))
    if not out:
        # irrational spectrum (or float mode): numpy clustering
        import numpy as np
        ftol = tol if tol is not None else 1e-9
        check_tol = ftol
        scale = np.array([float(nu) ** 0.5 for nu in norms])
        arr = np.array([[float(x) for x in row] for row in a.matrix])
        sym = arr * scale[:, None] / scale[None, :]
        evals, evecs = np.linalg.eigh((sym + sym.T) / 2)
        clusters: List[List[int]] = []
        for i, lam in enumerate(evals):
            if clusters and abs(lam - evals[clusters[-1][0]]) <= 1e-7 * max(1.0, abs(lam)):
                clusters[-1].append(i)
            else:
                clusters.append([i])
        fgram = [[float(x) for x in row] for row in gram]
        for cl in clusters:
            basis = [[float(evecs[j, i]) / scale[j] for j in range(d)] for i in cl]
            out.append((float(evals[cl[0]]),
                        isotropy.make_subspace(basis, fgram, ftol)))
        gram = fgram
        float_ops = [[[float(x) for x in row] for row in op]
                     for op in a.decomp.action.ad_ops]
        ops = float_ops
    else:
        ops = a.decomp.action.ad_ops
    for _, space in out:
        for op in ops:
            if isotropy.restrict_op(op, space, gram, check_tol) is None:
                raise ArithmeticError("eigenspace is not isotropy invariant")
    return out


# ---------------------------------------------------------------------------
# normalizer equivariance (necessary condition for the GO property)
# ---------------------------------------------------------------------------

def normalizer_ops(decomp: IsotypicalDecomposition,
                   tol: Optional[float] = None) -> List[Mat]:
    """ad(Z)|_m for Z over a basis of h (+) S0, the normalizer algebra."""
    action = decomp.action
    ops = list(action.ad_ops)
    for z_m in decomp.s0.space.basis:
        ops.append(isotropy.ad_on_m(action.split, action.split.m_to_g(z_m), tol))
    return ops


def check_normalizer_equivariance(a: MetricEndomorphism,
                                  ops: Optional[List[Mat]] = None,
                                  tol: Optional[float] = None) -> bool:
    """True iff A commutes with the normalizer action on m."""
    if ops is None:
        ops = normalizer_ops(a.decomp, tol)
    for op in ops:
        comm = linalg.mat_sub(linalg.mat_mul(a.matrix, op),
                              linalg.mat_mul(op, a.matrix))
        if not linalg.mat_is_zero(comm, tol):
            return False
    return True


# ---------------------------------------------------------------------------
# families of candidate metrics
# ---------------------------------------------------------------------------

@dataclass
class ScalarBlock:
    space: Subspace
    class_id: int
    label: str


@dataclass
class OperatorBlock:
    space: Subspace
    label: str

    @property
    def n_params(self) -> int:
        d = self.space.dim
        return d * (d + 1) // 2


@dataclass
class IntertwinerBlock:
    summand_index: int
    member_a: int
    member_b: int
    phis: List[Mat]
    label: str

    @property
    def n_params(self) -> int:
        return len(self.phis)


@dataclass
class MetricFamily:
    """Linear family of candidate metrics with merged scalar classes.

    Free parameters, in order: one scalar per merged class, then the
    symmetric-operator coordinates of each operator block, then the
    intertwiner coordinates.  Positivity of the scalars / operator blocks
    bounds the parameter cone; instantiation reports definiteness rather
    than enforcing it.
    """

    decomp: IsotypicalDecomposition
    scalar_blocks: List[ScalarBlock] = field(default_factory=list)
    operator_blocks: List[OperatorBlock] = field(default_factory=list)
    intertwiner_blocks: List[IntertwinerBlock] = field(default_factory=list)
    _parent: Dict[int, int] = field(default_factory=dict)

    def find(self, cid: int) -> int:
        while self._parent.get(cid, cid) != cid:
            cid = self._parent.get(cid, cid)
        return cid

    def merge(self, c1: int, c2: int) -> bool:
        r1, r2 = self.find(c1), self.find(c2)
        if r1 == r2:
            return False
        self._parent[max(r1, r2)] = min(r1, r2)
        return True

    def classes(self) -> List[int]:
        return sorted({self.find(b.class_id) for b in self.scalar_blocks})

    @property
    def n_params(self) -> int:
        return (len(self.classes())
                + sum(b.n_params for b in self.operator_blocks)
                + sum(b.n_params for b in self.intertwiner_blocks))

    def param_labels(self) -> List[str]:
        labels = []
        for c in self.classes():
            members = [b.label for b in self.scalar_blocks if self.find(b.class_id) == c]
            labels.append("scalar[" + "+".join(members) + "]")
        for b in self.operator_blocks:
            d = b.space.dim
            labels.extend(f"op[{b.label}]({i},{j})"
                          for i in range(d) for j in range(i, d))
        for b in self.intertwiner_blocks:
            labels.extend(f"mix[{b.label}]#{i}" for i in range(b.n_params))
        return labels

    def describe(self) -> dict:
        return {
            "n_params": self.n_params,
            "scalar_classes": [
                {"class": c,
                 "subspaces": [b.label for b in self.scalar_blocks
                               if self.find(b.class_id) == c],
                 "dim": sum(b.space.dim for b in self.scalar_blocks
                            if self.find(b.class_id) == c)}
                for c in self.classes()],
            "operator_blocks": [{"label": b.label, "dim": b.space.dim}
                                for b in self.operator_blocks],
            "intertwiner_blocks": [{"label": b.label, "params": b.n_params}
                                   for b in self.intertwiner_blocks],
        }


def _line_projector(space: Subspace, gram: Mat, dim: int) -> List[Mat]:
    """Symmetric unit operators supported on the subspace, as m-matrices.

    The off-diagonal unit b_i (x) Gb_j + b_j (x) Gb_i needs one common
    coefficient to stay B-symmetric when the basis norms differ.
    """
    d = space.dim
    units = []
    gb = [linalg.mat_vec(gram, b) for b in space.basis]
    for i in range(d):
        for j in range(i, d):
            op = linalg.zeros(dim, dim)
            bi, bj = space.basis[i], space.basis[j]
            scale = ONE / space.norms[i] if i == j else ONE
            for r in range(dim):
                if bi[r] != 0:
                    for c in range(dim):
                        op[r][c] += scale * bi[r] * gb[j][c]
                if i != j and bj[r] != 0:
                    for c in range(dim):
                        op[r][c] += scale * bj[r] * gb[i][c]
            units.append(op)
    return units


def projector(space: Subspace, gram: Mat, dim: int) -> Mat:
    op = linalg.zeros(dim, dim)
    for b, nu in zip(space.basis, space.norms):
        gb = linalg.mat_vec(gram, b)
        for r in range(dim):
            if b[r] != 0:
                for c in range(dim):
                    op[r][c] += b[r] * gb[c] / nu
    return op


def _intertwiner_pair_op(decomp: IsotypicalDecomposition,
                         blk: IntertwinerBlock, phi: Mat) -> Mat:
    """phi: member_a -> member_b embedded in m plus its B-adjoint."""
    gram = decomp.action.gram
    dim = decomp.dim
    summand = decomp.summands[blk.summand_index]
    sub_a = summand.members[blk.member_a].space
    sub_b = summand.members[blk.member_b].space
    op = linalg.zeros(dim, dim)

    def add_embedded(phi_ab: Mat, src: Subspace, dst: Subspace):
        # coords extraction rows for src, embedding columns for dst
        g_src = [linalg.mat_vec(gram, b) for b in src.basis]
        for r in range(dim):
            for bi in range(dst.dim):
                if dst.basis[bi][r] == 0:
                    continue
                for aj in range(src.dim):
                    coef = phi_ab[bi][aj]
                    if coef == 0:
                        continue
                    f = dst.basis[bi][r] * coef / src.norms[aj]
                    for c in range(dim):
                        if g_src[aj][c] != 0:
                            op[r][c] += f * g_src[aj][c]

    add_embedded(phi, sub_a, sub_b)
    # B-adjoint phi*: member_b -> member_a, phi*_[i][j] = nu_b_j / nu_a_i * phi[j][i]
    phi_star = [[sub_b.norms[j] * phi[j][i] / sub_a.norms[i]
                 for j in range(sub_b.dim)] for i in range(sub_a.dim)]
    add_embedded(phi_star, sub_b, sub_a)
    return op


def family_basis_ops(family: MetricFamily) -> List[Mat]:
    """Matrices multiplying each free parameter, in parameter order."""
    decomp = family.decomp
    gram = decomp.action.gram
    dim = decomp.dim
    ops: List[Mat] = []
    for c in family.classes():
        op = linalg.zeros(dim, dim)
        for b in family.scalar_blocks:
            if family.find(b.class_id) == c:
                op = linalg.mat_add(op, projector(b.space, gram, dim))
        ops.append(op)
    for b in family.operator_blocks:
        ops.extend(_line_projector(b.space, gram, dim))
    for b in family.intertwiner_blocks:
        for phi in b.phis:
            ops.append(_intertwiner_pair_op(decomp, b, phi))
    return ops


def instantiate(family: MetricFamily, values: Sequence,
                tol: Optional[float] = None) -> MetricEndomorphism:
    ops = family_basis_ops(family)
    if len(values) != len(ops):
        raise ValueError(f"expected {len(ops)} parameter values, got {len(values)}")
    dim = family.decomp.dim
    a = linalg.zeros(dim, dim)
    for v, op in zip(values, ops):
        if not linalg.is_zero(v, tol):
            a = linalg.mat_add(a, linalg.mat_scale(v, op))
    return from_matrix(family.decomp, a, tol)


def coords_in_family(family: MetricFamily, a: MetricEndomorphism,
                     tol: Optional[float] = None) -> Optional[Vec]:
    """Parameter values reproducing A, or None when A is outside the family."""
    ops = family_basis_ops(family)
    dim = family.decomp.dim
    cols = [[op[i][j] for op in ops] for i in range(dim) for j in range(dim)]
    rhs = [a.matrix[i][j] for i in range(dim) for j in range(dim)]
    return linalg.solve_consistent(cols, rhs, tol)


def full_family(decomp: IsotypicalDecomposition) -> MetricFamily:
    """The unreduced candidate cone in per-summand block form.

    Parameter count equals the symmetric commutant dimension (verified).
    """
    family = MetricFamily(decomp=decomp)
    family.operator_blocks.append(OperatorBlock(space=decomp.s0.space, label="S0"))
    next_class = 0
    for si, summand in enumerate(decomp.summands):
        if summand is decomp.s0:
            continue
        for mi, member in enumerate(summand.members):
            family.scalar_blocks.append(ScalarBlock(
                space=member.space, class_id=next_class,
                label=f"S{summand.class_id}.m{mi + 1}"))
            next_class += 1
        for (a, b) in itertools.combinations(range(len(summand.members)), 2):
            phis = summand.intertwiner_bases.get((a, b), [])
            if phis:
                family.intertwiner_blocks.append(IntertwinerBlock(
                    summand_index=si, member_a=a, member_b=b, phis=phis,
                    label=f"S{summand.class_id}.m{a + 1}~m{b + 1}"))
    if family.n_params != len(decomp.sym_commutant_basis()):
        raise ArithmeticError(
            "block parameterization does not match the commutant dimension: "
            f"{family.n_params} != {len(decomp.sym_commutant_basis())}")
    return family


# ---------------------------------------------------------------------------
# serialization and the block view
# ---------------------------------------------------------------------------

def block_view(a: MetricEndomorphism, tol: Optional[float] = None) -> List[dict]:
    """Per-summand restriction of A: scalar where scalar, else the matrix."""
    gram = a.decomp.action.gram
    out = []
    for summand in a.decomp.summands:
        r = isotropy.restrict_op(a.matrix, summand.space, gram, tol)
        if r is None:
            raise ArithmeticError("metric does not preserve a summand")
        d = summand.dim
        lam = r[0][0]
        scalar = all(
            linalg.is_zero(r[i][j] - (lam if i == j else ZERO), tol)
            for i in range(d) for j in range(d))
        entry = {"summand": summand.class_id, "dim": d}
        if scalar:
            entry["scalar"] = linalg.frac_to_str(lam) if tol is None else float(lam)
        else:
            entry["matrix"] = [[linalg.frac_to_str(x) if tol is None else float(x)
                                for x in row] for row in r]
        out.append(entry)
    return out


def metric_to_json_dict(a: MetricEndomorphism, tol: Optional[float] = None) -> dict:
    params = [linalg.frac_to_str(p) if tol is None else float(p)
              for p in a.params]
    return {"params": params, "blocks": block_view(a, tol), "pd": a.is_pd}


def metric_from_json_dict(decomp: IsotypicalDecomposition, data: dict,
                          tol: Optional[float] = None) -> MetricEndomorphism:
    params = [linalg.frac_from_str(p) if isinstance(p, str) else p
              for p in data["params"]]
    return from_parameters(decomp, params, tol)
