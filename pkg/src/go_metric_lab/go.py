"""The geodesic-orbit criterion, its certificates, and family reduction.

A metric A is geodesic-orbit iff every X in m admits a in h with
[a + X, AX] = 0.  Since a -> [a, AX] is linear, the best witness for a
fixed X is an exact least-squares problem over h; the squared residual is
an exact rational in exact mode.  Sampling strategies can only falsify or
report "passed-sampling".  Full verification ("verified-on-family") needs a
linear closed-form witness map: the defect X -> [a(X) + X, AX] is then a
quadratic form, so exact vanishing on all basis vectors and pairwise sums
forces it to vanish identically.

The reduction engine prunes the candidate cone with four rules, applied in
a fixed order and recorded with recomputed witnesses:

  3.4  restrict A|_S0 to (free on the center) + (scalar per simple ideal);
  3.5  drop the off-diagonal blocks of a summand when every member has a
       perpendicular vector acting injectively on it and killing the rest;
  3.6  force a summand scalar when the member brackets against their
       intertwiner images are nonzero and pairwise orthogonal outside it;
  3.2  merge scalar classes joined by a bracket with a nonzero projection
       outside the pair (or onto a third class).

Rule codes "3.2"/"3.4"/"3.5"/"3.6" are stable wire-format tags.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from . import isotropy, lie_core, linalg, metric as metric_mod
from .isotropy import IsotypicalDecomposition, Subspace
from .linalg import Mat, Vec, ZERO, ONE
from .metric import MetricEndomorphism, MetricFamily

FALSIFY_REL = 1e-6          # float-mode falsification scale factor


# ---------------------------------------------------------------------------
# the pointwise criterion
# ---------------------------------------------------------------------------

def as_m_coords(split, x: Vec, tol: Optional[float] = None) -> Vec:
    """Accept m-coordinates or g-coordinates of a vector in m."""
    if len(x) == split.dim_m:
        return list(x)
    if len(x) == split.algebra.dim:
        return split.coords_in_m(x, tol)   # raises if outside m
    raise lie_core.DimensionMismatchError(
        f"vector length {len(x)} matches neither m ({split.dim_m}) "
        f"nor g ({split.algebra.dim})")


def go_solve_at(a_metric: MetricEndomorphism, x: Vec,
                tol: Optional[float] = None) -> Tuple[Vec, object]:
    """Best witness a in h for the vector X: minimizes ||[a + X, AX]||_B.

    Returns (a over the h basis, squared residual).  Also asserts the
    structural fact that [X, AX] has no h-component.
    """
    split = a_metric.decomp.action.split
    g = split.algebra
    x_m = as_m_coords(split, x, tol)
    ax_m = linalg.mat_vec(a_metric.matrix, x_m)
    x_g = split.m_to_g(x_m)
    ax_g = split.m_to_g(ax_m)
    c_g = lie_core.bracket(g, x_g, ax_g)
    if not linalg.vec_is_zero(linalg.mat_vec(split.proj_h, c_g), tol):
        raise ArithmeticError("[X, AX] acquired an h-component; "
                              "the metric is not symmetric-equivariant")
    c_m = split.coords_in_m(c_g, tol)
    cols = [split.coords_in_m(lie_core.bracket(g, hv, ax_g), tol)
            for hv in split.h.basis_coords]
    rhs = [-c for c in c_m]
    a_h, res_sq = linalg.least_squares(cols, rhs, split.gram_m, tol)
    return a_h, res_sq


def go_residual_sq(a_metric: MetricEndomorphism, x: Vec, a_h: Vec,
                   tol: Optional[float] = None):
    """Squared residual ||[a + X, AX]||_B^2 for a supplied witness a."""
    split = a_metric.decomp.action.split
    g = split.algebra
    x_m = as_m_coords(split, x, tol)
    ax_g = split.m_to_g(linalg.mat_vec(a_metric.matrix, x_m))
    lhs = lie_core.bracket(
        g, linalg.vec_add(split.h_to_g(a_h), split.m_to_g(x_m)), ax_g)
    return lie_core.inner(g, lhs, lhs)


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------

@dataclass
class Witness:
    x_m: Vec
    a_h: Vec
    residual_sq: object


@dataclass
class GOCertificate:
    verdict: str                      # verified-on-family | passed-sampling | falsified
    strategy: str
    count: int
    seed: Optional[int] = None
    witnesses: List[Witness] = field(default_factory=list)
    falsifier: Optional[Witness] = None

    @property
    def is_go_candidate(self) -> bool:
        return self.verdict != "falsified"


def basis_probe_vectors(decomp: IsotypicalDecomposition) -> List[Vec]:
    """All m-basis vectors, then pairwise sums (cross-summand pairs first)."""
    dim = decomp.dim
    gram = decomp.action.gram
    block_of = []
    for i in range(dim):
        v = linalg.unit_vec(dim, i)
        home = None
        for s in decomp.summands:
            if s.space.coords_of(v, gram) is not None:
                home = s.class_id
                break
        block_of.append(home)
    probes = [linalg.unit_vec(dim, i) for i in range(dim)]
    pairs = sorted(
        itertools.combinations(range(dim), 2),
        key=lambda ij: (block_of[ij[0]] == block_of[ij[1]], ij))
    for i, j in pairs:
        v = linalg.unit_vec(dim, i)
        v[j] = ONE
        probes.append(v)
    return probes


def _falsified(res_sq, x_m: Vec, ax_m: Vec, gram: Mat,
               tol: Optional[float]) -> bool:
    if tol is None:
        return res_sq > 0
    scale = (linalg.gram_dot(gram, x_m, x_m)
             * linalg.gram_dot(gram, ax_m, ax_m)) ** 0.5
    threshold = max(FALSIFY_REL ** 2 * scale, (10 * tol) ** 2)
    return res_sq > threshold


def go_check(a_metric: MetricEndomorphism, strategy: str = "basis",
             count: int = 100, seed: int = 0,
             witness_map: Optional[Callable[[Vec], Vec]] = None,
             tol: Optional[float] = None,
             keep_witnesses: bool = True,
             probes: Optional[List[Vec]] = None) -> GOCertificate:
    """Decide the GO property as far as the chosen strategy allows.

    basis: probe every m-basis vector and every pairwise sum.
    random: probe `count` seeded random rational vectors.
    family: verify a supplied linear witness map exactly (spanning set plus
    polarization pairs plus `count` random probes); only this strategy may
    return "verified-on-family".
    """
    decomp = a_metric.decomp
    gram = decomp.action.gram

    if strategy == "family":
        if witness_map is None:
            raise ValueError("family strategy needs a witness map")
        return _family_check(a_metric, witness_map, count, seed, tol)

    if strategy == "basis":
        if probes is None:
            probes = basis_probe_vectors(decomp)
        used_seed = None
    elif strategy == "random":
        rng = random.Random(f"go-random:{seed}")
        probes = [lie_core.random_vector_of_len(decomp.dim, rng)
                  for _ in range(count)]
        used_seed = seed
    else:
        raise ValueError(f"unknown strategy {strategy!r}")

    cert = GOCertificate(verdict="passed-sampling", strategy=strategy,
                         count=len(probes), seed=used_seed)
    for x in probes:
        a_h, res_sq = go_solve_at(a_metric, x, tol)
        ax_m = linalg.mat_vec(a_metric.matrix, x)
        w = Witness(x_m=x, a_h=a_h, residual_sq=res_sq)
        if _falsified(res_sq, x, ax_m, gram, tol):
            cert.verdict = "falsified"
            cert.falsifier = w
            return cert
        if keep_witnesses:
            cert.witnesses.append(w)
    return cert


def _family_check(a_metric: MetricEndomorphism,
                  witness_map: Callable[[Vec], Vec],
                  count: int, seed: int,
                  tol: Optional[float]) -> GOCertificate:
    decomp = a_metric.decomp
    dim = decomp.dim
    cert = GOCertificate(verdict="verified-on-family", strategy="family",
                         count=0, seed=seed)

    def residual(x: Vec) -> Witness:
        a_h = witness_map(x)
        res = go_residual_sq(a_metric, x, a_h, tol)
        return Witness(x_m=x, a_h=a_h, residual_sq=res)

    basis = [linalg.unit_vec(dim, i) for i in range(dim)]
    # the witness map must be linear for polarization to close the argument
    for i, j in itertools.combinations(range(dim), 2):
        lhs = witness_map(linalg.vec_add(basis[i], basis[j]))
        rhs = linalg.vec_add(witness_map(basis[i]), witness_map(basis[j]))
        if not linalg.vec_is_zero(linalg.vec_sub(lhs, rhs), tol):
            raise ValueError("witness map is not additive on basis pairs")
    for i in range(dim):
        for c in (Fraction(2), Fraction(-1)):
            lhs = witness_map(linalg.vec_scale(c, basis[i]))
            rhs = linalg.vec_scale(c, witness_map(basis[i]))
            if not linalg.vec_is_zero(linalg.vec_sub(lhs, rhs), tol):
                raise ValueError("witness map is not homogeneous")

    probes = list(basis)
    for i, j in itertools.combinations(range(dim), 2):
        v = linalg.unit_vec(dim, i)
        v[j] = ONE
        probes.append(v)
    rng = random.Random(f"go-family:{seed}")
    probes.extend(lie_core.random_vector_of_len(dim, rng) for _ in range(count))
    cert.count = len(probes)
    for x in probes:
        w = residual(x)
        if not linalg.is_zero(w.residual_sq, None if tol is None else (10 * tol) ** 2):
            # the supplied witness fails here; only a failing minimizer
            # falsifies the metric itself
            a_best, best_sq = go_solve_at(a_metric, x, tol)
            gram = a_metric.decomp.action.gram
            ax = linalg.mat_vec(a_metric.matrix, x)
            if _falsified(best_sq, x, ax, gram, tol):
                cert.verdict = "falsified"
                cert.falsifier = Witness(x_m=x, a_h=a_best, residual_sq=best_sq)
                return cert
            raise ValueError(
                "witness map fails on a vector the metric itself passes")
        cert.witnesses.append(w)
    return cert


# ---------------------------------------------------------------------------
# reduction rules
# ---------------------------------------------------------------------------

@dataclass
class RuleApplication:
    tag: str
    rule: str
    target: str
    fired: bool
    witnesses: List[dict] = field(default_factory=list)
    details: dict = field(default_factory=dict)


@dataclass
class ReductionTrace:
    steps: List[RuleApplication] = field(default_factory=list)

    def fired(self, tag: str) -> List[RuleApplication]:
        return [s for s in self.steps if s.tag == tag and s.fired]


def _label_coords(g, vec_g: Vec) -> Dict[str, str]:
    return {g.labels[i]: linalg.frac_to_str(c)
            for i, c in enumerate(vec_g) if c != 0}


def _g_basis_of(split, space: Subspace) -> List[Vec]:
    return [split.m_to_g(v) for v in space.basis]


def _project_onto_space(g, basis_g: List[Vec], norms: List, w: Vec) -> Vec:
    out = linalg.zero_vec(len(w))
    for b, nu in zip(basis_g, norms):
        c = lie_core.inner(g, w, b) / nu
        if c != 0:
            out = linalg.vec_add(out, linalg.vec_scale(c, b))
    return out


def reduce_family(decomp: IsotypicalDecomposition, seed: int = 0
                  ) -> Tuple[MetricFamily, ReductionTrace]:
    """Apply the reduction rules in order 3.4, 3.5, 3.6, 3.2."""
    split = decomp.action.split
    g = split.algebra
    family = metric_mod.full_family(decomp)
    trace = ReductionTrace()

    # --- 3.4: bi-invariant form on the trivial summand -----------------
    ideals = isotropy.split_ideals(split, decomp.s0.space, seed=seed)
    family.operator_blocks = [b for b in family.operator_blocks if b.label != "S0"]
    next_class = max((b.class_id for b in family.scalar_blocks), default=-1) + 1
    if ideals.center.dim:
        family.operator_blocks.append(metric_mod.OperatorBlock(
            space=ideals.center, label="z(S0)"))
    for i, s in enumerate(ideals.simples):
        label = f"s{i + 1}"
        family.scalar_blocks.append(metric_mod.ScalarBlock(
            space=s, class_id=next_class, label=label))
        next_class += 1
    # recomputed facts backing the rule: S0 is the normalizer complement
    center_ok = all(
        linalg.vec_is_zero(lie_core.bracket(g, zc, sv))
        for zc in _g_basis_of(split, ideals.center)
        for sv in _g_basis_of(split, decomp.s0.space))
    trace.steps.append(RuleApplication(
        tag="3.4", rule="biinvariant-on-trivial-summand", target="S0",
        fired=True,
        witnesses=[{"center_dim": ideals.center.dim,
                    "simple_dims": [s.dim for s in ideals.simples],
                    "center_commutes": center_ok}],
        details={"connected_isotropy_assumed": True}))
    if not center_ok:
        raise ArithmeticError("center of S0 fails to commute with S0")

    # --- 3.5: diagonalize summands via perpendicular multipliers -------
    for si, summand in enumerate(decomp.summands):
        if summand is decomp.s0 or len(summand.members) < 2:
            continue
        label = f"S{summand.class_id}"
        witnesses = _prop35_witnesses(decomp, si, seed)
        if witnesses is None:
            trace.steps.append(RuleApplication(
                tag="3.5", rule="diagonalize-summand", target=label, fired=False))
            continue
        family.intertwiner_blocks = [
            b for b in family.intertwiner_blocks if b.summand_index != si]
        trace.steps.append(RuleApplication(
            tag="3.5", rule="diagonalize-summand", target=label, fired=True,
            witnesses=[{"member": l + 1, "x": _label_coords(g, xg)}
                       for l, xg in witnesses]))

    # --- 3.6: scalar summands via orthogonal intertwiner brackets ------
    for si, summand in enumerate(decomp.summands):
        if summand is decomp.s0 or len(summand.members) < 2:
            continue
        label = f"S{summand.class_id}"
        result = _prop36_certificate(decomp, si, seed)
        if result is None:
            trace.steps.append(RuleApplication(
                tag="3.6", rule="scalar-summand", target=label, fired=False))
            continue
        family.intertwiner_blocks = [
            b for b in family.intertwiner_blocks if b.summand_index != si]
        member_classes = [b.class_id for b in family.scalar_blocks
                          if b.label.startswith(label + ".")]
        for c in member_classes[1:]:
            family.merge(member_classes[0], c)
        trace.steps.append(RuleApplication(
            tag="3.6", rule="scalar-summand", target=label, fired=True,
            witnesses=result, details={"quantifier_certified": True}))

    # --- 3.2: merge scalar classes through bracket projections ---------
    # candidate scalar subspaces: every scalar block plus 1-dim center
    nodes: List[Tuple[Subspace, Optional[int], str]] = []
    for b in family.scalar_blocks:
        nodes.append((b.space, b.class_id, b.label))
    for b in list(family.operator_blocks):
        if b.space.dim == 1:
            nodes.append((b.space, None, b.label))
    edges = []
    merged_pairs = []

    def node_class(idx: int) -> Optional[int]:
        return nodes[idx][1]

    def promote_center(idx: int) -> int:
        """Turn a 1-dim operator block into a scalar block when merged."""
        space, _, label = nodes[idx]
        family.operator_blocks = [b for b in family.operator_blocks
                                  if b.label != label]
        new_id = max((b.class_id for b in family.scalar_blocks), default=-1) + 1
        family.scalar_blocks.append(metric_mod.ScalarBlock(
            space=space, class_id=new_id, label=label))
        nodes[idx] = (space, new_id, label)
        return new_id

    bases_g = [(_g_basis_of(split, sp), sp.norms) for sp, _, _ in nodes]
    for i, j in itertools.combinations(range(len(nodes)), 2):
        wit = _prop32_pair_witness(g, bases_g[i], bases_g[j])
        if wit is None:
            continue
        x_g, y_g, w_g, w_perp = wit
        edges.append({"pair": [nodes[i][2], nodes[j][2]],
                      "x": _label_coords(g, x_g), "y": _label_coords(g, y_g),
                      "bracket": _label_coords(g, w_g),
                      "outside_component": _label_coords(g, w_perp)})
        ci = node_class(i) if node_class(i) is not None else promote_center(i)
        cj = node_class(j) if node_class(j) is not None else promote_center(j)
        if family.merge(ci, cj):
            merged_pairs.append([nodes[i][2], nodes[j][2]])
    for i, j, k in itertools.permutations(range(len(nodes)), 3):
        if i > j:
            continue
        wit = _prop32_triple_witness(g, bases_g[i], bases_g[j], bases_g[k])
        if wit is None:
            continue
        x_g, y_g, w_g = wit
        edges.append({"triple": [nodes[i][2], nodes[j][2], nodes[k][2]],
                      "x": _label_coords(g, x_g), "y": _label_coords(g, y_g),
                      "bracket": _label_coords(g, w_g)})
        ids = []
        for idx in (i, j, k):
            ids.append(node_class(idx) if node_class(idx) is not None
                       else promote_center(idx))
        for other in ids[1:]:
            if family.merge(ids[0], other):
                merged_pairs.append([nodes[i][2], nodes[j][2], nodes[k][2]])
    trace.steps.append(RuleApplication(
        tag="3.2", rule="merge-eigenvalues", target="scalar classes",
        fired=bool(edges),
        witnesses=edges, details={"merged": merged_pairs}))
    return family, trace


def _prop35_witnesses(decomp: IsotypicalDecomposition, si: int, seed: int
                      ) -> Optional[List[Tuple[int, Vec]]]:
    """Per-member perpendicular vectors X with ad(X) injective on the member
    and vanishing on its siblings; None when some member has no witness."""
    split = decomp.action.split
    g = split.algebra
    summand = decomp.summands[si]
    members = summand.members
    summand_g = _g_basis_of(split, summand.space)

    candidates: List[Vec] = list(split.h.basis_coords)
    candidates += _g_basis_of(split, decomp.s0.space)
    for sj, other in enumerate(decomp.summands):
        if sj != si and other is not decomp.s0:
            candidates += _g_basis_of(split, other.space)
    rng = random.Random(f"rule35:{seed}")
    pool = list(candidates)
    for _ in range(100):
        combo = linalg.zero_vec(g.dim)
        for v in pool:
            combo = linalg.vec_add(combo, linalg.vec_scale(
                Fraction(rng.randint(-3, 3)), v))
        candidates.append(combo)

    out = []
    for l, member in enumerate(members):
        member_g = _g_basis_of(split, member.space)
        found = None
        for x_g in candidates:
            if linalg.vec_is_zero(x_g):
                continue
            # X must be B-perpendicular to the whole summand
            if any(lie_core.inner(g, x_g, s) != 0 for s in summand_g):
                continue
            ok = True
            cols = []
            for v_g in member_g:
                w = lie_core.bracket(g, x_g, v_g)
                w_m = split.coords_in_m(w)
                coords = member.space.coords_of(w_m, split.gram_m)
                if coords is None:
                    ok = False
                    break
                cols.append(coords)
            if not ok or linalg.rank(cols) != member.space.dim:
                continue
            for lm, other in enumerate(members):
                if lm == l:
                    continue
                for v_g in _g_basis_of(split, other.space):
                    if not linalg.vec_is_zero(lie_core.bracket(g, x_g, v_g)):
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                found = x_g
                break
        if found is None:
            return None
        out.append((l, found))
    return out


def _prop36_certificate(decomp: IsotypicalDecomposition, si: int, seed: int
                        ) -> Optional[List[dict]]:
    """Exact certificate of the scalar-summand conditions, or None.

    For each member l a vector X_l must make phi -> [X_l, phi(X_l)]
    projected outside the summand injective on every intertwiner space
    (covers all nonzero phi), with the images for different target members
    pairwise B-orthogonal (bilinear, so basis pairs suffice).
    """
    split = decomp.action.split
    g = split.algebra
    summand = decomp.summands[si]
    members = summand.members
    r = len(members)
    summand_g = _g_basis_of(split, summand.space)
    summand_norms = summand.space.norms

    def perp_part(w: Vec) -> Vec:
        return linalg.vec_sub(
            w, _project_onto_space(g, summand_g, summand_norms, w))

    out = []
    rng = random.Random(f"rule36:{seed}")
    for l, member in enumerate(members):
        base = [list(v) for v in member.space.basis]
        candidates = list(base)
        for _ in range(20):
            combo = linalg.zero_vec(decomp.dim)
            for v in base:
                combo = linalg.vec_add(combo, linalg.vec_scale(
                    Fraction(rng.randint(-3, 3)), v))
            candidates.append(combo)
        found = None
        for x_m in candidates:
            if linalg.vec_is_zero(x_m):
                continue
            x_coords = member.space.coords_of(x_m, split.gram_m)
            if x_coords is None:
                continue
            x_g = split.m_to_g(x_m)
            images: Dict[int, List[Vec]] = {}
            ok = True
            for m in range(r):
                if m == l:
                    continue
                phis = summand.intertwiner_bases.get((l, m), [])
                if not phis:
                    ok = False
                    break
                rems = []
                for phi in phis:
                    phi_x = linalg.mat_vec(phi, x_coords)
                    img_m = linalg.zero_vec(decomp.dim)
                    for c, b in zip(phi_x, members[m].space.basis):
                        if c != 0:
                            img_m = linalg.vec_add(img_m, linalg.vec_scale(c, b))
                    rem = perp_part(lie_core.bracket(g, x_g, split.m_to_g(img_m)))
                    rems.append(rem)
                if linalg.rank(rems) != len(phis):
                    ok = False
                    break
                images[m] = rems
            if not ok:
                continue
            for m1, m2 in itertools.combinations(sorted(images), 2):
                for w1 in images[m1]:
                    for w2 in images[m2]:
                        if lie_core.inner(g, w1, w2) != 0:
                            ok = False
                            break
                    if not ok:
                        break
                if not ok:
                    break
            if ok:
                found = x_m
                break
        if found is None:
            return None
        out.append({"member": l + 1,
                    "x": _label_coords(g, split.m_to_g(found))})
    return out


def _prop32_pair_witness(g, basis_a, basis_b):
    """Basis pair whose bracket projects outside the two subspaces."""
    vecs_a, norms_a = basis_a
    vecs_b, norms_b = basis_b
    for x in vecs_a:
        for y in vecs_b:
            w = lie_core.bracket(g, x, y)
            if linalg.vec_is_zero(w):
                continue
            w_perp = linalg.vec_sub(
                w, _project_onto_space(g, vecs_a, norms_a, w))
            w_perp = linalg.vec_sub(
                w_perp, _project_onto_space(g, vecs_b, norms_b, w_perp))
            if not linalg.vec_is_zero(w_perp):
                return x, y, w, w_perp
    return None


def _prop32_triple_witness(g, basis_a, basis_b, basis_c):
    """Basis pair of (a, b) whose bracket has a component in c."""
    vecs_a, _ = basis_a
    vecs_b, _ = basis_b
    vecs_c, norms_c = basis_c
    for x in vecs_a:
        for y in vecs_b:
            w = lie_core.bracket(g, x, y)
            if linalg.vec_is_zero(w):
                continue
            if not linalg.vec_is_zero(
                    _project_onto_space(g, vecs_c, norms_c, w)):
                return x, y, w
    return None


# ---------------------------------------------------------------------------
# parameter scans
# ---------------------------------------------------------------------------

@dataclass
class ScanSpec:
    grid: List[Fraction] = field(default_factory=lambda: [
        Fraction(i, 4) for i in range(1, 17)])
    random_count: int = 0
    seed: int = 0
    survivor_random_probes: int = 20
    jobs: int = 1
    prescreen: bool = True
    max_grid_points: int = 2_000_000


@dataclass
class ScanResult:
    survivors: List[dict]
    falsified: List[dict]
    n_points: int
    notes: List[str] = field(default_factory=list)


_WORKER_CTX: dict = {}


class _ScanTensors:
    """Per-probe bracket tensors shared by the float screen and the exact
    confirmations.

    The defect [X, AX] and the witness columns [h_i, AX] are linear in the
    family parameters, so per probe X everything reduces to tensors
    contracted against the parameter vector: exact contractions confirm a
    single flagged probe cheaply, float contractions screen all points at
    once.  Containment of every bracket in m is verified exactly when the
    tensors are built, and carries over each contraction by linearity.
    """

    def __init__(self, family: MetricFamily, ops: List[Mat],
                 probes: List[Vec]):
        split = family.decomp.action.split
        g = split.algebra
        dim = family.decomp.dim
        self.gram_m = split.gram_m
        self.norms = [split.gram_m[i][i] for i in range(dim)]
        self.nh = split.h.dim
        self.probes = probes
        # sparse rows: probe -> param -> [(index, value)] of [X, Op_c X]_m
        self.bx: List[List[List[Tuple[int, Fraction]]]] = []
        self.hx: List[List[List[List[Tuple[int, Fraction]]]]] = []
        for x in probes:
            ox = [linalg.mat_vec(op, x) for op in ops]
            ox_g = [split.m_to_g(o) for o in ox]
            x_g = split.m_to_g(x)

            def sparse(vec: Vec) -> List[Tuple[int, Fraction]]:
                return [(i, c) for i, c in enumerate(vec) if c != 0]

            self.bx.append([sparse(split.coords_in_m(
                lie_core.bracket(g, x_g, og))) for og in ox_g])
            self.hx.append([[sparse(split.coords_in_m(
                lie_core.bracket(g, hv, og))) for og in ox_g]
                for hv in split.h.basis_coords])

    def _contract(self, rows, values) -> Vec:
        out = linalg.zero_vec(len(self.norms))
        for v, row in zip(values, rows):
            if v != 0:
                for i, c in row:
                    out[i] += v * c
        return out

    def exact_residual(self, values: Sequence, probe_idx: int
                       ) -> Tuple[Vec, Vec, object]:
        """(X, best witness a, exact squared residual) for one probe."""
        defect = self._contract(self.bx[probe_idx], values)
        cols = [self._contract(rows, values) for rows in self.hx[probe_idx]]
        a_h, res_sq = linalg.least_squares(
            cols, [-c for c in defect], self.gram_m)
        return self.probes[probe_idx], a_h, res_sq

    def flag(self, values: List[Tuple]) -> List[int]:
        """First failing probe index per point by float screening, or -1."""
        import numpy as np
        v = np.array([[float(c) for c in vals] for vals in values])
        n = len(values)
        w = np.array([float(x) for x in self.norms])
        flags = np.full(n, -1, dtype=int)
        active = np.arange(n)
        dim = len(self.norms)

        def to_f(rows):
            out = np.zeros((len(rows), dim))
            for r, row in enumerate(rows):
                for i, c in row:
                    out[r, i] = float(c)
            return out

        for p in range(len(self.probes)):
            if active.size == 0:
                break
            va = v[active]
            bxp = to_f(self.bx[p])
            defect = va @ bxp
            if self.nh:
                cols = np.stack([va @ to_f(rows) for rows in self.hx[p]],
                                axis=1)
                wcols = cols * w
                nmat = np.einsum("nid,njd->nij", wcols, cols)
                rhs = -np.einsum("nid,nd->ni", wcols, defect)
                ridge = (np.trace(nmat, axis1=1, axis2=2) / self.nh + 1e-12)
                nmat = nmat + (1e-12 * ridge)[:, None, None] * np.eye(self.nh)
                sol = np.linalg.solve(nmat, rhs[..., None])[..., 0]
                fit = np.einsum("ni,nid->nd", sol, cols) + defect
            else:
                fit = defect
            res = np.einsum("nd,d,nd->n", fit, w, fit)
            scale = np.einsum("nd,d,nd->n", defect, w, defect) + 1.0
            hit = res > np.maximum(1e-16, 1e-12 * scale)
            flags[active[hit]] = p
            active = active[~hit]
        return [int(f) for f in flags]


def _grid_points(family: MetricFamily, spec: ScanSpec) -> List[Tuple]:
    if family.intertwiner_blocks or any(
            b.space.dim > 1 for b in family.operator_blocks):
        raise ValueError("exhaustive grids need a diagonal family; "
                         "use random_count for the full cone")
    n = family.n_params
    total = len(spec.grid) ** n
    if total > spec.max_grid_points:
        raise ValueError(f"grid of {total} points exceeds the cap; "
                         "coarsen the grid or reduce the family first")
    return list(itertools.product(spec.grid, repeat=n))


def _random_points(family: MetricFamily, spec: ScanSpec,
                   ops: List[Mat]) -> List[Tuple]:
    """Seeded lattice samples of the full cone, off the diagonal.

    Scalar classes and operator diagonals draw from the positive grid;
    operator off-diagonals and intertwiner coordinates draw from the
    symmetric lattice with at least one forced nonzero, so every sample
    leaves the diagonal subcone.  Rejection-samples until positive
    definite (the off-diagonal lattice mostly falls outside the cone).
    """
    rng = random.Random(f"scan-random:{spec.seed}")
    n_classes = len(family.classes())
    layout = []
    for b in family.operator_blocks:
        d = b.space.dim
        layout.extend("diag" if i == j else "off"
                      for i in range(d) for j in range(i, d))
    layout.extend("off" for b in family.intertwiner_blocks
                  for _ in range(b.n_params))
    off_positions = [n_classes + i for i, kind in enumerate(layout)
                     if kind == "off"]
    if not off_positions:
        return []
    gram = family.decomp.action.gram
    dim = family.decomp.dim
    # keep draws near the cone: few off-diagonal entries, each a fraction
    # of the smallest diagonal weight drawn
    p_nonzero = min(Fraction(1, 4), Fraction(4, max(1, len(off_positions))))
    quarters = (Fraction(1, 8), Fraction(1, 4), Fraction(1, 2))
    points: List[Tuple] = []
    attempts = 0
    while len(points) < spec.random_count and attempts < 80 * spec.random_count:
        attempts += 1
        diag = [rng.choice(spec.grid) for _ in range(n_classes)]
        diag += [rng.choice(spec.grid) for kind in layout if kind == "diag"]
        dmin = min(diag) if diag else Fraction(1)
        sym_small = [q * dmin for q in quarters]
        sym_small += [-x for x in sym_small]
        vals = list(diag[:n_classes])
        di = n_classes
        for kind in layout:
            if kind == "diag":
                vals.append(diag[di])
                di += 1
            else:
                vals.append(rng.choice(sym_small)
                            if rng.random() < p_nonzero else ZERO)
        if all(vals[i] == 0 for i in off_positions):
            vals[rng.choice(off_positions)] = rng.choice(sym_small)
        amat = linalg.zeros(dim, dim)
        for v, op in zip(vals, ops):
            if v != 0:
                amat = linalg.mat_add(amat, linalg.mat_scale(v, op))
        if metric_mod._pd_check(amat, gram):
            points.append(tuple(vals))
    return points


def _diagonal_family_pd(family: MetricFamily) -> bool:
    return (not family.intertwiner_blocks
            and all(b.space.dim == 1 for b in family.operator_blocks))


def _evaluate_scan_point(task: Tuple[int, Tuple, int]) -> Tuple[int, dict]:
    idx, values, flag = task
    family: MetricFamily = _WORKER_CTX["family"]
    ops: List[Mat] = _WORKER_CTX["ops"]
    spec: ScanSpec = _WORKER_CTX["spec"]
    tensors: _ScanTensors = _WORKER_CTX["tensors"]
    decomp = family.decomp
    dim = decomp.dim
    entry = {"params": [linalg.frac_to_str(v) for v in values]}

    def falsified_entry(x: Vec, res_sq) -> dict:
        entry["status"] = "falsified"
        entry["falsifier_x"] = [linalg.frac_to_str(c) for c in x]
        entry["residual_sq"] = linalg.frac_to_str(res_sq)
        return entry

    if _diagonal_family_pd(family):
        pd = all(v > 0 for v in values)
    else:
        amat_pd = linalg.zeros(dim, dim)
        for v, op in zip(values, ops):
            if v != 0:
                amat_pd = linalg.mat_add(amat_pd, linalg.mat_scale(v, op))
        pd = metric_mod._pd_check(amat_pd, decomp.action.gram)
    if not pd:
        entry["status"] = "not-pd"
        return idx, entry

    if flag >= 0:
        # exact confirmation of the probe the float screen flagged
        x, _, res_sq = tensors.exact_residual(values, flag)
        if res_sq > 0:
            return idx, falsified_entry(x, res_sq)
    for p in range(len(tensors.probes)):
        x, _, res_sq = tensors.exact_residual(values, p)
        if res_sq > 0:
            return idx, falsified_entry(x, res_sq)
    if spec.survivor_random_probes:
        amat = linalg.zeros(dim, dim)
        for v, op in zip(values, ops):
            if v != 0:
                amat = linalg.mat_add(amat, linalg.mat_scale(v, op))
        a = MetricEndomorphism(decomp=decomp, matrix=amat, params=None,
                               is_pd=True)
        cert = go_check(a, strategy="random",
                        count=spec.survivor_random_probes,
                        seed=spec.seed * 1_000_003 + idx,
                        keep_witnesses=False)
        if cert.verdict == "falsified":
            return idx, falsified_entry(cert.falsifier.x_m,
                                        cert.falsifier.residual_sq)
    entry["status"] = "survived"
    return idx, entry


def search_go(decomp: IsotypicalDecomposition, family: MetricFamily,
              spec: Optional[ScanSpec] = None,
              include_grid: bool = True) -> ScanResult:
    """Instantiate the family over a seeded scan, filter PD, run go_check.

    Deterministic for a fixed seed and independent of the worker count:
    points are indexed before dispatch and merged in index order.
    """
    spec = spec or ScanSpec()
    ops = metric_mod.family_basis_ops(family)
    points: List[Tuple] = []
    if include_grid:
        points.extend(_grid_points(family, spec))
    if spec.random_count:
        points.extend(_random_points(family, spec, ops))
    probes = basis_probe_vectors(decomp)
    tensors = _ScanTensors(family, ops, probes)
    if spec.prescreen and points:
        flags = tensors.flag(points)
    else:
        flags = [-1] * len(points)
    _WORKER_CTX.update({"family": family, "ops": ops, "spec": spec,
                        "tensors": tensors})
    tasks = [(i, pt, flags[i]) for i, pt in enumerate(points)]
    results: List[Tuple[int, dict]] = []
    if spec.jobs > 1:
        try:
            import concurrent.futures as cf
            import multiprocessing as mp
            # workers inherit _WORKER_CTX through fork; anything else
            # falls back to the sequential path
            ctx = mp.get_context("fork")
            with cf.ProcessPoolExecutor(max_workers=spec.jobs,
                                        mp_context=ctx) as pool:
                chunk = max(1, len(tasks) // (spec.jobs * 8) or 1)
                results = list(pool.map(_evaluate_scan_point, tasks,
                                        chunksize=chunk))
        except (OSError, ImportError, ValueError):
            results = [_evaluate_scan_point(t) for t in tasks]
    else:
        results = [_evaluate_scan_point(t) for t in tasks]
    results.sort(key=lambda r: r[0])
    survivors, falsified = [], []
    notes = []
    for _, entry in results:
        if entry["status"] == "survived":
            survivors.append(entry)
        elif entry["status"] == "falsified":
            falsified.append(entry)
    n_pd = sum(1 for _, e in results if e["status"] != "not-pd")
    if n_pd == 0:
        notes.append("no positive definite points in the scan")
    return ScanResult(survivors=survivors, falsified=falsified,
                      n_points=len(points), notes=notes)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def _witness_json(w: Witness, tol: Optional[float] = None) -> dict:
    conv = (linalg.frac_to_str if tol is None else float)
    return {"x": [conv(c) for c in w.x_m],
            "a": [conv(c) for c in w.a_h],
            "residual_sq": conv(w.residual_sq)}


def certificate_to_json_dict(cert: GOCertificate, max_witnesses: int = 200,
                             tol: Optional[float] = None) -> dict:
    out = {
        "verdict": cert.verdict,
        "strategy": cert.strategy,
        "count": cert.count,
        "seed": cert.seed,
        "witnesses": [_witness_json(w, tol)
                      for w in cert.witnesses[:max_witnesses]],
    }
    if cert.falsifier is not None:
        out["falsifier"] = _witness_json(cert.falsifier, tol)
    return out


def trace_to_json_dict(trace: ReductionTrace) -> dict:
    return {"steps": [{
        "tag": s.tag, "rule": s.rule, "target": s.target, "fired": s.fired,
        "witnesses": s.witnesses, "details": s.details} for s in trace.steps]}
