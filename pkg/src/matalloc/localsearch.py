"""Local-search solver for the core cover problem.

Given a matroid M, a polymatroid P over the same elements, and b >= 1,
find an independent set I_M and y in P such that every element is in I_M
or has y(i) >= b, or emit a machine-checkable certificate that no cover
exists at value (4 + O(eps)) * b covering a 3*eps fraction of the target
set with the matroid.

The augmentation routine grows a partial cover one target set B0 at a
time by swapping elements between the matroid side and the polymatroid
side: a set A of addable elements (droppable from I_M, absorbable by P at
multiplicity 2b) is built layer by layer, the blocking elements B of I_P
that obstruct the swap are identified, and the routine either commits
enough immediately-addable elements, fails with a certificate, or
recurses on B. All threshold comparisons are exact rationals.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil

from . import stats
from .bitsets import bits, elements, full_mask, indicator, size
from .instances import CoreCoverInstance
from .limits import Caps, DEFAULT_CAPS, InternalInvariantError
from .matroids import ContractedMatroid, MatroidOracle, ZeroedMatroid, matroid_add_greedy
from .polymatroids import MarginalPoly, PolymatroidOracle, capped_marginal, member
from .oracle import exists_strong_cover


@dataclass
class SearchState:
    """One augmentation problem: disjoint I_M (matroid side), I_P (polymatroid
    side), and target set B0 with priority order over B0 (then over recursion
    additions)."""

    ground: int
    matroid: MatroidOracle
    poly: PolymatroidOracle
    b: int
    eps: Fraction
    I_M: int
    I_P: int
    B0: int
    order: tuple[int, ...]


@dataclass(frozen=True)
class Certificate:
    """Infeasibility certificate (Z1, Z2) with Z2 ⊆ Z1 ⊆ ground \\ B0.

    Its four properties jointly exclude any cover at value (4+O(eps))b that
    places at least a 3*eps fraction of B0 on the matroid side.
    """

    z1: int
    z2: int
    b: int
    eps: Fraction
    ground: int
    b0: int


@dataclass(frozen=True)
class AugmentResult:
    success: bool
    I_M: int = 0
    I_P: int = 0
    certificate: Certificate | None = None
    nodes: int = 1


@dataclass
class CertificateRecord:
    """A certificate together with the oracles it speaks about."""

    certificate: Certificate
    matroid: MatroidOracle
    poly: PolymatroidOracle
    failed_element: int


@dataclass
class CoverResult:
    feasible: bool
    I_M: int = 0
    y: tuple = ()
    b: int = 0
    certificates: list = field(default_factory=list)
    restarts: int = 0
    zeroed: int = 0
    augment_calls: int = 0
    max_recursion_nodes: int = 0
    total_recursion_nodes: int = 0
    oracle_queries: int = 0
    diagnostics: str = ""


class AddableSets:
    """Addable elements A ⊆ I_M with their layers and the shield set C.

    C per its definition contains B0; c_rest = C \\ B0 is what the recursion
    removes and rank arguments contract (B0 must stay in the child ground).
    """

    def __init__(self, a: int, c_rest: int, layers: list[int]):
        self.a = a
        self.c_rest = c_rest
        self.layers = layers


def _bvec(mask: int, n: int, b: int):
    return indicator(mask, n, b)


def _assert_state(state: SearchState, caps: Caps) -> None:
    if state.I_M & state.I_P or state.I_M & state.B0 or state.I_P & state.B0:
        raise InternalInvariantError("I_M, I_P, B0 must be disjoint")
    if (state.I_M | state.I_P | state.B0) != state.ground:
        raise InternalInvariantError("ground must equal I_M ∪ I_P ∪ B0")
    if not state.matroid.is_independent(state.I_M):
        raise InternalInvariantError("I_M must be independent")
    if not member(state.poly, _bvec(state.I_P, state.poly.n, state.b), caps):
        raise InternalInvariantError("b·I_P must belong to the polymatroid")


def build_addable(state: SearchState, caps: Caps = DEFAULT_CAPS) -> AddableSets:
    """Layered construction of the addable set A and the shield C.

    A layer collects elements of I_M that are rank-redundant against
    B0 ∪ I_M minus the growing layer and whose marginal above 2b·(A so far)
    is still at least 2b; construction stops when a layer stays below
    eps*|B0| (that last partial layer is discarded). Candidates are scanned
    in ascending index order and rescanned after every addition.
    """
    m, p, b, eps = state.matroid, state.poly, state.b, state.eps
    n_b0 = size(state.B0)
    a = 0
    layers: list[int] = []
    while True:
        layer = 0
        while True:
            progressed = False
            pool = state.I_M & ~a & ~layer
            for i in bits(pool):
                bit = 1 << i
                rest = (state.B0 | (state.I_M & ~layer)) & ~bit
                if m.rank_marginal(bit, rest) != 0:
                    continue
                if capped_marginal(p, bit, 2 * b, a | layer) >= 2 * b:
                    layer |= bit
                    progressed = True
                    break
            if not progressed:
                break
        if Fraction(size(layer)) < eps * n_b0:
            break
        layers.append(layer)
        a |= layer
    c_rest = a
    for i in bits(state.I_M & ~a):
        if capped_marginal(p, 1 << i, 2 * b, a) < 2 * b:
            c_rest |= 1 << i
    return AddableSets(a, c_rest, layers)


def compute_blocking(state: SearchState, a: int, i_p: int) -> int:
    """Blocking elements: i in I_P whose marginal above b·((I_P ∪ A) − i) drops below b."""
    blocked = 0
    base = i_p | a
    for i in bits(i_p):
        if capped_marginal(state.poly, 1 << i, state.b, base & ~(1 << i)) < state.b:
            blocked |= 1 << i
    return blocked


def recurse_input(state: SearchState, addable: AddableSets, blocked: int,
                  i_m: int, i_p: int) -> SearchState:
    """Child problem: remove the shield (minus B0) from the ground, contract its
    rank, cap-and-contract b·(A ∪ B) in the polymatroid, and ask for B0 ∪ B
    with the blocking elements at lower priority."""
    c_rest = addable.c_rest
    child_ab = addable.a | blocked
    child = SearchState(
        ground=state.ground & ~c_rest,
        matroid=ContractedMatroid(state.matroid, c_rest),
        poly=MarginalPoly(state.poly.capped(uniform=state.b, on=child_ab), child_ab),
        b=state.b,
        eps=state.eps,
        I_M=i_m & ~c_rest,
        I_P=i_p & ~blocked,
        B0=state.B0 | blocked,
        order=state.order + elements(blocked),
    )
    return child


def _fold_certificate(child_cert: Certificate, state: SearchState,
                      addable: AddableSets, blocked: int) -> Certificate:
    return Certificate(
        z1=child_cert.z1 | addable.c_rest | blocked,
        z2=child_cert.z2 | addable.a | blocked,
        b=state.b, eps=state.eps, ground=state.ground, b0=state.B0)


def augment(state: SearchState, caps: Caps = DEFAULT_CAPS,
            check: bool = True) -> AugmentResult:
    """One augmentation: cover an eps^2 fraction of B0 with the matroid while
    keeping the rest of the cover intact, or fail with a certificate."""
    if check:
        _assert_state(state, caps)
    m, p, b, eps = state.matroid, state.poly, state.b, state.eps
    n = p.n
    b0 = state.B0
    n_b0 = size(b0)
    eps2_thresh = eps * eps * n_b0
    nodes = 1
    i_m, i_p = state.I_M, state.I_P

    def succeed(final_i_m: int, final_i_p: int) -> AugmentResult:
        grown = matroid_add_greedy(m, final_i_m, state.order)
        if Fraction(size(grown & b0)) < eps2_thresh:
            raise InternalInvariantError("success branch covered too little of B0")
        if not (grown | final_i_p) >= (state.I_M | state.I_P):
            raise InternalInvariantError("cover lost previously covered elements")
        return AugmentResult(True, grown, final_i_p, nodes=nodes)

    if Fraction(m.rank_marginal(b0, i_m)) >= eps2_thresh:
        return succeed(i_m, i_p)

    addable = build_addable(state, caps)
    a = addable.a
    a_i = 0
    blocked = compute_blocking(state, a, i_p)

    while True:
        # (1) grow the immediately addable set
        grew = False
        for i in bits(a & ~a_i):
            if capped_marginal(p, 1 << i, b, i_p | a_i) >= b:
                a_i |= 1 << i
                grew = True
                break
        if grew:
            continue
        # the remaining operations see a stable state: (1) is exhausted
        if check:
            _check_blocking_invariants(state, addable, a_i, blocked)
        # (2) commit A_I, freeing matroid capacity for B0
        if a and Fraction(size(a_i)) >= eps * size(a):
            if check:
                freed = m.rank_marginal(b0, i_m & ~a_i)
                if Fraction(freed) < eps2_thresh - size(b0 & i_m):
                    raise InternalInvariantError("commit freed less rank than guaranteed")
            return succeed(i_m & ~a_i, i_p | a_i)
        # (3) too few blocking elements: infeasibility certificate
        if Fraction(size(blocked)) < eps * n_b0:
            cert = Certificate(z1=addable.c_rest | blocked, z2=a | blocked,
                               b=b, eps=eps, ground=state.ground, b0=b0)
            return AugmentResult(False, certificate=cert, nodes=nodes)
        # (4) recurse on the blocking elements
        child = recurse_input(state, addable, blocked, i_m, i_p)
        result = augment(child, caps, check)
        nodes += result.nodes
        if not result.success:
            cert = _fold_certificate(result.certificate, state, addable, blocked)
            return AugmentResult(False, certificate=cert, nodes=nodes)
        i_m = addable.c_rest | result.I_M
        i_p = (blocked & ~result.I_M) | result.I_P
        if check:
            if not m.is_independent(i_m):
                raise InternalInvariantError("I_M dependent after recursion return")
            if not member(p, _bvec(i_p | a_i, n, b), caps):
                raise InternalInvariantError("b·(I_P ∪ A_I) outside P after recursion return")
        if Fraction(size(b0 & result.I_M)) >= eps2_thresh:
            return succeed(i_m, i_p)
        if check and Fraction(size(blocked & result.I_M)) < eps * eps * size(blocked):
            raise InternalInvariantError("recursion made progress on neither B0 nor B")
        new_blocked = compute_blocking(state, a, i_p)
        if check:
            if new_blocked & ~blocked:
                raise InternalInvariantError("blocking set gained elements")
            if Fraction(size(new_blocked)) > (1 - eps * eps) * size(blocked):
                raise InternalInvariantError("blocking set did not shrink enough")
        blocked = new_blocked


def _check_blocking_invariants(state: SearchState, addable: AddableSets,
                               a_i: int, blocked: int) -> None:
    p, b, eps = state.poly, state.b, state.eps
    a = addable.a
    for i in bits((a | blocked) & ~a_i):
        if capped_marginal(p, 1 << i, b, (a | blocked) & ~(1 << i)) >= b:
            raise InternalInvariantError(
                f"element {i} of A ∪ B (outside A_I) has marginal >= b")
    if a and Fraction(size(a_i)) < eps * size(a):
        if Fraction(size(blocked)) <= (1 - 2 * eps) * size(a):
            raise InternalInvariantError("blocking set smaller than (1-2eps)|A|")


def recursion_node_bound(n: int, eps: Fraction) -> int:
    """2^ceil(log_{1/(1-eps^2)} n): the recursion-tree size bound."""
    if n <= 1:
        return 2
    shrink = 1 - eps * eps
    ell = 0
    reach = Fraction(1)
    while reach < n:
        reach /= shrink
        ell += 1
    return 2 ** ell


def solve_cover(inst: CoreCoverInstance, eps: Fraction | float = Fraction(1, 10),
                caps: Caps = DEFAULT_CAPS, check: bool = True) -> CoverResult:
    """Cover every element by the matroid or by polymatroid multiplicity b.

    Elements are targeted in ascending index order; when one cannot be
    covered, its certificate is recorded, its rank is zeroed out, and the
    whole procedure restarts (at most |E| times). Infeasibility of the
    initial rank-zero set is immediate infeasibility.
    """
    eps = Fraction(eps)
    if not (0 < eps <= Fraction(1, 8)):
        raise ValueError("eps must lie in (0, 1/8]")
    if inst.b < 1:
        raise ValueError("cover level b must be a positive integer")
    matroid, poly, b = inst.matroid, inst.polymatroid, inst.b
    n = matroid.n
    if matroid.n != poly.n:
        raise ValueError("matroid and polymatroid must share the ground set")
    before = stats.snapshot()
    result = CoverResult(feasible=False, b=b)
    zeroed = 0
    for restart in range(n + 1):
        m: MatroidOracle = ZeroedMatroid(matroid, zeroed) if zeroed else matroid
        i_p = 0
        for i in range(n):
            if m.rank(1 << i) == 0:
                i_p |= 1 << i
        if not member(poly, _bvec(i_p, n, b), caps):
            result.diagnostics = ("the rank-zero elements alone exceed the polymatroid "
                                  "at multiplicity b; the optimum is below b")
            break
        i_m = 0
        failed = None
        # target elements the polymatroid can carry least first: they must
        # claim matroid capacity while it lasts
        priority = sorted(range(n), key=lambda i: (poly.value(1 << i), i))
        while True:
            uncovered = full_mask(n) & ~(i_m | i_p)
            if not uncovered:
                break
            target = 1 << next(i for i in priority if (uncovered >> i) & 1)
            state = SearchState(ground=i_m | i_p | target, matroid=m, poly=poly,
                                b=b, eps=eps, I_M=i_m, I_P=i_p, B0=target,
                                order=elements(target))
            res = augment(state, caps, check)
            result.augment_calls += 1
            result.total_recursion_nodes += res.nodes
            result.max_recursion_nodes = max(result.max_recursion_nodes, res.nodes)
            if res.success:
                i_m, i_p = res.I_M, res.I_P
                if not target & (i_m | i_p):
                    raise InternalInvariantError("augmentation did not cover its target")
            else:
                result.certificates.append(
                    CertificateRecord(res.certificate, m, poly, target.bit_length() - 1))
                failed = target
                break
        if failed is None:
            result.feasible = True
            result.I_M = i_m
            result.y = _bvec(i_p, n, b)
            break
        zeroed |= failed
        result.restarts += 1
    else:
        result.diagnostics = "restart budget |E| exhausted"
    result.zeroed = zeroed
    result.oracle_queries = stats.total(stats.delta(before))
    return result


def verify_certificate(cert: Certificate, matroid: MatroidOracle,
                       poly: PolymatroidOracle, exhaustive: bool = False,
                       caps: Caps = DEFAULT_CAPS) -> dict:
    """Check the four certificate properties by oracle evaluation.

    Returns a report with one boolean per property, the overall verdict,
    and the smallest integer multiple of b the certificate provably
    excludes. With exhaustive=True (ground size <= 8) it additionally
    confirms by enumeration that no cover at (4+40*eps)*b exists that puts
    a 3*eps fraction of B0 on the matroid side.
    """
    z1, z2, b, eps, b0 = cert.z1, cert.z2, cert.b, cert.eps, cert.b0
    n_b0 = size(b0)
    report: dict = {"contained": bool(z2 & ~z1 == 0 and z1 & ~(cert.ground & ~b0) == 0)}
    report["p1_rank_shields_b0"] = Fraction(matroid.rank_marginal(b0, z1)) < 2 * eps * n_b0
    report["p2_rank_deficiency"] = (
        Fraction(matroid.rank(z1))
        <= size(z1) - (Fraction(1, 2) - 2 * eps) * size(z2) + eps * n_b0)
    good = sum(1 for i in bits(z2)
               if capped_marginal(poly, 1 << i, b, z2 & ~(1 << i)) < b)
    report["p3_small_marginals_in_z2"] = Fraction(good) >= (1 - eps) * size(z2)
    report["p4_small_marginals_above_z2"] = all(
        capped_marginal(poly, 1 << i, 2 * b, z2) < 2 * b for i in bits(z1 & ~z2))
    report["ok"] = all(report[k] for k in
                       ("contained", "p1_rank_shields_b0", "p2_rank_deficiency",
                        "p3_small_marginals_in_z2", "p4_small_marginals_above_z2"))
    # smallest integer multiple of b provably excluded by the property chain:
    # alpha must satisfy (1+2eps)/(alpha-2) + eps <= 1/2 - 2eps
    report["excluded_multiple"] = ceil(2 + 2 * (1 + 2 * eps) / (1 - 6 * eps))
    if exhaustive:
        level = (4 + 40 * eps) * b
        report["exhaustive_sound"] = not exists_strong_cover(
            matroid, poly, cert.ground, b0, level, 3 * eps * n_b0, caps)
    else:
        report["exhaustive_sound"] = None
    return report
