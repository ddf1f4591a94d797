"""q-access structures and the generalized ports of q-polymatroids.

A port's structure lives on the coordinates of P: subspaces are expressed
relative to P's RREF basis, which is kept as the structure's ``frame`` so
that every structure can be mapped back to the space it came from.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from types import SimpleNamespace

from .errors import InputError
from .gf import FieldCtx
from .polymatroid import QPolymatroid, lattice_tables
from .subspace import (
    BilinearForm,
    Subspace,
    adapted_form,
    coordinates,
    embed,
    full_space,
    inverse,
    lattice,
    lift,
    matmul,
    one_dim_subspaces,
    orthocomplement,
    project,
    quotient,
    transpose,
)


@dataclass(frozen=True)
class AccessStructure:
    """A pair (gamma, privacy) of subspace sets on L(F^dim).

    ``gamma`` is upward closed, ``privacy`` downward closed and the two are
    disjoint; this is checked on construction.
    """

    field: FieldCtx
    dim: int
    gamma: frozenset
    privacy: frozenset
    frame: tuple | None = dc_field(default=None, compare=False)
    world_dim: int | None = dc_field(default=None, compare=False)
    provenance: dict = dc_field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "gamma", frozenset(self.gamma))
        object.__setattr__(self, "privacy", frozenset(self.privacy))
        if self.frame is not None and self.world_dim is None:
            if not self.frame:
                raise InputError("an empty frame needs world_dim")
            object.__setattr__(self, "world_dim", len(self.frame[0]))
        problems = structure_problems(self)
        if problems:
            raise InputError("not a q-access structure: " + "; ".join(problems))

    @property
    def ambient(self) -> Subspace:
        return full_space(self.field, self.dim)

    def subspaces(self):
        return lattice(self.field, self.dim)

    def to_world(self, V: Subspace) -> Subspace:
        if self.frame is None:
            return V
        return embed(V, self.frame, self.world_dim)

    def world_sets(self):
        return (
            frozenset(self.to_world(V) for V in self.gamma),
            frozenset(self.to_world(V) for V in self.privacy),
        )


def structure_problems(S: AccessStructure):
    L, index, join, _ = lattice_tables(S.field, S.dim)
    out = []
    if S.gamma & S.privacy:
        out.append("gamma and privacy intersect")
    g = {index[V] for V in S.gamma}
    a = {index[V] for V in S.privacy}
    for i in g:
        for j in range(len(L)):
            if join[i][j] == j and j not in g:
                out.append(f"gamma not monotone at {L[i]} <= {L[j]}")
                return out
    for i in a:
        for j in range(len(L)):
            if join[i][j] == i and j not in a:
                out.append(f"privacy not anti-monotone at {L[j]} <= {L[i]}")
                return out
    return out


# --------------------------------------------------------------------------
# ports
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Port:
    """The data (M, P0, P) of a generalized q-polymatroid port."""

    M: QPolymatroid
    P0: Subspace
    P: Subspace

    def __post_init__(self):
        M, P0, P = self.M, self.P0, self.P
        if P0.n != M.n or P.n != M.n:
            raise InputError("P0 and P must live in the ground space")
        if (P0 & P).dim != 0 or P0.dim + P.dim != M.n:
            raise InputError("P0 and P must be complementary")
        if M.rank_num(P0) <= 0:
            raise InputError("the secret space P0 has rank 0")

    @property
    def secret_rank(self) -> Fraction:
        return self.M.rank(self.P0)

    def leakage_num(self, V: Subspace) -> int:
        """Numerator of rho(P0 | V) for V <= P (ambient coordinates)."""
        M = self.M
        return M.rank_num(self.P0 + V) - M.rank_num(V)

    def structure(self) -> AccessStructure:
        return port(self)


def _port_sets(spec: Port):
    M, P0, P = spec.M, spec.P0, spec.P
    full = M.rank_num(P0)
    gamma, privacy = set(), set()
    for U in lattice(M.field, P.dim):
        c = spec.leakage_num(embed(U, P.basis, M.n))
        if c == 0:
            gamma.add(U)
        elif c == full:
            privacy.add(U)
    return gamma, privacy


def port(spec: Port) -> AccessStructure:
    M, P0, P = spec.M, spec.P0, spec.P
    gamma, privacy = _port_sets(spec)
    frame = P.basis if M.frame is None else matmul(P.basis, M.frame, M.field)
    world = M.n if M.frame is None else len(M.frame[0])
    return AccessStructure(
        M.field, P.dim, gamma, privacy, frame=frame, world_dim=world,
        provenance={"kind": "port", "P0": P0, "P": P},
    )


def gamma_min(S: AccessStructure):
    """Inclusion-minimal reconstructing spaces, in canonical order."""
    g = S.gamma
    out = [V for V in g if not any(W < V for W in g if W.dim < V.dim)]
    return sorted(out, key=Subspace.sort_key)


def privacy_max(S: AccessStructure):
    a = S.privacy
    out = [V for V in a if not any(V < W for W in a if W.dim > V.dim)]
    return sorted(out, key=Subspace.sort_key)


@dataclass(frozen=True)
class Predicates:
    is_perfect: bool
    is_degenerate: bool
    is_connected: bool
    min_gap: int | None
    threshold: int | None


def is_perfect(S: AccessStructure) -> bool:
    return len(S.gamma) + len(S.privacy) == len(S.subspaces())


def is_degenerate(S: AccessStructure) -> bool:
    return not S.gamma or not S.privacy


def is_connected(S: AccessStructure) -> bool:
    gm = gamma_min(S)
    return all(any(p <= V for V in gm) for p in one_dim_subspaces(S.ambient))


def min_gap(S: AccessStructure):
    best = None
    for V in S.gamma:
        for W in S.privacy:
            if W.dim < V.dim and W < V:
                d = V.dim - W.dim
                if best is None or d < best:
                    best = d
    return best


def is_k_threshold(S: AccessStructure, k: int) -> bool:
    return all((V in S.gamma) == (V.dim >= k) for V in S.subspaces())


def threshold(S: AccessStructure):
    """k such that gamma is exactly the spaces of dimension >= k, else ``None``."""
    if not S.gamma:
        return None
    k = min(V.dim for V in S.gamma)
    if all((V in S.gamma) == (V.dim >= k) for V in S.subspaces()):
        return k
    return None


def predicates(S: AccessStructure) -> Predicates:
    return Predicates(
        is_perfect=is_perfect(S),
        is_degenerate=is_degenerate(S),
        is_connected=is_connected(S),
        min_gap=min_gap(S),
        threshold=threshold(S),
    )


def information_ratio(spec: Port) -> Fraction:
    M = spec.M
    lines = one_dim_subspaces(spec.P)
    if not lines:
        return Fraction(0)
    return Fraction(max(M.rank_num(p) for p in lines), M.rank_num(spec.P0))


def is_ideal(spec: Port) -> bool:
    M = spec.M
    s = M.rank_num(spec.P0)
    return all(M.rank_num(p) == s for p in one_dim_subspaces(spec.P))


# --------------------------------------------------------------------------
# duals and minors of structures
# --------------------------------------------------------------------------

def dual_structure(S: AccessStructure, form: BilinearForm | None = None) -> AccessStructure:
    """S* = (privacy*, gamma*) with H* = {V : V^perp in H}."""
    L = S.subspaces()
    perp = {V: orthocomplement(V, form) for V in L}
    gamma_star = {V for V in L if perp[V] in S.gamma}
    privacy_star = {V for V in L if perp[V] in S.privacy}
    return AccessStructure(
        S.field, S.dim, privacy_star, gamma_star, frame=S.frame, world_dim=S.world_dim,
        provenance={"kind": "dual", "of": S.provenance.get("kind")},
    )


def restrict_structure(S: AccessStructure, Z: Subspace) -> AccessStructure:
    """S|_Z in the coordinates of Z's RREF basis."""
    if Z.n != S.dim:
        raise InputError("restriction space does not live in the structure's ambient space")
    gamma = {coordinates(V, Z.basis) for V in S.gamma if V <= Z}
    privacy = {coordinates(V, Z.basis) for V in S.privacy if V <= Z}
    frame = Z.basis if S.frame is None else matmul(Z.basis, S.frame, S.field)
    world = S.dim if S.frame is None else S.world_dim
    return AccessStructure(
        S.field, Z.dim, gamma, privacy, frame=frame, world_dim=world,
        provenance={"kind": "restriction", "Z": Z},
    )


def contract_structure(S: AccessStructure, Z: Subspace) -> AccessStructure:
    """S/Z on the quotient coordinates of Z."""
    if Z.n != S.dim:
        raise InputError("contraction space does not live in the structure's ambient space")
    ctx = quotient(Z)
    gamma, privacy = set(), set()
    for U in lattice(S.field, ctx.dim):
        V = lift(ctx, U)
        if V in S.gamma:
            gamma.add(U)
        elif V in S.privacy:
            privacy.add(U)
    return AccessStructure(
        S.field, ctx.dim, gamma, privacy,
        provenance={"kind": "contraction", "Z": Z},
    )


# --------------------------------------------------------------------------
# theorem checks
# --------------------------------------------------------------------------

@dataclass
class CheckReport:
    name: str
    passed: bool
    details: dict = dc_field(default_factory=dict)
    counterexample: object = None

    @property
    def ok(self) -> bool:
        return self.passed


def _map_check(name, source: AccessStructure, target: AccessStructure, fn, details):
    """Is ``fn`` an order isomorphism L(source) -> L(target) carrying both parts?"""
    L = source.subspaces()
    images = {V: fn(V) for V in L}
    if len(set(images.values())) != len(L) or len(target.subspaces()) != len(L):
        return CheckReport(name, False, details, {"reason": "map is not a bijection"})
    for V in L:
        for W in L:
            if (V <= W) != (images[V] <= images[W]):
                return CheckReport(name, False, details, {"reason": "not monotone", "pair": (V, W)})
    mapped_gamma = {images[V] for V in source.gamma}
    mapped_privacy = {images[V] for V in source.privacy}
    if mapped_gamma != set(target.gamma):
        diff = mapped_gamma ^ set(target.gamma)
        return CheckReport(name, False, details, {"reason": "gamma parts differ", "spaces": sorted(diff, key=Subspace.sort_key)})
    if mapped_privacy != set(target.privacy):
        diff = mapped_privacy ^ set(target.privacy)
        return CheckReport(name, False, details, {"reason": "privacy parts differ", "spaces": sorted(diff, key=Subspace.sort_key)})
    return CheckReport(name, True, details)


def splitting_form(Z: Subspace, form: BilinearForm | None = None) -> BilinearForm:
    """``form`` if Z and its complement split the space under it, else an adapted form."""
    F, n = Z.field, Z.n
    form = form or BilinearForm.standard(F, n)
    if (Z & orthocomplement(Z, form)).dim == 0:
        return form
    return adapted_form(Z)


def quotient_form(Z: Subspace, form: BilinearForm) -> BilinearForm:
    """The form on E/Z transported from Z^perp through the projection."""
    F = Z.field
    ctx = quotient(Z)
    Zp = orthocomplement(Z, form)
    T = [ctx.project_vector(w) for w in Zp.basis]
    Phi = matmul(inverse(T, F), Zp.basis, F)
    G = matmul(matmul(Phi, form.gram, F), transpose(Phi), F)
    return BilinearForm(F, G)


def restricted_form(Z: Subspace, form: BilinearForm) -> BilinearForm:
    F = Z.field
    G = matmul(matmul(Z.basis, form.gram, F), transpose(Z.basis), F)
    return BilinearForm(F, G)


def check_minor_duality(S: AccessStructure, Z: Subspace, form: BilinearForm | None = None) -> CheckReport:
    """(S/Z)* ~ S*|_{Z^perp} via V -> pi^{-1}(V^perp)^perp, and (S|_{Z^perp})* ~ S*/Z via projection."""
    form = splitting_form(Z, form)
    ctx = quotient(Z)
    Zp = orthocomplement(Z, form)
    details = {"Z": Z, "Z_perp": Zp, "form": form.gram}
    qform = quotient_form(Z, form)

    lhs = dual_structure(contract_structure(S, Z), qform)
    rhs = restrict_structure(dual_structure(S, form), Zp)

    def sigma(V):
        return coordinates(orthocomplement(lift(ctx, orthocomplement(V, qform)), form), Zp.basis)

    first = _map_check("minor-duality/contraction", lhs, rhs, sigma, details)
    if not first.passed:
        return first

    lhs2 = dual_structure(restrict_structure(S, Zp), restricted_form(Zp, form))
    rhs2 = contract_structure(dual_structure(S, form), Z)

    def proj(W):
        return project(ctx, embed(W, Zp.basis, S.dim))

    second = _map_check("minor-duality/restriction", lhs2, rhs2, proj, details)
    if not second.passed:
        return second
    return CheckReport("minor-duality", True, details)


def check_port_minor_identities(spec: Port, Z: Subspace, contraction: bool = True) -> CheckReport:
    """Restriction and contraction of a port agree with the port of the minor."""
    M, P0, P = spec.M, spec.P0, spec.P
    if not Z <= P:
        raise InputError("Z must lie inside P")
    S = port(spec)
    Zc = coordinates(Z, P.basis)
    details = {"Z": Z, "Z_in_gamma": Zc in S.gamma}
    if contraction and Zc in S.gamma:
        raise InputError("contraction identity requires Z outside the reconstructing structure")

    lhs = restrict_structure(S, Zc)
    W = P0 + Z
    MW = M.restrict(W)
    rhs = port(Port(MW, coordinates(P0, W.basis), coordinates(Z, W.basis)))
    if lhs.world_sets() != rhs.world_sets():
        return CheckReport("port-minors/restriction", False, details, {"Z": Z, "branch": "restriction"})
    details["restriction"] = True

    if contraction:
        lctx = quotient(Zc)
        lhs = contract_structure(S, Zc)

        def lhs_world(U):
            return S.to_world(lift(lctx, U))

        ectx = quotient(Z)
        MZ = M.contract(Z)
        Pbar = project(ectx, P)
        rspec = Port(MZ, project(ectx, P0), Pbar)
        rhs = port(rspec)

        def rhs_world(U):
            return lift(ectx, embed(U, Pbar.basis, ectx.dim))

        gamma_ok = {lhs_world(U) for U in lhs.gamma} == {rhs_world(U) for U in rhs.gamma}
        privacy_ok = {lhs_world(U) for U in lhs.privacy} == {rhs_world(U) for U in rhs.privacy}
        details["Z_in_privacy"] = Zc in S.privacy
        details["contraction_gamma"] = gamma_ok
        details["contraction_privacy"] = privacy_ok
        if not (gamma_ok and privacy_ok):
            cex = {"Z": Z, "branch": "contraction", "gamma_part": gamma_ok, "privacy_part": privacy_ok}
            return CheckReport("port-minors/contraction", False, details, cex)
        details["contraction"] = True
    return CheckReport("port-minors", True, details)


def check_dual_port(spec: Port, form: BilinearForm | None = None) -> CheckReport:
    """S_{P0,P}(M)* ~ S_{P^perp, P0^perp}(M*) via V -> (V^perp_P)^perp cap P0^perp."""
    M, P0, P = spec.M, spec.P0, spec.P
    S = port(spec)
    if is_degenerate(S):
        raise InputError("dual-port identity needs a non-degenerate port")
    if M.rank_num(P0) != M.denom * P0.dim:
        raise InputError("dual-port identity needs rho(P0) = dim P0")
    form = form or BilinearForm.standard(M.field, M.n)
    Mstar = M.dual(form)
    P0p = orthocomplement(P0, form)
    dspec = Port(Mstar, orthocomplement(P, form), P0p)
    rhs = port(dspec)
    lhs = dual_structure(S)

    def tau(U):
        V = embed(orthocomplement(U), P.basis, M.n)
        return coordinates(orthocomplement(V, form) & P0p, P0p.basis)

    report = _map_check("dual-port", lhs, rhs, tau, {"P_perp": dspec.P0, "P0_perp": P0p})
    return report


def check_qmatroid_port_characterization(spec: Port) -> CheckReport:
    """Gamma_min of a q-matroid port equals the basis/independence description."""
    M, P0, P = spec.M, spec.P0, spec.P
    if not M.is_q_matroid():
        raise InputError("characterization needs a q-matroid")
    if P0.dim != 1:
        raise InputError("characterization needs dim P0 = 1")
    S = port(spec)
    gm = set(gamma_min(S))
    n = M.n

    def indep(V):
        return M.is_independent(V)

    char = set()
    for U in S.subspaces():
        V = embed(U, P.basis, n)
        basis_of_restriction = indep(V) and M.rank_num(V) == M.rank_num(V + P0)
        if not basis_of_restriction:
            continue
        if all(indep(embed(W, P.basis, n) + P0) for W in S.subspaces() if W < U):
            char.add(U)
    circuits = set(M.circuits())
    circuit_spaces = {U for U in S.subspaces() if embed(U, P.basis, n) + P0 in circuits}
    non_circuit = sorted((U for U in gm if embed(U, P.basis, n) + P0 not in circuits), key=Subspace.sort_key)
    details = {
        "perfect": is_perfect(S),
        "gamma_min": sorted(gm, key=Subspace.sort_key),
        "characterization": sorted(char, key=Subspace.sort_key),
        "circuit_members_in_gamma_min": circuit_spaces <= gm,
        "gamma_min_not_from_circuits": [S.to_world(U) for U in non_circuit],
    }
    passed = details["perfect"] and char == gm and details["circuit_members_in_gamma_min"]
    cex = None if passed else {"symmetric_difference": sorted(char ^ gm, key=Subspace.sort_key)}
    return CheckReport("qmatroid-port", passed, details, cex)


def check_gap_bound(spec: Port) -> CheckReport:
    S = port(spec)
    if is_degenerate(S):
        raise InputError("gap bound needs a non-degenerate port")
    g = min_gap(S)
    if g is None:
        raise InputError("no comparable reconstructing/privacy pair; gap undefined")
    sigma = information_ratio(spec)
    passed = sigma * g >= 1
    return CheckReport("gap-bound", passed, {"sigma": sigma, "gap": g}, None if passed else {"sigma": sigma, "gap": g})


def check_brickell_davenport(spec: Port) -> CheckReport:
    """Integral M|_P whenever the port is ideal, perfect, connected with rho(P0) = dim P0 = 1."""
    M = spec.M
    S = port(spec)
    hyp = {
        "ideal": is_ideal(spec),
        "perfect": is_perfect(S),
        "connected": is_connected(S),
        "secret_is_unit_line": spec.P0.dim == 1 and M.rank_num(spec.P0) == M.denom,
    }
    details = {"hypotheses": hyp, "hypotheses_met": all(hyp.values())}
    if not all(hyp.values()):
        details["note"] = "hypotheses not met"
        return CheckReport("brickell-davenport", True, details)
    integral = M.restrict(spec.P).is_q_matroid()
    details["restriction_integral"] = integral
    return CheckReport("brickell-davenport", integral, details, None if integral else {"P": spec.P})


def check_port_monotone(spec: Port) -> CheckReport:
    """Gamma upward closed, privacy downward closed, disjoint."""
    gamma, privacy = _port_sets(spec)
    raw = SimpleNamespace(field=spec.M.field, dim=spec.P.dim, gamma=gamma, privacy=privacy)
    problems = structure_problems(raw)
    return CheckReport(
        "port-monotone", not problems,
        {"gamma": len(gamma), "privacy": len(privacy)},
        {"problems": problems} if problems else None,
    )


def check_uniform_threshold(n: int, k: int, F: FieldCtx, P0: Subspace | None = None) -> CheckReport:
    """The port of U_{n,k} is k-threshold, and degenerate when dim P < k."""
    from .polymatroid import uniform

    if k < 1:
        raise InputError("uniform threshold needs k >= 1 so that rho(P0) > 0")
    M = uniform(n, k, F)
    if P0 is None:
        P0 = Subspace(F, n, (tuple(1 if j == 0 else 0 for j in range(n)),))
    P = orthocomplement(P0)
    if (P & P0).dim:
        P = Subspace(F, n, tuple(tuple(1 if j == i else 0 for j in range(n)) for i in range(n) if i not in P0.pivots))
    S = port(Port(M, P0, P))
    details = {"n": n, "k": k, "dim_P": P.dim, "threshold": is_k_threshold(S, k), "degenerate": is_degenerate(S)}
    passed = details["threshold"] and (P.dim >= k or details["degenerate"])
    return CheckReport("uniform-threshold", passed, details, None if passed else {"n": n, "k": k, "P0": P0})
