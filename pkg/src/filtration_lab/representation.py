"""Representation solvers: nodewise least squares on the filtration tree.

Every martingale's one-step increment, restricted to a node (a time t and a
block of P_{t-1}), is a centered function of the node's children.  Solving a
representation problem therefore reduces to a weighted least-squares fit per
node; when the reference martingales span the centered child space the
residual is zero to float precision, so the residual doubles as a
certificate.  Degenerate nodes get the minimum-norm solution (singular-value
cutoff 1e-12), which puts 0 on zero-variance regressors.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import FiltrationMismatch, IndependenceViolated, NotMartingale
from .calculus import (
    compensator,
    dual_projection,
    is_martingale,
    quadratic_covariation,
    stochastic_integral,
)
from .enlargement import EnlargementBundle
from .finite_space import (
    AdaptedProcess,
    Filtration,
    StoppingTime,
    conditional_expectation,
    stop_process,
)
from .jump_measure import (
    MARKS,
    MarkedMeasure,
    PredictableFunction,
    fundamental_martingales,
    integrate,
)

#: relative singular-value cutoff for the nodewise least-squares solves
SV_CUTOFF = 1e-12


@dataclass(frozen=True)
class RepresentationSolution:
    """Integrands, reconstruction, and the residual certificate."""

    kind: str
    integrands: dict
    reconstruction: AdaptedProcess
    residual: AdaptedProcess
    residual_sup: float
    checks: dict = field(default_factory=dict)


def martingale_closure(xi, filtration: Filtration) -> AdaptedProcess:
    """The martingale Y_t = E[xi | P_t] closing a terminal variable."""
    xi = np.asarray(xi, dtype=float)
    n = filtration.space.n_atoms
    vals = np.empty((n, filtration.horizon + 1))
    for t in range(filtration.horizon + 1):
        vals[:, t] = conditional_expectation(filtration.space, xi, filtration.at(t))
    return AdaptedProcess(filtration, vals)


def _nodewise_solve(
    y: AdaptedProcess, regressor_deltas: Sequence[np.ndarray], filtration: Filtration
) -> list[np.ndarray]:
    """Weighted least squares of dY against regressor increments, per node.

    Returns one predictable integrand matrix per regressor; values are
    constant on each block of P_{t-1} and zero at time 0.
    """
    if not regressor_deltas:
        return []
    probs = filtration.space.probs
    dy = y.increments()
    n, width = y.values.shape
    ks = [np.zeros((n, width)) for _ in regressor_deltas]
    for t in range(1, filtration.horizon + 1):
        for atoms in filtration.at(t - 1).block_arrays:
            w = probs[atoms]
            if w.sum() <= 0.0:
                continue
            sw = np.sqrt(w)
            design = np.stack([d[atoms, t] for d in regressor_deltas], axis=1) * sw[:, None]
            target = dy[atoms, t] * sw
            coef, *_ = np.linalg.lstsq(design, target, rcond=SV_CUTOFF)
            for k, c in zip(ks, coef):
                k[atoms, t] = c
    return ks


def _finish(
    kind: str,
    integrands: dict,
    y: AdaptedProcess,
    reconstruction: AdaptedProcess,
    checks: dict | None = None,
) -> RepresentationSolution:
    residual = AdaptedProcess(y.filtration, y.values - reconstruction.values)
    return RepresentationSolution(
        kind=kind,
        integrands=integrands,
        reconstruction=reconstruction,
        residual=residual,
        residual_sup=residual.sup_abs(),
        checks=checks or {},
    )


def _require_martingale(m: AdaptedProcess, label: str) -> None:
    check = is_martingale(m)
    if not check:
        raise NotMartingale(f"{label} has nonzero drift at {check.witness}")


def solve_prp(
    y: AdaptedProcess, m: AdaptedProcess, filtration: Filtration | None = None
) -> RepresentationSolution:
    """Represent Y against a single reference martingale M.

    Exactly solvable when every node branches two ways (a single counting
    source); the residual is the certificate either way.
    """
    filtration = filtration or y.filtration
    _require_martingale(y, "target")
    _require_martingale(m, "reference martingale")
    (k,) = _nodewise_solve(y, [m.increments()], filtration)
    k_proc = AdaptedProcess(filtration, k)
    recon = AdaptedProcess(
        filtration, y.initial[:, None] + stochastic_integral(k_proc, m).values
    )
    return _finish("prp", {"K": k}, y, recon)


def solve_wrp(
    y: AdaptedProcess, mu: MarkedMeasure, nu: MarkedMeasure, filtration: Filtration | None = None
) -> RepresentationSolution:
    """Represent Y as an integral against the compensated jump measure."""
    filtration = filtration or mu.filtration
    if y.filtration.partitions != filtration.partitions:
        raise FiltrationMismatch("target is not carried by the measure's filtration")
    _require_martingale(y, "target")
    deltas = [
        mu.indicator_increments(mark) - nu.indicator_increments(mark) for mark in MARKS
    ]
    ks = _nodewise_solve(y, deltas, filtration)
    w = PredictableFunction(filtration, np.stack(ks))
    recon_vals = y.initial[:, None] + integrate(w, mu).values - integrate(w, nu).values
    recon = AdaptedProcess(filtration, recon_vals)
    integrands = {f"W{mark.value}": k for mark, k in zip(MARKS, ks)}
    return _finish("wrp", integrands, y, recon)


def solve_triple(
    y: AdaptedProcess,
    z1: AdaptedProcess,
    z2: AdaptedProcess,
    z3: AdaptedProcess,
    stop_at: StoppingTime | None = None,
) -> RepresentationSolution:
    """Represent Y against the three compensated jump-part martingales.

    With ``stop_at`` given, represents the stopped target against
    (Z1 stopped, Z2, Z3); past the stop every increment vanishes so the
    solve restricts itself to the pre-stop nodes.
    """
    filtration = y.filtration
    _require_martingale(y, "target")
    if stop_at is not None:
        target = stop_process(y, stop_at)
        regs = [stop_process(z1, stop_at), z2, z3]
        kind = "triple_stopped"
    else:
        target = y
        regs = [z1, z2, z3]
        kind = "triple"
    ks = _nodewise_solve(target, [r.increments() for r in regs], filtration)
    recon_vals = np.repeat(target.initial[:, None], target.horizon + 1, axis=1)
    for k, r in zip(ks, regs):
        recon_vals = recon_vals + stochastic_integral(AdaptedProcess(filtration, k), r).values
    recon = AdaptedProcess(filtration, recon_vals)
    integrands = {f"K{i + 1}": k for i, k in enumerate(ks)}
    return _finish(kind, integrands, target, recon)


def solve_in_basis(
    y: AdaptedProcess, martingales: Sequence[AdaptedProcess], kind: str = "basis"
) -> RepresentationSolution:
    """Represent Y against an arbitrary martingale family."""
    filtration = y.filtration
    _require_martingale(y, "target")
    ks = _nodewise_solve(y, [m.increments() for m in martingales], filtration)
    recon_vals = np.repeat(y.initial[:, None], y.horizon + 1, axis=1)
    for k, m in zip(ks, martingales):
        recon_vals = recon_vals + stochastic_integral(AdaptedProcess(filtration, k), m).values
    recon = AdaptedProcess(filtration, recon_vals)
    integrands = {f"K{i + 1}": k for i, k in enumerate(ks)}
    return _finish(kind, integrands, y, recon)


def verify_independence(bundle: EnlargementBundle, tol: float = 1e-9) -> None:
    """Product rule for every pair of blocks of the two filtrations, all times."""
    probs = bundle.space.probs
    for t in range(bundle.f.horizon + 1):
        for bf in bundle.f.at(t).block_arrays:
            pf = float(probs[bf].sum())
            for bh in bundle.h_filtration.at(t).block_arrays:
                ph = float(probs[bh].sum())
                joint = float(probs[np.intersect1d(bf, bh)].sum())
                if abs(joint - pf * ph) > tol:
                    raise IndependenceViolated(
                        f"product rule fails at t={t}: P(joint)={joint!r} vs "
                        f"P(F-block)*P(H-block)={pf * ph!r}"
                    )


def independent_decomposition(
    y: AdaptedProcess, bundle: EnlargementBundle, tol: float = 1e-9
) -> RepresentationSolution:
    """Orthogonal representation against (compensated X, compensated H, their bracket).

    Requires the two component filtrations to be independent (verified by the
    product rule).  The checks record the orthogonality of the basis, the
    change-of-basis identities against the three compensated jump parts, the
    bracket-compensator factorisation, and the Pythagoras identity of the
    squared terminal norms.
    """
    verify_independence(bundle, tol)
    _require_martingale(y, "target")
    filtration = bundle.g
    if y.filtration.partitions != filtration.partitions:
        raise FiltrationMismatch("target is not carried by the enlarged filtration")

    x_pair = compensator(bundle.X)
    h_pair = compensator(bundle.H)
    xbar = x_pair.martingale_part
    hbar = h_pair.martingale_part
    cross = quadratic_covariation(xbar, hbar)
    _require_martingale(cross, "bracket of the compensated pair")

    basis = [xbar, hbar, cross]
    ks = _nodewise_solve(y, [b.increments() for b in basis], filtration)
    recon_vals = np.repeat(y.initial[:, None], y.horizon + 1, axis=1)
    parts = []
    for k, b in zip(ks, basis):
        part = stochastic_integral(AdaptedProcess(filtration, k), b)
        parts.append(part)
        recon_vals = recon_vals + part.values
    recon = AdaptedProcess(filtration, recon_vals)

    pos = bundle.space.positive

    def sup(v: np.ndarray) -> float:
        return float(np.abs(v[pos]).max()) if pos.any() else 0.0

    # pairwise predictable covariations of the basis
    orth_gap = 0.0
    for i in range(3):
        for j in range(i + 1, 3):
            bracket = quadratic_covariation(basis[i], basis[j])
            orth_gap = max(orth_gap, sup(dual_projection(bracket, filtration).values))

    # change of basis: each compensated jump part against the orthogonal
    # basis; the joint part picks up both predictable densities, the single
    # parts are the compensated processes minus the joint part
    z1, z2, z3 = fundamental_martingales(bundle.X, bundle.H)
    dxp = AdaptedProcess(filtration, x_pair.compensator.increments())
    dhp = AdaptedProcess(filtration, h_pair.compensator.increments())
    z3_rhs = cross.values + stochastic_integral(dxp, hbar).values + stochastic_integral(dhp, xbar).values
    z1_rhs = xbar.values - z3_rhs
    z2_rhs = hbar.values - z3_rhs
    basis_identity_gap = max(
        sup(z1.values - z1_rhs), sup(z2.values - z2_rhs), sup(z3.values - z3_rhs)
    )

    # bracket compensator factorisation: [X,H]^p = [X^p, H^p]
    bracket_xh = quadratic_covariation(bundle.X, bundle.H)
    factor_gap = sup(
        dual_projection(bracket_xh, filtration).values
        - quadratic_covariation(x_pair.compensator, h_pair.compensator).values
    )

    # Pythagoras: squared terminal norm splits across the orthogonal parts
    probs = bundle.space.probs
    total = float(probs @ (y.terminal - y.initial) ** 2)
    split = sum(float(probs @ p.terminal**2) for p in parts)
    pythagoras_gap = abs(total - split)

    checks = {
        "basis_orthogonality_gap": orth_gap,
        "basis_identity_gap": basis_identity_gap,
        "bracket_factorisation_gap": factor_gap,
        "pythagoras_gap": pythagoras_gap,
    }
    integrands = {f"K{i + 1}": k for i, k in enumerate(ks)}
    residual = AdaptedProcess(filtration, y.values - recon.values)
    return RepresentationSolution(
        kind="independent",
        integrands=integrands,
        reconstruction=recon,
        residual=residual,
        residual_sup=residual.sup_abs(),
        checks=checks,
    )


def _positive_children(filtration: Filtration, t: int, atoms: np.ndarray):
    """Positive-probability child blocks of one node, as atom arrays."""
    child_of = filtration.at(t).block_of
    probs = filtration.space.probs
    children = {}
    for a in atoms:
        children.setdefault(int(child_of[a]), []).append(int(a))
    out = []
    for _, members in sorted(children.items()):
        arr = np.array(members, dtype=np.int64)
        if float(probs[arr].sum()) > 0.0:
            out.append(arr)
    return out


def multiplicity(filtration: Filtration) -> int:
    """Spanning number of the tree: max positive-probability branching minus one."""
    best = 0
    probs = filtration.space.probs
    for t in range(1, filtration.horizon + 1):
        for atoms in filtration.at(t - 1).block_arrays:
            if float(probs[atoms].sum()) <= 0.0:
                continue
            best = max(best, len(_positive_children(filtration, t, atoms)) - 1)
    return best


def orthogonal_spanning_martingales(filtration: Filtration) -> list[AdaptedProcess]:
    """Per-node Gram-Schmidt construction of a minimal orthogonal spanning family.

    At each node the centered indicators of all but one child are
    orthonormalised under the conditional inner product; martingale i picks
    up the i-th basis vector (or 0 when the node branches less).  The family
    has size ``multiplicity(filtration)``, is pairwise orthogonal, and spans
    every martingale nodewise.
    """
    m = multiplicity(filtration)
    probs = filtration.space.probs
    n = filtration.space.n_atoms
    width = filtration.horizon + 1
    incs = [np.zeros((n, width)) for _ in range(m)]
    for t in range(1, width):
        for atoms in filtration.at(t - 1).block_arrays:
            mass = float(probs[atoms].sum())
            if mass <= 0.0:
                continue
            children = _positive_children(filtration, t, atoms)
            k = len(children)
            if k <= 1:
                continue
            weights = np.array([float(probs[c].sum()) / mass for c in children])
            vectors = []
            for j in range(k - 1):
                v = np.full(k, -weights[j])  # centered indicator of child j
                v[j] += 1.0
                for e in vectors:
                    v = v - float((weights * v) @ e) * e
                norm = float(np.sqrt((weights * v) @ v))
                if norm > SV_CUTOFF:
                    vectors.append(v / norm)
            for i, e in enumerate(vectors):
                for c, child in enumerate(children):
                    incs[i][child, t] = e[c]
    return [AdaptedProcess(filtration, np.cumsum(inc, axis=1)) for inc in incs]
