"""Well-posedness and qualitative verdicts for a network system.

Every verdict is ``yes``, ``no`` or ``undetermined``. The criteria are
sufficient conditions, so ``undetermined`` only means that none of them could
be verified. The decision paths are named as follows.

group / semigroup paths
    ``isotropic+basis``                 Y_v null and the padded Y_v^perp form a basis
    ``isotropic+adjoint-isotropic``     Y_v and T_v^{-1} Y_v^perp both null
    ``nonpositive+basis``               Y_v nonpositive and the basis condition
    ``nonpositive+adjoint-nonnegative`` Y_v nonpositive, T_v^{-1} Y_v^perp nonnegative
    ``global-basis``                    global Y, dim Y^perp = k and Y ∩ K = {0}
    ``global-endpoint-fallback``        global Y, dim Y^perp = k = dim Pi_l Y^perp
    ``global-adjoint-*``                adjoint tests on the global layout
    ``dimension-count``                 sum of dim Y_v differs from k (rejection)
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import boundary as bd
from . import forms
from ._linalg import orth, real_span_rank
from .coefficients import AssumptionReport, check_assumptions, sample_points
from .system import NetworkSystem

YES, NO, UND = "yes", "no", "undetermined"
FLAGS = ("group", "unitary_group", "quasi_contractive_semigroup",
         "contractive_semigroup", "real", "positive")


class AssumptionsNotVerified(RuntimeError):
    def __init__(self, report: AssumptionReport):
        self.report = report
        super().__init__("coefficient assumptions fail: " + "; ".join(report.describe_failures()))


@dataclass
class Verdict:
    value: str
    reason: str
    path: str | None = None
    evidence: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"value": self.value, "path": self.path, "reason": self.reason,
                "evidence": _jsonable(self.evidence)}


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if np.isfinite(x) else str(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


@dataclass
class WellPosednessReport:
    system: str
    boundary_kind: str
    group: Verdict
    unitary_group: Verdict
    quasi_contractive_semigroup: Verdict
    contractive_semigroup: Verdict
    real: Verdict
    positive: Verdict
    omega: float
    omega_parts: dict
    assumptions: dict
    boundary: dict
    notes: list = field(default_factory=list)

    def flags(self) -> dict:
        return {f: getattr(self, f).value for f in FLAGS}

    def check_invariants(self) -> None:
        if self.unitary_group.value == YES:
            assert self.group.value == YES, "unitary without group"
        if self.contractive_semigroup.value == YES:
            assert self.quasi_contractive_semigroup.value == YES, "contractive without semigroup"
        if self.group.value == YES:
            assert self.quasi_contractive_semigroup.value == YES
        for f in FLAGS:
            v = getattr(self, f)
            if v.value in (YES, NO):
                assert v.reason, f"{f} lacks evidence"

    def to_dict(self) -> dict:
        return {
            "system": self.system,
            "boundary_kind": self.boundary_kind,
            "verdicts": {f: getattr(self, f).to_dict() for f in FLAGS},
            "omega": _jsonable(self.omega),
            "omega_parts": _jsonable(self.omega_parts),
            "assumptions": _jsonable(self.assumptions),
            "boundary": _jsonable(self.boundary),
            "notes": list(self.notes),
        }

    def render(self, explain: bool = False) -> str:
        lines = [f"system: {self.system} ({self.boundary_kind} boundary conditions)"]
        for f in FLAGS:
            v = getattr(self, f)
            if v.value == YES:
                tag = f" ({v.path} path)" if v.path else ""
            else:
                tag = f" ({v.reason})" if v.reason and not explain else ""
            lines.append(f"{f}: {v.value}{tag}")
            if explain:
                lines.append(f"    reason: {v.reason}")
                for key, val in _jsonable(v.evidence).items():
                    lines.append(f"    {key}: {val}")
        lines.append(f"omega: {self.omega:.6g}")
        if explain:
            lines.append(f"    (QM)' part: {self.omega_parts['dQM']:.6g}, N part: {self.omega_parts['N']:.6g}")
            lines.append(f"    uniform Q bound q: {self.assumptions['q']:.6g}")
        for n in self.notes:
            lines.append(f"note: {n}")
        return "\n".join(lines)


# pointwise coefficient data --------------------------------------------------

def _samples(system: NetworkSystem):
    tol = system.tolerances
    for e in system.graph.edges:
        c = system.coefficients[e.id]
        x = sample_points(e.length, tol.n_samples)
        Q, M, N = c.Q(x), c.M(x), c.N(x)
        dQM = c.dQM(x)
        QN = Q @ N
        yield e, x, Q, M, N, QN, dQM


def _adj(A):
    return np.conj(np.swapaxes(A, -1, -2))


def _norms(A):
    return np.linalg.norm(A, ord=2, axis=(-2, -1))


def _dissipation_data(system):
    """Per edge: D(x) = QN + (QN)* - (QM)', plus scales and omega parts."""
    out = []
    for e, x, Q, M, N, QN, dQM in _samples(system):
        S = QN + _adj(QN)
        D = S - dQM
        scale = max(1.0, _norms(Q @ M).max(), _norms(QN).max(), _norms(dQM).max())
        out.append((e, x, D, S, dQM, scale))
    return out


def omega_bound(system) -> tuple[float, dict]:
    dq, nn = 0.0, 0.0
    for e, x, D, S, dQM, scale in _dissipation_data(system):
        dq = max(dq, _norms(dQM).max())
        nn = max(nn, _norms(S).max())
    return 0.5 * dq + 0.5 * nn, {"dQM": 0.5 * dq, "N": 0.5 * nn}


# boundary ladder --------------------------------------------------------------

def _cone_ev(c: forms.ConeClass) -> dict:
    return {"kind": c.kind, "lambda_min": c.lam_min, "lambda_max": c.lam_max}


def _local_ladder(system):
    tol = system.tolerances
    conds = bd.vertex_conditions(system)
    cones = {v: c.cone(tol) for v, c in conds.items()}
    adj = {v: forms.classify_subspace(c.T, c.adjoint_space(), tol) for v, c in conds.items()}
    dimres = bd.check_local_dimension_condition(system)
    all_null = all(c.is_null for c in cones.values())
    all_nonpos = all(c.is_nonpositive for c in cones.values())
    adj_null = all(c.is_null for c in adj.values())
    adj_nonneg = all(c.is_nonnegative for c in adj.values())
    ev = {
        "dimension_condition": dimres.to_dict(),
        "Y_cones": {v: _cone_ev(c) for v, c in cones.items()},
        "adjoint_cones": {v: _cone_ev(c) for v, c in adj.items()},
    }
    count_ok = dimres.sum_dim_Y == dimres.k
    return dict(all_null=all_null, all_nonpos=all_nonpos, adj_null=adj_null,
                adj_nonneg=adj_nonneg, basis=dimres.holds, basis_path="basis",
                count_ok=count_ok, count=(dimres.sum_dim_Y, dimres.k), ev=ev,
                group_basis=dimres.holds)


def _global_ladder(system):
    tol = system.tolerances
    gc = bd.global_condition(system)
    res = bd.check_global_conditions(system)
    cone = gc.cone(tol)
    adj = forms.classify_subspace(gc.T, gc.adjoint_space(), tol)
    k = system.graph.k
    Yp = gc.perp()
    dim_pi0 = int(np.linalg.matrix_rank(Yp[:k, :])) if Yp.shape[1] else 0
    fallback = res.infty_applicable and res.basis_global_infty
    # the backward problem swaps the roles of the two endpoint projections
    fallback_group = fallback and dim_pi0 == k
    ev = {"global_conditions": dict(res.to_dict(), dim_Pi_0_Y_perp=dim_pi0),
          "Y_cone": _cone_ev(cone), "adjoint_cone": _cone_ev(adj)}
    if res.basis_global:
        basis, group_basis, path = True, True, "global-basis"
    elif fallback:
        basis, group_basis, path = True, fallback_group, "global-endpoint-fallback"
    else:
        basis, group_basis, path = False, False, "global-basis"
    return dict(all_null=cone.is_null, all_nonpos=cone.is_nonpositive, adj_null=adj.is_null,
                adj_nonneg=adj.is_nonnegative, basis=basis, basis_path=path,
                group_basis=group_basis, count_ok=(gc.dim == k), count=(gc.dim, k), ev=ev)


def _generation(system):
    L = _local_ladder(system) if system.is_local else _global_ladder(system)
    pre = "" if system.is_local else "global-"
    ev = L["ev"]
    bname = L["basis_path"] if not system.is_local else "basis"
    if L["all_null"] and L["group_basis"]:
        p = f"isotropic+{bname}" if system.is_local else bname
        group = Verdict(YES, "boundary spaces are totally isotropic and the dimension condition holds", p, ev)
    elif L["all_null"] and L["adj_null"]:
        group = Verdict(YES, "boundary spaces and their adjoint spaces are totally isotropic",
                        f"{pre}isotropic+adjoint-isotropic", ev)
    elif not L["count_ok"]:
        s, k = L["count"]
        group = Verdict(NO, f"dimension count: sum of dim Y = {s} != k = {k}", "dimension-count", ev)
    else:
        why = "boundary spaces are not totally isotropic" if not L["all_null"] else \
            "neither the dimension condition nor the adjoint isotropy test holds"
        group = Verdict(UND, why, None, ev)

    if group.value == YES:
        semi = Verdict(YES, "implied by group generation", group.path, ev)
    elif L["all_nonpos"] and L["basis"]:
        p = f"nonpositive+{bname}" if system.is_local else f"nonpositive+{L['basis_path']}"
        semi = Verdict(YES, "boundary spaces are nonpositive and the dimension condition holds", p, ev)
    elif L["all_nonpos"] and L["adj_nonneg"]:
        semi = Verdict(YES, "boundary spaces nonpositive, adjoint spaces nonnegative",
                       f"{pre}nonpositive+adjoint-nonnegative", ev)
    elif not L["count_ok"]:
        s, k = L["count"]
        semi = Verdict(NO, f"dimension count: sum of dim Y = {s} != k = {k}", "dimension-count", ev)
    else:
        why = "boundary spaces are not in the nonpositive cone" if not L["all_nonpos"] else \
            "neither the dimension condition nor the adjoint nonnegativity test holds"
        semi = Verdict(UND, why, None, ev)
    return group, semi


# pointwise verdicts --------------------------------------------------------------

def check_unitary(system, group: Verdict | None = None) -> Verdict:
    tol = system.tolerances
    worst, where = 0.0, None
    for e, x, D, S, dQM, scale in _dissipation_data(system):
        r = _norms(D) / scale
        i = int(np.argmax(r))
        if r[i] >= worst:
            worst, where = float(r[i]), (e.id, float(x[i]))
    ev = {"max_relative_residual": worst, "witness_edge": where[0], "witness_x": where[1],
          "tol": tol.coef_tol}
    cond = worst <= tol.coef_tol
    if group is None:
        group, _ = _generation(system)
    if not cond:
        return Verdict(NO, "QN + (QN)* != (QM)' somewhere on the network", "energy-identity", ev)
    if group.value == YES:
        return Verdict(YES, "group generator and QN + (QN)* = (QM)' at every sample", "energy-identity", ev)
    if group.value == NO:
        return Verdict(NO, "no group generator: " + group.reason, group.path, ev)
    return Verdict(UND, "energy identity holds but group generation is not established", None, ev)


def check_contractive(system, semigroup: Verdict | None = None) -> Verdict:
    tol = system.tolerances
    worst, where = -np.inf, None
    for e, x, D, S, dQM, scale in _dissipation_data(system):
        lam = np.linalg.eigvalsh(0.5 * (D + _adj(D)))[:, -1] / scale
        i = int(np.argmax(lam))
        if lam[i] >= worst:
            worst, where = float(lam[i]), (e.id, float(x[i]))
    ev = {"max_relative_lambda": worst, "witness_edge": where[0], "witness_x": where[1],
          "tol": tol.coef_tol}
    if semigroup is None:
        _, semigroup = _generation(system)
    if semigroup.value != YES:
        val = NO if semigroup.value == NO else UND
        return Verdict(val, "no semigroup generator established: " + semigroup.reason, None, ev)
    if worst <= tol.coef_tol:
        return Verdict(YES, "QN + (QN)* - (QM)' is negative semidefinite at every sample",
                       "dissipation-matrix", ev)
    return Verdict(NO, "QN + (QN)* - (QM)' has a positive eigenvalue", "dissipation-matrix", ev)


def _boundary_bases(system):
    if system.is_local:
        return {v: system.Y(v) for v in system.graph.vertices}
    return {"global": system.boundary.basis}


def _is_real_field(system, which: str) -> tuple[bool, dict]:
    tol = system.tolerances
    worst, where = 0.0, None
    for e, x, Q, M, N, QN, dQM in _samples(system):
        A = {"Q": Q, "M": M, "N": N}[which]
        scale = max(1.0, np.abs(A).max())
        r = np.abs(np.imag(A)).max() / scale
        if r >= worst:
            worst, where = float(r), e.id
    return worst <= tol.coef_tol, {"max_relative_imag": worst, "edge": where}


def check_real(system, semigroup: Verdict | None = None) -> Verdict:
    if semigroup is None:
        _, semigroup = _generation(system)
    q_real, qev = _is_real_field(system, "Q")
    ev = {"Q": qev}
    if not q_real:
        return Verdict(UND, "Q is not real-valued; the reality criterion does not apply", None, ev)
    if semigroup.value != YES:
        return Verdict(UND, "no semigroup generator established", None, ev)
    spans = {}
    ok = True
    for v, B in _boundary_bases(system).items():
        d = orth(B).shape[1]
        r = real_span_rank(B)
        spans[v] = {"dim": d, "real_span_rank": r}
        ok &= (r == d)
    ev["Y_real_spanning"] = spans
    m_real, mev = _is_real_field(system, "M")
    n_real, nev = _is_real_field(system, "N")
    ev["M"], ev["N"] = mev, nev
    if not system.is_local:
        ev["scope"] = "real-spanning test applied to the global space Y"
    if not ok:
        return Verdict(UND, "some boundary space has no real spanning set", None, ev)
    if m_real and n_real:
        return Verdict(YES, "real boundary spaces and real M, N, Q", "real-coefficients", ev)
    bad = "M" if not m_real else "N"
    return Verdict(NO, f"boundary spaces are real but {bad} is not real-valued", "real-coefficients", ev)


def _positive_part_closure(B, tol, rng) -> tuple[str, dict]:
    """'certified', 'sampled' or 'fails' for xi -> xi^+ preserving span(B)."""
    B = np.asarray(B)
    n = B.shape[0]
    R = orth(np.hstack([B.real, B.imag]), n) if B.shape[1] else np.zeros((n, 0))
    R = np.real(R)
    if R.shape[1] == 0:
        return "certified", {"dim": 0}
    cols = np.real(B) if not np.any(np.imag(B)) else None
    if cols is not None:
        t = 1e-12 * max(1.0, np.abs(cols).max())
        if all(np.all(c >= -t) or np.all(c <= t) for c in cols.T):
            return "certified", {"dim": R.shape[1], "method": "nonnegative spanning set"}
    P = R @ R.T
    worst = 0.0
    for trial in range(tol.positive_trials):
        c = rng.standard_normal(R.shape[1])
        xi = R @ c
        xp = np.maximum(xi, 0.0)
        res = np.linalg.norm(xp - P @ xp) / max(1.0, np.linalg.norm(xp))
        worst = max(worst, res)
        if res > tol.proj_tol:
            return "fails", {"dim": R.shape[1], "witness": xi.tolist(), "residual": float(res),
                             "trial": trial}
    return "sampled", {"dim": R.shape[1], "trials": tol.positive_trials, "max_residual": worst,
                       "method": "random combinations"}


def check_positive(system, real: Verdict | None = None, seed: int = 0) -> Verdict:
    tol = system.tolerances
    if real is None:
        real = check_real(system)
    if real.value == NO:
        return Verdict(NO, "not real, hence not positive", real.path, {})
    if real.value != YES:
        return Verdict(UND, "reality not established: " + real.reason, None, {})
    # Q diagonal with positive entries
    qdiag = True
    mdiag, mwhere = True, None
    nmin, nwhere = np.inf, None
    for e, x, Q, M, N, QN, dQM in _samples(system):
        k = Q.shape[-1]
        off = ~np.eye(k, dtype=bool)
        qs = max(1.0, np.abs(Q).max())
        if np.abs(Q[:, off]).max(initial=0.0) > tol.coef_tol * qs:
            qdiag = False
        ms = max(1.0, np.abs(M).max())
        mo = np.abs(M[:, off]).max(initial=0.0) / ms
        if mo > tol.coef_tol and mdiag:
            mdiag, mwhere = False, {"edge": e.id, "x": float(x[int(np.argmax(np.abs(M[:, off]).max(axis=1)))]),
                                    "relative_offdiag": float(mo)}
        if k > 1:
            ns = max(1.0, np.abs(N).max())
            vals = np.real(N[:, off]) / ns
            j = np.unravel_index(np.argmin(vals), vals.shape)
            if vals[j] < nmin:
                nmin, nwhere = float(vals[j]), {"edge": e.id, "x": float(x[j[0]])}
    ev = {"Q_diagonal": qdiag}
    if not qdiag:
        return Verdict(UND, "Q is not diagonal; the positivity criterion does not apply", None, ev)
    rng = np.random.default_rng(seed)
    closure = {}
    status = "certified"
    for v, B in _boundary_bases(system).items():
        st, info = _positive_part_closure(B, tol, rng)
        closure[v] = dict(info, status=st)
        if st == "fails":
            ev["closure"] = closure
            return Verdict(NO, f"boundary space at {v} is not closed under positive parts",
                           "positive-part-closure", ev)
        if st == "sampled":
            status = "sampled"
    ev["closure"] = closure
    ev["M_diagonal"] = mdiag if mdiag else mwhere
    ev["N_min_offdiag"] = {"value": nmin if np.isfinite(nmin) else 0.0, "where": nwhere}
    if not mdiag:
        return Verdict(NO, "M is not diagonal", "diagonal-M", ev)
    if np.isfinite(nmin) and nmin < -tol.coef_tol:
        return Verdict(NO, "N has a negative off-diagonal entry", "offdiagonal-N", ev)
    reason = "positive-part closure, diagonal M and nonnegative off-diagonal N"
    if status == "sampled":
        reason += " (closure verified by sampling, not certified)"
    return Verdict(YES, reason, "positivity", ev)


# entry point -------------------------------------------------------------------

def classify(system: NetworkSystem, verify_assumptions: bool = True) -> WellPosednessReport:
    rep = check_assumptions(system)
    if verify_assumptions and not rep.ok:
        raise AssumptionsNotVerified(rep)
    group, semi = _generation(system)
    unitary = check_unitary(system, group)
    contractive = check_contractive(system, semi)
    real = check_real(system, semi)
    positive = check_positive(system, real)
    omega, parts = omega_bound(system)
    bev = {}
    if system.is_local:
        bev["sum_dim_Y"] = group.evidence.get("dimension_condition", {}).get("sum_dim_Y")
    notes = list(system.notes)
    if system.synthesized_Q:
        notes.append("symmetrizer synthesized for edges " + ", ".join(system.synthesized_Q))
    report = WellPosednessReport(
        system=system.name,
        boundary_kind="local" if system.is_local else "global",
        group=group, unitary_group=unitary, quasi_contractive_semigroup=semi,
        contractive_semigroup=contractive, real=real, positive=positive,
        omega=omega, omega_parts=parts,
        assumptions={"ok": rep.ok, "q": rep.q, "failures": rep.describe_failures()},
        boundary=bev, notes=notes,
    )
    report.check_invariants()
    return report
