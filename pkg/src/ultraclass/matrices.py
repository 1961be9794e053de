"""Weight matrices: finite, pointwise totally ordered families of sequences.

The existential quantifiers of the semiregularity conditions and of the
matrix relations are answered by certificates over the finite sample: for
each quantified entry the report names the partner that worked.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .config import RunConfig, resolve
from .relations import compare
from .seqcore import WeightSequence, _constant_bearing, check_condition
from .verdict import _RANK, Status, Verdict, weakest

MODES = ("R", "B")
MATRIX_RELATIONS = ("roumieu-preceq", "beurling-preceq", "lhd-mixed")


@dataclass(frozen=True)
class WeightMatrix:
    """Entries ``(lam, M)`` with a common truncation order."""

    entries: tuple

    def __post_init__(self):
        entries = tuple((float(lam), M) for lam, M in self.entries)
        if not entries:
            raise ValueError("a weight matrix needs at least one entry")
        for _, M in entries:
            if not isinstance(M, WeightSequence):
                raise TypeError("matrix entries must be WeightSequence instances")
        Ks = {M.K for _, M in entries}
        if len(Ks) > 1:
            raise ValueError(f"mixed truncation lengths in weight matrix: {sorted(Ks)}")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def of(cls, *sequences, lambdas=None) -> "WeightMatrix":
        lambdas = range(len(sequences)) if lambdas is None else lambdas
        return cls(tuple(zip(lambdas, sequences)))

    @property
    def K(self) -> int:
        return self.entries[0][1].K

    @property
    def lambdas(self) -> list[float]:
        return [lam for lam, _ in self.entries]

    @property
    def sequences(self) -> list[WeightSequence]:
        return [M for _, M in self.entries]

    def __len__(self) -> int:
        return len(self.entries)


def total_order(W: WeightMatrix, config: RunConfig | None = None) -> Verdict:
    """Pairwise pointwise comparability on the window (exact)."""
    tol = resolve(config).tol
    for (i, (la, A)), (j, (lb, B)) in itertools.combinations(enumerate(W.entries), 2):
        diff = A.logM - B.logM
        if np.any(diff > tol) and np.any(diff < -tol):
            ka, kb = int(np.argmax(diff)), int(np.argmin(diff))
            return Verdict("matrix total order", Status.FAILS,
                           {"k": ka, "lhs": float(A.logM[ka]), "rhs": float(B.logM[ka]),
                            "k_other": kb, "pair": [la, lb],
                            "meaning": "the two entries cross: each exceeds the other somewhere"})
    return Verdict("matrix total order", Status.HOLDS, None, {"entries": len(W)})


def deriv_closed_pair(M: WeightSequence, N: WeightSequence, step: int = 1,
                      config: RunConfig | None = None) -> Verdict:
    """Evidence for ``M_{k+step} <= q**(k+1) N_k`` with the minimal empirical ``q``.

    For ``N = M`` and ``step = 1`` this is exactly the (M2prime) check.
    """
    cfg = resolve(config)
    if step < 1:
        raise ValueError("step must be >= 1")
    K = min(M.K, N.K)
    k = np.arange(K + 1 - step, dtype=float)
    req = (M.logM[step:K + 1] - N.logM[: K + 1 - step]) / (k + 1)
    name = "M2prime" if (N is M and step == 1) else f"derivation-closed(step={step})"
    return _constant_bearing(name, req, cfg)


def _rank_key(v: Verdict):
    return (-_RANK[v.status], v.diagnostics["log_gamma_hat"])


def best_partner(W: WeightMatrix, index: int, mode: str, step: int = 1,
                 config: RunConfig | None = None) -> dict:
    """Minimal-``q̂`` partner for entry ``index`` (R: as M, B: as N)."""
    target = W.sequences[index]
    scored = []
    for j, cand in enumerate(W.sequences):
        v = (deriv_closed_pair(target, cand, step, config) if mode == "R"
             else deriv_closed_pair(cand, target, step, config))
        scored.append((_rank_key(v), j, v))
    scored.sort(key=lambda t: (t[0], t[1]))
    _, j, v = scored[0]
    return {"entry": W.lambdas[index], "partner": W.lambdas[j], "q_hat": v.diagnostics["gamma_hat"],
            "verdict": v}


def iterated_partner(W: WeightMatrix, index: int, mode: str, d: int,
                     config: RunConfig | None = None) -> dict:
    """Chain ``d`` one-step partners and report the composed constant.

    R: ``M = N_0 -> N_1 -> ... -> N_d`` and the check ``M_{k+d} <= q^{k+1} N_d,k``;
    B: the chain is followed in the opposite direction.
    """
    cfg = resolve(config)
    chain = [index]
    for _ in range(d):
        nxt = best_partner(W, chain[-1], mode, 1, cfg)
        chain.append(W.lambdas.index(nxt["partner"]))
    first, last = W.sequences[chain[0]], W.sequences[chain[-1]]
    v = (deriv_closed_pair(first, last, d, cfg) if mode == "R"
         else deriv_closed_pair(last, first, d, cfg))
    return {"chain": [W.lambdas[i] for i in chain], "q_hat": v.diagnostics["gamma_hat"], "verdict": v}


def check_matrix(W: WeightMatrix, mode: str, config: RunConfig | None = None) -> dict:
    """Matrix axiom, (M0) per entry, derivation closedness with partners, (M1) per entry."""
    cfg = resolve(config)
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    order = total_order(W, cfg)
    m0 = {lam: check_condition(M, "M0", cfg) for lam, M in W.entries}
    partners = [best_partner(W, i, mode, 1, cfg) for i in range(len(W))]
    m1 = {lam: check_condition(M, "M1", cfg) for lam, M in W.entries}

    def agg(name, statuses):
        st = weakest(statuses)
        if st is Status.FAILS:
            return Verdict(name, st, {"k": -1, "lhs": "component", "rhs": "Fails",
                                      "meaning": "a required component check fails"})
        return Verdict(name, st)

    semi = [order.status, *(v.status for v in m0.values()), *(p["verdict"].status for p in partners)]
    weak = semi + [v.status for v in m1.values()]
    return {
        "mode": mode,
        "total_order": order,
        "analytic_inclusion": m0,
        "deriv_closed": partners,
        "root_increasing": m1,
        f"{mode}-semiregular": agg(f"{mode}-semiregular", semi),
        f"weakly-{mode}-regular": agg(f"weakly {mode}-regular", weak),
    }


def matrix_compare(A: WeightMatrix, B: WeightMatrix, relation: str,
                   config: RunConfig | None = None) -> dict:
    """Quantifier patterns of the matrix relations, with a pairing certificate.

    ``roumieu-preceq``: every M in A has some N in B with M ≼ N;
    ``beurling-preceq``: every N in B has some M in A with M ≼ N;
    ``lhd-mixed``: M ⊲ N for all pairs.
    """
    cfg = resolve(config)
    if relation not in MATRIX_RELATIONS:
        raise ValueError(f"unknown matrix relation {relation!r}; expected one of {MATRIX_RELATIONS}")

    def ordered(pool, anchor):
        # the identical sequence is tried first
        same = [i for i, (_, S) in enumerate(pool) if S.K == anchor.K and np.array_equal(S.logM, anchor.logM)]
        return same + [i for i in range(len(pool)) if i not in same]

    certificate = []
    if relation == "lhd-mixed":
        for (la, M), (lb, N) in itertools.product(A.entries, B.entries):
            rv = compare(M, N, "lhd", cfg)
            certificate.append({"M": la, "N": lb, "status": rv.status.value})
            if not rv.ok:
                return _matrix_verdict(relation, rv.status, certificate,
                                       {"M": la, "N": lb, "inner": rv.verdict})
        return _matrix_verdict(relation, weakest(Status(c["status"]) for c in certificate), certificate)

    forall, exists = (A, B) if relation == "roumieu-preceq" else (B, A)
    statuses = []
    for lq, Q in forall.entries:
        best = None
        for j in ordered(exists.entries, Q):
            lp, P = exists.entries[j]
            rv = compare(Q, P, "preceq", cfg) if relation == "roumieu-preceq" else compare(P, Q, "preceq", cfg)
            if best is None or _RANK[rv.status] > _RANK[best[1].status]:
                best = (lp, rv)
            if rv.status is Status.HOLDS_EMPIRICALLY:
                break
        lp, rv = best
        certificate.append({"entry": lq, "partner": lp, "status": rv.status.value})
        statuses.append(rv.status)
        if rv.status is Status.FAILS:
            return _matrix_verdict(relation, Status.FAILS, certificate,
                                   {"entry": lq, "best_partner": lp, "inner": rv.verdict})
    return _matrix_verdict(relation, weakest(statuses), certificate)


def _matrix_verdict(relation, status, certificate, failing=None) -> dict:
    witness = None
    if status is Status.FAILS:
        inner = failing.pop("inner")
        witness = dict(inner.witness)
        witness.update(failing)
    v = Verdict(relation, status, witness, {"certificate": certificate})
    return {"relation": relation, "verdict": v, "certificate": certificate}
