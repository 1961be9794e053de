"""Fourier fields on the torus and constant-coefficient elliptic systems.

Conventions: ``D_j = -i d/dx_j`` so ``D^alpha`` multiplies ``u_hat(xi)`` by
``xi**alpha``; the torus carries unit measure so ``||u||^2 = sum |u_hat|^2``
(Parseval, exact); ``laplace`` is ``D_1^2 + ... + D_n^2`` with symbol
``|xi|^2``; the a-priori constant uses the squared-sum form
``(1+|xi|^2)^d <= C^2 (sum_j |P_j(xi)|^2 + 1)``.

Every estimate here is the global torus analogue of a local estimate on
nested balls: constant coefficients make all norms exact, there is no
cutoff calculus and no shrinking domain.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln, logsumexp

from .config import RunConfig, resolve
from .matrices import WeightMatrix
from .seqcore import WeightSequence, check_condition, stirling_chain
from .transforms import PreconditionError
from .verdict import Status, Verdict, bounded_above, tends_to_minus_infinity, weakest

SCOPE = ("torus analogue: global L2 norms on the unit-measure torus with constant "
         "coefficients; the nested-ball local estimates are represented by their "
         "global counterparts and sequence-level ingredients")
FIELD_KINDS = ("gevrey-profile", "omega-profile", "band-limited-random", "single-mode")
MIN_PROFILE_CUTOFF = 64
ELLIPTIC_TOL = 1e-12


def _log_norm(log_abs: np.ndarray) -> float:
    """``log sqrt(sum exp(2 log_abs))`` without overflow."""
    with np.errstate(divide="ignore"):
        return float(0.5 * logsumexp(2.0 * log_abs))


# ---------------------------------------------------------------------------
# fields

@dataclass(frozen=True, eq=False)
class SpectralField:
    """Coefficients ``u_hat(xi)`` on the cube ``[-N, N]^dim``, dense."""

    dim: int
    cutoff: int
    coeffs: np.ndarray
    label: str = ""

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValueError("dim must be 1 or 2")
        shape = (2 * self.cutoff + 1,) * self.dim
        c = np.asarray(self.coeffs, dtype=complex)
        if c.shape != shape:
            raise ValueError(f"coefficient array must have shape {shape}, got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def axes(self) -> list[np.ndarray]:
        """Broadcastable frequency arrays, one per axis."""
        f = np.arange(-self.cutoff, self.cutoff + 1, dtype=float)
        if self.dim == 1:
            return [f]
        return [f[:, None], f[None, :]]

    @property
    def log_abs(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log(np.abs(self.coeffs))

    def log_norm(self) -> float:
        return _log_norm(self.log_abs)

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.coeffs) ** 2)))

    def sup_freq(self, log_weight) -> int:
        """``|xi|_inf`` of the dominant frequency of ``weight * |u_hat|``."""
        with np.errstate(invalid="ignore"):
            total = np.broadcast_to(log_weight + self.log_abs, self.coeffs.shape)
        idx = np.unravel_index(int(np.nanargmax(np.where(np.isnan(total), -np.inf, total))), total.shape)
        return int(max(abs(int(i) - self.cutoff) for i in idx))


def _abs_freq(axes) -> np.ndarray:
    sq = sum(a ** 2 for a in axes)
    return np.sqrt(sq)


def make_field(kind: str, dim: int = 1, cutoff: int = 64, *, s: float | None = None,
               omega=None, seed: int | None = None, band: int | None = None,
               xi0=None) -> SpectralField:
    """Test fields with analytically known class membership.

    ``gevrey-profile``: ``exp(-|xi|**(1/s))``; ``omega-profile``:
    ``exp(-omega(|xi|))``; ``band-limited-random``: complex Gaussian
    coefficients on ``|xi| <= band`` (Euclidean), normalized to unit norm;
    ``single-mode``: one unit coefficient at ``xi0``.
    """
    if kind not in FIELD_KINDS:
        raise ValueError(f"unknown field kind {kind!r}; expected one of {FIELD_KINDS}")
    if cutoff < 1:
        raise ValueError("cutoff must be >= 1")
    shape = (2 * cutoff + 1,) * dim
    f = np.arange(-cutoff, cutoff + 1, dtype=float)
    axes = [f] if dim == 1 else [f[:, None], f[None, :]]
    r = _abs_freq(axes)
    if kind in ("gevrey-profile", "omega-profile") and cutoff < MIN_PROFILE_CUTOFF:
        raise ValueError(f"profile fields need cutoff >= {MIN_PROFILE_CUTOFF}")
    if kind == "gevrey-profile":
        if s is None or s < 1:
            raise ValueError("gevrey-profile needs s >= 1")
        return SpectralField(dim, cutoff, np.exp(-r ** (1.0 / s)), f"gevrey-profile({s:g})")
    if kind == "omega-profile":
        if omega is None:
            raise ValueError("omega-profile needs a weight function")
        return SpectralField(dim, cutoff, np.exp(-np.asarray(omega(r), dtype=float)), f"omega-profile({omega.family})")
    if kind == "band-limited-random":
        if seed is None or band is None or not 0 <= band <= cutoff:
            raise ValueError("band-limited-random needs a seed and 0 <= band <= cutoff")
        rng = np.random.default_rng(seed)
        c = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        c = np.where(r <= band, c, 0.0)
        return SpectralField(dim, cutoff, c / np.sqrt(np.sum(np.abs(c) ** 2)),
                             f"band-limited-random(seed={seed},band={band})")
    xi0 = tuple(np.atleast_1d(xi0 if xi0 is not None else 0).astype(int).tolist())
    if len(xi0) != dim or any(abs(x) > cutoff for x in xi0):
        raise ValueError("single-mode frequency must lie in the cube and match dim")
    c = np.zeros(shape, dtype=complex)
    c[tuple(x + cutoff for x in xi0)] = 1.0
    return SpectralField(dim, cutoff, c, f"single-mode{xi0}")


# ---------------------------------------------------------------------------
# operators

@dataclass(frozen=True)
class Operator:
    """``sum_lam a_lam D^lam`` with constant complex coefficients."""

    terms: tuple  # ((multi_index, coeff), ...)

    def __post_init__(self):
        acc: dict[tuple, complex] = {}
        for mi, a in self.terms:
            mi = tuple(int(x) for x in mi)
            if any(x < 0 for x in mi):
                raise ValueError("multi-indices must be nonnegative")
            acc[mi] = acc.get(mi, 0) + complex(a)
        acc = {mi: a for mi, a in acc.items() if a != 0}
        if not acc:
            raise ValueError("operator must be nonzero")
        if len({len(mi) for mi in acc}) != 1:
            raise ValueError("multi-indices must share one dimension")
        object.__setattr__(self, "terms", tuple(sorted(acc.items())))

    @classmethod
    def from_terms(cls, terms) -> "Operator":
        """From ``[(coeff, multi_index), ...]`` as in the operator file."""
        return cls(tuple((mi, a) for a, mi in terms))

    @property
    def dim(self) -> int:
        return len(self.terms[0][0])

    @property
    def order(self) -> int:
        return max(sum(mi) for mi, _ in self.terms)

    @property
    def coeff_bound(self) -> float:
        return max(abs(a) for _, a in self.terms)

    def symbol(self, axes, principal: bool = False):
        d = self.order
        out = 0
        for mi, a in self.terms:
            if principal and sum(mi) != d:
                continue
            mono = a
            for x, p in zip(axes, mi):
                if p:
                    mono = mono * x ** p
            out = out + mono
        return np.asarray(out, dtype=complex)

    def compose(self, other: "Operator") -> "Operator":
        """Symbol product, exact for constant coefficients."""
        terms = [(tuple(a + b for a, b in zip(m1, m2)), c1 * c2)
                 for (m1, c1), (m2, c2) in itertools.product(self.terms, other.terms)]
        return Operator(tuple(terms))

    def to_list(self) -> list:
        return [{"coeff": [a.real, a.imag] if a.imag else a.real, "multi_index": list(mi)}
                for mi, a in self.terms]


def laplace(dim: int = 1) -> Operator:
    return Operator(tuple((tuple(2 if i == j else 0 for i in range(dim)), 1.0) for j in range(dim)))


def derivative(j: int, dim: int) -> Operator:
    """``D_j`` (``j`` is 1-based)."""
    return Operator(((tuple(1 if i == j - 1 else 0 for i in range(dim)), 1.0),))


def identity(dim: int = 1) -> Operator:
    return Operator((((0,) * dim, 1.0),))


@dataclass(frozen=True)
class OperatorSystem:
    operators: tuple

    def __post_init__(self):
        ops = tuple(self.operators)
        if not ops:
            raise ValueError("a system needs at least one operator")
        if len({P.dim for P in ops}) != 1:
            raise ValueError("operators act in different dimensions")
        object.__setattr__(self, "operators", ops)

    @property
    def dim(self) -> int:
        return self.operators[0].dim

    @property
    def orders(self) -> list[int]:
        return [P.order for P in self.operators]

    @property
    def common_order(self) -> int:
        if len(set(self.orders)) != 1:
            raise ValueError(f"operators have unequal orders {self.orders}; equalize them first")
        return self.orders[0]

    @property
    def coeff_bound(self) -> float:
        return max(P.coeff_bound for P in self.operators)

    def __len__(self) -> int:
        return len(self.operators)


def named_system(name: str, dim: int) -> OperatorSystem:
    """``laplace``, ``gradient`` (``{D_1,...,D_n}``), ``d1`` or ``identity``."""
    if name == "laplace":
        return OperatorSystem((laplace(dim),))
    if name == "gradient":
        return OperatorSystem(tuple(derivative(j, dim) for j in range(1, dim + 1)))
    if name == "d1":
        return OperatorSystem((derivative(1, dim),))
    if name == "identity":
        return OperatorSystem((identity(dim),))
    raise ValueError(f"unknown operator name {name!r}")


def apply(P: Operator, u: SpectralField) -> SpectralField:
    if P.dim != u.dim:
        raise ValueError("operator and field dimensions differ")
    return SpectralField(u.dim, u.cutoff, u.coeffs * P.symbol(u.axes), f"P({u.label})")


def _sphere(dim: int, points: int) -> list[np.ndarray]:
    if dim == 1:
        return [np.array([-1.0, 1.0])]
    t = np.linspace(0.0, 2 * np.pi, points, endpoint=False)
    x, y = np.cos(t), np.sin(t)
    # exact axis directions so that symbol zeros on the axes are hit exactly
    x[np.isclose(x, 0, atol=1e-15)] = 0.0
    y[np.isclose(y, 0, atol=1e-15)] = 0.0
    return [x, y]


def check_ellipticity(P: OperatorSystem, sphere_points: int = 360) -> Verdict:
    """Joint magnitude ``max_j |p_j(xi)|`` of the principal symbols on the unit sphere."""
    dim = P.dim
    if dim == 2 and sphere_points < 360:
        raise ValueError("need at least 360 sphere points in dimension 2")
    axes = _sphere(dim, sphere_points)
    joint = np.max(np.stack([np.abs(Q.symbol(axes, principal=True)) * np.ones_like(axes[0])
                             for Q in P.operators]), axis=0)
    i = int(np.argmin(joint))
    direction = [float(a[i]) for a in axes]
    diag = {"min_joint_magnitude": float(joint[i]), "direction": direction}
    if joint[i] < ELLIPTIC_TOL:
        return Verdict("elliptic", Status.FAILS, {"k": i, "lhs": float(joint[i]), "rhs": ELLIPTIC_TOL,
                                                  "direction": direction,
                                                  "meaning": "all principal symbols vanish here"}, diag)
    return Verdict("elliptic", Status.HOLDS_EMPIRICALLY, None, diag)


# ---------------------------------------------------------------------------
# norm tables

@dataclass(frozen=True)
class NormRow:
    label: str
    key: tuple           # word (0-based operator indices) or multi-index
    order: int           # d_tau for words, |alpha| for multi-indices
    log_norm: float
    cutoff_limited: bool
    dominant: int = 0    # |xi|_inf of the dominant frequency


@dataclass(frozen=True)
class NormTable:
    kind: str            # "iterates" or "derivatives"
    rows: tuple
    cutoff: int
    meta: dict = field(default_factory=dict)

    def usable(self) -> list[NormRow]:
        return [r for r in self.rows if not r.cutoff_limited and np.isfinite(r.log_norm)]

    def to_csv(self) -> str:
        lines = ["word_or_alpha,log_norm,cutoff_flag"]
        lines += [f"{r.label},{_fmt(r.log_norm)},{int(r.cutoff_limited)}" for r in self.rows]
        return "\n".join(lines) + "\n"


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _row(u: SpectralField, label, key, order, log_weight, cfg) -> NormRow:
    with np.errstate(invalid="ignore"):
        total = np.broadcast_to(log_weight + u.log_abs, u.coeffs.shape)
    total = np.where(np.isnan(total), -np.inf, total)
    ln = _log_norm(total)
    if not np.isfinite(ln):
        return NormRow(label, key, order, ln, False, 0)
    dom = u.sup_freq(log_weight)
    return NormRow(label, key, order, ln, dom > cfg.cutoff_fraction * u.cutoff, dom)


def _count_words(ell: int, kmax: int) -> int:
    return sum(ell ** nu for nu in range(kmax + 1))


def iterate_norms(P: OperatorSystem, u: SpectralField, kmax: int,
                  config: RunConfig | None = None) -> NormTable:
    """``log ||P^tau u||`` for every word ``|tau| <= kmax``.

    Symbols commute, so a norm depends only on how often each operator
    occurs; norms are cached per count vector while rows stay per word.
    """
    cfg = resolve(config)
    if P.dim != u.dim:
        raise ValueError("operator and field dimensions differ")
    ell = len(P)
    if _count_words(ell, kmax) > cfg.max_words:
        raise ValueError(f"{_count_words(ell, kmax)} words exceed the budget of {cfg.max_words}")
    with np.errstate(divide="ignore"):
        logsym = [np.log(np.abs(Q.symbol(u.axes))) for Q in P.operators]
    cache: dict[tuple, NormRow] = {}
    rows = []
    for nu in range(kmax + 1):
        for word in itertools.product(range(ell), repeat=nu):
            counts = tuple(Counter(word).get(j, 0) for j in range(ell))
            if counts not in cache:
                lw = sum((c * ls for c, ls in zip(counts, logsym) if c), np.zeros(1))
                cache[counts] = _row(u, "", counts, 0, lw, cfg)
            base = cache[counts]
            order = sum(P.orders[j] for j in word)
            label = "tau=" + ".".join(str(j + 1) for j in word)
            rows.append(NormRow(label, word, order, base.log_norm, base.cutoff_limited, base.dominant))
    return NormTable("iterates", tuple(rows), u.cutoff,
                     {"field": u.label, "orders": P.orders, "kmax": kmax})


def _multi_indices(dim: int, amax: int):
    for a in range(amax + 1):
        if dim == 1:
            yield (a,)
        else:
            for i in range(a, -1, -1):
                yield (i, a - i)


def derivative_norms(u: SpectralField, amax: int, config: RunConfig | None = None) -> NormTable:
    """``log ||D^alpha u||`` for ``|alpha| <= amax``."""
    cfg = resolve(config)
    with np.errstate(divide="ignore"):
        logx = [np.log(np.abs(a)) for a in u.axes]
    rows = []
    for alpha in _multi_indices(u.dim, amax):
        lw = sum((p * lx for p, lx in zip(alpha, logx) if p), np.zeros(1))
        rows.append(_row(u, "alpha=" + ",".join(map(str, alpha)), alpha, sum(alpha), lw, cfg))
    return NormTable("derivatives", tuple(rows), u.cutoff, {"field": u.label, "amax": amax})


# ---------------------------------------------------------------------------
# classification

MIN_ROWS = 6


def _profile(table: NormTable, d: int):
    """Orders ``n >= 1`` and ``log T_n`` (sup over rows of that order)."""
    if table.kind == "iterates" and any(r.order != d * len(r.key) for r in table.rows):
        raise ValueError("iterate table mixes operator orders; equalize them and pass the common d")
    best: dict[int, float] = {}
    for r in table.usable():
        if r.order >= 1:
            best[r.order] = max(best.get(r.order, -np.inf), r.log_norm)
    n = np.array(sorted(best), dtype=int)
    return n, np.array([best[i] for i in n])


def fit_gevrey_index(n, logT) -> dict:
    """Least squares ``log T_n = s log n! + n log h + c``."""
    n = np.asarray(n, dtype=float)
    X = np.column_stack([gammaln(n + 1), n, np.ones_like(n)])
    coef, *_ = np.linalg.lstsq(X, logT, rcond=None)
    resid = logT - X @ coef
    return {"s_hat": float(coef[0]), "log_h": float(coef[1]), "intercept": float(coef[2]),
            "rms_residual": float(np.sqrt(np.mean(resid ** 2)))}


def _classify_sequence(n, logT, M: WeightSequence, d: int, cfg) -> dict:
    keep = n <= M.K
    n, logT = n[keep], logT[keep]
    if n.size < MIN_ROWS:
        raise ValueError(f"only {n.size} usable rows within the window of {M.name}")
    log_h = (logT - M.logM[n]) / n
    st, tr = bounded_above(log_h, cfg)
    if st is Status.FAILS:
        rou = Verdict("roumieu", st, {"k": int(n[-1]), "lhs": float(log_h[-1]), "rhs": tr.pretail_max,
                                      "meaning": "log h_hat keeps rising"}, {"trend": tr})
    else:
        rou = Verdict("roumieu", st, None, {"trend": tr})
    bst, btr = tends_to_minus_infinity(log_h, cfg)
    small = log_h[-1] < math.log(cfg.beurling_eps) and btr.strictly_down
    if small:
        bst = Status.HOLDS_EMPIRICALLY
    if bst is Status.FAILS:
        beu = Verdict("beurling", bst, {"k": int(n[-1]), "lhs": float(log_h[-1]),
                                        "rhs": math.log(cfg.beurling_eps),
                                        "meaning": "h_hat levels off above eps"}, {"trend": btr})
    else:
        beu = Verdict("beurling", bst, None, {"trend": btr, "below_eps": bool(small)})
    return {"candidate": M.name, "h_sup": float(np.exp(log_h.max())), "h_last": float(np.exp(log_h[-1])),
            "h_tail": np.exp(log_h[-tr.width:]).tolist(), "roumieu": rou, "beurling": beu,
            "k": (n / d).tolist()}


def classify(table: NormTable, candidates=(), d: int = 1, config: RunConfig | None = None) -> dict:
    """Class evidence from a norm table.

    ``h_hat_n = exp((log T_n - log M_n)/n)`` with ``n = d k``.  Roumieu
    evidence: ``h_hat`` bounded; Beurling evidence: ``log h_hat`` decreasing to
    minus infinity, or a strictly decreasing tail that ends below ``eps``.
    For a WeightMatrix, Roumieu needs one entry and Beurling needs all.
    """
    cfg = resolve(config)
    n, logT = _profile(table, d)
    if n.size < MIN_ROWS:
        raise ValueError(f"insufficient usable rows: {n.size} < {MIN_ROWS}")
    report = {"scope": SCOPE, "kind": table.kind, "d": d, "rows_used": int(n.size),
              "fit": fit_gevrey_index(n, logT), "candidates": []}
    for cand in candidates:
        if isinstance(cand, WeightMatrix):
            parts = [_classify_sequence(n, logT, M, d, cfg) for M in cand.sequences]
            rou = max((p["roumieu"].status for p in parts), key=lambda s: s.ok * 2 + (s is Status.INCONCLUSIVE))
            beu = [p["beurling"].status for p in parts]
            report["candidates"].append({"candidate": "matrix", "entries": parts,
                                         "roumieu": rou.value, "beurling": weakest(beu).value})
        else:
            report["candidates"].append(_classify_sequence(n, logT, cand, d, cfg))
    return report


# ---------------------------------------------------------------------------
# proof ingredients

@dataclass(frozen=True)
class AprioriConstant:
    C: float
    xi: tuple
    lattice_sup: float
    ray_limit: float
    clamped: bool


def apriori_constant(P: OperatorSystem, scan: int | None = None,
                     sphere_points: int = 3600) -> AprioriConstant:
    """Smallest ``C >= 1`` with ``(1+|xi|^2)^d <= C^2 (sum_j |P_j(xi)|^2 + 1)``.

    The supremum is taken over the lattice ``|xi|_inf <= scan`` and over the
    limits along rays, ``1/sum_j |p_j(theta)|^2`` on the unit sphere.
    """
    d = P.common_order
    if not check_ellipticity(P).ok:
        raise PreconditionError("system is not elliptic", check_ellipticity(P).to_dict())
    dim = P.dim
    scan = scan or (1024 if dim == 1 else 128)
    f = np.arange(-scan, scan + 1, dtype=float)
    axes = [f] if dim == 1 else [f[:, None], f[None, :]]
    r2 = sum(a ** 2 for a in axes)
    den = sum(np.abs(Q.symbol(axes)) ** 2 for Q in P.operators) + 1.0
    log_ratio = d * np.log1p(r2) - np.log(den)
    log_ratio = np.broadcast_to(log_ratio, (2 * scan + 1,) * dim)
    i = np.unravel_index(int(np.argmax(log_ratio)), log_ratio.shape)
    lattice = float(log_ratio[i])
    sph = _sphere(dim, sphere_points)
    psum = sum(np.abs(Q.symbol(sph, principal=True)) ** 2 for Q in P.operators) * np.ones_like(sph[0])
    ray = float(np.max(-np.log(psum))) if d > 0 else -math.inf
    log_c2 = max(lattice, ray)
    C = math.exp(0.5 * log_c2)
    xi = tuple(int(j) - scan for j in i) if lattice >= ray else ("ray",)
    return AprioriConstant(max(C, 1.0), xi, math.exp(0.5 * lattice), math.exp(0.5 * ray), C < 1.0)


def weighted_interpolation_check(P: OperatorSystem, u: SpectralField, rho: float,
                                 C: float | None = None, config: RunConfig | None = None) -> Verdict:
    """``rho^d ||D^a u|| <= C (rho^d sum_j ||P_j u|| + sum_{|b|<=d-1} rho^|b| ||D^b u||)``, ``|a| <= d``.

    Checked for every multi-index ``a`` with ``|a| <= d``, combinatorial factor 1.
    """
    cfg = resolve(config)
    if not 0 < rho <= 1:
        raise ValueError("rho must lie in (0, 1]")
    d = P.common_order
    C = apriori_constant(P).C if C is None else C
    der = derivative_norms(u, d, cfg)
    by_alpha = {r.key: r.log_norm for r in der.rows}
    log_pj = [apply(Q, u).log_norm() for Q in P.operators]
    lr = math.log(rho)
    terms = [d * lr + x for x in log_pj]
    terms += [sum(b) * lr + by_alpha[b] for b in by_alpha if sum(b) <= d - 1]
    with np.errstate(divide="ignore"):
        rhs = math.log(C) + float(logsumexp(terms))
    worst = None
    for a, ln in by_alpha.items():
        lhs = d * lr + ln
        gap = lhs - rhs
        if worst is None or gap > worst[1]:
            worst = (a, gap, lhs)
    diag = {"C": C, "factor": 1.0, "rho": rho, "log_rhs": rhs, "max_log_excess": worst[1], "scope": SCOPE}
    if worst[1] > cfg.tol:
        return Verdict("weighted interpolation", Status.FAILS,
                       {"k": sum(worst[0]), "alpha": list(worst[0]), "lhs": worst[2], "rhs": rhs}, diag)
    return Verdict("weighted interpolation", Status.HOLDS, None, diag)


def regular_estimate_check(M: WeightSequence, amax: int, config: RunConfig | None = None) -> Verdict:
    """``binom(a, a-g) M_{a-g} Theta_a^{-(a-g)} <= 1`` for ``1 <= g < a <= amax``."""
    cfg = resolve(config)
    if amax > M.K:
        raise ValueError(f"amax={amax} exceeds the window K={M.K}")
    m1 = check_condition(M, "M1", cfg)
    if m1.status is not Status.HOLDS:
        raise PreconditionError(f"{M.name} does not satisfy (M1) on the window", m1.to_dict())
    a = np.arange(2, amax + 1)[:, None]
    g = np.arange(1, amax)[None, :]
    valid = g < a
    j = np.where(valid, a - g, 0)
    logTheta = M.views.logTheta
    lhs = gammaln(a + 1) - gammaln(g + 1) - gammaln(j + 1) + M.logM[j] - j * logTheta[a]
    lhs = np.where(valid, lhs, -np.inf)
    i = np.unravel_index(int(np.argmax(lhs)), lhs.shape)
    top = float(lhs[i])
    ai, gi = int(a[i[0], 0]), int(g[0, i[1]])
    diag = {"max_log_value": top, "argmax": {"a": ai, "g": gi}, "amax": amax}
    if top > cfg.tol:
        return Verdict("regular estimate", Status.FAILS, {"k": ai, "g": gi, "lhs": top, "rhs": 0.0}, diag)
    return Verdict("regular estimate", Status.HOLDS, None, diag)


def bracket(A: float, C: float, H: float, d: int, n: int) -> float:
    """``C A^-d + C d^n H^2 A^-1 (1-H/A)^-n + C sum_{|b|<=d-1} A^{|b|-d}`` for ``A > H``."""
    beta = sum(math.comb(b + n - 1, n - 1) * A ** (b - d) for b in range(d))
    return C * A ** (-d) + C * d ** n * H ** 2 / A * (1 - H / A) ** (-n) + C * beta


def find_admissible_A(C: float, H: float, d: int, n: int, ell: int = 1, tol: float = 1e-9) -> float:
    """Minimal ``A > max(1, H)`` with ``bracket(A) <= 1``, by bisection.

    The system size ``ell`` does not enter the closed-form bracket; it is
    accepted for completeness of the parameter record.
    """
    if C < 0 or H <= 0 or d < 1 or n < 1 or ell < 1:
        raise ValueError("need C >= 0, H > 0 and d, n, ell >= 1")
    lo = max(1.0, H)
    if C == 0:
        return lo
    hi = 2 * lo
    while bracket(hi, C, H, d, n) > 1:
        hi *= 2
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid > H and bracket(mid, C, H, d, n) <= 1:
            hi = mid
        else:
            lo = mid
    return hi


def _log_S(P: OperatorSystem, u: SpectralField, rho: float, k: int, table: NormTable) -> float:
    d = P.common_order
    by_len = {}
    for r in table.rows:
        by_len.setdefault(len(r.key), []).append(r.log_norm)
    terms = [u.log_norm()]
    for sigma in range(1, k + 1):
        terms.extend((sigma - 1) * d * math.log(rho) + np.asarray(by_len[sigma]))
    with np.errstate(divide="ignore"):
        return float(logsumexp(terms))


def mainprop_trace(P: OperatorSystem, u: SpectralField, M: WeightSequence, rho: float, kmax: int,
                   H: float | None = None, config: RunConfig | None = None) -> Verdict:
    """``rho^|a| ||D^a u|| <= A^{|a|+1} S_k(u)`` for ``|a| <= d k``, ``k <= kmax``.

    ``A`` comes from :func:`find_admissible_A` with the torus a-priori
    constant and ``H`` (default: the largest coefficient modulus).  Each
    ``a`` is tested against the smallest admissible ``k = ceil(|a|/d)``.
    """
    cfg = resolve(config)
    if not 0 < rho <= 1:
        raise ValueError("rho must lie in (0, 1]")
    d = P.common_order
    ell_ok = check_ellipticity(P)
    if not ell_ok.ok:
        raise PreconditionError("system is not elliptic", ell_ok.to_dict())
    m1 = check_condition(M, "M1", cfg)
    if m1.status is not Status.HOLDS:
        raise PreconditionError(f"{M.name} does not satisfy (M1)", m1.to_dict())
    if d * kmax > M.K:
        raise ValueError("d*kmax exceeds the window of M")
    C = apriori_constant(P).C
    H = P.coeff_bound if H is None else H
    A = find_admissible_A(C, H, d, P.dim, len(P))
    it = iterate_norms(P, u, kmax, cfg)
    der = derivative_norms(u, d * kmax, cfg)
    limited = [r.label for r in it.rows + der.rows if r.cutoff_limited]
    if limited:
        raise PreconditionError("cutoff-limited norm rows", {"rows": limited[:10]})
    log_S = {k: _log_S(P, u, rho, k, it) for k in range(1, kmax + 1)}
    worst = (None, -math.inf, 0.0, 0.0)
    for r in der.rows:
        a = r.order
        k = max(1, math.ceil(a / d))
        lhs = a * math.log(rho) + r.log_norm
        rhs = (a + 1) * math.log(A) + log_S[k]
        if lhs - rhs > worst[1]:
            worst = (r.key, lhs - rhs, lhs, rhs)
    Theta = np.exp(M.views.logTheta[1:d * kmax + 1])
    diag = {"A": A, "C": C, "H": H, "rho": rho, "kmax": kmax, "max_log_excess": worst[1],
            "max_theta_rho": float(Theta.max() * rho), "scope": SCOPE}
    if worst[1] > cfg.tol:
        return Verdict("mainprop", Status.FAILS, {"k": sum(worst[0]), "alpha": list(worst[0]),
                                                  "lhs": worst[2], "rhs": worst[3]}, diag)
    return Verdict("mainprop", Status.HOLDS, None, diag)


@dataclass(frozen=True)
class RhoSchedule:
    rho: float
    min_slack: float
    bound: float
    verdict: Verdict


def rho_schedule(R: float, Rp: float, M: WeightSequence, dk: int,
                 config: RunConfig | None = None) -> RhoSchedule:
    """``rho = (R-R')/(e Lambda_dk)`` and the check ``R - Theta_a rho >= R'/e`` for ``1 <= a <= dk``."""
    cfg = resolve(config)
    if not 0 < Rp < R <= 1:
        raise ValueError("need 0 < R' < R <= 1")
    if not 1 <= dk <= M.K:
        raise ValueError("need 1 <= dk <= K")
    v = M.views
    rho = (R - Rp) / (math.e * math.exp(v.logLambda[dk]))
    theta = np.exp(v.logTheta[1:dk + 1])
    slack = R - theta * rho
    i = int(np.argmin(slack))
    bound = Rp / math.e
    diag = {"rho": rho, "min_slack": float(slack[i]), "bound": bound, "argmin_a": i + 1,
            "theta_rho_max": float(theta[i] * rho), "stirling": stirling_chain(dk).status.value}
    if slack[i] < bound - cfg.tol:
        v_ = Verdict("rho schedule", Status.FAILS, {"k": i + 1, "lhs": float(slack[i]), "rhs": bound}, diag)
    else:
        v_ = Verdict("rho schedule", Status.HOLDS, None, diag)
    return RhoSchedule(rho, float(slack[i]), bound, v_)
