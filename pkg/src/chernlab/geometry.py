"""Chern-connection curvature of Hermitian metrics and curvature functionals.

Conventions (pinned once, used everywhere):

* metric component arrays are ``G[a, b] = g_{a bbar}``; the inverse metric
  is ``g^{a bbar} = inv(G)[b, a]`` (the transpose of the matrix inverse),
  which is exactly what makes ``g^{kl} R_{ij kl} = -dd log det g`` hold;
* the Hermitian pairing is ``<u, v>_g = sum g_{a bbar} u^a conj(v^b)``, so a
  frame E (columns) is unitary iff ``E^T G conj(E) = I``;
* curvature index order is ``R[i, j, k, l] = R_{i jbar k lbar}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import InvalidArgument, SingularMetric
from .fields import MetricField
from .wirtinger import FdConfig, Point, array_jet2, as_point

CURV_SYM_TOL = 1e-9


# ---------------------------------------------------------------------------
# metric jets and the curvature tensor
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MetricJet:
    """Metric value and Wirtinger jets at a point.

    ``d[a, b, g] = g_{a bbar, g}``, ``dbar[a, b, g] = g_{a bbar, gbar}``,
    ``ddbar[a, b, g, h] = g_{a bbar, g hbar}``; ``inverse`` is the plain
    matrix inverse of ``g``.
    """

    g: np.ndarray
    d: np.ndarray
    dbar: np.ndarray
    ddbar: np.ndarray
    inverse: np.ndarray


def metric_jet(g: MetricField, p, cfg: FdConfig) -> MetricJet:
    """First and mixed-second jets of the metric component matrix."""
    p = as_point(p)
    G = g.at(p)  # validates Hermitian positive definite
    jet = array_jet2(g.components, p, cfg, domain=g.domain)
    try:
        inv = np.linalg.inv(G)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - at() catches first
        raise SingularMetric(f"metric {g.label!r} singular at {p}") from exc
    return MetricJet(g=G, d=jet.d, dbar=jet.dbar, ddbar=jet.ddbar, inverse=inv)


@dataclass(frozen=True)
class CurvatureTensor:
    """Chern curvature ``R[i, j, k, l] = R_{i jbar k lbar}`` at a point."""

    R: np.ndarray

    def symmetry_residual(self) -> float:
        """Max-abs violation of the conjugate-pair symmetry R_ijkl = conj(R_jilk)."""
        return float(np.max(np.abs(self.R - np.conj(np.transpose(self.R, (1, 0, 3, 2))))))


def inverse_metric(G: np.ndarray) -> np.ndarray:
    """Upper-index components ``g^{a bbar}`` as a 2-d array indexed [a, b]."""
    return np.linalg.inv(G).T


def chern_curvature(g: MetricField, p, cfg: FdConfig) -> CurvatureTensor:
    """Full Chern curvature tensor from metric jets.

    R_{i jbar k lbar} = - g_{k lbar, i jbar}
                        + g^{p qbar} g_{k qbar, i} g_{p lbar, jbar}
    """
    mj = metric_jet(g, p, cfg)
    first = -np.transpose(mj.ddbar, (2, 3, 0, 1))
    second = np.einsum('qp,kqi,plj->ijkl', mj.inverse, mj.d, mj.dbar)
    return CurvatureTensor(R=first + second)


def chern_ricci_first(g: MetricField, p, cfg: FdConfig) -> np.ndarray:
    """(First) Chern Ricci curvature R_{i jbar} = g^{k lbar} R_{i jbar k lbar}."""
    R = chern_curvature(g, p, cfg).R
    ginv_up = inverse_metric(g.at(p))
    return np.einsum('kl,ijkl->ij', ginv_up, R)


def ricci_from_log_det(g: MetricField, p, cfg: FdConfig) -> np.ndarray:
    """Chern Ricci via the independent route -dd log det g."""
    p = as_point(p)

    def logdet(q: Point) -> complex:
        sign, ld = np.linalg.slogdet(np.asarray(g.components(q), dtype=complex))
        return ld

    jet = array_jet2(lambda q: np.asarray(logdet(q)), p, cfg, domain=g.domain)
    return -jet.ddbar


def chern_ricci_second(g: MetricField, p, cfg: FdConfig) -> np.ndarray:
    """Second Chern Ricci curvature Ric2_{k lbar} = g^{i jbar} R_{i jbar k lbar}."""
    R = chern_curvature(g, p, cfg).R
    ginv_up = inverse_metric(g.at(p))
    return np.einsum('ij,ijkl->kl', ginv_up, R)


def chern_scalar(g: MetricField, p, cfg: FdConfig) -> float:
    """Chern scalar curvature S = g^{i jbar} g^{k lbar} R_{i jbar k lbar}."""
    R = chern_curvature(g, p, cfg).R
    ginv_up = inverse_metric(g.at(p))
    s = np.einsum('ij,kl,ijkl->', ginv_up, ginv_up, R)
    return float(s.real)


def curvature_in_frame(R, frame: np.ndarray) -> CurvatureTensor:
    """Multilinear change of frame R'_{a bbar c dbar} = R_{i jbar k lbar} e_a^i conj(e_b^j) e_c^k conj(e_d^l)."""
    Rarr = R.R if isinstance(R, CurvatureTensor) else np.asarray(R, dtype=complex)
    E = np.asarray(frame, dtype=complex)
    if E.shape[0] != Rarr.shape[0]:
        raise InvalidArgument("frame / curvature dimension mismatch")
    out = np.einsum('ijkl,ia,jb,kc,ld->abcd', Rarr, E, E.conj(), E, E.conj())
    return CurvatureTensor(R=out)


# ---------------------------------------------------------------------------
# pairing, frames, functionals
# ---------------------------------------------------------------------------

def pairing(G: np.ndarray, u: np.ndarray, v: np.ndarray) -> complex:
    """Hermitian pairing <u, v>_g = sum g_{a bbar} u^a conj(v^b)."""
    return complex(np.einsum('ab,a,b->', G, u, np.conj(v)))


def g_norm_sq(G: np.ndarray, u: np.ndarray) -> float:
    return pairing(G, u, u).real


def unit_vector(G: np.ndarray, u: np.ndarray) -> np.ndarray:
    n2 = g_norm_sq(G, u)
    if n2 <= 0.0:
        raise InvalidArgument("cannot normalize a null vector")
    return u / np.sqrt(n2)


def orthonormal_frame(G: np.ndarray, columns: np.ndarray) -> np.ndarray:
    """g-orthonormalize the given columns: result E satisfies E^T G conj(E) = I.

    The span of the columns is preserved.
    """
    M = np.atleast_2d(np.asarray(columns, dtype=complex))
    if M.ndim != 2 or M.shape[0] != G.shape[0]:
        raise InvalidArgument(f"frame columns have shape {M.shape}")
    try:
        Lbar = np.linalg.cholesky(G.conj())
    except np.linalg.LinAlgError as exc:
        raise SingularMetric("metric not positive definite in frame construction") from exc
    Q, _ = np.linalg.qr(Lbar.conj().T @ M)
    if np.linalg.matrix_rank(M, tol=1e-12 * max(1.0, float(np.max(np.abs(M))))) < M.shape[1]:
        raise InvalidArgument("frame columns are linearly dependent")
    return np.linalg.solve(Lbar.conj().T, Q)


def frame_residual(G: np.ndarray, E: np.ndarray) -> float:
    """Max-abs deviation of E^T G conj(E) from the identity."""
    k = E.shape[1]
    return float(np.max(np.abs(E.T @ G @ E.conj() - np.eye(k))))


@dataclass(frozen=True)
class FrameSample:
    """A unitary tangent frame together with nonnegative weights."""

    frame: np.ndarray
    weights: np.ndarray

    def validate(self, G: np.ndarray, tol: float = 1e-9) -> None:
        w = np.asarray(self.weights, dtype=float)
        if np.any(w < 0) or float(np.sum(w * w)) <= 0.0:
            raise InvalidArgument("weights must be nonnegative with |a|^2 > 0")
        if frame_residual(G, np.asarray(self.frame, dtype=complex)) > tol:
            raise InvalidArgument("frame is not unitary with respect to g at p")


def curvature_form(R: np.ndarray, X, Y, Z, W) -> complex:
    """R(X, Ybar, Z, Wbar) on tangent vectors."""
    return complex(np.einsum('ijkl,i,j,k,l->', R, X, np.conj(Y), Z, np.conj(W)))


def holomorphic_sectional(g: MetricField, p, X, cfg: FdConfig) -> float:
    """H(X) = R(X, Xbar, X, Xbar) / g(X, X)^2; scale invariant."""
    X = np.asarray(X, dtype=complex)
    if not np.any(X):
        raise InvalidArgument("X must be nonzero")
    G = g.at(p)
    R = chern_curvature(g, p, cfg).R
    Xu = unit_vector(G, X)
    return curvature_form(R, Xu, Xu, Xu, Xu).real


def bisectional(g: MetricField, p, X, Y, cfg: FdConfig) -> float:
    """B(X, Y) = R(X, Xbar, Y, Ybar) / (g(X,X) g(Y,Y))."""
    X = np.asarray(X, dtype=complex)
    Y = np.asarray(Y, dtype=complex)
    if not (np.any(X) and np.any(Y)):
        raise InvalidArgument("X and Y must be nonzero")
    G = g.at(p)
    R = chern_curvature(g, p, cfg).R
    Xu = unit_vector(G, X)
    Yu = unit_vector(G, Y)
    return curvature_form(R, Xu, Xu, Yu, Yu).real


def _check_subspace_vector(G, Sigma, v):
    E = orthonormal_frame(G, Sigma)
    v = np.asarray(v, dtype=complex)
    if not np.any(v):
        raise InvalidArgument("v must be nonzero")
    # coordinates of v in the frame; verify membership in span(Sigma)
    coeff = np.array([pairing(G, v, E[:, i]) for i in range(E.shape[1])])
    recon = E @ coeff
    if float(np.max(np.abs(recon - v))) > 1e-8 * max(1.0, float(np.max(np.abs(v)))):
        raise InvalidArgument("v does not lie in span(Sigma)")
    return E, unit_vector(G, v)


def ricci_l_first(g: MetricField, p, Sigma, v, cfg: FdConfig) -> float:
    """Partial Ricci trace sum_{i<=l} R(v, vbar, E_i, Ebar_i) on a g-unit v in Sigma."""
    G = g.at(p)
    R = chern_curvature(g, p, cfg).R
    E, vu = _check_subspace_vector(G, Sigma, v)
    return sum(curvature_form(R, vu, vu, E[:, i], E[:, i]) for i in range(E.shape[1])).real


def ricci_l_second(g: MetricField, p, Sigma, v, cfg: FdConfig) -> float:
    """Partial trace with slots swapped: sum_{i<=l} R(E_i, Ebar_i, v, vbar)."""
    G = g.at(p)
    R = chern_curvature(g, p, cfg).R
    E, vu = _check_subspace_vector(G, Sigma, v)
    return sum(curvature_form(R, E[:, i], E[:, i], vu, vu) for i in range(E.shape[1])).real


def scalar_l(g: MetricField, p, Sigma, cfg: FdConfig) -> float:
    """Double trace S_l = sum_{i,j<=l} R(E_i, Ebar_i, E_j, Ebar_j) over Sigma."""
    G = g.at(p)
    R = chern_curvature(g, p, cfg).R
    E = orthonormal_frame(G, Sigma)
    return _scalar_l_from(R, E)


def _scalar_l_from(R: np.ndarray, E: np.ndarray) -> float:
    M = np.einsum('ka,la->kl', E, E.conj())  # sum_i E_i^k conj(E_i^l)
    return float(np.einsum('ijkl,ij,kl->', R, M, M).real)


def real_bisectional(g: MetricField, p, sample: FrameSample, cfg: FdConfig) -> float:
    """Weighted diagonal curvature sum (1/|a|^2) sum R_{i ibar j jbar} a_i a_j in frame e."""
    G = g.at(p)
    sample.validate(G)
    R = chern_curvature(g, p, cfg).R
    return _real_bisectional_from(R, np.asarray(sample.frame, dtype=complex),
                                  np.asarray(sample.weights, dtype=float))


def _real_bisectional_from(R: np.ndarray, E: np.ndarray, a: np.ndarray) -> float:
    Rf = np.einsum('ijkl,ia,ja,kb,lb->ab', R, E, E.conj(), E, E.conj())
    return float(np.einsum('ab,a,b->', Rf.real, a, a) / np.sum(a * a))


# ---------------------------------------------------------------------------
# numerical sign probing over frames
# ---------------------------------------------------------------------------

PROBE_KINDS = ("H", "Btilde", "Ric1", "Ric2", "S")


@dataclass(frozen=True)
class ProbeResult:
    """One-sided empirical curvature bounds over sampled frames."""

    kind: str
    ell: int
    min_value: float
    max_value: float
    min_witness: dict
    max_witness: dict
    points_checked: int


def _probe_eval(kind: str, R: np.ndarray, E: np.ndarray, extra) -> float:
    if kind == "H":
        v = extra
        return curvature_form(R, v, v, v, v).real
    if kind == "Btilde":
        return _real_bisectional_from(R, E, extra)
    if kind == "Ric1":
        v = extra
        return sum(curvature_form(R, v, v, E[:, i], E[:, i]) for i in range(E.shape[1])).real
    if kind == "Ric2":
        v = extra
        return sum(curvature_form(R, E[:, i], E[:, i], v, v) for i in range(E.shape[1])).real
    if kind == "S":
        return _scalar_l_from(R, E)
    raise InvalidArgument(f"unknown probe kind {kind!r}")


def _draw_sample(kind: str, G: np.ndarray, ell: int, rng) -> tuple:
    m = G.shape[0]

    def cgauss(*shape):
        return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)

    if kind == "H":
        v = unit_vector(G, cgauss(m))
        return np.zeros((m, 0)), v
    if kind == "Btilde":
        E = orthonormal_frame(G, cgauss(m, m))
        a = np.abs(rng.standard_normal(m)) + 1e-3
        return E, a
    if kind in ("Ric1", "Ric2"):
        E = orthonormal_frame(G, cgauss(m, ell))
        v = unit_vector(G, E @ cgauss(ell))
        return E, v
    if kind == "S":
        return orthonormal_frame(G, cgauss(m, ell)), None
    raise InvalidArgument(f"unknown probe kind {kind!r}")


def _perturb_sample(kind: str, G: np.ndarray, E: np.ndarray, extra, rng, scale: float):
    m = G.shape[0]

    def cgauss(*shape):
        return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)

    if kind == "H":
        return E, unit_vector(G, extra + scale * cgauss(m))
    if kind == "Btilde":
        En = orthonormal_frame(G, E + scale * cgauss(m, m))
        a = np.abs(extra + scale * rng.standard_normal(m)) + 1e-6
        return En, a
    if kind in ("Ric1", "Ric2"):
        En = orthonormal_frame(G, E + scale * cgauss(*E.shape))
        vn = unit_vector(G, En @ (En.conj().T @ G.T @ extra.conj()).conj() + scale * En @ cgauss(E.shape[1]))
        return En, vn
    if kind == "S":
        return orthonormal_frame(G, E + scale * cgauss(*E.shape)), None
    raise InvalidArgument(kind)


REFINE_SCALE = 0.05


def curvature_sign_probe(g: MetricField, points, kind: str, ell: int = 1,
                         n_samples: int = 64, seed: int = 0,
                         refine_steps: int = 50,
                         cfg: Optional[FdConfig] = None) -> ProbeResult:
    """Empirical min/max of a curvature functional over frames at given points.

    Estimates are attained values, hence the reported min is an upper bound
    on the true minimum and the max a lower bound on the true maximum.
    Deterministic for a fixed seed; refinement is a greedy hill climb that
    never worsens either estimate.
    """
    if kind not in PROBE_KINDS:
        raise InvalidArgument(f"kind must be one of {PROBE_KINDS}")
    if n_samples < 1:
        raise InvalidArgument("n_samples must be >= 1")
    cfg = cfg or FdConfig()
    pts = [as_point(p) for p in points]
    if not pts:
        raise InvalidArgument("at least one probe point required")
    if ell < 1 or ell > g.dim:
        raise InvalidArgument(f"ell must satisfy 1 <= ell <= {g.dim}")

    best_min = np.inf
    best_max = -np.inf
    wit_min: dict = {}
    wit_max: dict = {}
    for ip, p in enumerate(pts):
        G = g.at(p)
        R = chern_curvature(g, p, cfg).R
        states = []
        for js in range(n_samples):
            rng = np.random.default_rng(np.random.SeedSequence((seed, ip, js)))
            E, extra = _draw_sample(kind, G, ell, rng)
            val = _probe_eval(kind, R, E, extra)
            states.append((val, E, extra))
        vals = [s[0] for s in states]
        lo_i = int(np.argmin(vals))
        hi_i = int(np.argmax(vals))
        for tag, idx, better in (("min", lo_i, lambda a, b: a < b),
                                 ("max", hi_i, lambda a, b: a > b)):
            val, E, extra = states[idx]
            rng = np.random.default_rng(np.random.SeedSequence((seed, ip, tag == "max", 0xbeef)))
            for _ in range(refine_steps):
                En, xn = _perturb_sample(kind, G, E, extra, rng, REFINE_SCALE)
                vn = _probe_eval(kind, R, En, xn)
                if better(vn, val):
                    val, E, extra = vn, En, xn
            witness = {"point_index": ip, "value": val, "frame": E, "extra": extra}
            if tag == "min" and val < best_min:
                best_min, wit_min = val, witness
            if tag == "max" and val > best_max:
                best_max, wit_max = val, witness

    return ProbeResult(kind=kind, ell=ell, min_value=float(best_min),
                       max_value=float(best_max), min_witness=wit_min,
                       max_witness=wit_max, points_checked=len(pts))
