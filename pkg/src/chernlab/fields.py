"""Metric and holomorphic-map fields on complex coordinate charts.

A field is an evaluator plus a domain predicate; everything downstream
(jets, curvature, Bochner checks) consumes these two callables only, so
user-supplied fields and registry fields are interchangeable.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Callable, Optional

import numpy as np

from .errors import DomainViolation, InvalidArgument, NonFinite, SingularMetric
from .wirtinger import Point, as_point

HERMITI_TOL = 1e-12


def _always(_p: Point) -> bool:
    return True


@dataclass(frozen=True)
class MetricField:
    """Hermitian metric given by a component evaluator z -> (g_{a bbar}(z)).

    The evaluator must return an m x m complex matrix that is Hermitian
    to 1e-12 (relative) and positive definite at every probed point.
    """

    dim: int
    components: Callable[[Point], np.ndarray]
    domain: Callable[[Point], bool] = _always
    label: str = ""

    def at(self, p) -> np.ndarray:
        """Evaluate and validate the metric matrix at a point."""
        p = as_point(p)
        if p.size != self.dim:
            raise InvalidArgument(f"metric {self.label!r} has dim {self.dim}, point has {p.size}")
        if not self.domain(p):
            raise DomainViolation(f"point {p} outside domain of metric {self.label!r}")
        G = np.asarray(self.components(p), dtype=complex)
        if G.shape != (self.dim, self.dim):
            raise InvalidArgument(f"metric evaluator returned shape {G.shape}")
        if not np.all(np.isfinite(G)):
            raise NonFinite(f"metric {self.label!r} non-finite at {p}")
        scale = max(1.0, float(np.max(np.abs(G))))
        if float(np.max(np.abs(G - G.conj().T))) > HERMITI_TOL * scale:
            raise SingularMetric(f"metric {self.label!r} not Hermitian at {p}")
        ev = np.linalg.eigvalsh(G)
        if ev[0] <= 1e-12 * max(ev[-1], 0.0):
            raise SingularMetric(
                f"metric {self.label!r} not positive definite at {p} (eigs {ev})")
        return G


@dataclass(frozen=True)
class HolomorphicMapField:
    """Holomorphic map evaluator z -> f(z), with optional closed-form jets.

    ``jet1(p)[i, a] = df^i/dz^a`` and ``jet2(p)[i, a, b]`` is the symmetric
    second derivative.  When jets are absent they are produced by finite
    differences (with a Cauchy-Riemann residual gate).
    """

    dim_in: int
    dim_out: int
    eval: Callable[[Point], np.ndarray]
    jet1: Optional[Callable[[Point], np.ndarray]] = None
    jet2: Optional[Callable[[Point], np.ndarray]] = None
    domain: Callable[[Point], bool] = _always
    label: str = ""

    def at(self, p) -> np.ndarray:
        p = as_point(p)
        if not self.domain(p):
            raise DomainViolation(f"point {p} outside domain of map {self.label!r}")
        v = np.asarray(self.eval(p), dtype=complex)
        if v.shape != (self.dim_out,):
            raise InvalidArgument(f"map evaluator returned shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise NonFinite(f"map {self.label!r} non-finite at {p}")
        return v


def transformed_metric(g: MetricField, base, P: np.ndarray, label: str = "") -> MetricField:
    """Pull a metric back along the affine-linear chart change z = base + P z'.

    Component arrays transform by the holomorphic-frame rule
    ``g'(z') = P^T g(base + P z') conj(P)``.
    """
    base = as_point(base)
    P = np.asarray(P, dtype=complex)
    Pc = P.conj()

    def comp(zp: Point) -> np.ndarray:
        return P.T @ g.components(base + P @ zp) @ Pc

    def dom(zp: Point) -> bool:
        return g.domain(base + P @ zp)

    return MetricField(dim=P.shape[1], components=comp, domain=dom,
                       label=label or f"{g.label}|affine")


def transformed_map(f: HolomorphicMapField, base_in, P: np.ndarray,
                    base_out, Q: np.ndarray, label: str = "") -> HolomorphicMapField:
    """Conjugate a map by affine chart changes on both sides.

    z = base_in + P z' on the domain and w = base_out + Q w' on the target
    give ``f'(z') = Q^{-1} (f(base_in + P z') - base_out)``.
    """
    base_in = as_point(base_in)
    base_out = as_point(base_out)
    P = np.asarray(P, dtype=complex)
    Q = np.asarray(Q, dtype=complex)
    Qinv = np.linalg.inv(Q)

    def ev(zp: Point) -> np.ndarray:
        return Qinv @ (f.eval(base_in + P @ zp) - base_out)

    jet1 = jet2 = None
    if f.jet1 is not None:
        def jet1(zp: Point) -> np.ndarray:
            return Qinv @ np.asarray(f.jet1(base_in + P @ zp), dtype=complex) @ P
    if f.jet2 is not None:
        def jet2(zp: Point) -> np.ndarray:
            J2 = np.asarray(f.jet2(base_in + P @ zp), dtype=complex)
            return np.einsum('ij,jab,aA,bB->iAB', Qinv, J2, P, P)

    def dom(zp: Point) -> bool:
        return f.domain(base_in + P @ zp)

    return HolomorphicMapField(dim_in=P.shape[1], dim_out=Q.shape[0], eval=ev,
                               jet1=jet1, jet2=jet2, domain=dom,
                               label=label or f"{f.label}|affine")
