"""Wirtinger-derivative engine.

First and second order jets of complex-chart fields are assembled from
central finite differences in the underlying real coordinates
``(x_1, y_1, ..., x_m, y_m)``, ``z^g = x_g + i y_g``:

    d/dz    = (d/dx - i d/dy) / 2
    d/dzbar = (d/dx + i d/dy) / 2

Fields may be scalar- or array-valued; jets of array fields carry the
field shape in the leading axes and derivative indices in the trailing
axes.  All operations are pure and deterministic for a fixed config.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Callable, Optional

import numpy as np

from .errors import DomainViolation, HolomorphyViolation, InvalidArgument, NonFinite

Point = np.ndarray  # 1-d complex array of chart coordinates


def as_point(coords) -> Point:
    """Coerce to a 1-d complex chart point, validating finiteness."""
    p = np.atleast_1d(np.asarray(coords, dtype=complex))
    if p.ndim != 1 or p.size < 1:
        raise InvalidArgument(f"chart point must be a 1-d vector, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise InvalidArgument("chart point has non-finite coordinates")
    return p


@dataclass(frozen=True)
class FdConfig:
    """Finite-difference configuration.

    Parameters
    ----------
    step : relative step; scaled per coordinate by max(1, |z^g|).
    richardson : enable one Richardson extrapolation level
        (O(step^2) -> O(step^4)).
    min_domain_margin : required distance from the chart-domain boundary
        in each real coordinate, in the same relative units as `step`.
    """

    step: float = 1e-4
    richardson: bool = False
    min_domain_margin: float = dc_field(default=-1.0)

    def __post_init__(self):
        if not (0.0 < self.step < 1.0):
            raise InvalidArgument(f"step must be in (0, 1), got {self.step}")
        if self.min_domain_margin < 0:
            object.__setattr__(self, "min_domain_margin", 4.0 * self.step)
        if self.min_domain_margin < 4.0 * self.step:
            raise InvalidArgument(
                "min_domain_margin must be >= 4*step so the stencil fits the domain"
            )


@dataclass(frozen=True)
class Jet2:
    """Value and Wirtinger jets of a field at a point.

    ``d[..., g]`` is d/dz^g, ``dbar[..., g]`` is d/dzbar^g,
    ``dd[..., g, h]`` is d^2/dz^g dz^h and ``ddbar[..., g, h]`` is the
    mixed second derivative d^2/dz^g dzbar^h.  ``err_estimate`` is a
    max-abs bound on the leading FD error, available when Richardson
    extrapolation ran.
    """

    value: np.ndarray
    d: np.ndarray
    dbar: np.ndarray
    dd: np.ndarray
    ddbar: np.ndarray
    err_estimate: Optional[float] = None


# a scalar field's jet; same container, value is a 0-d array / scalar
ScalarJet2 = Jet2


def _steps(p: Point, step: float) -> np.ndarray:
    # one step per complex coordinate, shared by its x and y axes
    return step * np.maximum(1.0, np.abs(p))


def _check_margin(p: Point, cfg: FdConfig, domain: Callable[[Point], bool]) -> None:
    h = _steps(p, cfg.min_domain_margin / cfg.step * cfg.step)  # margin in abs units
    marg = cfg.min_domain_margin * np.maximum(1.0, np.abs(p))
    if not domain(p):
        raise DomainViolation(f"point {p} outside chart domain")
    m = p.size
    for g in range(m):
        for delta in (marg[g], -marg[g], 1j * marg[g], -1j * marg[g]):
            q = p.copy()
            q[g] += delta
            if not domain(q):
                raise DomainViolation(
                    f"margin {cfg.min_domain_margin:g} around {p} exits chart domain"
                )
    del h


def _eval(field, q: Point, domain) -> np.ndarray:
    if domain is not None and not domain(q):
        raise DomainViolation(f"stencil point {q} outside chart domain")
    v = np.asarray(field(q), dtype=complex)
    if not np.all(np.isfinite(v)):
        raise NonFinite(f"field evaluation at {q} is non-finite")
    return v


def _jet_single(field, p: Point, h: np.ndarray, domain) -> tuple:
    """One central-difference pass at absolute per-coordinate steps `h`.

    Returns (value, grad, hess) over the 2m real axes; hess is stored
    symmetric by construction.
    """
    m = p.size
    n_real = 2 * m

    def offset(r: int, s: float) -> Point:
        q = p.copy()
        g, im = divmod(r, 2)
        q[g] += (1j * s if im else s)
        return q

    def hstep(r: int) -> float:
        return float(h[r // 2])

    f0 = _eval(field, p, domain)
    grad = np.empty(f0.shape + (n_real,), dtype=complex)
    hess = np.empty(f0.shape + (n_real, n_real), dtype=complex)

    plus = []
    minus = []
    for r in range(n_real):
        fp = _eval(field, offset(r, hstep(r)), domain)
        fm = _eval(field, offset(r, -hstep(r)), domain)
        plus.append(fp)
        minus.append(fm)
        grad[..., r] = (fp - fm) / (2.0 * hstep(r))
        hess[..., r, r] = (fp - 2.0 * f0 + fm) / hstep(r) ** 2

    for r in range(n_real):
        for s in range(r + 1, n_real):
            qpp = offset(r, hstep(r)); qpp = _shift(qpp, s, hstep(s))
            qpm = offset(r, hstep(r)); qpm = _shift(qpm, s, -hstep(s))
            qmp = offset(r, -hstep(r)); qmp = _shift(qmp, s, hstep(s))
            qmm = offset(r, -hstep(r)); qmm = _shift(qmm, s, -hstep(s))
            fpp = _eval(field, qpp, domain)
            fpm = _eval(field, qpm, domain)
            fmp = _eval(field, qmp, domain)
            fmm = _eval(field, qmm, domain)
            val = (fpp - fpm - fmp + fmm) / (4.0 * hstep(r) * hstep(s))
            hess[..., r, s] = val
            hess[..., s, r] = val

    return f0, grad, hess


def _shift(q: Point, r: int, s: float) -> Point:
    g, im = divmod(r, 2)
    q = q.copy()
    q[g] += (1j * s if im else s)
    return q


def _combine(f0, grad, hess, m: int) -> tuple:
    """Assemble Wirtinger jets from real-coordinate gradient and Hessian."""
    ix = np.arange(m) * 2
    iy = ix + 1
    gx = grad[..., ix]
    gy = grad[..., iy]
    d = 0.5 * (gx - 1j * gy)
    dbar = 0.5 * (gx + 1j * gy)

    hxx = hess[..., ix[:, None], ix[None, :]]
    hyy = hess[..., iy[:, None], iy[None, :]]
    hxy = hess[..., ix[:, None], iy[None, :]]
    hyx = hess[..., iy[:, None], ix[None, :]]
    ddbar = 0.25 * ((hxx + hyy) + 1j * (hxy - hyx))
    dd = 0.25 * ((hxx - hyy) - 1j * (hxy + hyx))
    return f0, d, dbar, dd, ddbar


def array_jet2(field: Callable[[Point], np.ndarray], p, cfg: FdConfig,
               domain: Optional[Callable[[Point], bool]] = None) -> Jet2:
    """Second-order Wirtinger jet of an array-valued chart field.

    Error is O(step^2), or O(step^4) with `cfg.richardson`; in the latter
    case `err_estimate` bounds the leading error of the extrapolated jet.
    """
    p = as_point(p)
    m = p.size
    if domain is not None:
        _check_margin(p, cfg, domain)

    h = _steps(p, cfg.step)
    coarse = _combine(*_jet_single(field, p, h, domain), m)
    if not cfg.richardson:
        return Jet2(*coarse)

    fine = _combine(*_jet_single(field, p, 0.5 * h, domain), m)
    parts = []
    err = 0.0
    for c, f in zip(coarse, fine):
        r = (4.0 * f - c) / 3.0
        parts.append(r)
        err = max(err, float(np.max(np.abs(f - r))) if np.size(r) else 0.0)
    return Jet2(*parts, err_estimate=err)


def wirtinger_jet2(field: Callable[[Point], complex], p, cfg: FdConfig,
                   domain: Optional[Callable[[Point], bool]] = None) -> ScalarJet2:
    """Second-order Wirtinger jet of a scalar chart field."""
    jet = array_jet2(lambda q: np.asarray(field(q), dtype=complex), p, cfg, domain)
    if np.shape(jet.value) != ():
        raise InvalidArgument("wirtinger_jet2 expects a scalar-valued field")
    return jet


#: Cauchy-Riemann residual above which a map is rejected as non-holomorphic.
#: FD truncation on dbar of a holomorphic field is O(step^2) with an O(1)
#: constant, so the gate sits three orders above the default step^2.
CR_TOL_FACTOR = 1e3


def holomorphic_jets(mapfield, p, cfg: FdConfig) -> tuple:
    """Values, Jacobian and second derivatives of a holomorphic map.

    Returns ``(f, jac, jet2)`` with ``jac[i, a] = df^i/dz^a`` and
    ``jet2[i, a, b] = d^2 f^i / dz^a dz^b`` (symmetric in ``(a, b)``).
    Closed-form jets supplied by the map are returned verbatim;
    otherwise finite differences are used and the Cauchy-Riemann
    residual is checked.
    """
    p = as_point(p)
    if p.size != mapfield.dim_in:
        raise InvalidArgument(
            f"point has {p.size} coordinates, map expects {mapfield.dim_in}")
    if mapfield.jet1 is not None and mapfield.jet2 is not None:
        if not mapfield.domain(p):
            raise DomainViolation(f"point {p} outside map domain")
        f = np.asarray(mapfield.eval(p), dtype=complex)
        jac = np.asarray(mapfield.jet1(p), dtype=complex)
        jet2 = np.asarray(mapfield.jet2(p), dtype=complex)
        if not (np.all(np.isfinite(f)) and np.all(np.isfinite(jac)) and np.all(np.isfinite(jet2))):
            raise NonFinite(f"closed-form jets at {p} are non-finite")
        return f, jac, jet2

    jet = array_jet2(lambda q: np.asarray(mapfield.eval(q), dtype=complex),
                     p, cfg, mapfield.domain)
    scale = max(1.0, float(np.max(np.abs(jet.d))))
    cr = float(np.max(np.abs(jet.dbar)))
    if cr > CR_TOL_FACTOR * cfg.step ** 2 * scale:
        raise HolomorphyViolation(
            f"Cauchy-Riemann residual {cr:.3e} at {p}; input map is not holomorphic")
    return jet.value, jet.d, jet.dd
