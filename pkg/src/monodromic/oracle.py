"""Numerical return map, its derivative and eta estimates.

The blown-up system ``rho' = R``, ``phi' = Theta`` is integrated in time (no
division by Theta) until the lifted angle reaches 2 pi. The first variational
equation runs alongside, giving ``Pi'``; the integral ``I = int dF/drho dphi``
is accumulated as ``int (R_rho Theta - R Theta_rho) / Theta dt``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .blowup import PolarExpansion, PolarIIF
from .field import VectorField


class OracleError(RuntimeError):
    pass


@dataclass
class OracleResult:
    rho0: float
    pi_value: float
    pi_prime: float
    I_value: float
    steps: int
    error_estimate: float
    min_angular_speed: float = math.inf
    diagnostics: List[str] = field(default_factory=list)

    @property
    def exp_I(self) -> float:
        return math.exp(self.I_value)


@dataclass
class OracleConfig:
    rtol: float = 1e-12
    atol: float = 1e-14
    method: str = "DOP853"
    rho_max: float = math.inf
    max_time: float = 1e6
    theta_floor: float = 1e-12


class RadialEquation:
    """``drho/dphi = f(rho)`` as the polar system ``rho' = f(rho)``, ``phi' = 1``."""

    def __init__(self, f, df):
        self.f, self.df = f, df

    def as_field(self) -> "RadialEquation":
        return self

    def Theta(self, phi, rho):
        return 1.0

    def full(self, phi, rho):
        return self.f(rho), self.df(rho), 0.0, 1.0, 0.0, 0.0


def integrate_poincare(system, rho0: float, config: Optional[OracleConfig] = None) -> OracleResult:
    """Return map at ``rho0``.

    ``system`` is a :class:`PolarExpansion`, a :class:`RadialEquation` or a
    Cartesian :class:`VectorField` (section ``y = 0``, ``x = rho0``).
    """
    cfg = config or OracleConfig()
    if rho0 <= 0:
        raise OracleError("rho0 must be positive")
    if isinstance(system, (PolarExpansion, RadialEquation)):
        return _integrate_polar(system, rho0, cfg)
    if isinstance(system, VectorField):
        return _integrate_cartesian(system, rho0, cfg)
    raise TypeError(f"unsupported system {type(system).__name__}")


def _integrate_polar(pe, rho0: float, cfg: OracleConfig) -> OracleResult:
    fld = pe.as_field()

    def rhs(t, u):
        rho, phi, a, b, _ = u
        R, Rr, Rp, T, Tr, Tp = fld.full(phi, rho)
        # variational: d(a, b)/dt = Jacobian . (a, b) with a = d rho / d rho0, b = d phi / d rho0
        da = Rr * a + Rp * b
        db = Tr * a + Tp * b
        dI = (Rr * T - R * Tr) / T
        return [R, T, da, db, dI]

    def done(t, u):
        return u[1] - 2 * math.pi

    done.terminal, done.direction = True, 1

    def escape(t, u):
        return cfg.rho_max - u[0]

    escape.terminal = True
    events = [done] + ([escape] if math.isfinite(cfg.rho_max) else [])
    sol = solve_ivp(rhs, (0, cfg.max_time), [rho0, 0.0, 1.0, 0.0, 0.0], method=cfg.method,
                    rtol=cfg.rtol, atol=cfg.atol, events=events, dense_output=False)
    if sol.status != 1 or not len(sol.t_events[0]):
        if len(events) > 1 and len(sol.t_events[1]):
            raise OracleError(f"trajectory left rho <= {cfg.rho_max}: rho0 = {rho0} too large")
        raise OracleError(f"no return to the section ({sol.message})")
    rho, phi, a, b, I = sol.y_events[0][0]
    R, _, _, T, _, _ = fld.full(2 * math.pi, rho)
    # correct for the shift of the crossing time: Pi' = a - (R / Theta) b
    pi_prime = a - R / T * b
    diags = []
    thetas = [fld.Theta(p_, r_) for r_, p_ in zip(sol.y[0], sol.y[1])]
    tmin = float(min(thetas))
    if tmin <= cfg.theta_floor:
        diags.append("angular speed not positive along the orbit: outside the hypotheses of the return-map analysis")
    err = cfg.rtol * (abs(rho) + abs(pi_prime)) * max(1, len(sol.t))
    return OracleResult(rho0, float(rho), float(pi_prime), float(I), len(sol.t), err, tmin, diags)


def _integrate_cartesian(X: VectorField, rho0: float, cfg: OracleConfig) -> OracleResult:
    """Same map computed in the plane; the section is ``y = 0, x = rho0`` (weight p = 1)."""
    P, Q = X.P, X.Q
    Px, Py, Qx, Qy = P.diff(0), P.diff(1), Q.diff(0), Q.diff(1)
    # orientation: sign of the winding at a small circle
    ang = np.linspace(0, 2 * np.pi, 64, endpoint=False)
    r_s = rho0
    w = [math.cos(t) * Q(r_s * math.cos(t), r_s * math.sin(t)) - math.sin(t) * P(r_s * math.cos(t), r_s * math.sin(t))
         for t in ang]
    sgn = 1.0 if np.mean(w) > 0 else -1.0

    def rhs(t, u):
        x, y, psi, a11, a12, a21, a22 = u
        f, g = sgn * P(x, y), sgn * Q(x, y)
        r2 = x * x + y * y
        dpsi = (x * g - y * f) / r2
        j11, j12, j21, j22 = sgn * Px(x, y), sgn * Py(x, y), sgn * Qx(x, y), sgn * Qy(x, y)
        return [f, g, dpsi,
                j11 * a11 + j12 * a21, j11 * a12 + j12 * a22,
                j21 * a11 + j22 * a21, j21 * a12 + j22 * a22]

    def done(t, u):
        return u[2] - 2 * math.pi

    done.terminal, done.direction = True, 1
    sol = solve_ivp(rhs, (0, cfg.max_time), [rho0, 0.0, 0.0, 1, 0, 0, 1], method=cfg.method,
                    rtol=cfg.rtol, atol=cfg.atol, events=[done])
    if not len(sol.t_events[0]):
        raise OracleError(f"no return to the section ({sol.message})")
    x, y, _, a11, _, a21, _ = sol.y_events[0][0]
    f, g = sgn * P(x, y), sgn * Q(x, y)
    # d x_return / d x0 = a11 - (f / g) a21 (section y = 0)
    pi_prime = a11 - f / g * a21
    return OracleResult(rho0, float(x), float(pi_prime), float("nan"), len(sol.t),
                        cfg.rtol * max(1, len(sol.t)) * abs(x))


# ---------------------------------------------------------------------------
# derived quantities
# ---------------------------------------------------------------------------


@dataclass
class EtaEstimate:
    m: int
    value: float
    error: float
    residual: float
    quantity: str
    samples: List[float]
    model_ok: bool = True


DEFAULT_ETA_SAMPLES = tuple(np.geomspace(0.002, 0.05, 12))


def estimate_eta(system, m: int, samples: Sequence[float] = DEFAULT_ETA_SAMPLES, degree: int = 6,
                 config: Optional[OracleConfig] = None, residual_tol: float = 1e-6) -> EtaEstimate:
    """Least-squares intercept of ``log(Pi/rho)`` (m = 1) or ``(Pi - rho)/rho^m`` (m > 1).

    The error combines the fit residual with the change of intercept when the
    polynomial degree drops by one. ``model_ok`` is False when the residual is
    large, which usually means ``m`` is wrong.
    """
    rho = np.asarray(samples, dtype=float)
    if rho.max() / rho.min() < 10:
        raise ValueError("samples should span at least one decade")
    pis = np.array([integrate_poincare(system, float(r), config).pi_value for r in rho])
    if m == 1:
        yv = np.log(pis / rho)
        quantity = "log eta_1"
    else:
        yv = (pis - rho) / rho**m
        quantity = f"eta_{m}"

    def fit(deg):
        coef, *_ = np.linalg.lstsq(np.vander(rho, deg + 1, increasing=True), yv, rcond=None)
        resid = float(np.max(np.abs(np.vander(rho, deg + 1, increasing=True) @ coef - yv)))
        return coef, resid

    coef, resid = fit(degree)
    coef_lo, _ = fit(degree - 1)
    err = abs(coef[0] - coef_lo[0]) + resid
    ok = resid <= residual_tol * max(1.0, float(np.max(np.abs(yv))))
    return EtaEstimate(m, float(coef[0]), float(err), resid, quantity, list(map(float, rho)), ok)


def verify_fundamental(iif: PolarIIF, res: OracleResult) -> float:
    """Relative defect of ``V0(Pi) = V0(rho0) Pi'`` with the exact section function."""
    if iif.v0_exact is None:
        raise OracleError("no section function")
    v = iif.v0_exact
    lhs, rhs = v(res.pi_value), v(res.rho0) * res.pi_prime
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs))


def finite_difference_derivative(system, rho0: float, h: Optional[float] = None,
                                 config: Optional[OracleConfig] = None) -> float:
    h = h or 1e-4 * rho0
    up = integrate_poincare(system, rho0 + h, config).pi_value
    dn = integrate_poincare(system, rho0 - h, config).pi_value
    return (up - dn) / (2 * h)


def closed_form_focus_cycle(rho, lam: float = 1.0, eta1: Optional[float] = None):
    """Return map of the limit-cycle family (valid for ``lam > 0``)."""
    eta1 = math.exp(-2 * math.pi) if eta1 is None else eta1
    rho = np.asarray(rho, dtype=float)
    d = rho**2 - lam
    root = np.sqrt(d**2 + 4 * rho**2 * lam * eta1**2)
    # inside the cycle d + root cancels; use the conjugate form there
    with np.errstate(divide="ignore", invalid="ignore"):
        inner = 2 * rho * lam * eta1 / (root - d)
        outer = (d + root) / (2 * rho * eta1)
    return np.where(d < 0, inner, outer)
