"""
Threefold two-phase homogeneous profile.

On ``[0, 2pi/3]`` the profile is positive on ``[0, theta0]`` and negative on
``[theta0, 2pi/3]``; the five unknowns ``(C+, D+, C-, D-, theta0)`` solve the
matching system

    f1(0) = 0, f1(theta0) = 0, f1'(theta0) = f2'(theta0), f2(theta0) = 0, f2(2pi/3) = 0

with ``f1 = C+ sin(2t + D+) + f0/4`` and ``f2 = C- sin(2t + D-) - g0/4``. A
profile exists iff ``-g0/f0 >= 7 + 4 sqrt(3)``.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, Optional, Tuple

import numpy as np
from scipy.optimize import root

from ..config import get_settings
from ..exceptions import NoProfileError
from .solutions import THREEFOLD, HomogeneousSolution2D, SolutionKind, _check_coefficients

logger = logging.getLogger(__name__)

EXISTENCE_RATIO = 7.0 + 4.0 * math.sqrt(3.0)
N_STARTS = 16
IDENTITY_TOL = 1e-10
JUNCTION_TOL = 1e-8
_SIGN_SAMPLES = 256


def amplitudes(f0: float, g0: float) -> Tuple[float, float]:
    """Constant parts ``(gamma, mu) = (f0/4, -g0/4)`` from ``w'' + 4w = rhs``."""
    return 0.25 * f0, -0.25 * g0


def matching_residuals(x: np.ndarray, gamma: float, mu: float) -> np.ndarray:
    c_p, d_p, c_m, d_m, t0 = x
    return np.array([
        c_p * math.sin(d_p) + gamma,
        c_p * math.sin(2 * t0 + d_p) + gamma,
        2 * c_p * math.cos(2 * t0 + d_p) - 2 * c_m * math.cos(2 * t0 + d_m),
        c_m * math.sin(2 * t0 + d_m) + mu,
        c_m * math.sin(2 * THREEFOLD + d_m) + mu,
    ])


def wrap_angle(angle: float) -> float:
    """Map to ``(-pi, pi]``."""
    return math.pi - (math.pi - angle) % (2 * math.pi)


def _normalize(x: np.ndarray) -> np.ndarray:
    c_p, d_p, c_m, d_m, t0 = (float(v) for v in x)
    if c_p < 0:
        c_p, d_p = -c_p, d_p + math.pi
    if c_m < 0:
        c_m, d_m = -c_m, d_m + math.pi
    return np.array([c_p, wrap_angle(d_p), c_m, wrap_angle(d_m), t0])


def _seed(d_plus: float, gamma: float, mu: float) -> Optional[np.ndarray]:
    s = math.sin(d_plus)
    if s >= 0:
        return None
    c_p = -gamma / s
    t0 = 0.5 * math.pi + math.asin(min(gamma / c_p, 1.0))
    c_m = math.hypot(mu, c_p * math.sin(t0))
    d_m = -t0 - THREEFOLD - 0.5 * math.pi
    return np.array([c_p, d_plus, c_m, d_m, t0])


def profile_checks(x: np.ndarray, gamma: float, mu: float) -> Dict[str, float]:
    """Identity residuals and junction defects of a normalized parameter vector."""
    c_p, d_p, c_m, d_m, t0 = x
    f1 = lambda t: c_p * math.sin(2 * t + d_p) + gamma
    f2 = lambda t: c_m * math.sin(2 * t + d_m) + mu
    df1 = lambda t: 2 * c_p * math.cos(2 * t + d_p)
    df2 = lambda t: 2 * c_m * math.cos(2 * t + d_m)
    ratio = gamma / c_p if c_p > 0 else math.inf
    theta_rel = 0.5 * math.pi + math.asin(ratio) if abs(ratio) <= 1 else math.nan
    return {
        "identity_squares": abs(c_p ** 2 - c_m ** 2 - (gamma ** 2 - mu ** 2)) / (c_p ** 2 + c_m ** 2),
        "identity_zero": abs(c_p * math.sin(d_p) + gamma),
        "identity_theta0": abs(t0 - theta_rel) if not math.isnan(theta_rel) else math.inf,
        "junction_theta0": max(abs(f1(t0)), abs(f2(t0)), abs(df1(t0) - df2(t0))),
        "junction_wrap": max(abs(f1(0.0)), abs(f2(THREEFOLD)), abs(df2(THREEFOLD) - df1(0.0))),
    }


def _signs_hold(x: np.ndarray, gamma: float, mu: float) -> bool:
    c_p, d_p, c_m, d_m, t0 = x
    pos = np.linspace(0.0, t0, _SIGN_SAMPLES + 2)[1:-1]
    neg = np.linspace(t0, THREEFOLD, _SIGN_SAMPLES + 2)[1:-1]
    return bool(
        np.all(c_p * np.sin(2 * pos + d_p) + gamma > 0)
        and np.all(c_m * np.sin(2 * neg + d_m) + mu < 0)
    )


def verify(x: np.ndarray, gamma: float, mu: float) -> Tuple[bool, Dict[str, float]]:
    if not np.all(np.isfinite(x)):
        return False, {}
    c_p, _, c_m, _, t0 = x
    if not (0 < t0 < THREEFOLD and c_p > 0 and c_m > 0):
        return False, {}
    checks = profile_checks(x, gamma, mu)
    ok = (
        checks["identity_squares"] <= IDENTITY_TOL
        and checks["identity_zero"] <= IDENTITY_TOL
        and checks["identity_theta0"] <= IDENTITY_TOL
        and checks["junction_theta0"] <= JUNCTION_TOL
        and checks["junction_wrap"] <= JUNCTION_TOL
        and _signs_hold(x, gamma, mu)
    )
    return ok, checks


def start_angles(n: int = N_STARTS) -> np.ndarray:
    """``n`` equispaced values of D+ in ``(-pi, pi]``."""
    return -math.pi + 2 * math.pi * np.arange(1, n + 1) / n


def blank_profile(f0: float, g0: float, threads: Optional[int] = None) -> HomogeneousSolution2D:
    """
    Solve the matching system by multistart root-finding over D+.

    The first start (in start order) whose root passes every sign, identity
    and junction check is returned; :class:`NoProfileError` otherwise.
    """
    _check_coefficients(f0, g0)
    gamma, mu = amplitudes(f0, g0)
    threads = threads or get_settings().threads

    def attempt(d_plus: float) -> Optional[Tuple[np.ndarray, Dict[str, float]]]:
        x0 = _seed(d_plus, gamma, mu)
        if x0 is None:
            return None
        result = root(matching_residuals, x0, args=(gamma, mu), method="hybr", options={"xtol": 1e-14})
        x = _normalize(result.x)
        ok, checks = verify(x, gamma, mu)
        logger.debug("start D+=%.4f: success=%s verified=%s", d_plus, result.success, ok)
        return (x, checks) if ok else None

    starts = start_angles()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(attempt, starts))
    else:
        outcomes = [attempt(d) for d in starts]

    for outcome in outcomes:
        if outcome is None:
            continue
        x, checks = outcome
        c_p, d_p, c_m, d_m, t0 = (float(v) for v in x)
        logger.info("two-phase profile: theta0=%.10f, C+=%.10g, C-=%.10g", t0, c_p, c_m)
        return HomogeneousSolution2D(
            SolutionKind.BLANK, float(f0), float(g0),
            C_plus=c_p, D_plus=d_p, C_minus=c_m, D_minus=d_m,
            gamma=gamma, mu=mu, theta0=t0, checks=checks,
        )

    message = f"no Blank profile found for (f0, g0) = ({f0}, {g0})"
    if -g0 / f0 < EXISTENCE_RATIO:
        message += f"; -g0/f0 = {-g0 / f0:.6g} is below the existence threshold {EXISTENCE_RATIO:.6g}"
    raise NoProfileError(message)
