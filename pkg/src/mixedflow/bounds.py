"""Pointwise and pairwise checks of the structural inequalities.

Every ``check_*`` function returns a :class:`CheckReport`; violations are data,
not exceptions. An inequality ``lhs <= rhs`` is scored by the relative margin
``(rhs - lhs) / max(|lhs|, |rhs|)`` (0 when both sides vanish) and counted as
violated when that margin is below ``-slack``.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .conductivity import Interpolated, Piecewise, eval_K_star, perturbation_constants
from .errors import DomainError, ShapeError

SLACK = 1e-12
MAX_WITNESSES = 10


@dataclass
class CheckReport:
    name: str
    n_points: int
    n_violations: int
    worst_margin: float
    witnesses: list = field(default_factory=list)
    slack: float = SLACK

    @property
    def passed(self):
        return self.n_violations == 0

    def to_line(self):
        tag = "PASS" if self.passed else "FAIL"
        return (
            f"{tag} {self.name} points={self.n_points} violations={self.n_violations} "
            f"worst_margin={self.worst_margin:.17g}"
        )

    def to_record(self):
        return {
            "name": self.name,
            "passed": self.passed,
            "n_points": self.n_points,
            "n_violations": self.n_violations,
            "worst_margin": self.worst_margin,
            "slack": self.slack,
            "witnesses": self.witnesses,
        }


def reports_to_text(reports):
    return "\n".join(r.to_line() for r in reports) + "\n"


def reports_to_jsonl(reports):
    return "".join(json.dumps(r.to_record(), sort_keys=True) + "\n" for r in reports)


def _witness(x):
    x = np.asarray(x)
    return x.tolist() if x.ndim else float(x)


def _score(name, pieces, slack=SLACK):
    """Merge ``(lhs, rhs, inputs)`` triples, each meaning ``lhs <= rhs``."""
    margins, inputs = [], []
    for lhs, rhs, inp in pieces:
        lhs = np.asarray(lhs, dtype=float).ravel()
        rhs = np.asarray(rhs, dtype=float).ravel()
        scale = np.maximum(np.abs(lhs), np.abs(rhs))
        m = np.where(scale > 0, (rhs - lhs) / np.where(scale > 0, scale, 1.0), 0.0)
        m = np.where(np.isnan(m), -np.inf, m)
        margins.append(m)
        inputs.append(np.asarray(inp).reshape(m.size, -1))
    m = np.concatenate(margins) if margins else np.zeros(0)
    bad = np.flatnonzero(m < -slack)
    wit = []
    if bad.size:
        allin = np.concatenate([i.reshape(i.shape[0], -1) for i in inputs if i.size] or [np.zeros((0, 1))], axis=0)
        order = bad[np.argsort(m[bad])][:MAX_WITNESSES]
        wit = [_witness(allin[i].squeeze()) for i in order]
    worst = float(m.min()) if m.size else 0.0
    return CheckReport(name, int(m.size), int(bad.size), worst, wit, slack)


def log_grid(lo=1e-8, hi=1e8, n=200):
    return np.logspace(np.log10(lo), np.log10(hi), n)


def _name(check, model):
    return f"{check}[{getattr(model, 'kind_name', type(model).__name__.lower())}]"


def _off_kinks(model, xi):
    xi = np.asarray(xi, dtype=float)
    if isinstance(model, Piecewise):
        xi = xi[(xi != model.Z1) & (xi != model.Z2)]
    return xi


# --------------------------------------------------------------------------
# single-variable inequalities
# --------------------------------------------------------------------------


def check_sandwich(model, xi_grid, constants=None):
    """``d2 K* <= K <= d3 K*`` at each grid point."""
    xi = np.asarray(xi_grid, dtype=float)
    if xi.size == 0 or np.any(xi < 0):
        raise DomainError("grid must be nonempty and nonnegative")
    sc = constants or model.sandwich_constants()
    k, ks = model.K(xi), eval_K_star(model, xi)
    return _score(_name("sandwich", model), [(sc.d2 * ks, k, xi), (k, sc.d3 * ks, xi)])


def check_K_bounded(model, xi_grid):
    """``K <= d4``."""
    xi = np.asarray(xi_grid, dtype=float)
    d4 = model.sandwich_constants().d4
    return _score(_name("K_le_d4", model), [(model.K(xi), np.full_like(xi, d4), xi)])


def check_derivative_bounds(model, xi_grid):
    """``-b2 K/xi <= K' <= b1 K/xi``; Piecewise kinks are skipped."""
    xi = _off_kinks(model, xi_grid)
    if np.any(xi <= 0):
        raise DomainError("derivative bounds are checked for xi > 0")
    k = model.K(xi)
    kp = model.K_prime(xi)
    return _score(
        _name("derivative_bounds", model),
        [(-model.beta2 * k / xi, kp, xi), (kp, model.beta1 * k / xi, xi)],
    )


def check_derivative_consistency(model, xi_grid, rtol=1e-6, step=1e-4):
    """Analytic K' against a central difference with step ``step * xi``.

    The error is measured against ``max(|K'|, K/xi)``, the natural size of
    K' (it vanishes where K peaks, so a purely relative test is ill-posed).
    Points whose stencil straddles a kink are skipped.
    """
    xi = _off_kinks(model, xi_grid)
    h = step * xi
    if isinstance(model, Piecewise):
        keep = np.ones(xi.shape, bool)
        for z in model.breakpoints():
            keep &= np.abs(xi - z) > h
        xi, h = xi[keep], h[keep]
    kp = model.K_prime(xi)
    fd = (model.K(xi + h) - model.K(xi - h)) / (2.0 * h)
    scale = np.maximum(np.abs(kp), model.K(xi) / xi)
    err = np.abs(fd - kp) / scale
    return _score(_name("K_prime_vs_fd", model), [(err, np.full_like(err, rtol), xi)], slack=0.0)


def check_increasing(model, xi_grid, m):
    """``xi^m K(xi)`` nondecreasing along the sorted grid."""
    xi = np.sort(np.asarray(xi_grid, dtype=float))
    v = xi**m * model.K(xi)
    return _score(_name(f"xi^{m:g}K_increasing", model), [(v[:-1], v[1:], xi[1:])])


def check_power_bounds(model, xi_grid, m, delta):
    """``d2 (d/(1+d))^(b1+b2) (xi^(m-b2) - d^(m-b2)) <= K xi^m <= d3 xi^(m-b2)``."""
    if m < model.beta2 or delta <= 0:
        raise DomainError("need m >= beta2 and delta > 0")
    xi = np.asarray(xi_grid, dtype=float)
    sc = model.sandwich_constants()
    b1, b2 = model.beta1, model.beta2
    kx = model.K(xi) * xi**m
    low = sc.d2 * (delta / (1 + delta)) ** (b1 + b2) * (xi ** (m - b2) - delta ** (m - b2))
    return _score(
        _name(f"power_bounds_m{m:g}_delta{delta:g}", model),
        [(low, kx, xi), (kx, sc.d3 * xi ** (m - b2), xi)],
    )


def check_H_bounds(model, xi_grid, delta):
    """Both two-sided comparisons of ``H`` with ``K xi^2`` and ``xi^(2-b2)``."""
    if delta <= 0:
        raise DomainError("delta must be positive")
    xi = np.asarray(xi_grid, dtype=float)
    sc = model.sandwich_constants()
    b1, b2 = model.beta1, model.beta2
    H = model.H(xi)
    kx2 = model.K(xi) * xi**2
    low1 = sc.d2 / sc.d3 * kx2 - sc.d2 * sc.kstar_at_xic * sc.xi_c**2
    low2 = sc.d2 * (delta / (1 + delta)) ** (b1 + b2) * (xi ** (2 - b2) - delta ** (2 - b2))
    return _score(
        _name(f"H_bounds_delta{delta:g}", model),
        [(low1, H, xi), (H, 2 * kx2, xi), (low2, H, xi), (H, 2 * sc.d3 * xi ** (2 - b2), xi)],
    )


# --------------------------------------------------------------------------
# pairwise inequalities
# --------------------------------------------------------------------------


def _pairs(y, yp):
    y = np.atleast_2d(np.asarray(y, dtype=float))
    yp = np.atleast_2d(np.asarray(yp, dtype=float))
    if y.shape != yp.shape or y.shape[1] not in (1, 2, 3):
        raise ShapeError(f"pairs must be matching (m, n) arrays with n in 1..3, got {y.shape} and {yp.shape}")
    return y, yp


def _flux(model, y):
    r = np.linalg.norm(y, axis=1)
    return model.K(r)[:, None] * y, r


def check_monotonicity(model, y, yp, d5=None):
    """``(K(|y'|)y' - K(|y|)y).(y'-y) >= d5 |y-y'|^(2+b1) / (1+|y|+|y'|)^(b1+b2)``."""
    y, yp = _pairs(y, yp)
    d5 = model.sandwich_constants().d5 if d5 is None else d5
    b1, b2 = model.beta1, model.beta2
    fy, r = _flux(model, y)
    fyp, rp = _flux(model, yp)
    dy = yp - y
    lhs = np.einsum("ij,ij->i", fyp - fy, dy)
    rhs = d5 * np.linalg.norm(dy, axis=1) ** (2 + b1) / (1 + r + rp) ** (b1 + b2)
    return _score(_name("monotonicity", model), [(rhs, lhs, np.hstack([y, yp]))])


def check_perturbed_monotonicity(profile, a1, a2, y, yp):
    """Monotonicity between two Interpolated laws sharing ``profile``."""
    y, yp = _pairs(y, yp)
    d6, d7 = perturbation_constants(a1, a2, profile)
    m1, m2 = Interpolated(profile, a1), Interpolated(profile, a2)
    mlo = Interpolated(profile, a1.minimum(a2))
    b1, b2 = profile.beta1, profile.beta2
    r, rp = np.linalg.norm(y, axis=1), np.linalg.norm(yp, axis=1)
    dy = yp - y
    ndy = np.linalg.norm(dy, axis=1)
    lhs = np.einsum("ij,ij->i", m1.K(rp)[:, None] * yp - m2.K(r)[:, None] * y, dy)
    big = np.maximum(r, rp)
    rhs = d6 * ndy ** (2 + b1) / (1 + r + rp) ** (b1 + b2) - d7 * mlo.K(big) * big * a1.distance(a2) * ndy
    return _score("perturbed_monotonicity[interpolated]", [(rhs, lhs, np.hstack([y, yp]))])


def random_pairs(rng, count, dim=2, box=10.0):
    y = rng.uniform(-box, box, size=(count, dim))
    yp = rng.uniform(-box, box, size=(count, dim))
    return y, yp


def adversarial_pairs(rng, count, dim=2, box=10.0):
    """Half collinear through the origin, half nearly equal."""
    k = count // 2
    y1 = rng.uniform(-box, box, size=(k, dim))
    yp1 = -rng.uniform(0.0, 2.0, size=(k, 1)) * y1
    y2 = rng.uniform(-box, box, size=(count - k, dim))
    yp2 = y2 + 10.0 ** rng.uniform(-8, -2, size=(count - k, 1)) * rng.standard_normal((count - k, dim))
    return np.vstack([y1, y2]), np.vstack([yp1, yp2])


# --------------------------------------------------------------------------
# envelope / ODE comparison / degree condition
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Envelope:
    times: np.ndarray
    values: np.ndarray


def envelope(times, values):
    """Running maximum, the least nondecreasing majorant on the samples."""
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    if t.shape != v.shape or t.ndim != 1:
        raise ShapeError("times and values must be 1-D arrays of equal length")
    if np.any(np.diff(t) <= 0):
        raise ShapeError("times must be strictly increasing")
    return Envelope(t, np.maximum.accumulate(v) if v.size else v)


def ode_comparison_bound(y0, theta, h_series, f_series):
    """``y0 + Env(f/h)^(1/theta)`` along the samples."""
    h = np.asarray(h_series, dtype=float)
    f = np.asarray(f_series, dtype=float)
    if theta <= 0:
        raise DomainError("theta must be positive")
    if np.any(h <= 0):
        raise DomainError("h must be positive")
    ratio = np.broadcast_to(f / h, np.broadcast_shapes(h.shape, f.shape))
    env = np.maximum.accumulate(np.maximum(ratio, 0.0))
    return y0 + env ** (1.0 / theta)


def degree_condition(profile, n):
    """``beta2 <= 4 / (n + 2)``."""
    if n not in (1, 2, 3):
        raise DomainError("spatial dimension must be 1, 2 or 3")
    return bool(profile.beta2 <= 4.0 / (n + 2))


# --------------------------------------------------------------------------
# full suite
# --------------------------------------------------------------------------


def verification_suite(model, seed=0, n_grid=200, n_pairs=100_000, n_adversarial=1000, d5_scale=1.0, second=None):
    """All single-model checks; perturbed monotonicity when ``second`` coefficients are given."""
    rng = np.random.default_rng(seed)
    grid = log_grid(n=n_grid)
    reports = [
        check_sandwich(model, np.concatenate([[0.0], grid])),
        check_K_bounded(model, grid),
        check_derivative_bounds(model, grid),
        check_derivative_consistency(model, grid),
    ]
    for m in sorted({model.beta2, 1.0, 2.0}):
        reports.append(check_increasing(model, grid, m))
    for delta in (0.1, 1.0):
        reports.append(check_power_bounds(model, grid, 2.0, delta))
        reports.append(check_H_bounds(model, np.concatenate([[0.0], grid]), delta))
    d5 = model.sandwich_constants().d5 * d5_scale
    y, yp = random_pairs(rng, n_pairs)
    ya, ypa = adversarial_pairs(rng, n_adversarial)
    reports.append(check_monotonicity(model, np.vstack([y, ya]), np.vstack([yp, ypa]), d5=d5))
    if second is not None:
        if not isinstance(model, Interpolated):
            raise DomainError("perturbed monotonicity needs an Interpolated model")
        y, yp = random_pairs(rng, min(n_pairs, 10_000))
        reports.append(check_perturbed_monotonicity(model.profile, model.coeffs, second, y, yp))
    return reports
