"""Scenario runners that turn the long-time estimates into assertable checks.

Each runner returns a report carrying the measured quantities and a list of
named assertions. Sweeps over a ladder of perturbation sizes run their
ladder points as independent jobs (``workers`` processes; 1 runs inline).
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .bounds import envelope
from .conductivity import CoefficientVector, Interpolated
from .errors import DomainError
from .solver import (
    BoundaryProfile,
    PressureField,
    SolverConfig,
    Term,
    discrete_norm,
    fmt,
    gradient_integral,
    pbar,
    solve_ibvp,
)

EPS_FLOOR = 1e2 * np.finfo(float).eps


@dataclass
class Assertion:
    label: str
    passed: bool
    detail: str = ""

    def line(self):
        return f"{'PASS' if self.passed else 'FAIL'} {self.label}" + (f" ({self.detail})" if self.detail else "")


@dataclass
class ScenarioReport:
    name: str
    assertions: list
    values: dict = field(default_factory=dict)
    result: object = None

    @property
    def passed(self):
        return all(a.passed for a in self.assertions)

    def lines(self):
        return [a.line() for a in self.assertions]


# --------------------------------------------------------------------------
# initial data
# --------------------------------------------------------------------------


def sine_field(grid, amplitude=1.0, k=1):
    """``amplitude * prod_d sin(k pi x_d / L_d)``."""
    X = grid.mesh()
    v = np.full(grid.shape, float(amplitude))
    for x, L in zip(X, grid.extents):
        v = v * np.sin(k * math.pi * x / L)
    return v


def triangle_wave(x, teeth):
    """Zero-mean triangle wave in [-1, 1] with ``teeth`` periods on [0, 1]."""
    y = (np.asarray(x) * teeth) % 1.0
    return 1.0 - 2.0 * np.abs(2.0 * y - 1.0)


def make_initial(kind, grid, profile, params=None):
    params = dict(params or {})
    if kind == "sine":
        return PressureField(grid, sine_field(grid, params.pop("amplitude", 1.0), params.pop("k", 1)))
    if kind == "profile":
        return PressureField(grid, profile.value(grid.mesh(), 0.0) + params.pop("offset", 0.0))
    if kind == "constant":
        return PressureField(grid, np.full(grid.shape, float(params.pop("value", 0.0))))
    if kind == "sine_plus_profile":
        base = sine_field(grid, params.pop("amplitude", 1.0), params.pop("k", 1))
        return PressureField(grid, base + profile.value(grid.mesh(), 0.0))
    raise DomainError(f"unknown initial condition {kind!r}")


INITIAL_KINDS = ("sine", "profile", "constant", "sine_plus_profile")


# --------------------------------------------------------------------------
# helpers
# --------------------------------------------------------------------------


def fit_loglog_slope(x, y, floor=EPS_FLOOR):
    """Least-squares slope of ``log y`` against ``log x``; points with ``y <= floor`` are dropped."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    keep = (y > floor) & (x > 0)
    if keep.sum() < 2:
        return math.nan
    return float(np.polyfit(np.log(x[keep]), np.log(y[keep]), 1)[0])


def psi_gradient_integral(profile, grid, t, q):
    X = grid.mesh()
    g = profile.grad(X, t)
    mag = np.sqrt(sum(c**2 for c in g))
    return float(np.sum(mag**q) * grid.cell_volume)


class NormMonitor:
    """Step callback recording whether ``||p||`` ever increased."""

    def __init__(self, rel_slack=1e-14):
        self.rel_slack = rel_slack
        self.steps = 0
        self.increases = 0
        self.worst = -math.inf

    def __call__(self, old, new):
        a = float(np.sqrt(np.sum(old.values**2)))
        b = float(np.sqrt(np.sum(new.values**2)))
        self.steps += 1
        rel = (b - a) / a if a > 0 else (0.0 if b == 0 else math.inf)
        self.worst = max(self.worst, rel)
        if rel > self.rel_slack:
            self.increases += 1


# --------------------------------------------------------------------------
# decay scenarios
# --------------------------------------------------------------------------


def run_energy_decay(
    model, p0, profile, T=20.0, tol=1e-3, config=SolverConfig(output_interval=1.0), monitor=False, snapshots=False
):
    """``||pbar(T)|| <= tol ||pbar(0)||``; with ``monitor`` also every step non-expansive."""
    mon = NormMonitor() if monitor else None
    res = solve_ibvp(p0, profile, model, T, config, callback=mon, snapshots=snapshots)
    l2 = res.series.column("l2_pbar_sq")
    n0, nT = math.sqrt(l2[0]), math.sqrt(l2[-1])
    if n0 == 0.0:
        ok = nT <= 1e-12
        detail = f"||pbar(0)||=0, ||pbar(T)||={nT:.3e}"
    else:
        ok = nT <= tol * n0
        detail = f"ratio={nT / n0:.6e} tol={tol:g}"
    asserts = [Assertion(f"energy_decay T={T:g}", ok, detail)]
    if mon is not None:
        asserts.append(
            Assertion(
                "norm_nonincreasing_every_step",
                mon.increases == 0,
                f"steps={mon.steps} increases={mon.increases} worst_rel_change={mon.worst:.3e}",
            )
        )
    vals = {"ratio": nT / n0 if n0 else 0.0, "norm0": n0, "normT": nT, "steps": res.n_steps}
    if mon is not None:
        vals["increases"] = mon.increases
    return ScenarioReport("energy_decay", asserts, vals, res)


def run_gradient_decay(
    model, p0, profile, T=20.0, tol=None, psi_factor=None, config=SolverConfig(output_interval=1.0), snapshots=False
):
    """``int |grad p(T)|^(2-b2)`` below ``tol`` and/or below ``psi_factor`` times the same for Psi alone."""
    res = solve_ibvp(p0, profile, model, T, config, snapshots=snapshots)
    q = 2.0 - model.beta2
    gT = res.series.column("grad_norm")[-1]
    psiT = psi_gradient_integral(profile, p0.grid, T, q)
    asserts = []
    if tol is not None:
        asserts.append(Assertion(f"gradient_decay T={T:g}", gT < tol, f"grad_norm={gT:.6e} tol={tol:g}"))
    if psi_factor is not None:
        asserts.append(
            Assertion(
                f"gradient_vs_psi T={T:g}",
                gT < psi_factor * psiT,
                f"grad_norm={gT:.6e} psi_only={psiT:.6e} ratio={gT / psiT if psiT else math.inf:.4g} factor={psi_factor:g}",
            )
        )
    return ScenarioReport("gradient_decay", asserts, {"grad_norm_T": gT, "psi_grad_norm_T": psiT}, res)


def gradient_family(grid, factors=(1.0, 10.0, 100.0), teeth=32, q=1.5):
    """Initial data with equal L2 norm and gradient integral scaled by ``factors``.

    ``sin(pi x) + eta * triangle_wave`` renormalised to the L2 norm of
    ``sin(pi x)``, with ``eta`` solved so the gradient integral hits each
    factor exactly.
    """
    if grid.dim != 1:
        raise DomainError("the gradient family is built on 1-D grids")
    x = grid.centers(0) / grid.extents[0]
    base = np.sin(math.pi * x)
    nb = discrete_norm(base, grid)
    zero = BoundaryProfile.zero()

    def member(eta):
        v = base + eta * triangle_wave(x, teeth)
        return v * nb / discrete_norm(v, grid)

    def gn(v):
        return gradient_integral(PressureField(grid, v), zero, q)

    g0 = gn(base)
    out = []
    for fac in factors:
        if fac == 1.0:
            out.append(base.copy())
            continue
        hi = 1.0
        while gn(member(hi)) / g0 < fac:
            hi *= 2.0
            if hi > 1e6:
                raise DomainError(f"factor {fac:g} not reachable with {teeth} teeth on this grid")
        eta = brentq(lambda e: gn(member(e)) / g0 - fac, 0.0, hi, xtol=1e-14)
        out.append(member(eta))
    return out


def run_uniform_gronwall(
    model, grid, profile=None, factors=(1.0, 10.0, 100.0), t_eval=2.0, teeth=32, max_ratio=2.0,
    config=SolverConfig("implicit", dt=2e-3, output_interval=0.5),
):
    """Gradient integrals at ``t_eval`` agree within ``max_ratio`` across the family."""
    profile = profile or BoundaryProfile.zero()
    q = 2.0 - model.beta2
    init, final = [], []
    for v in gradient_family(grid, factors, teeth, q):
        p0 = PressureField(grid, v + profile.value(grid.mesh(), 0.0))
        init.append(gradient_integral(p0, profile, q))
        res = solve_ibvp(p0, profile, model, t_eval, config)
        final.append(res.series.column("grad_norm")[-1])
    ratio = max(final) / min(final)
    a = Assertion(
        f"uniform_gronwall t={t_eval:g}",
        ratio <= max_ratio,
        f"initial={[float(f'{v:.4g}') for v in init]} final={[float(f'{v:.4g}') for v in final]} ratio={ratio:.4f}",
    )
    return ScenarioReport("uniform_gronwall", [a], {"initial": init, "final": final, "ratio": ratio})


# --------------------------------------------------------------------------
# dependence sweeps
# --------------------------------------------------------------------------


@dataclass
class DependenceReport:
    name: str
    ladder: list
    response: list
    functional: list
    bound_exponent: float
    slope: float
    assertions: list
    zero_response: float = 0.0

    @property
    def passed(self):
        return all(a.passed for a in self.assertions)

    def lines(self):
        return [a.line() for a in self.assertions]

    def to_csv(self):
        rows = ["ladder,response,functional,bound_side"]
        for e, r, d in zip(self.ladder, self.response, self.functional):
            rows.append(",".join(fmt(v) for v in (e, r, d, d**self.bound_exponent)))
        return "\n".join(rows) + "\n"


def _map(fn, jobs, workers):
    if workers <= 1:
        return [fn(*j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, *zip(*jobs)))


def _pbar_history(model, p0, profile, T, config):
    res = solve_ibvp(p0, profile, model, T, config, snapshots=True)
    return [(s.t, pbar(s, profile), s) for s in res.snapshots]


def boundary_difference(profile1, profile2, grid, t, beta1, beta2):
    """``D(t) = ||Phi_t|| + ||grad Phi||_{2-b2} + ||grad Phi||_{2+b1}^{2+b1}`` for ``Phi = Psi1 - Psi2``."""
    X = grid.mesh()
    phit = profile1.dt(X, t) - profile2.dt(X, t)
    g1, g2 = profile1.grad(X, t), profile2.grad(X, t)
    mag = np.sqrt(sum((a - b) ** 2 for a, b in zip(g1, g2)))
    vol = grid.cell_volume
    q = 2.0 - beta2
    r = 2.0 + beta1
    return discrete_norm(phit, grid) + float(np.sum(mag**q) * vol) ** (1.0 / q) + float(np.sum(mag**r) * vol)


def _dependence_job(model, p0, profile, T, config):
    return _pbar_history(model, p0, profile, T, config)


def _assert_ladder(name, ladder, response, functional, exponent, zero_resp):
    slope = fit_loglog_slope(functional, response)
    order = np.argsort(ladder)[::-1]
    resp_sorted = np.asarray(response)[order]
    monotone = bool(np.all(np.diff(resp_sorted) <= 0))
    asserts = [
        Assertion(f"{name}_zero_perturbation", zero_resp == 0.0, f"response={zero_resp:.3e}"),
        Assertion(f"{name}_vanishing_along_ladder", monotone and resp_sorted[-1] < resp_sorted[0],
                  f"responses={[float(f'{v:.4g}') for v in resp_sorted]}"),
        Assertion(f"{name}_slope", bool(slope >= exponent - 0.1), f"slope={slope:.4f} bound={exponent - 0.1:.4f}"),
    ]
    return slope, asserts


def default_bump(width=0.3, center=1.0):
    """Gaussian bump centred on the right wall, so the boundary traces differ."""
    return Term(1.0, "bump", {"center": [center], "width": width})


def run_continuous_dependence(
    model, p0, profile, bump=None, ladder=(1e-1, 1e-2, 1e-3, 1e-4), T=10.0, t_start=1.0,
    config=SolverConfig("implicit", dt=1e-2, output_interval=0.1), workers=1, swap=False,
):
    """Perturb the boundary data by ``eps * bump``; track ``sup_{[t_start,T]} ||Pbar||^2``.

    ``swap`` exchanges the roles of the two runs (the report must not change).
    """
    bump = bump or default_bump()
    grid = p0.grid
    b1, b2 = model.beta1, model.beta2
    profiles = [profile] + [BoundaryProfile(profile.terms + (Term(e * bump.amplitude, bump.space, bump.space_params, bump.time, bump.time_params),)) for e in ladder]
    zero_prof = BoundaryProfile(profile.terms + (Term(0.0, bump.space, bump.space_params, bump.time, bump.time_params),))
    profiles.append(zero_prof)
    hist = _map(_dependence_job, [(model, p0, pr, T, config) for pr in profiles], workers)
    ref = hist[0]

    def sup_diff(h):
        a, b = (h, ref) if swap else (ref, h)
        return max(
            float(np.sum((x[1] - y[1]) ** 2) * grid.cell_volume)
            for x, y in zip(a, b)
            if x[0] >= t_start - 1e-12
        )

    response = [sup_diff(h) for h in hist[1:-1]]
    zero_resp = sup_diff(hist[-1])
    times = [t for t, _, _ in ref if t >= T / 2 - 1e-12]
    functional = [
        max(boundary_difference(profile, pr, grid, t, b1, b2) for t in times) for pr in profiles[1:-1]
    ]
    exponent = 2.0 / (2.0 + b1)
    slope, asserts = _assert_ladder("continuous_dependence", list(ladder), response, functional, exponent, zero_resp)
    return DependenceReport("continuous_dependence", list(ladder), response, functional, exponent, slope, asserts, zero_resp)


def run_structural_stability(
    model, p0, profile, direction=None, ladder=(1e-1, 1e-2, 1e-3, 1e-4), T=10.0,
    config=SolverConfig("implicit", dt=1e-2, output_interval=0.1), workers=1,
):
    """Perturb the coefficient vector by ``|da| * direction``; track ``sup_{[0,T]} ||P||^2``."""
    if not isinstance(model, Interpolated):
        raise DomainError("structural stability is defined for the Interpolated law")
    a = model.coeffs.as_array()
    d = np.ones_like(a) if direction is None else np.asarray(direction, dtype=float)
    if d.shape != a.shape or not np.any(d):
        raise DomainError("direction must be a nonzero vector matching the coefficients")
    d = d / np.linalg.norm(d)
    models = [model] + [model.with_coefficients(CoefficientVector(tuple(a + s * d))) for s in ladder]
    models.append(model.with_coefficients(CoefficientVector(tuple(a + 0.0 * d))))
    grid = p0.grid
    hist = _map(_dependence_job, [(m, p0, profile, T, config) for m in models], workers)
    ref = hist[0]

    def sup_diff(h):
        return max(float(np.sum((x[2].values - y[2].values) ** 2) * grid.cell_volume) for x, y in zip(ref, h))

    response = [sup_diff(h) for h in hist[1:-1]]
    zero_resp = sup_diff(hist[-1])
    functional = [models[0].coeffs.distance(m.coeffs) for m in models[1:-1]]
    exponent = 2.0 / (2.0 + model.beta1)
    slope, asserts = _assert_ladder("structural_stability", list(ladder), response, functional, exponent, zero_resp)
    return DependenceReport("structural_stability", list(ladder), response, functional, exponent, slope, asserts, zero_resp)


def check_K_decreasing_in_coefficient(model, index, delta, xi_grid):
    """Raising one coefficient lowers K pointwise; returns the largest increase found."""
    a = list(model.coeffs.a)
    a[index] += delta
    other = model.with_coefficients(CoefficientVector(tuple(a)))
    return float(np.max(other.K(xi_grid) - model.K(xi_grid)))


def boundary_growth(profile1, profile2, results1, results2, beta2):
    """``Lambda(t) = 1 + ||grad p1||_{2-b2} + ||grad p2||_{2-b2}`` along paired snapshots."""
    q = 2.0 - beta2
    out = []
    for s1, s2 in zip(results1, results2):
        out.append(1.0 + gradient_integral(s1, profile1, q) ** (1 / q) + gradient_integral(s2, profile2, q) ** (1 / q))
    return np.asarray(out)


def env_series(times, values):
    return envelope(times, values).values
