"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v``; the lines are repeated in
the terminal summary. Runs are driven by the bundled presets where one
exists, so the inputs are reproducible by file.
"""

import math
import time

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from mixedflow import bounds
from mixedflow.conductivity import (
    CoefficientVector,
    ExponentProfile,
    Interpolated,
    canonical_interpolated,
    canonical_models,
    canonical_multiplicative,
    canonical_piecewise,
    canonical_rational,
)
from mixedflow.config import load_config
from mixedflow.experiments import (
    make_initial,
    run_continuous_dependence,
    run_energy_decay,
    run_gradient_decay,
    run_structural_stability,
    run_uniform_gronwall,
)
from mixedflow.solver import (
    BoundaryProfile,
    Grid,
    PressureField,
    SolverConfig,
    Term,
    admissible_dt,
    solve_ibvp,
    step_explicit,
    step_implicit,
)

ACCEPTANCE_LINES = []
GRID = bounds.log_grid(1e-8, 1e8, 200)


def report(number, title, passed, detail):
    line = f"{'PASS' if passed else 'FAIL'} criterion {number:>2}: {title} ({detail})"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def _tag(flag):
    return "pass" if flag else "fail"


def random_interpolated(rng):
    alpha = float(rng.choice([0.2, 0.5, 0.8]))
    top = float(rng.choice([0.5, 1.0, 2.0]))
    n = int(rng.integers(1, 4))
    exps = tuple(sorted(rng.uniform(0.05, top, n - 1))) + (top,)
    coefs = tuple(10.0 ** rng.uniform(-2, 2, n + 2))
    return Interpolated(ExponentProfile(alpha, exps), CoefficientVector(coefs))


def model_set(rng, n_random=20):
    return [random_interpolated(rng) for _ in range(n_random)] + [
        canonical_piecewise(),
        canonical_rational(),
        canonical_multiplicative(),
    ]


# ---------------------------------------------------------------- 1


def test_criterion_01_sandwich():
    t0 = time.perf_counter()
    models = model_set(np.random.default_rng(101))
    reps = [bounds.check_sandwich(m, np.concatenate([[0.0], GRID])) for m in models]
    elapsed = time.perf_counter() - t0
    viol = sum(r.n_violations for r in reps)
    ok = viol == 0 and elapsed < 5.0
    assert report(1, "sandwich d2 K* <= K <= d3 K*", ok, f"models={len(models)} violations={viol} runtime={elapsed:.2f}s")


# ---------------------------------------------------------------- 2


def test_criterion_02_derivatives():
    t0 = time.perf_counter()
    models = model_set(np.random.default_rng(202)) + [canonical_interpolated()]
    reps = []
    for m in models:
        reps.append(bounds.check_derivative_consistency(m, GRID, rtol=1e-6))
        reps.append(bounds.check_derivative_bounds(m, GRID))
        for p in sorted({m.beta2, 1.0, 2.0}):
            reps.append(bounds.check_increasing(m, GRID, p))
    elapsed = time.perf_counter() - t0
    failed = [r.name for r in reps if not r.passed]
    ok = not failed and elapsed < 5.0
    assert report(2, "K' finite differences, derivative bounds, xi^m K increasing", ok,
                  f"checks={len(reps)} failed={failed[:3]} runtime={elapsed:.2f}s")


# ---------------------------------------------------------------- 3


def test_criterion_03_monotonicity():
    t0 = time.perf_counter()
    rng = np.random.default_rng(303)
    viol, checks = 0, 0
    for m in canonical_models().values():
        y, yp = bounds.random_pairs(rng, 100_000)
        ya, ypa = bounds.adversarial_pairs(rng, 1000)
        r = bounds.check_monotonicity(m, np.vstack([y, ya]), np.vstack([yp, ypa]))
        viol += r.n_violations
        checks += r.n_points
    for _ in range(10):
        m = random_interpolated(rng)
        a2 = CoefficientVector(tuple(m.coeffs.as_array() * 10.0 ** rng.uniform(-0.5, 0.5, len(m.coeffs.a))))
        y, yp = bounds.random_pairs(rng, 10_000)
        r = bounds.check_perturbed_monotonicity(m.profile, m.coeffs, a2, y, yp)
        viol += r.n_violations
        checks += r.n_points
    elapsed = time.perf_counter() - t0
    ok = viol == 0 and elapsed < 30.0
    assert report(3, "monotonicity and perturbed monotonicity", ok, f"pairs={checks} violations={viol} runtime={elapsed:.2f}s")


# ---------------------------------------------------------------- 4


def test_criterion_04_H_function():
    t0 = time.perf_counter()
    grid0 = np.concatenate([[0.0], GRID])
    reps = [bounds.check_H_bounds(m, grid0, d) for m in canonical_models().values() for d in (0.1, 1.0)]
    pw = canonical_piecewise()
    xi = np.linspace(1e-3, pw.Z1, 200)
    closed = 2 * xi**3 / 27
    rel = float(np.max(np.abs(pw.H(xi) - closed) / closed))
    elapsed = time.perf_counter() - t0
    viol = sum(r.n_violations for r in reps)
    ok = viol == 0 and rel <= 1e-9 and elapsed < 10.0
    assert report(4, "H bounds and closed form", ok, f"violations={viol} closed_form_rel_err={rel:.2e} runtime={elapsed:.2f}s")


# ---------------------------------------------------------------- 5


def _max_change(stepper, field, model, profile, n_steps, dt):
    worst = 0.0
    scale = max(1.0, float(np.abs(field.values).max()))
    cur = field
    for _ in range(n_steps):
        new = stepper(cur, model, profile, dt)
        new = new[0] if isinstance(new, tuple) else new
        worst = max(worst, float(np.abs(new.values - cur.values).max()) / scale)
        cur = new
    return worst


def _random_max_principle_run(rng, model):
    g = Grid((1.0,), (100,))
    terms = [Term(float(rng.uniform(-1, 1)), "affine", {"offset": float(rng.uniform(-1, 1)), "slope": [float(rng.uniform(-2, 2))]})]
    kind = rng.choice(["constant", "exp", "sin", "power"])
    tp = {"constant": {}, "exp": {"rate": 2.0}, "sin": {"omega": 20.0}, "power": {"q": 1.0}}[kind]
    terms.append(Term(float(rng.uniform(-1, 1)), "affine", {"offset": 1.0}, str(kind), tp))
    prof = BoundaryProfile(tuple(terms))
    p0 = PressureField(g, rng.uniform(-2, 2, 100))
    xb = [np.array([0.0, 1.0])]
    lo = min(p0.values.min(), prof.value(xb, 0.0).min())
    hi = max(p0.values.max(), prof.value(xb, 0.0).max())
    state = {"lo": lo, "hi": hi, "bad": 0, "steps": 0}

    def cb(old, new):
        b = prof.value(xb, new.t)
        state["lo"] = min(state["lo"], b.min())
        state["hi"] = max(state["hi"], b.max())
        tol = 1e-12 * max(1.0, abs(state["lo"]), abs(state["hi"]))
        if new.values.min() < state["lo"] - tol or new.values.max() > state["hi"] + tol:
            state["bad"] += 1
        state["steps"] += 1

    solve_ibvp(p0, prof, model, 0.02, SolverConfig(output_interval=0.02), callback=cb)
    return state


def test_criterion_05_solver_exactness():
    m = canonical_interpolated()
    g = Grid((1.0,), (100,))
    const_prof = BoundaryProfile.constant(5.0)
    const = PressureField(g, np.full(100, 5.0))
    aff_prof = BoundaryProfile.affine(0.25, (1.5,))
    aff = PressureField(g, aff_prof.value(g.mesh(), 0.0))
    dt = admissible_dt(aff, m, aff_prof)
    worst = max(
        _max_change(step_explicit, const, m, const_prof, 10_000, 1e-3),
        _max_change(step_explicit, aff, m, aff_prof, 10_000, dt),
        _max_change(step_implicit, const, m, const_prof, 10_000, 1e-2),
        _max_change(step_implicit, aff, m, aff_prof, 10_000, 1e-2),
    )
    rng = np.random.default_rng(505)
    models = list(canonical_models().values())
    runs = [_random_max_principle_run(rng, models[i % 4]) for i in range(50)]
    bad = sum(r["bad"] for r in runs)
    steps = sum(r["steps"] for r in runs)
    ok = worst <= 1e-12 and bad == 0
    assert report(5, "steady states and discrete maximum principle", ok,
                  f"worst_step_change={worst:.2e} max_principle_runs=50 steps={steps} violations={bad}")


# ---------------------------------------------------------------- 6 and 7


@pytest.fixture(scope="module")
def decay_run():
    rc = load_config("preset:decay")
    p0 = make_initial(rc.initial["kind"], rc.grid, rc.profile, rc.initial["params"])
    t0 = time.perf_counter()
    rep = run_energy_decay(rc.model, p0, rc.profile, rc.experiment["T"], rc.experiment["tol"], rc.solver, monitor=True)
    return rep, time.perf_counter() - t0


def test_criterion_06_dissipation_decay(decay_run):
    rep, elapsed = decay_run
    v = rep.values
    per_step = v["increases"] == 0
    decay = v["ratio"] < 1e-3
    ok = per_step and decay and elapsed < 60.0
    assert report(6, "per-step dissipation and ||pbar(20)||/||pbar(0)|| < 1e-3", ok,
                  f"per_step={_tag(per_step)} steps={v['steps']} increases={v['increases']}; "
                  f"decay={_tag(decay)} ratio={v['ratio']:.4e}; runtime={elapsed:.1f}s")


def test_criterion_07_gradient_decay(decay_run):
    rep, _ = decay_run
    gT = rep.result.series.column("grad_norm")[-1]
    first = gT < 1e-2
    rc = load_config("preset:gradient_psi")
    p0 = make_initial(rc.initial["kind"], rc.grid, rc.profile, rc.initial["params"])
    grep = run_gradient_decay(rc.model, p0, rc.profile, rc.experiment["T"], None, rc.experiment["psi_factor"], rc.solver)
    ratio = grep.values["grad_norm_T"] / grep.values["psi_grad_norm_T"]
    second = grep.passed
    ok = first and second
    assert report(7, "gradient decay (zero data) and within 3x of Psi-only (Psi = x(1+t)^-2)", ok,
                  f"zero_data={_tag(first)} grad_norm(20)={gT:.3e}; psi_case={_tag(second)} ratio={ratio:.3f}")


# ---------------------------------------------------------------- 8


def test_criterion_08_uniform_gronwall():
    rc = load_config("preset:gronwall")
    ex = rc.experiment
    rep = run_uniform_gronwall(rc.model, rc.grid, rc.profile, tuple(ex["factors"]), ex["t_eval"], ex["teeth"], ex["max_ratio"], rc.solver)
    init = rep.values["initial"]
    spread = max(init) / min(init)
    ok = rep.passed and spread == pytest.approx(100.0, rel=1e-6)
    assert report(8, "uniform Gronwall saturation x1/x10/x100", ok,
                  f"initial_spread={spread:.1f} ratio_t2={rep.values['ratio']:.4f}")


# ---------------------------------------------------------------- 9


def test_criterion_09_continuous_dependence():
    rc = load_config("preset:dependence")
    ex = rc.experiment
    p0 = make_initial(rc.initial["kind"], rc.grid, rc.profile, rc.initial["params"])
    t0 = time.perf_counter()
    rep = run_continuous_dependence(rc.model, p0, rc.profile, Term(**ex["bump"]), tuple(ex["ladder"]), ex["T"],
                                    ex["t_start"], rc.solver, ex["workers"])
    elapsed = time.perf_counter() - t0
    ok = rep.passed and elapsed < 120.0
    assert report(9, "continuous dependence on boundary data", ok,
                  f"slope={rep.slope:.4f} bound={rep.bound_exponent - 0.1:.4f} zero={rep.zero_response:.1e} runtime={elapsed:.1f}s")


# ---------------------------------------------------------------- 10


def test_criterion_10_structural_stability():
    rc = load_config("preset:stability")
    ex = rc.experiment
    p0 = make_initial(rc.initial["kind"], rc.grid, rc.profile, rc.initial["params"])
    t0 = time.perf_counter()
    rep = run_structural_stability(rc.model, p0, rc.profile, ex["direction"], tuple(ex["ladder"]), ex["T"], rc.solver, ex["workers"])
    elapsed = time.perf_counter() - t0
    ok = rep.passed and elapsed < 120.0
    assert report(10, "structural stability in the coefficients", ok,
                  f"slope={rep.slope:.4f} bound={rep.bound_exponent - 0.1:.4f} zero={rep.zero_response:.1e} runtime={elapsed:.1f}s")


# ---------------------------------------------------------------- 11

ODES = [
    # theta, h(t), f(t), y0
    (1.0, lambda t: 1.0 + 0.5 * np.sin(t), lambda t: 2.0 + np.cos(3 * t), 5.0),
    (1.5, lambda t: 2.0 / (1.0 + 0.1 * t), lambda t: 1.0 + t * np.exp(-0.5 * t), 0.2),
    (3.0, lambda t: np.ones_like(np.asarray(t, float)), lambda t: t * np.exp(-t), 0.5),
]


def test_criterion_11_ode_comparison():
    t = np.linspace(0.0, 20.0, 2001)
    worst = math.inf
    for theta, h, f, y0 in ODES:
        sol = solve_ivp(lambda s, y: -h(s) * np.abs(y) ** theta + f(s), (0.0, 20.0), [y0], t_eval=t,
                        method="DOP853", rtol=1e-12, atol=1e-14)
        bound = bounds.ode_comparison_bound(y0, theta, h(t), f(t))
        worst = min(worst, float(np.min(bound - sol.y[0])))
    ok = worst >= 0.0
    assert report(11, "ODE comparison bound, theta in {1, 3/2, 3}", ok, f"min(bound - y)={worst:.3e}")
