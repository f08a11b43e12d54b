import math

import numpy as np
import pytest

from mixedflow.conductivity import canonical_interpolated, canonical_rational
from mixedflow.errors import DomainError
from mixedflow.experiments import (
    boundary_difference,
    boundary_growth,
    check_K_decreasing_in_coefficient,
    default_bump,
    env_series,
    fit_loglog_slope,
    gradient_family,
    make_initial,
    run_continuous_dependence,
    run_energy_decay,
    run_gradient_decay,
    run_structural_stability,
    run_uniform_gronwall,
    triangle_wave,
)
from mixedflow.solver import BoundaryProfile, Grid, PressureField, SolverConfig, discrete_norm, gradient_integral

MODEL = canonical_interpolated()
FAST = SolverConfig("implicit", dt=2e-2, output_interval=0.1)


def small(n=40):
    g = Grid((1.0,), (n,))
    prof = BoundaryProfile.affine(0.0, (1.0,))
    return g, prof, make_initial("sine_plus_profile", g, prof)


def test_fit_slope():
    x = np.array([1e-1, 1e-2, 1e-3])
    assert fit_loglog_slope(x, 3 * x**2) == pytest.approx(2.0)
    # points at or below the floor are dropped before fitting
    assert fit_loglog_slope(x, [1e-2, 1e-4, 1e-20]) == pytest.approx(2.0)
    assert math.isnan(fit_loglog_slope(x, [1.0, 0.0, 0.0]))


def test_triangle_wave_range_and_mean():
    x = (np.arange(4096) + 0.5) / 4096
    w = triangle_wave(x, 8)
    assert w.min() >= -1 and w.max() <= 1 and abs(w.mean()) < 1e-12


def test_make_initial_kinds():
    g, prof, _ = small()
    assert np.all(make_initial("constant", g, prof, {"value": 2.0}).values == 2.0)
    assert np.allclose(make_initial("profile", g, prof).values, g.centers(0))
    with pytest.raises(DomainError):
        make_initial("noise", g, prof)


def test_gradient_family_properties():
    g = Grid((1.0,), (256,))
    fam = gradient_family(g, (1.0, 10.0, 100.0), teeth=16)
    zero = BoundaryProfile.zero()
    norms = [discrete_norm(v, g) for v in fam]
    grads = [gradient_integral(PressureField(g, v), zero, 1.5) for v in fam]
    assert np.allclose(norms, norms[0], rtol=1e-13)
    assert grads[1] / grads[0] == pytest.approx(10.0, rel=1e-9)
    assert grads[2] / grads[0] == pytest.approx(100.0, rel=1e-9)


def test_gradient_family_unreachable():
    with pytest.raises(DomainError):
        gradient_family(Grid((1.0,), (8,)), (1e9,), teeth=2)


def test_energy_decay_trivial_steady():
    g, prof, _ = small()
    p0 = make_initial("profile", g, prof)
    rep = run_energy_decay(MODEL, p0, prof, T=1.0, config=SolverConfig(output_interval=0.5))
    assert rep.passed and rep.values["normT"] <= 1e-12


def test_energy_decay_monitor():
    g = Grid((1.0,), (30,))
    p0 = make_initial("sine", g, BoundaryProfile.zero())
    rep = run_energy_decay(MODEL, p0, BoundaryProfile.zero(), T=0.5, tol=0.9, config=SolverConfig(output_interval=0.5), monitor=True)
    assert rep.passed and rep.values["increases"] == 0 and len(rep.lines()) == 2


def test_gradient_decay_steady_control():
    g, prof, _ = small()
    p0 = make_initial("profile", g, prof)
    rep = run_gradient_decay(MODEL, p0, prof, T=1.0, config=SolverConfig(output_interval=0.5))
    assert rep.assertions == [] and rep.values["grad_norm_T"] == pytest.approx(1.0, rel=1e-12)


def test_uniform_gronwall_identity():
    g = Grid((1.0,), (64,))
    rep = run_uniform_gronwall(MODEL, g, factors=(1.0, 1.0), t_eval=0.2, teeth=4, config=FAST)
    assert rep.values["ratio"] == 1.0 and rep.passed


def test_dependence_zero_and_swap():
    g, prof, p0 = small()
    kw = dict(ladder=(1e-1, 1e-2), T=2.0, config=FAST)
    a = run_continuous_dependence(MODEL, p0, prof, **kw)
    b = run_continuous_dependence(MODEL, p0, prof, swap=True, **kw)
    assert a.zero_response == 0.0
    assert a.response == b.response and a.functional == b.functional and a.to_csv() == b.to_csv()
    assert a.response[1] < a.response[0]


def test_dependence_workers_match_inline():
    g, prof, p0 = small(24)
    kw = dict(ladder=(1e-1, 1e-2), T=1.0, config=FAST)
    a = run_continuous_dependence(MODEL, p0, prof, workers=1, **kw)
    b = run_continuous_dependence(MODEL, p0, prof, workers=2, **kw)
    assert a.to_csv() == b.to_csv()


def test_stability_zero_and_errors():
    g, prof, p0 = small()
    rep = run_structural_stability(MODEL, p0, prof, ladder=(1e-1, 1e-2), T=1.0, config=FAST)
    assert rep.zero_response == 0.0 and rep.response[1] < rep.response[0]
    assert rep.functional == pytest.approx([1e-1, 1e-2], rel=1e-12)
    with pytest.raises(DomainError):
        run_structural_stability(canonical_rational(), p0, prof, T=1.0, config=FAST)
    with pytest.raises(DomainError):
        run_structural_stability(MODEL, p0, prof, direction=[0, 0, 0], T=1.0, config=FAST)
    with pytest.raises(DomainError):
        run_structural_stability(MODEL, p0, prof, direction=[-1, -1, -1], ladder=(2.0,), T=1.0, config=FAST)


def test_raising_a0_lowers_K():
    xi = np.logspace(-6, 6, 300)
    assert check_K_decreasing_in_coefficient(MODEL, 1, 0.1, xi) <= 0.0
    assert check_K_decreasing_in_coefficient(MODEL, 2, 1.0, xi) <= 0.0


def test_boundary_difference_scaling():
    g = Grid((1.0,), (100,))
    prof = BoundaryProfile.affine(0.0, (1.0,))
    bump = default_bump()
    assert boundary_difference(prof, prof, g, 0.0, 1.0, 0.5) == 0.0
    d = [boundary_difference(prof, prof.plus(bump.__class__(e, bump.space, bump.space_params)), g, 0.0, 1.0, 0.5) for e in (1e-2, 1e-3)]
    assert d[0] / d[1] == pytest.approx(10.0, rel=1e-3)


def test_boundary_growth_and_env():
    g, prof, p0 = small()
    lam = boundary_growth(prof, prof, [p0, p0], [p0, p0], 0.5)
    assert np.all(lam > 1.0) and lam[0] == lam[1]
    assert env_series([0, 1, 2], [2, 1, 3]).tolist() == [2, 2, 3]
