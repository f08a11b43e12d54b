"""Finite-volume solver for ``p_t = div(K(|grad p|) grad p)`` with Dirichlet data.

Cells are uniform on ``[0, L_1] x ... x [0, L_n]`` (n = 1, 2). Fields are
carried on a ghost-extended array whose outer ring holds the boundary
extension ``Psi`` at wall positions (face centres and corners), so a boundary
face sees its cell centre at distance ``h/2``.

Explicit Euler uses the step bound ``dt <= safety * min_f h d_f / (2n K_f)``
over all faces (``d_f`` is the centre-to-centre distance, ``h/2`` at walls).
It makes every update a convex combination of the cell and its neighbours,
which gives the discrete maximum principle and, with zero boundary data, a
non-increasing L2 norm. Bounding each face rather than each cell's row sum
also keeps the odd-even mode damped where K nearly vanishes on one side.
"""

import math
from dataclasses import dataclass, field, asdict
from typing import Callable, Optional

import numpy as np
import scipy.sparse as sp
from scipy.linalg import solve_banded
from scipy.sparse.linalg import spsolve

from . import kernels
from .errors import ConvergenceError, DomainError, ShapeError, StepRejected

# --------------------------------------------------------------------------
# grid and fields
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Grid:
    extents: tuple
    cells: tuple

    def __post_init__(self):
        ext = tuple(float(e) for e in self.extents)
        cells = tuple(int(c) for c in self.cells)
        object.__setattr__(self, "extents", ext)
        object.__setattr__(self, "cells", cells)
        if len(ext) != len(cells) or len(ext) not in (1, 2):
            raise ShapeError("grid must be 1-D or 2-D with one extent per axis")
        if any(e <= 0 for e in ext):
            raise DomainError("extents must be positive")
        if any(c < 4 for c in cells):
            raise DomainError("need at least 4 cells per axis")

    @property
    def dim(self):
        return len(self.cells)

    @property
    def shape(self):
        return self.cells

    @property
    def spacing(self):
        return tuple(e / c for e, c in zip(self.extents, self.cells))

    @property
    def cell_volume(self):
        return float(np.prod(self.spacing))

    @property
    def volume(self):
        return float(np.prod(self.extents))

    def centers(self, axis):
        h = self.spacing[axis]
        return (np.arange(self.cells[axis]) + 0.5) * h

    def extended(self, axis):
        """Cell centres with the two wall positions appended."""
        return np.concatenate([[0.0], self.centers(axis), [self.extents[axis]]])

    def mesh(self, extended=False):
        axes = [self.extended(a) if extended else self.centers(a) for a in range(self.dim)]
        return tuple(np.meshgrid(*axes, indexing="ij"))

    def face_weights(self):
        """Dual-cell volumes of the faces normal to each axis (half at walls)."""
        out = []
        for a in range(self.dim):
            n = self.cells[a]
            dual = np.full(n + 1, self.spacing[a])
            dual[0] = dual[-1] = 0.5 * self.spacing[a]
            shape = [1] * self.dim
            shape[a] = n + 1
            wt = dual.reshape(shape)
            for b in range(self.dim):
                if b != a:
                    wt = wt * self.spacing[b]
            full = list(self.cells)
            full[a] = n + 1
            out.append(np.broadcast_to(wt, full))
        return out


@dataclass
class PressureField:
    grid: Grid
    values: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        self.values = np.array(self.values, dtype=float)
        if self.values.shape != self.grid.shape:
            raise ShapeError(f"field shape {self.values.shape} does not match grid {self.grid.shape}")
        if not np.all(np.isfinite(self.values)):
            raise DomainError("field values must be finite")
        if self.t < 0:
            raise DomainError("time stamp must be nonnegative")

    def copy(self):
        return PressureField(self.grid, self.values.copy(), self.t)


# --------------------------------------------------------------------------
# boundary extension
# --------------------------------------------------------------------------

SPACE_KINDS = ("affine", "mode", "bump")
TIME_KINDS = ("constant", "exp", "sin", "power")


@dataclass(frozen=True)
class Term:
    """``amplitude * phi(x) * tau(t)``.

    phi: ``affine`` -> ``offset + slope . x``; ``mode`` -> ``sin(pi k . x + phase)``;
    ``bump`` -> ``exp(-|x - center|^2 / (2 width^2))``.
    tau: ``constant`` -> 1; ``exp`` -> ``exp(-rate t)``; ``sin`` -> ``sin(omega t + phase)``;
    ``power`` -> ``(1 + t)^-q``.
    """

    amplitude: float = 1.0
    space: str = "affine"
    space_params: dict = field(default_factory=dict)
    time: str = "constant"
    time_params: dict = field(default_factory=dict)

    _SPACE_KEYS = {"affine": {"offset", "slope"}, "mode": {"k", "phase"}, "bump": {"center", "width"}}
    _TIME_KEYS = {"constant": set(), "exp": {"rate"}, "sin": {"omega", "phase"}, "power": {"q"}}

    def __post_init__(self):
        if self.space not in SPACE_KINDS:
            raise DomainError(f"unknown space factor {self.space!r}; choose from {SPACE_KINDS}")
        if self.time not in TIME_KINDS:
            raise DomainError(f"unknown time factor {self.time!r}; choose from {TIME_KINDS}")
        extra = set(self.space_params) - self._SPACE_KEYS[self.space]
        if extra:
            raise DomainError(f"unknown {self.space} parameters {sorted(extra)}")
        extra = set(self.time_params) - self._TIME_KEYS[self.time]
        if extra:
            raise DomainError(f"unknown {self.time} parameters {sorted(extra)}")
        if self.space == "bump" and self.space_params.get("width", 1.0) <= 0:
            raise DomainError("bump width must be positive")

    def _vec(self, key, dim, default):
        v = self.space_params.get(key, default)
        v = np.atleast_1d(np.asarray(v, dtype=float))
        if v.size == 1 and dim > 1:
            v = np.concatenate([v, np.zeros(dim - 1)]) if key != "center" else np.full(dim, v[0])
        if v.size != dim:
            raise ShapeError(f"{key} needs {dim} components, got {v.size}")
        return v

    # phi, grad phi
    def phi(self, X):
        dim = len(X)
        sp_ = self.space_params
        if self.space == "affine":
            slope = self._vec("slope", dim, [0.0])
            return sp_.get("offset", 0.0) + sum(s * x for s, x in zip(slope, X))
        if self.space == "mode":
            k = self._vec("k", dim, [1.0])
            arg = math.pi * sum(kk * x for kk, x in zip(k, X)) + sp_.get("phase", 0.0)
            return np.sin(arg)
        c = self._vec("center", dim, [0.5])
        w = sp_.get("width", 0.1)
        r2 = sum((x - cc) ** 2 for x, cc in zip(X, c))
        return np.exp(-r2 / (2 * w * w))

    def grad_phi(self, X):
        dim = len(X)
        sp_ = self.space_params
        if self.space == "affine":
            slope = self._vec("slope", dim, [0.0])
            return [np.full(np.shape(X[0]), s) for s in slope]
        if self.space == "mode":
            k = self._vec("k", dim, [1.0])
            arg = math.pi * sum(kk * x for kk, x in zip(k, X)) + sp_.get("phase", 0.0)
            c = np.cos(arg)
            return [math.pi * kk * c for kk in k]
        c = self._vec("center", dim, [0.5])
        w = sp_.get("width", 0.1)
        e = self.phi(X)
        return [-(x - cc) / (w * w) * e for x, cc in zip(X, c)]

    def tau(self, t):
        tp = self.time_params
        if self.time == "constant":
            return 1.0
        if self.time == "exp":
            return math.exp(-tp.get("rate", 1.0) * t)
        if self.time == "sin":
            return math.sin(tp.get("omega", 1.0) * t + tp.get("phase", 0.0))
        return (1.0 + t) ** (-tp.get("q", 1.0))

    def tau_t(self, t):
        tp = self.time_params
        if self.time == "constant":
            return 0.0
        if self.time == "exp":
            r = tp.get("rate", 1.0)
            return -r * math.exp(-r * t)
        if self.time == "sin":
            w = tp.get("omega", 1.0)
            return w * math.cos(w * t + tp.get("phase", 0.0))
        q = tp.get("q", 1.0)
        return -q * (1.0 + t) ** (-q - 1.0)

    def to_dict(self):
        out = {"amplitude": self.amplitude, "space": self.space, "time": self.time}
        if self.space_params:
            out["space_params"] = {k: _plain(v) for k, v in self.space_params.items()}
        if self.time_params:
            out["time_params"] = {k: _plain(v) for k, v in self.time_params.items()}
        return out


def _plain(v):
    if isinstance(v, (list, tuple, np.ndarray)):
        return [float(x) for x in v]
    return float(v)


@dataclass(frozen=True)
class BoundaryProfile:
    """Closed-form extension ``Psi = sum of Terms``; its trace is the boundary data."""

    terms: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))

    @classmethod
    def zero(cls):
        return cls(())

    @classmethod
    def constant(cls, value):
        return cls((Term(value, "affine", {"offset": 1.0}),))

    @classmethod
    def affine(cls, offset=0.0, slope=(1.0,), time="constant", time_params=None, amplitude=1.0):
        return cls((Term(amplitude, "affine", {"offset": offset, "slope": list(slope)}, time, time_params or {}),))

    def plus(self, *terms):
        return BoundaryProfile(self.terms + tuple(terms))

    @property
    def is_stationary(self):
        return all(t.time == "constant" for t in self.terms)

    def value(self, X, t):
        out = np.zeros(np.shape(X[0]))
        for term in self.terms:
            out = out + term.amplitude * term.tau(t) * term.phi(X)
        return out

    def dt(self, X, t):
        out = np.zeros(np.shape(X[0]))
        for term in self.terms:
            out = out + term.amplitude * term.tau_t(t) * term.phi(X)
        return out

    def grad(self, X, t):
        out = [np.zeros(np.shape(X[0])) for _ in X]
        for term in self.terms:
            s = term.amplitude * term.tau(t)
            for d, g in enumerate(term.grad_phi(X)):
                out[d] = out[d] + s * g
        return out

    def grad_t(self, X, t):
        out = [np.zeros(np.shape(X[0])) for _ in X]
        for term in self.terms:
            s = term.amplitude * term.tau_t(t)
            for d, g in enumerate(term.grad_phi(X)):
                out[d] = out[d] + s * g
        return out

    def to_list(self):
        return [t.to_dict() for t in self.terms]

    @classmethod
    def from_list(cls, items):
        return cls(tuple(Term(**dict(it)) for it in items))


def extended_values(field_, profile):
    """Ghost-extended array: interior from the field, ring from ``Psi``."""
    g = field_.grid
    pe = profile.value(g.mesh(extended=True), field_.t)
    if g.dim == 1:
        pe[1:-1] = field_.values
    else:
        pe[1:-1, 1:-1] = field_.values
    return pe


# --------------------------------------------------------------------------
# model plumbing
# --------------------------------------------------------------------------


def _kargs(model):
    kind, scal, coefs, exps = model.kernel_args()
    return kind, np.ascontiguousarray(scal, float), np.ascontiguousarray(coefs, float), np.ascontiguousarray(exps, float)


def _K(kargs, xi):
    k, bad = kernels.conductivity(*kargs, xi)
    if bad:
        raise ConvergenceError(f"conductivity inversion failed at {bad} face(s)")
    return k


def face_gradients(field_, profile):
    """Gradient vectors on faces: a list over face orientations of arrays ``(..., n)``.

    1-D: one array of shape ``(N+1, 1)``. 2-D: x-faces ``(nx+1, ny, 2)`` and
    y-faces ``(nx, ny+1, 2)``, components ordered ``(d/dx, d/dy)``.
    """
    g = field_.grid
    pe = extended_values(field_, profile)
    if g.dim == 1:
        return [(np.diff(pe) / np.diff(g.extended(0)))[:, None]]
    gx_n, gx_t, gy_n, gy_t = kernels.face_gradients_2d(pe, g.extended(0), g.extended(1))
    return [np.stack([gx_n, gx_t], axis=-1), np.stack([gy_t, gy_n], axis=-1)]


def _rates(field_, profile, kargs):
    g = field_.grid
    pe = extended_values(field_, profile)
    if g.dim == 1:
        div, rmax, bad = kernels.rates_1d(pe, g.extended(0), g.spacing[0], *kargs)
    else:
        div, rmax, bad = kernels.rates_2d(
            pe, g.extended(0), g.extended(1), g.spacing[0], g.spacing[1], *kargs
        )
    if bad:
        raise ConvergenceError(f"conductivity inversion failed at {bad} face(s)")
    return div, rmax


def admissible_dt(field_, model, profile, safety=0.9):
    """Largest explicit step keeping every update a convex combination."""
    _, rmax = _rates(field_, profile, _kargs(model))
    return math.inf if rmax == 0.0 else safety / rmax


def step_explicit(field_, model, profile, dt, safety=0.9, _kargs_cache=None):
    """One forward-Euler step; raises :class:`StepRejected` above the stable step."""
    kargs = _kargs_cache or _kargs(model)
    div, rmax = _rates(field_, profile, kargs)
    adm = math.inf if rmax == 0.0 else safety / rmax
    if dt > adm * (1 + 1e-12):
        raise StepRejected(dt, adm)
    return PressureField(field_.grid, field_.values + dt * div, field_.t + dt)


# --------------------------------------------------------------------------
# implicit step
# --------------------------------------------------------------------------


def _face_coefficients(field_, profile, kargs, eps):
    """Per-face ``K(sqrt(|grad p|^2 + eps^2)) / d_f``, one array per orientation."""
    g = field_.grid
    out = []
    for a, grads in enumerate(face_gradients(field_, profile)):
        mag = np.sqrt((grads**2).sum(axis=-1) + eps * eps)
        d = np.diff(g.extended(a))
        shape = [1] * g.dim
        shape[a] = d.size
        out.append(_K(kargs, mag.ravel()).reshape(mag.shape) / d.reshape(shape))
    return out


def _implicit_solve_1d(p_old, ext_new, coef, h, dt):
    n = p_old.size
    w = coef[0] * dt / h
    diag = 1.0 + w[:-1] + w[1:]
    ab = np.zeros((3, n))
    ab[0, 1:] = -w[1:-1]
    ab[1] = diag
    ab[2, :-1] = -w[1:-1]
    rhs = p_old.copy()
    rhs[0] += w[0] * ext_new[0]
    rhs[-1] += w[-1] * ext_new[-1]
    return solve_banded((1, 1), ab, rhs)


def _implicit_solve_2d(p_old, ext_new, coef, hx, hy, dt):
    nx, ny = p_old.shape
    wx = coef[0] * dt / hx  # (nx+1, ny)
    wy = coef[1] * dt / hy  # (nx, ny+1)
    idx = np.arange(nx * ny).reshape(nx, ny)
    diag = 1.0 + wx[:-1, :] + wx[1:, :] + wy[:, :-1] + wy[:, 1:]
    rows = [idx.ravel()]
    cols = [idx.ravel()]
    vals = [diag.ravel()]
    # x-neighbours
    w = wx[1:-1, :]
    rows += [idx[:-1, :].ravel(), idx[1:, :].ravel()]
    cols += [idx[1:, :].ravel(), idx[:-1, :].ravel()]
    vals += [-w.ravel(), -w.ravel()]
    w = wy[:, 1:-1]
    rows += [idx[:, :-1].ravel(), idx[:, 1:].ravel()]
    cols += [idx[:, 1:].ravel(), idx[:, :-1].ravel()]
    vals += [-w.ravel(), -w.ravel()]
    A = sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(nx * ny,) * 2)
    rhs = p_old.copy()
    rhs[0, :] += wx[0, :] * ext_new[0, 1:-1]
    rhs[-1, :] += wx[-1, :] * ext_new[-1, 1:-1]
    rhs[:, 0] += wy[:, 0] * ext_new[1:-1, 0]
    rhs[:, -1] += wy[:, -1] * ext_new[1:-1, -1]
    return spsolve(A, rhs.ravel()).reshape(nx, ny)


def default_relaxation(model):
    """Picard damping ``2 / (2 + b1 - b2)``.

    The undamped iteration error is multiplied by eigenvalues in
    ``[-b1, b2]`` (the range of ``-xi K'/K``), which stalls for ``b1 >= 1``;
    this weight centres the damped range on zero.
    """
    return 2.0 / (2.0 + model.beta1 - model.beta2)


def step_implicit(field_, model, profile, dt, tol=1e-10, maxiter=100, eps=1e-12, relaxation=None, _kargs_cache=None):
    """Backward Euler; damped Picard iteration with K frozen at the previous iterate."""
    if dt <= 0:
        raise DomainError("dt must be positive")
    w = default_relaxation(model) if relaxation is None else relaxation
    kargs = _kargs_cache or _kargs(model)
    g = field_.grid
    t_new = field_.t + dt
    it = PressureField(g, field_.values, t_new)
    ext_new = extended_values(it, profile)
    scale = max(1.0, float(np.abs(ext_new).max()))
    for k in range(1, maxiter + 1):
        coef = _face_coefficients(it, profile, kargs, eps)
        if g.dim == 1:
            new = _implicit_solve_1d(field_.values, ext_new, coef, g.spacing[0], dt)
        else:
            new = _implicit_solve_2d(field_.values, ext_new, coef, g.spacing[0], g.spacing[1], dt)
        if k > 1:
            new = w * new + (1.0 - w) * it.values
        change = float(np.abs(new - it.values).max())
        it = PressureField(g, new, t_new)
        if change <= tol * scale:
            return it, k
    raise ConvergenceError(f"Picard iteration did not converge in {maxiter} iterations", history=maxiter)


# --------------------------------------------------------------------------
# norms and diagnostics
# --------------------------------------------------------------------------


def discrete_norm(values, grid, q=2.0):
    """Midpoint-rule ``L^q`` norm of cell values."""
    if q <= 0:
        raise DomainError("q must be positive")
    v = np.abs(np.asarray(values, dtype=float))
    return float((np.sum(v**q) * grid.cell_volume) ** (1.0 / q))


def face_integral(field_, profile, fn):
    """``int fn(|grad p|)`` over faces with dual-cell weights (2-D: mean of both orientations)."""
    g = field_.grid
    weights = g.face_weights()
    total = 0.0
    for grads, w in zip(face_gradients(field_, profile), weights):
        mag = np.sqrt((grads**2).sum(axis=-1))
        total += float(np.sum(fn(mag) * w))
    return total / g.dim


def gradient_integral(field_, profile, q):
    """``int |grad p|^q``."""
    return face_integral(field_, profile, lambda m: m**q)


def cell_gradient_magnitude(field_, profile):
    """Mean of the face gradient magnitudes surrounding each cell."""
    g = field_.grid
    mags = [np.sqrt((gr**2).sum(axis=-1)) for gr in face_gradients(field_, profile)]
    if g.dim == 1:
        m = mags[0]
        return 0.5 * (m[:-1] + m[1:])
    mx, my = mags
    return 0.25 * (mx[:-1, :] + mx[1:, :] + my[:, :-1] + my[:, 1:])


def pbar(field_, profile):
    return field_.values - profile.value(field_.grid.mesh(), field_.t)


def energy(field_, profile, model):
    """``||p - Psi||^2 + int H(|grad p|)``."""
    g = field_.grid
    l2 = discrete_norm(pbar(field_, profile), g) ** 2
    return l2 + h_integral(field_, profile, model)


def h_integral(field_, profile, model):
    xi = cell_gradient_magnitude(field_, profile)
    return float(np.sum(model.H(xi.ravel())) * field_.grid.cell_volume)


def boundary_forcing(profile, grid, t, beta2):
    """``(f, ||grad Psi_t||, ||Psi_t||)`` with ``f = ||grad Psi||^2 + ||Psi_t||^((2-b2)/(1-b2))``."""
    X = grid.mesh()
    grad = profile.grad(X, t)
    gsq = float(sum(np.sum(c**2) for c in grad) * grid.cell_volume)
    psit = discrete_norm(profile.dt(X, t), grid)
    gt = profile.grad_t(X, t)
    gtn = math.sqrt(float(sum(np.sum(c**2) for c in gt) * grid.cell_volume))
    f = gsq + psit ** ((2.0 - beta2) / (1.0 - beta2))
    return f, gtn, psit


CSV_COLUMNS = ("t", "l2_pbar_sq", "grad_norm", "h_integral", "energy", "f", "env_f", "dissipation")


def fmt(x):
    return f"{float(x):.17g}"


@dataclass
class DiagnosticsSeries:
    t: list = field(default_factory=list)
    l2_pbar_sq: list = field(default_factory=list)
    grad_norm: list = field(default_factory=list)
    h_integral: list = field(default_factory=list)
    energy: list = field(default_factory=list)
    f: list = field(default_factory=list)
    env_f: list = field(default_factory=list)
    dissipation: list = field(default_factory=list)

    def append(self, **row):
        for c in CSV_COLUMNS:
            getattr(self, c).append(float(row[c]))

    def column(self, name):
        return np.asarray(getattr(self, name))

    def __len__(self):
        return len(self.t)

    def to_csv(self):
        lines = [",".join(CSV_COLUMNS)]
        for i in range(len(self)):
            lines.append(",".join(fmt(getattr(self, c)[i]) for c in CSV_COLUMNS))
        return "\n".join(lines) + "\n"

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            fh.write(self.to_csv())


def diagnostics_row(field_, profile, model, env_prev):
    b2 = model.beta2
    g = field_.grid
    l2 = discrete_norm(pbar(field_, profile), g) ** 2
    hint = h_integral(field_, profile, model)
    kargs = _kargs(model)
    f, _, _ = boundary_forcing(profile, g, field_.t, b2)
    return dict(
        t=field_.t,
        l2_pbar_sq=l2,
        grad_norm=gradient_integral(field_, profile, 2.0 - b2),
        h_integral=hint,
        energy=l2 + hint,
        f=f,
        env_f=max(env_prev, f),
        dissipation=face_integral(field_, profile, lambda m: _K(kargs, m.ravel()).reshape(m.shape) * m * m),
    )


# --------------------------------------------------------------------------
# time integration
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SolverConfig:
    stepper: str = "explicit"
    safety: float = 0.9
    picard_tol: float = 1e-10
    picard_maxiter: int = 100
    eps: float = 1e-12
    output_interval: float = 0.1
    dt: Optional[float] = None
    max_dt: Optional[float] = None
    relaxation: Optional[float] = None

    def __post_init__(self):
        if self.stepper not in ("explicit", "implicit"):
            raise DomainError(f"stepper must be 'explicit' or 'implicit', got {self.stepper!r}")
        if not 0.0 < self.safety <= 1.0:
            raise DomainError("safety must lie in (0, 1]")
        if self.picard_tol <= 0 or self.eps <= 0 or self.output_interval <= 0:
            raise DomainError("tolerances, eps and output_interval must be positive")
        if self.picard_maxiter < 1:
            raise DomainError("picard_maxiter must be >= 1")
        if self.dt is not None and self.dt <= 0:
            raise DomainError("dt must be positive")
        if self.max_dt is not None and self.max_dt <= 0:
            raise DomainError("max_dt must be positive")
        if self.relaxation is not None and not 0.0 < self.relaxation <= 1.0:
            raise DomainError("relaxation must lie in (0, 1]")
        if self.stepper == "implicit" and self.dt is None:
            raise DomainError("the implicit stepper needs a fixed dt")

    def to_dict(self):
        return asdict(self)


@dataclass
class SolveResult:
    field: PressureField
    series: DiagnosticsSeries
    n_steps: int
    snapshots: list


def solve_ibvp(p0, profile, model, T, config=SolverConfig(), callback: Optional[Callable] = None, snapshots=False):
    """Integrate from ``p0.t`` to ``T``, sampling diagnostics every ``output_interval``.

    ``callback(old, new)`` is invoked after every step with the two fields.
    """
    from .bounds import degree_condition

    if T <= p0.t:
        raise DomainError("T must exceed the initial time")
    if not degree_condition(model, p0.grid.dim):
        raise DomainError(f"beta2={model.beta2:g} violates the degree condition in dimension {p0.grid.dim}")
    kargs = _kargs(model)
    cur = p0.copy()
    series = DiagnosticsSeries()
    snaps = [cur.copy()] if snapshots else []
    row = diagnostics_row(cur, profile, model, -math.inf)
    series.append(**row)
    env = row["env_f"]
    n_samples = int(math.ceil((T - p0.t) / config.output_interval - 1e-9))
    steps = 0
    cap = config.max_dt if config.max_dt is not None else config.output_interval
    for k in range(1, n_samples + 1):
        t_next = min(T, p0.t + k * config.output_interval)
        while cur.t < t_next:
            remaining = t_next - cur.t
            if config.stepper == "explicit":
                if config.dt is not None:
                    dt = min(config.dt, remaining)
                    new = step_explicit(cur, model, profile, dt, config.safety, kargs)
                else:
                    div, rmax = _rates(cur, profile, kargs)
                    adm = math.inf if rmax == 0.0 else config.safety / rmax
                    dt = min(adm, cap, remaining)
                    # avoid a sliver step at the sample time
                    if dt < remaining < 2 * dt:
                        dt = 0.5 * remaining
                    new = PressureField(cur.grid, cur.values + dt * div, cur.t + dt)
            else:
                dt = min(config.dt, remaining)
                new, _ = step_implicit(
                    cur, model, profile, dt, config.picard_tol, config.picard_maxiter, config.eps, config.relaxation, kargs
                )
            if remaining - dt <= 1e-12 * max(1.0, t_next):
                new.t = t_next
            if not np.all(np.isfinite(new.values)):
                raise ConvergenceError(f"non-finite values at t={new.t:g}")
            if callback is not None:
                callback(cur, new)
            cur = new
            steps += 1
        row = diagnostics_row(cur, profile, model, env)
        env = row["env_f"]
        series.append(**row)
        if snapshots:
            snaps.append(cur.copy())
    return SolveResult(cur, series, steps, snaps)


# --------------------------------------------------------------------------
# snapshots
# --------------------------------------------------------------------------


def snapshot_text(field_):
    g = field_.grid
    head = (
        f"# dim={g.dim} extents={','.join(fmt(e) for e in g.extents)} cells={','.join(str(c) for c in g.cells)} "
        f"spacing={','.join(fmt(h) for h in g.spacing)} t={fmt(field_.t)}"
    )
    return head + "\n" + "\n".join(fmt(v) for v in field_.values.ravel(order="C")) + "\n"


def parse_snapshot(text):
    lines = text.strip().splitlines()
    meta = dict(kv.split("=", 1) for kv in lines[0].lstrip("# ").split())
    grid = Grid(tuple(float(x) for x in meta["extents"].split(",")), tuple(int(c) for c in meta["cells"].split(",")))
    vals = np.array([float(v) for v in lines[1:]]).reshape(grid.shape)
    return PressureField(grid, vals, float(meta["t"]))
