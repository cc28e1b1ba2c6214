"""Discretized ensemble over the parameter box: grid, density, profile, flow.

Each node sigma = (sigma1, sigma2) carries an independent unit vector evolving
under sigma1 * f0 + sigma2 * (u1 f1 + u2 f2).  With piecewise-constant controls
the flow is a closed-form rotation about

    omega = (-sigma2 u2, sigma2 u1, -sigma1)

by angle ||omega|| tau, so propagation has no integration drift.  The scalar
output integrates a polynomial observable against weight * density over the
tensor Gauss-Legendre grid.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .polynomials import Poly

_SMALL_ANGLE = 1e-8


@dataclass(frozen=True)
class ParameterBox:
    a1: float
    b1: float
    a2: float
    b2: float

    def __post_init__(self):
        if not self.a1 < self.b1:
            raise ValueError("need a1 < b1")
        if not 0 < self.a2 < self.b2:
            raise ValueError("need 0 < a2 < b2")

    @property
    def area(self) -> float:
        return (self.b1 - self.a1) * (self.b2 - self.a2)


@dataclass(frozen=True)
class ParameterGrid:
    box: ParameterBox
    nodes: np.ndarray  # (N, 2)
    weights: np.ndarray  # (N,)
    shape: tuple[int, int]

    @property
    def size(self) -> int:
        return self.nodes.shape[0]


def make_grid(box: ParameterBox, n1: int, n2: int) -> ParameterGrid:
    """Tensor Gauss-Legendre nodes and weights mapped onto the box."""
    if n1 < 1 or n2 < 1:
        raise ValueError("need n1, n2 >= 1")
    x1, w1 = np.polynomial.legendre.leggauss(n1)
    x2, w2 = np.polynomial.legendre.leggauss(n2)
    s1 = box.a1 + (x1 + 1.0) * (box.b1 - box.a1) / 2.0
    s2 = box.a2 + (x2 + 1.0) * (box.b2 - box.a2) / 2.0
    w1 = w1 * (box.b1 - box.a1) / 2.0
    w2 = w2 * (box.b2 - box.a2) / 2.0
    nodes = np.empty((n1 * n2, 2))
    weights = np.empty(n1 * n2)
    for i in range(n1):
        lo = i * n2
        nodes[lo : lo + n2, 0] = s1[i]
        nodes[lo : lo + n2, 1] = s2
        weights[lo : lo + n2] = w1[i] * w2
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return ParameterGrid(box, nodes, weights, (n1, n2))


@dataclass(frozen=True)
class Density:
    values: np.ndarray  # (N,), nonnegative

    def __post_init__(self):
        if np.any(self.values < 0):
            raise ValueError("density values must be nonnegative")


def uniform_density(grid: ParameterGrid, value: float = 1.0) -> Density:
    return Density(np.full(grid.size, float(value)))


def gaussian_density(
    grid: ParameterGrid,
    center: Sequence[float],
    widths: Sequence[float],
    amplitude: float = 1.0,
) -> Density:
    """Truncated Gaussian bump evaluated on the grid nodes."""
    c1, c2 = center
    w1, w2 = widths
    if w1 <= 0 or w2 <= 0 or amplitude <= 0:
        raise ValueError("widths and amplitude must be positive")
    d1 = (grid.nodes[:, 0] - c1) / w1
    d2 = (grid.nodes[:, 1] - c2) / w2
    return Density(amplitude * np.exp(-0.5 * (d1 * d1 + d2 * d2)))


def table_density(grid: ParameterGrid, values: Sequence[float]) -> Density:
    arr = np.asarray(values, dtype=float)
    if arr.shape != (grid.size,):
        raise ValueError(f"expected {grid.size} density values, got {arr.shape}")
    return Density(arr)


@dataclass(frozen=True)
class Profile:
    states: np.ndarray  # (N, 3) unit vectors
    time_tag: float = 0.0


def validate_profile(profile: Profile, tol: float = 1e-12) -> None:
    norms = np.linalg.norm(profile.states, axis=1)
    worst = float(np.max(np.abs(norms - 1.0))) if norms.size else 0.0
    if worst > tol:
        raise ValueError(f"profile states deviate from unit norm by {worst:.3e}")


def constant_profile(grid: ParameterGrid, x: Sequence[float]) -> Profile:
    v = np.asarray(x, dtype=float)
    v = v / np.linalg.norm(v)
    return Profile(np.tile(v, (grid.size, 1)))


def angles_profile(
    grid: ParameterGrid,
    theta_coeffs: Sequence[float],
    phi_coeffs: Sequence[float],
) -> Profile:
    """Smooth profile x(sigma) from affine polar/azimuthal angle maps.

    theta(sigma) = t0 + t1 sigma1 + t2 sigma2 and likewise for phi.
    """
    t0, t1, t2 = theta_coeffs
    p0, p1, p2 = phi_coeffs
    theta = t0 + t1 * grid.nodes[:, 0] + t2 * grid.nodes[:, 1]
    phi = p0 + p1 * grid.nodes[:, 0] + p2 * grid.nodes[:, 1]
    states = np.stack(
        [np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)],
        axis=1,
    )
    return Profile(states)


def table_profile(grid: ParameterGrid, states: Sequence[Sequence[float]]) -> Profile:
    """Build a profile from explicit rows, renormalizing mild float drift."""
    arr = np.asarray(states, dtype=float)
    if arr.shape != (grid.size, 3):
        raise ValueError(f"expected {grid.size} states of dimension 3")
    norms = np.linalg.norm(arr, axis=1)
    if np.any(np.abs(norms - 1.0) > 1e-6):
        raise ValueError("profile states must be unit vectors (within 1e-6)")
    profile = Profile(arr / norms[:, None])
    validate_profile(profile)
    return profile


@dataclass(frozen=True)
class ControlSchedule:
    """Piecewise-constant input: segments of (duration, u1, u2)."""

    segments: tuple[tuple[float, float, float], ...]

    def __post_init__(self):
        for tau, _, _ in self.segments:
            if not tau > 0:
                raise ValueError("segment durations must be positive")

    @property
    def total_duration(self) -> float:
        return sum(seg[0] for seg in self.segments)


@dataclass(frozen=True)
class OutputTrace:
    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if self.times.shape != self.values.shape:
            raise ValueError("times and values must have equal length")


def _rotate(states: np.ndarray, omega: np.ndarray, tau: float) -> np.ndarray:
    """Axis-angle rotation of each row of states about its own omega row."""
    norms = np.linalg.norm(omega, axis=1)
    angles = norms * tau
    safe = np.where(norms == 0.0, 1.0, norms)
    axis = omega / safe[:, None]
    cross = np.cross(axis, states)
    dot = np.einsum("ij,ij->i", axis, states)
    small = np.abs(angles) < _SMALL_ANGLE
    cos = np.cos(angles)[:, None]
    sin = np.sin(angles)[:, None]
    rotated = states * cos + cross * sin + axis * (dot * (1.0 - cos.ravel()))[:, None]
    if np.any(small):
        # second-order series in tau avoids 0/0 on the axis normalization
        wxs = np.cross(omega, states)
        wwxs = np.cross(omega, wxs)
        series = states + tau * wxs + 0.5 * tau * tau * wwxs
        rotated = np.where(small[:, None], series, rotated)
    return rotated


def segment_axis(sigma: np.ndarray, u: Sequence[float]) -> np.ndarray:
    """Rotation axis (-sigma2 u2, sigma2 u1, -sigma1) per node."""
    u1, u2 = u
    omega = np.empty(sigma.shape[:-1] + (3,))
    omega[..., 0] = -sigma[..., 1] * u2
    omega[..., 1] = sigma[..., 1] * u1
    omega[..., 2] = -sigma[..., 0]
    return omega


def rotate_states(
    states: np.ndarray, sigmas: np.ndarray, u: Sequence[float], tau: float
) -> np.ndarray:
    return _rotate(states, segment_axis(sigmas, u), tau)


def rotation_step(
    x: Sequence[float], sigma: Sequence[float], u: Sequence[float], tau: float
) -> np.ndarray:
    """Closed-form flow of one state for one constant-control segment."""
    states = np.asarray(x, dtype=float)[None, :]
    sig = np.asarray(sigma, dtype=float)[None, :]
    return rotate_states(states, sig, u, tau)[0]


def evolve_profile(
    profile: Profile, grid: ParameterGrid, schedule: ControlSchedule
) -> Profile:
    states = profile.states
    for tau, u1, u2 in schedule.segments:
        states = rotate_states(states, grid.nodes, (u1, u2), tau)
    return Profile(states, profile.time_tag + schedule.total_duration)


def compile_phi(phi: Poly) -> Callable[[np.ndarray], np.ndarray]:
    """Vectorized evaluator for a real observable over (N, 3) state arrays.

    Powers come from iterated multiplication, not libm pow, so evaluation is
    exactly parity-covariant: even-degree observables give bitwise-identical
    values on antipodal states.
    """
    if not phi.is_real:
        raise ValueError("observable must be real-valued")
    items = phi.sorted_terms()
    exps = np.array([e for e, _ in items], dtype=np.int64).reshape(-1, 3)
    coeffs = np.array([float(c.re) for _, c in items])
    maxes = exps.max(axis=0) if len(items) else np.zeros(3, dtype=np.int64)

    def evaluate(states: np.ndarray) -> np.ndarray:
        if exps.shape[0] == 0:
            return np.zeros(states.shape[0])
        term_vals = np.ones((states.shape[0], exps.shape[0]))
        for d in range(3):
            if maxes[d] == 0:
                continue
            table = np.empty((states.shape[0], maxes[d] + 1))
            table[:, 0] = 1.0
            for e in range(1, maxes[d] + 1):
                table[:, e] = table[:, e - 1] * states[:, d]
            term_vals *= table[:, exps[:, d]]
        return term_vals @ coeffs

    return evaluate


def output(profile: Profile, grid: ParameterGrid, density: Density, phi: Poly) -> float:
    """Quadrature of phi(x_sigma) against weight * density, in fixed node order."""
    vals = compile_phi(phi)(profile.states)
    return float(np.dot(grid.weights * density.values, vals))


def simulate(
    profile: Profile,
    grid: ParameterGrid,
    density: Density,
    schedule: ControlSchedule,
    phi: Poly,
    dt: float,
) -> OutputTrace:
    """Sample y(t) at multiples of dt plus every segment boundary."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    total = schedule.total_duration
    boundaries = [0.0]
    for tau, _, _ in schedule.segments:
        boundaries.append(boundaries[-1] + tau)
    samples = set(boundaries)
    t = 0.0
    k = 0
    while t <= total + 1e-12 * max(1.0, total):
        samples.add(min(t, total))
        k += 1
        t = k * dt
    times = sorted(samples)
    phi_eval = compile_phi(phi)
    base = grid.weights * density.values

    values = []
    states = profile.states
    seg_idx = 0
    seg_start = 0.0
    for t in times:
        while (
            seg_idx < len(schedule.segments)
            and t > boundaries[seg_idx + 1] + 1e-12 * max(1.0, total)
        ):
            tau, u1, u2 = schedule.segments[seg_idx]
            states = rotate_states(states, grid.nodes, (u1, u2), tau)
            seg_idx += 1
            seg_start = boundaries[seg_idx]
        if seg_idx < len(schedule.segments) and t > seg_start:
            _, u1, u2 = schedule.segments[seg_idx]
            current = rotate_states(states, grid.nodes, (u1, u2), t - seg_start)
        else:
            current = states
        values.append(float(np.dot(base, phi_eval(current))))
    return OutputTrace(np.array(times), np.array(values))


@dataclass(frozen=True)
class EquivalenceVerdict:
    kind: str  # "equivalent-so-far" | "distinguished"
    gap: float
    schedule: ControlSchedule | None = None
    time: float | None = None
    trial: int | None = None


def random_schedule(rng: np.random.Generator, max_segments: int = 4) -> ControlSchedule:
    count = int(rng.integers(1, max_segments + 1))
    segs = tuple(
        (float(rng.uniform(0.1, 1.0)), float(rng.uniform(-2, 2)), float(rng.uniform(-2, 2)))
        for _ in range(count)
    )
    return ControlSchedule(segs)


def output_equiv_test(
    pair_a: tuple[Profile, Density],
    pair_b: tuple[Profile, Density],
    grid: ParameterGrid,
    phi: Poly,
    trials: int,
    seed: int,
    tol: float,
    dt: float = 0.05,
) -> EquivalenceVerdict:
    """Randomized one-sided distinguishing test over piecewise-constant inputs.

    A "distinguished" verdict is conclusive; "equivalent-so-far" only says the
    sampled schedules failed to separate the pairs.
    """
    rng = np.random.default_rng(seed)
    prof_a, dens_a = pair_a
    prof_b, dens_b = pair_b
    worst = 0.0
    for trial in range(trials):
        schedule = random_schedule(rng)
        tr_a = simulate(prof_a, grid, dens_a, schedule, phi, dt)
        tr_b = simulate(prof_b, grid, dens_b, schedule, phi, dt)
        gaps = np.abs(tr_a.values - tr_b.values)
        exceeding = np.nonzero(gaps > tol)[0]
        if exceeding.size:
            idx = int(exceeding[0])
            return EquivalenceVerdict(
                "distinguished",
                float(gaps[idx]),
                schedule=schedule,
                time=float(tr_a.times[idx]),
                trial=trial,
            )
        worst = max(worst, float(gaps.max()))
    return EquivalenceVerdict("equivalent-so-far", worst)


def write_trace_csv(trace: OutputTrace, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("t,y\n")
        for t, y in zip(trace.times, trace.values):
            fh.write(f"{t:.17g},{y:.17g}\n")


def write_profile_csv(
    profile: Profile, grid: ParameterGrid, density: Density, path
) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("sigma1,sigma2,weight,rho,x1,x2,x3\n")
        for j in range(grid.size):
            s1, s2 = grid.nodes[j]
            x1, x2, x3 = profile.states[j]
            fh.write(
                f"{s1:.17g},{s2:.17g},{grid.weights[j]:.17g},"
                f"{density.values[j]:.17g},{x1:.17g},{x2:.17g},{x3:.17g}\n"
            )
