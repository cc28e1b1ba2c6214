"""Moment-based recovery of the unknown density and initial profile.

Pipeline: search words whose images of the observable form a harmonic basis,
extract the moments

    M_i(a, b) = integral of m_xi^a m_zeta^b psi_i over the box,
    psi_i(sigma) = sigma^kappa_i p_i(x_sigma(0)) rho(sigma),

fit each psi_i in the polynomial algebra generated by m_xi = sigma1 sigma2^2
and m_zeta = sigma2^4, then pointwise: the constant quadratic form gives
rho^2, division gives the basis values p_i(x_sigma(0)), and the closed-form
point inversion returns x_sigma(0) up to the parity ambiguity, resolved
globally by a neighbor sweep for even degrees.

Three modes isolate the error sources: oracle-psi (algebra only),
oracle-moments (adds the Gram-system fit), measured-moments (adds finite
differencing of the output signal; feasible word length is float-limited).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Callable, Sequence

import numpy as np

from .ensemble import (
    Density,
    ParameterBox,
    ParameterGrid,
    Profile,
    compile_phi,
    rotate_states,
)
from .identities import HarmonicBasis, QuadraticIdentity, constant_quadratic_form
from .polynomials import Poly
from .representation import (
    KappaSignature,
    Word,
    apply_word,
    kappa_of_word,
    word_basis_search,
    xi,
    zeta,
)


class StageError(RuntimeError):
    """Failure wrapped with the name of the pipeline stage that raised it."""

    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause


class WordTooLongError(ValueError):
    pass


class InconsistentValuesError(ValueError):
    """The supplied basis values match no point on the sphere."""


def kappa_monomial(sig: KappaSignature, sigma: Sequence[float]) -> float:
    return sigma[0] ** sig.k1 * sigma[1] ** sig.k2


def _kappa_node_values(sig: KappaSignature, grid: ParameterGrid) -> np.ndarray:
    return grid.nodes[:, 0] ** sig.k1 * grid.nodes[:, 1] ** sig.k2


@dataclass(frozen=True)
class MomentTable:
    entries: dict[tuple[int, int, int], float]  # (basis index, a, b) -> value
    D: int
    provenance: str  # "oracle" | "measured"


@dataclass(frozen=True)
class PsiSamples:
    values: np.ndarray  # (num basis elements, num nodes)
    provenance: str


@dataclass(frozen=True)
class ReconstructionConfig:
    mode: str = "oracle-psi"  # oracle-psi | oracle-moments | measured-moments
    D: int = 6
    ridge: float = 1e-10
    rho_floor: float = 1e-6  # relative to max recovered density
    fd_step: float = 1e-2
    fd_word_cap: int = 4

    def __post_init__(self):
        if self.mode not in ("oracle-psi", "oracle-moments", "measured-moments"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.D < 0 or self.ridge < 0 or self.rho_floor <= 0 or self.fd_step <= 0:
            raise ValueError("invalid reconstruction configuration")


@dataclass(frozen=True)
class ReconstructionResult:
    density_est: Density
    profile_est: Profile
    ambiguity: str  # "unique" | "antipodal-pair"
    undefined_nodes: tuple[int, ...]
    diagnostics: dict


# --- moment extraction ------------------------------------------------------


def _psi_node_values(
    profile: Profile,
    density: Density,
    grid: ParameterGrid,
    basis_polys: Sequence[Poly],
    kappas: Sequence[KappaSignature],
) -> np.ndarray:
    rows = []
    for p, sig in zip(basis_polys, kappas):
        vals = compile_phi(p)(profile.states)
        rows.append(_kappa_node_values(sig, grid) * vals * density.values)
    return np.array(rows)


def oracle_psi_samples(
    truth: tuple[Profile, Density],
    grid: ParameterGrid,
    basis_polys: Sequence[Poly],
    kappas: Sequence[KappaSignature],
) -> PsiSamples:
    profile, density = truth
    return PsiSamples(_psi_node_values(profile, density, grid, basis_polys, kappas), "oracle")


def oracle_moments(
    truth: tuple[Profile, Density],
    grid: ParameterGrid,
    phi: Poly,
    words: Sequence[Word],
    D: int,
) -> MomentTable:
    """Quadrature of m_xi^a m_zeta^b psi_i straight from the hidden truth."""
    profile, density = truth
    basis_polys = [apply_word(w, phi) for w in words]
    kappas = [kappa_of_word(w) for w in words]
    psi = _psi_node_values(profile, density, grid, basis_polys, kappas)
    m_xi = grid.nodes[:, 0] * grid.nodes[:, 1] ** 2
    m_zeta = grid.nodes[:, 1] ** 4
    entries: dict[tuple[int, int, int], float] = {}
    for i in range(len(words)):
        for a in range(D + 1):
            for b in range(D + 1 - a):
                feat = m_xi**a * m_zeta**b
                entries[(i, a, b)] = float(np.dot(grid.weights, feat * psi[i]))
    return MomentTable(entries, D, "oracle")


@dataclass(frozen=True)
class OutputSimulator:
    """Read-only view of the hidden ensemble that only exposes y."""

    profile: Profile
    grid: ParameterGrid
    density: Density

    def output_fn(self, phi: Poly) -> Callable[[Sequence[float], Sequence], float]:
        phi_eval = compile_phi(phi)
        base = self.grid.weights * self.density.values
        nodes = self.grid.nodes
        start = self.profile.states

        def y(taus: Sequence[float], us: Sequence[Sequence[float]]) -> float:
            states = start
            for tau, u in zip(taus, us):
                states = rotate_states(states, nodes, u, tau)
            return float(np.dot(base, phi_eval(states)))

        return y

    def y(self, taus, us, phi: Poly) -> float:
        return self.output_fn(phi)(taus, us)


_UNMIX = np.array([[1.0, 0.0, 0.0], [-1.0, 1.0, 0.0], [-1.0, 0.0, 1.0]])
_CHOICES = ((0.0, 0.0), (1.0, 0.0), (0.0, 1.0))


def _mixed_central(y, us, h: float, n: int) -> float:
    total = 0.0
    for signs in product((-1.0, 1.0), repeat=n):
        prod_sign = 1.0
        for s in signs:
            prod_sign *= s
        total += prod_sign * y([s * h for s in signs], us)
    return total / (2.0 * h) ** n


def measured_word_moments(
    sim: OutputSimulator, phi: Poly, length: int, fd_step: float
) -> np.ndarray:
    """All moments of words with the given length, from output data alone.

    Mixed central differences in the segment durations estimate the mixed
    control-coefficient derivative for each per-segment control choice; the
    per-segment Vandermonde unmix then isolates sigma^kappa(alpha) f_alpha phi
    for every word alpha.  Richardson extrapolation in the step kills the h^2
    error term.
    """
    y = sim.output_fn(phi)
    if length == 0:
        return np.array(y([], []))
    shape = (3,) * length
    d_h = np.empty(shape)
    d_h2 = np.empty(shape)
    for assignment in product(range(3), repeat=length):
        us = [_CHOICES[c] for c in assignment]
        d_h[assignment] = _mixed_central(y, us, fd_step, length)
        d_h2[assignment] = _mixed_central(y, us, fd_step / 2.0, length)
    mixed = (4.0 * d_h2 - d_h) / 3.0
    for axis in range(length):
        mixed = np.moveaxis(np.tensordot(_UNMIX, mixed, axes=(1, axis)), 0, axis)
    return mixed


def measured_moments(
    sim: OutputSimulator,
    phi: Poly,
    word: Word,
    fd_step: float,
    fd_word_cap: int = 4,
) -> float:
    """Finite-difference estimate of the single word moment."""
    word = tuple(word)
    if len(word) > fd_word_cap:
        raise WordTooLongError(
            f"word {word} has length {len(word)} > cap {fd_word_cap}"
        )
    moments = measured_word_moments(sim, phi, len(word), fd_step)
    return float(moments[word]) if word else float(moments)


def measured_moment_table(
    sim: OutputSimulator,
    phi: Poly,
    words: Sequence[Word],
    D: int,
    fd_step: float,
    fd_word_cap: int = 4,
) -> MomentTable:
    """Moment table measured through the eigen-operators xi^a zeta^b.

    The entry (i, a, b) needs output derivatives of order 3a + 4b + |word_i|;
    anything past the cap raises, which with the defaults limits measured mode
    to low orders (pure measured density recovery is not claimed).
    """
    n = phi.homogeneous_degree
    lam = float(-n * (n + 1))
    needed_lengths = set()
    requests: dict[tuple[int, int, int], list[tuple[float, Word]]] = {}
    for i, base_word in enumerate(words):
        for a in range(D + 1):
            for b in range(D + 1 - a):
                expr = xi().power(a).compose(zeta().power(b))
                combos = []
                for w, c in expr.terms.items():
                    full = w + tuple(base_word)
                    if len(full) > fd_word_cap:
                        raise WordTooLongError(
                            f"moment ({i},{a},{b}) needs word length {len(full)} "
                            f"> cap {fd_word_cap}"
                        )
                    combos.append((float(c.re), full))
                    needed_lengths.add(len(full))
                requests[(i, a, b)] = combos
    by_length = {
        length: measured_word_moments(sim, phi, length, fd_step)
        for length in sorted(needed_lengths)
    }
    entries = {}
    for key, combos in requests.items():
        _, a, b = key
        total = 0.0
        for coeff, w in combos:
            arr = by_length[len(w)]
            total += coeff * (float(arr[w]) if w else float(arr))
        entries[key] = total / lam ** (a + b)
    return MomentTable(entries, D, "measured")


# --- density fit in the (m_xi, m_zeta) algebra ------------------------------


def _box_monomial_integral(box: ParameterBox, e1: int, e2: int) -> Fraction:
    a1, b1 = Fraction(box.a1), Fraction(box.b1)
    a2, b2 = Fraction(box.a2), Fraction(box.b2)
    return (b1 ** (e1 + 1) - a1 ** (e1 + 1)) / (e1 + 1) * (
        b2 ** (e2 + 1) - a2 ** (e2 + 1)
    ) / (e2 + 1)


class FeatureBasis:
    """Features m_xi^a m_zeta^b (a+b <= D) orthogonalized exactly on the box.

    The Gram matrix of the raw features is Hilbert-like, so the solve happens
    in an exactly orthogonalized basis (rational Gram-Schmidt from closed-form
    monomial integrals); only the unit normalization and the moment data are
    floating point.
    """

    def __init__(self, box: ParameterBox, D: int):
        self.box = box
        self.D = D
        self.pairs = [(a, s - a) for s in range(D + 1) for a in range(s + 1)]
        exps = [(a, 2 * a + 4 * b) for a, b in self.pairs]
        K = len(self.pairs)
        gram = [
            [
                _box_monomial_integral(box, exps[i][0] + exps[j][0], exps[i][1] + exps[j][1])
                for j in range(K)
            ]
            for i in range(K)
        ]
        rows: list[list[Fraction]] = []
        norms: list[Fraction] = []
        for k in range(K):
            row = [Fraction(0)] * K
            row[k] = Fraction(1)
            for j in range(k):
                inner = sum(rows[j][m] * gram[k][m] for m in range(K) if rows[j][m])
                coeff = inner / norms[j]
                if coeff:
                    row = [r - coeff * bj for r, bj in zip(row, rows[j])]
            d = sum(row[m] * gram[m][k] for m in range(K) if row[m])
            if d <= 0:
                raise AssertionError("feature Gram matrix is not positive definite")
            rows.append(row)
            norms.append(d)
        self._gram_float = np.array([[float(g) for g in r] for r in gram])
        self._orth = np.array([[float(v) for v in r] for r in rows])
        self._sqrt_norms = np.sqrt(np.array([float(d) for d in norms]))
        self._exps = np.array(exps)

    @property
    def size(self) -> int:
        return len(self.pairs)

    def gram_condition(self) -> float:
        return float(np.linalg.cond(self._gram_float))

    def gram_min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self._gram_float).min())

    def raw_values(self, nodes: np.ndarray) -> np.ndarray:
        s1 = nodes[:, 0][:, None] ** self._exps[:, 0][None, :]
        s2 = nodes[:, 1][:, None] ** self._exps[:, 1][None, :]
        return s1 * s2

    def solve(self, raw_moments: np.ndarray, ridge: float) -> np.ndarray:
        """Coefficients over the raw features from moments against them."""
        normalized = (self._orth @ raw_moments) / self._sqrt_norms
        c = normalized / (1.0 + ridge)
        return self._orth.T @ (c / self._sqrt_norms)

    def fit_residual(self, weights: np.ndarray, raw_moments: np.ndarray) -> float:
        lhs = self._gram_float @ weights
        scale = max(1.0, float(np.linalg.norm(raw_moments)))
        return float(np.linalg.norm(lhs - raw_moments)) / scale


@lru_cache(maxsize=None)
def _feature_basis(box: ParameterBox, D: int) -> FeatureBasis:
    return FeatureBasis(box, D)


def fit_psi(
    table: MomentTable, grid: ParameterGrid, i: int, D: int, ridge: float
) -> np.ndarray:
    """Evaluate the fitted expansion of psi_i on the grid nodes."""
    fb = _feature_basis(grid.box, D)
    try:
        raw = np.array([table.entries[(i, a, b)] for a, b in fb.pairs])
    except KeyError as exc:
        raise ValueError(f"moment table does not cover index {i} up to D={D}") from exc
    w = fb.solve(raw, ridge)
    return fb.raw_values(grid.nodes) @ w


# --- pointwise recovery -----------------------------------------------------


def recover_density(
    psi: PsiSamples,
    identity: QuadraticIdentity,
    kappas: Sequence[KappaSignature],
    grid: ParameterGrid,
    rho_floor: float,
) -> tuple[Density, list[int]]:
    """rho(sigma)^2 from the constant quadratic form over the psi samples.

    The identity must be expressed in the same basis the psi samples belong
    to (the word-image basis); rebase it first otherwise.
    """
    m = len(kappas)
    if psi.values.shape[0] != m or len(identity.basis.polys) != m:
        raise ValueError("psi samples, kappas, and identity basis disagree in size")
    kexp = np.array([_kappa_node_values(sig, grid) for sig in kappas])
    v = psi.values / kexp
    C = np.array([[float(c) for c in row] for row in identity.coeffs])
    rho_sq = np.einsum("ij,in,jn->n", C, v, v)
    rho = np.sqrt(np.clip(rho_sq, 0.0, None))
    peak = float(rho.max()) if rho.size else 0.0
    if peak == 0.0:
        return Density(rho), list(range(grid.size))
    floor = rho_floor * peak
    undefined = [j for j in range(grid.size) if rho[j] < floor]
    return Density(rho), undefined


def recover_harmonic_values(
    psi: PsiSamples,
    density: Density,
    kappas: Sequence[KappaSignature],
    grid: ParameterGrid,
    undefined: Sequence[int] = (),
) -> np.ndarray:
    """Invert psi_i = sigma^kappa_i p_i(x) rho to the basis values p_i(x)."""
    kexp = np.array([_kappa_node_values(sig, grid) for sig in kappas])
    values = np.full_like(psi.values, np.nan)
    defined = np.ones(grid.size, dtype=bool)
    defined[list(undefined)] = False
    values[:, defined] = psi.values[:, defined] / (
        kexp[:, defined] * density.values[defined]
    )
    return values


class PointInverter:
    """Closed-form recovery of a sphere point from its basis values.

    Change basis exactly to the triple (x1+ix2)^n, x3 (x1+ix2)^(n-1),
    (x3+ix1)^n; read the horizontal part off the n-th roots of the first
    value and the vertical part off the second.  Candidates are ranked by
    forward residual over the full value vector, which subsumes matching any
    single basis element and also covers the axis, where the first two values
    vanish.
    """

    def __init__(self, basis: HarmonicBasis):
        from .exactlinalg import solve_exact
        from .polynomials import CRational, monomial_basis
        from .representation import poly_to_vec

        self.basis = basis
        self.n = basis.n
        n = basis.n
        x1 = Poly.variable(1)
        x2 = Poly.variable(2)
        x3 = Poly.variable(3)
        w = x1 + x2.scale(CRational(0, 1))
        triple = (
            w**n,
            x3 * w ** (n - 1),
            (x3 + x1.scale(CRational(0, 1))) ** n,
        )
        monos = monomial_basis(n)
        m = 2 * n + 1
        matrix = [
            [poly_to_vec(basis.polys[j], monos)[r] for j in range(m)]
            for r in range(len(monos))
        ]
        rows = []
        for q in triple:
            sol = solve_exact(matrix, poly_to_vec(q, monos), CRational())
            if sol is None:
                raise AssertionError("triple polynomials not expressible in basis")
            rows.append([c.to_complex() for c in sol])
        self._transform = np.array(rows)
        self._evaluators = [compile_phi(p) for p in basis.polys]

    def _forward(self, points: np.ndarray) -> np.ndarray:
        return np.stack([ev(points) for ev in self._evaluators])

    def invert_with_residual(
        self, values: Sequence[float], consistency_tol: float = 1e-5
    ) -> tuple[np.ndarray, str, float]:
        values = np.asarray(values, dtype=float)
        n = self.n
        c1, c2, _c3 = self._transform @ values
        # Both poles are always candidates: near the axis the first two
        # transformed values degenerate and the root construction loses the
        # vertical component, while the pole snap stays within the distance
        # to the axis.  The residual ranking picks whichever wins.
        candidates: list[np.ndarray] = [
            np.array([0.0, 0.0, 1.0]),
            np.array([0.0, 0.0, -1.0]),
        ]
        if abs(c1) > 1e-15:
            radius = abs(c1) ** (1.0 / n)
            base_angle = math.atan2(c1.imag, c1.real) / n
            for mth in range(n):
                ang = base_angle + 2.0 * math.pi * mth / n
                w = radius * complex(math.cos(ang), math.sin(ang))
                x3 = (c2 * w / c1).real
                cand = np.array([w.real, w.imag, x3])
                norm = np.linalg.norm(cand)
                if 0.5 < norm < 2.0:
                    candidates.append(cand / norm)
        pts = np.array(candidates)
        residuals = np.max(np.abs(self._forward(pts) - values[:, None]), axis=0)
        best = int(np.argmin(residuals))
        scale = max(1.0, float(np.max(np.abs(values))))
        if residuals[best] > consistency_tol * scale:
            raise InconsistentValuesError(
                f"best candidate residual {residuals[best]:.3e} exceeds tolerance"
            )
        x = pts[best]
        if n % 2 == 0:
            return _canonical_representative(x), "antipodal-pair", float(residuals[best])
        return x, "unique", float(residuals[best])

    def invert(self, values, consistency_tol: float = 1e-5):
        x, flag, _ = self.invert_with_residual(values, consistency_tol)
        return x, flag


def _canonical_representative(x: np.ndarray) -> np.ndarray:
    if x[2] < 0:
        return -x
    if x[2] == 0:
        if x[0] < 0:
            return -x
        if x[0] == 0 and x[1] < 0:
            return -x
    return x


def invert_point(
    values: Sequence[float], n: int, basis: HarmonicBasis, consistency_tol: float = 1e-5
) -> tuple[np.ndarray, str]:
    if basis.n != n:
        raise ValueError("basis degree does not match n")
    return PointInverter(basis).invert(values, consistency_tol)


def _grid_neighbors(grid: ParameterGrid, j: int) -> list[int]:
    n1, n2 = grid.shape
    i1, i2 = divmod(j, n2)
    out = []
    if i1 > 0:
        out.append(j - n2)
    if i1 < n1 - 1:
        out.append(j + n2)
    if i2 > 0:
        out.append(j - 1)
    if i2 < n2 - 1:
        out.append(j + 1)
    return out


def stitch_signs(
    states: np.ndarray, defined: np.ndarray, grid: ParameterGrid
) -> tuple[np.ndarray, int]:
    """Align per-node antipodal representatives across grid neighbors.

    Breadth-first from the first defined node of each connected component,
    flipping each newly visited node toward its discovered neighbor.  Returns
    the aligned states and the number of components stitched independently.
    """
    states = states.copy()
    visited = np.zeros(grid.size, dtype=bool)
    components = 0
    for seed in range(grid.size):
        if not defined[seed] or visited[seed]:
            continue
        components += 1
        queue = [seed]
        visited[seed] = True
        while queue:
            u = queue.pop(0)
            for v in _grid_neighbors(grid, u):
                if not defined[v] or visited[v]:
                    continue
                if float(np.dot(states[u], states[v])) < 0.0:
                    states[v] = -states[v]
                visited[v] = True
                queue.append(v)
    return states, components


# --- end-to-end pipeline ----------------------------------------------------


def _stage(name: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except StageError:
        raise
    except Exception as exc:
        raise StageError(name, exc) from exc


def reconstruct(
    phi: Poly,
    grid: ParameterGrid,
    truth_profile: Profile,
    truth_density: Density,
    config: ReconstructionConfig,
) -> ReconstructionResult:
    """Run the full inverse pipeline against the hidden truth pair.

    The truth is consulted only through the channel the mode allows: exact
    psi samples, quadrature moments, or the simulated output signal.
    """
    n = phi.homogeneous_degree
    if phi.is_zero or n is None or n < 1 or not phi.is_harmonic or not phi.is_real:
        raise ValueError("observable must be real, nonzero, harmonic, of degree >= 1")
    diagnostics: dict = {"mode": config.mode}

    words = _stage("word-basis-search", word_basis_search, phi)
    basis_polys = [apply_word(w, phi) for w in words]
    kappas = [kappa_of_word(w) for w in words]
    diagnostics["words"] = ["".join(str(i) for i in w) for w in words]

    identity = _stage(
        "quadratic-identity",
        lambda: constant_quadratic_form(
            HarmonicBasis(n, tuple(basis_polys), provenance="ladder-derived")
        ),
    )

    truth = (truth_profile, truth_density)
    if config.mode == "oracle-psi":
        psi = _stage("psi-samples", oracle_psi_samples, truth, grid, basis_polys, kappas)
    else:
        if config.mode == "oracle-moments":
            table = _stage("moments", oracle_moments, truth, grid, phi, words, config.D)
        else:
            sim = OutputSimulator(truth_profile, grid, truth_density)
            table = _stage(
                "moments",
                measured_moment_table,
                sim,
                phi,
                words,
                config.D,
                config.fd_step,
                config.fd_word_cap,
            )
        fb = _feature_basis(grid.box, config.D)
        diagnostics["gram_condition"] = fb.gram_condition()
        diagnostics["gram_min_eigenvalue"] = fb.gram_min_eigenvalue()
        if diagnostics["gram_min_eigenvalue"] < -1e-12:
            raise StageError(
                "moments", AssertionError("feature Gram matrix is not PSD")
            )
        rows = []
        residuals = []
        for i in range(len(words)):
            raw = np.array([table.entries[(i, a, b)] for a, b in fb.pairs])
            w = fb.solve(raw, config.ridge)
            rows.append(fb.raw_values(grid.nodes) @ w)
            residuals.append(fb.fit_residual(w, raw))
        psi = PsiSamples(np.array(rows), table.provenance)
        diagnostics["fit_residuals"] = residuals

    density, undefined = _stage(
        "density", recover_density, psi, identity, kappas, grid, config.rho_floor
    )
    diagnostics["undefined_count"] = len(undefined)

    values = _stage(
        "harmonic-values", recover_harmonic_values, psi, density, kappas, grid, undefined
    )

    defined = np.ones(grid.size, dtype=bool)
    defined[list(undefined)] = False
    C = np.array([[float(c) for c in row] for row in identity.coeffs])
    if defined.any():
        q = np.einsum("ij,in,jn->n", C, values[:, defined], values[:, defined])
        diagnostics["identity_max_residual"] = float(np.max(np.abs(q - 1.0)))
    else:
        diagnostics["identity_max_residual"] = float("nan")

    inverter = PointInverter(identity.basis)
    states = np.full((grid.size, 3), np.nan)
    worst_res = 0.0

    def _invert_all():
        nonlocal worst_res
        for j in range(grid.size):
            if not defined[j]:
                continue
            x, _, res = inverter.invert_with_residual(values[:, j])
            states[j] = x
            worst_res = max(worst_res, res)

    _stage("point-inversion", _invert_all)
    diagnostics["inversion_max_residual"] = worst_res

    if n % 2 == 0:
        stitched, components = _stage("stitch", stitch_signs, states, defined, grid)
        states = stitched
        diagnostics["stitch_components"] = components
        ambiguity = "antipodal-pair"
    else:
        ambiguity = "unique"

    return ReconstructionResult(
        density_est=density,
        profile_est=Profile(states),
        ambiguity=ambiguity,
        undefined_nodes=tuple(undefined),
        diagnostics=diagnostics,
    )
