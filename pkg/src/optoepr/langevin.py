"""Exact frequency-domain Langevin solvers and covariance assembly.

Three linear response models share one representation here:

* ``rwa3_solve``  - the 3-mode rotating-wave system {a1, a2^dag, a_m};
* ``full6_solve`` - the 6-operator pre-RWA system with counter-rotating
  couplings retained (solved at its physical sidebands +-(omega_m + delta)
  and mapped back to the rotating-frame sideband frequency);
* ``adiabatic_response`` - the eliminated two-mode model, reconstructed as a
  response map so the closed-form covariance can be cross-checked.

A :class:`LinearResponse` maps the six input operators
(a1_in, a1_in^dag, a2_in, a2_in^dag, a_m_in, a_m_in^dag), evaluated at the
response's sideband frequency, onto the four outputs
(a1_out, a1_out^dag, a2_out, a2_out^dag).  Daggered entries follow the
mirrored-frequency convention: the row/column for o^dag at sideband w is the
complex conjugate of o's at -w, with partner columns swapped.  The map at -w
is therefore fully determined by the map at +w, which is what
``assemble_covariance`` exploits.

The mechanical bath enters both optical modes through the same noise
operator (the correlated (a_m_in, -a_m_in) injection); this sign structure
is what suppresses thermal noise in the difference channel.

Covariances are the symmetrized spectral densities over
xi = (X1, P1, X2, P2): Hermitian cross-spectra are reduced to their real
(frequency-even) part, the standard real covariance convention for
stationary fields.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NonConvergent, NotSymmetricState, SingularDrift
from .spectrum import StandardForm, ent_metrics, epr_variance_array, eof_array
from .steady_state import DerivedParams

_MIRROR_PERM = np.array([1, 0, 3, 2, 5, 4])
_A_ROWS = (0, 3)   # co-rotating outputs (a1_out, a2_out^dag)
_B_ROWS = (1, 2)   # their mirrored partners

# Quadrature map (X1, P1, X2, P2) <- (a1, a1^dag, a2, a2^dag) at fixed sideband.
_QUAD = np.array([
    [1.0, 1.0, 0.0, 0.0],
    [-1.0j, 1.0j, 0.0, 0.0],
    [0.0, 0.0, 1.0, 1.0],
    [0.0, 0.0, -1.0j, 1.0j],
])

# Symplectic form for X = a + a^dag normalization (vacuum variance 1).
SYMPLECTIC_FORM = np.array([
    [0.0, 1.0, 0.0, 0.0],
    [-1.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 1.0],
    [0.0, 0.0, -1.0, 0.0],
])

# Input-side commutator matrix [xi_a(w), xi_b(-w)] over the 6 operators.
_J_IN = np.zeros((6, 6))
for _k in range(3):
    _J_IN[2 * _k, 2 * _k + 1] = 1.0
    _J_IN[2 * _k + 1, 2 * _k] = -1.0
_J_OUT = np.zeros((4, 4))
_J_OUT[0, 1] = 1.0
_J_OUT[1, 0] = -1.0
_J_OUT[2, 3] = 1.0
_J_OUT[3, 2] = -1.0


@dataclass(frozen=True)
class Covariance4:
    """4x4 real symmetric spectral covariance over (X1, P1, X2, P2) at one frequency."""

    entries: np.ndarray
    omega: float

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=float)
        if entries.shape != (4, 4):
            raise ValueError("Covariance4 requires a 4x4 matrix")
        asym = np.max(np.abs(entries - entries.T))
        if asym > 1e-10 * max(1.0, float(np.max(np.abs(entries)))):
            raise ValueError(f"covariance not symmetric: max asymmetry {asym:.3e}")
        object.__setattr__(self, "entries", 0.5 * (entries + entries.T))

    def physicality_defect(self) -> float:
        """Most negative eigenvalue of V + i Omega (>= 0 for a physical state)."""
        ev = np.linalg.eigvalsh(self.entries + 1j * SYMPLECTIC_FORM)
        return float(ev.min())


@dataclass(frozen=True)
class LinearResponse:
    """Output response map at one rotating-frame sideband frequency.

    ``map_rows`` is the 4x6 matrix from the input basis
    (a1_in, a1_in^dag, a2_in, a2_in^dag, a_m_in, a_m_in^dag) to
    (a1_out, a1_out^dag, a2_out, a2_out^dag).
    """

    omega: float
    map_rows: np.ndarray

    def mirrored(self) -> np.ndarray:
        """The 4x6 response map at -omega, from conjugate pairing."""
        T = self.map_rows
        out = np.empty_like(T)
        out[0] = _mirror_row(T[1])
        out[1] = _mirror_row(T[0])
        out[2] = _mirror_row(T[3])
        out[3] = _mirror_row(T[2])
        return out

    def commutator_defect(self) -> float:
        """Max deviation of the output commutators from the bosonic values.

        Pairs the co-rotating and mirrored row blocks against each other
        only, exactly as the covariance assembly does: same-block products
        connect distinct physical frequencies and carry no commutator weight.
        """
        J = _masked_density(self.map_rows, self.mirrored(), _J_IN)
        return float(np.max(np.abs(J - _J_OUT)))


def _mirror_row(row: np.ndarray) -> np.ndarray:
    return np.conj(row)[_MIRROR_PERM]


def _assemble_map(gen_plus: np.ndarray, gen_minus: np.ndarray) -> np.ndarray:
    """Build the 4x6 map from the generator rows (a1_out, a2_out^dag) at +-omega."""
    T = np.empty((4, 6), dtype=complex)
    T[0] = gen_plus[0]
    T[1] = _mirror_row(gen_minus[0])
    T[2] = _mirror_row(gen_minus[1])
    T[3] = gen_plus[1]
    return T


def _rwa3_generator(derived: DerivedParams, omega: float) -> np.ndarray:
    """Generator rows of the 3-mode RWA system at one frequency."""
    gamma, gamma_m = derived.gamma, derived.gamma_m
    d = derived.d
    kappa = derived.eta * derived.omega_m * derived.alpha
    M = np.array([
        [-1j * d - gamma / 2.0, 0.0, -1j * kappa],
        [0.0, 1j * d - gamma / 2.0, 1j * kappa],
        [-1j * kappa, -1j * kappa, 1j * derived.delta - gamma_m / 2.0],
    ], dtype=complex)
    L = np.diag([math.sqrt(gamma), math.sqrt(gamma), math.sqrt(gamma_m)])
    try:
        S = np.linalg.solve(-1j * omega * np.eye(3) - M, L)
    except np.linalg.LinAlgError as exc:
        raise SingularDrift(f"3-mode drift singular at omega = {omega:.6e}") from exc
    gen = np.zeros((2, 6), dtype=complex)
    cols = (0, 3, 4)   # a1_in, a2_in^dag, a_m_in
    for k, c in enumerate(cols):
        gen[0, c] = math.sqrt(gamma) * S[0, k]
        gen[1, c] = math.sqrt(gamma) * S[1, k]
    gen[0, 0] -= 1.0   # a_out = -a_in + sqrt(gamma) a
    gen[1, 3] -= 1.0
    return gen


def rwa3_solve(derived: DerivedParams, omega: float) -> LinearResponse:
    """Exact output response of the 3-mode rotating-wave system at sideband omega."""
    return LinearResponse(omega, _assemble_map(
        _rwa3_generator(derived, omega), _rwa3_generator(derived, -omega)))


def _full6_drift(derived: DerivedParams) -> np.ndarray:
    gamma, gamma_m, omega_m = derived.gamma, derived.gamma_m, derived.omega_m
    cm = derived.eta * omega_m
    a1, a2 = derived.alpha_1, derived.alpha_2
    M = np.zeros((6, 6), dtype=complex)
    M[0, 0] = 1j * derived.Delta_1p - gamma / 2.0
    M[0, 4] = M[0, 5] = -1j * cm * a1
    M[1, 1] = -1j * derived.Delta_1p - gamma / 2.0
    M[1, 4] = M[1, 5] = 1j * cm * np.conj(a1)
    M[2, 2] = 1j * derived.Delta_2p - gamma / 2.0
    M[2, 4] = M[2, 5] = -1j * cm * a2
    M[3, 3] = -1j * derived.Delta_2p - gamma / 2.0
    M[3, 4] = M[3, 5] = 1j * cm * np.conj(a2)
    M[4, 0] = -1j * cm * np.conj(a1)
    M[4, 1] = -1j * cm * a1
    M[4, 2] = -1j * cm * np.conj(a2)
    M[4, 3] = -1j * cm * a2
    M[4, 4] = -1j * omega_m - gamma_m / 2.0
    M[5, 0] = 1j * cm * np.conj(a1)
    M[5, 1] = 1j * cm * a1
    M[5, 2] = 1j * cm * np.conj(a2)
    M[5, 3] = 1j * cm * a2
    M[5, 5] = 1j * omega_m - gamma_m / 2.0
    return M


def _full6_generator(derived: DerivedParams, omega: float) -> np.ndarray:
    """Generator rows of the 6-operator model at rotating-frame sideband ``omega``.

    The pre-RWA frame carries the sidebands at +-(omega_m + delta); the
    co-rotating pair (a1, a2^dag) at rotating-frame sideband w lives at the
    pre-RWA frequency w + omega_m + delta.
    """
    gamma, gamma_m = derived.gamma, derived.gamma_m
    w_abs = omega + derived.omega_m + derived.delta
    M = _full6_drift(derived)
    L = np.diag([math.sqrt(gamma)] * 4 + [math.sqrt(gamma_m)] * 2)
    try:
        S = np.linalg.solve(-1j * w_abs * np.eye(6) - M, L)
    except np.linalg.LinAlgError as exc:
        raise SingularDrift(f"6-mode drift singular at omega = {omega:.6e}") from exc
    T = math.sqrt(gamma) * S[:4, :]
    for k in range(4):
        T[k, k] -= 1.0
    return T[[0, 3], :]


def full6_solve(derived: DerivedParams, omega: float) -> LinearResponse:
    """Exact output response of the 6-operator pre-RWA model at sideband omega."""
    return LinearResponse(omega, _assemble_map(
        _full6_generator(derived, omega), _full6_generator(derived, -omega)))


def _adiabatic_generator(derived: DerivedParams, omega: float) -> np.ndarray:
    """Generator rows of the eliminated two-mode model at one frequency."""
    gamma = derived.gamma
    g, gp = derived.g, derived.g_prime
    s = math.sqrt(gamma * derived.gamma_m_tilde)
    A = np.array([
        [-1j * omega + gamma / 2.0 + 1j * gp, 1j * g],
        [-1j * g, -1j * omega + gamma / 2.0 - 1j * gp],
    ], dtype=complex)
    try:
        Ainv = np.linalg.inv(A)
    except np.linalg.LinAlgError as exc:
        raise SingularDrift(f"adiabatic drift singular at omega = {omega:.6e}") from exc
    gen = np.zeros((2, 6), dtype=complex)
    gen[0, 0] = gamma * Ainv[0, 0] - 1.0
    gen[0, 3] = gamma * Ainv[0, 1]
    gen[0, 4] = s * (Ainv[0, 0] - Ainv[0, 1])
    gen[1, 0] = gamma * Ainv[1, 0]
    gen[1, 3] = gamma * Ainv[1, 1] - 1.0
    gen[1, 4] = s * (Ainv[1, 0] - Ainv[1, 1])
    return gen


def adiabatic_response(derived: DerivedParams, omega: float) -> LinearResponse:
    """The adiabatic output model expressed as a LinearResponse (for cross-checks)."""
    return LinearResponse(omega, _assemble_map(
        _adiabatic_generator(derived, omega), _adiabatic_generator(derived, -omega)))


def _input_moments(n_m: float) -> np.ndarray:
    """Second moments <in_a(w) in_b(-w)> of the six inputs (vacuum optics, thermal mechanics)."""
    C = np.zeros((6, 6))
    C[0, 1] = 1.0
    C[2, 3] = 1.0
    C[4, 5] = n_m + 1.0
    C[5, 4] = n_m
    return C


def _masked_density(T_plus: np.ndarray, T_minus: np.ndarray, C: np.ndarray) -> np.ndarray:
    """<o_i(w) o_j(-w)> with co-rotating/mirrored rows paired against each other only.

    Rows of a response live at the model's physical frequency for their
    block; pairing a block with itself would cross distinct physical
    frequencies (a vanishing delta function), so only A-B products survive.
    For the 3-mode and adiabatic models the discarded products are
    identically zero; for the 6-operator model they would be spurious.
    """
    TA_p = np.zeros_like(T_plus)
    TB_p = np.zeros_like(T_plus)
    TA_p[list(_A_ROWS)] = T_plus[list(_A_ROWS)]
    TB_p[list(_B_ROWS)] = T_plus[list(_B_ROWS)]
    TA_m = np.zeros_like(T_minus)
    TB_m = np.zeros_like(T_minus)
    TA_m[list(_A_ROWS)] = T_minus[list(_A_ROWS)]
    TB_m[list(_B_ROWS)] = T_minus[list(_B_ROWS)]
    return TA_p @ C @ TB_m.T + TB_p @ C @ TA_m.T


def assemble_covariance(resp: LinearResponse, n_m: float) -> Covariance4:
    """Symmetrized quadrature covariance of the outputs for given bath occupancy.

    Optical inputs are vacuum; the mechanical input carries ``n_m``; all
    anomalous input moments vanish.  The Hermitian cross-spectrum is reduced
    to its real, frequency-even part.
    """
    C = _input_moments(n_m)
    T_plus = resp.map_rows
    T_minus = resp.mirrored()
    D_plus = _masked_density(T_plus, T_minus, C)
    D_minus = _masked_density(T_minus, T_plus, C)
    S = 0.5 * (_QUAD @ D_plus @ _QUAD.T + (_QUAD @ D_minus @ _QUAD.T).T)
    herm_defect = np.max(np.abs(S - S.conj().T))
    if herm_defect > 1e-7 * max(1.0, float(np.max(np.abs(S)))):
        raise ValueError(f"cross-spectrum not Hermitian: defect {herm_defect:.3e}")
    V = 0.5 * (S.real + S.real.T)
    return Covariance4(entries=V, omega=resp.omega)


def standard_form_reduce(V: Covariance4, residual_tol: float = 0.05) -> StandardForm:
    """Reduce a covariance to standard form by two local rotations.

    The diagonal blocks must already be close to n*I (local rotations cannot
    fix them); their worst deviation is reported as ``residual``.  The cross
    block is diagonalized singular-value style with the sign of its
    determinant carried into k_p.

    Raises
    ------
    NotSymmetricState
        If the residual exceeds ``residual_tol * n``; symmetric-state metrics
        must not be quoted for such a state.
    """
    M = V.entries
    n = float(np.trace(M)) / 4.0
    block_a = M[0:2, 0:2]
    block_b = M[2:4, 2:4]
    residual = max(
        float(np.max(np.abs(block_a - n * np.eye(2)))),
        float(np.max(np.abs(block_b - n * np.eye(2)))),
    )
    if residual > residual_tol * abs(n):
        raise NotSymmetricState(
            f"diagonal blocks deviate from n*I by {residual:.3e} (n = {n:.3e}); "
            "state is not symmetric enough for the standard form"
        )
    cross = M[0:2, 2:4]
    svals = np.linalg.svd(cross, compute_uv=False)
    det = float(np.linalg.det(cross))
    k_x = float(svals[0])
    k_p = float(svals[1]) * (1.0 if det > 0 else -1.0 if det < 0 else 0.0)
    return StandardForm(n=n, k_x=k_x, k_p=k_p, residual=residual)


def log_negativity(V: Covariance4) -> float:
    """Logarithmic negativity from the partially transposed symplectic spectrum."""
    P = np.diag([1.0, 1.0, 1.0, -1.0])
    Vt = P @ V.entries @ P
    ev = np.linalg.eigvals(1j * SYMPLECTIC_FORM @ Vt)
    nu_min = float(np.min(np.abs(ev)))
    if nu_min <= 0:
        return math.inf
    return max(0.0, -math.log2(nu_min))


def _rwa3_interior_density(derived: DerivedParams, omegas: np.ndarray) -> np.ndarray:
    """Spectral density <a1^dag a1>(w) of the intracavity field, batched over omegas."""
    gamma, gamma_m = derived.gamma, derived.gamma_m
    d = derived.d
    kappa = derived.eta * derived.omega_m * derived.alpha
    M = np.array([
        [-1j * d - gamma / 2.0, 0.0, -1j * kappa],
        [0.0, 1j * d - gamma / 2.0, 1j * kappa],
        [-1j * kappa, -1j * kappa, 1j * derived.delta - gamma_m / 2.0],
    ], dtype=complex)
    L = np.diag([math.sqrt(gamma), math.sqrt(gamma), math.sqrt(gamma_m)]).astype(complex)
    A = -1j * omegas[:, None, None] * np.eye(3) - M
    S = np.linalg.solve(A, np.broadcast_to(L, (omegas.size, 3, 3)))
    # Occupation picks up the (n+1)-ordered moments of the daggered inputs:
    # vacuum through the a2_in^dag column, thermal through the mechanical one.
    return np.abs(S[:, 0, 1]) ** 2 + derived.n_m * np.abs(S[:, 0, 2]) ** 2


def intracavity_occupation(derived: DerivedParams, rel_tol: float = 5e-3,
                           max_points: int = 2**20) -> float:
    """Stationary <a1^dag a1> from the 3-mode interior solution.

    Integrates the intracavity spectral density over [-delta, delta],
    doubling the grid until the trapezoid integral changes by less than
    ``rel_tol``.

    Raises
    ------
    NonConvergent
        If the grid would exceed ``max_points``.
    """
    npts = 2049
    previous = None
    while npts <= max_points:
        omegas = np.linspace(-derived.delta, derived.delta, npts)
        density = _rwa3_interior_density(derived, omegas)
        value = float(np.trapezoid(density, omegas)) / (2.0 * math.pi)
        if previous is not None:
            if value == 0.0 and previous == 0.0:
                return 0.0
            if abs(value - previous) <= rel_tol * abs(value):
                return value
        previous = value
        npts = 2 * (npts - 1) + 1
    raise NonConvergent(
        f"occupation integral not converged to {rel_tol:g} within {max_points} points"
    )


@dataclass(frozen=True)
class ModelPoint:
    epr_variance: float | None
    S_db: float | None
    eof: float | None
    error: str | None = None


@dataclass(frozen=True)
class ComparisonRow:
    omega: float
    values: dict[str, ModelPoint]
    deviations: dict[str, float]


@dataclass(frozen=True)
class ComparisonReport:
    rows: list[ComparisonRow]
    max_deviation: dict[str, float]
    baseline: str


def _model_point_closed_form(derived: DerivedParams, omega: float) -> ModelPoint:
    x = float(epr_variance_array(derived, np.array([omega]))[0])
    return ModelPoint(epr_variance=x, S_db=-10.0 * math.log10(x), eof=float(eof_array(np.array([x]))[0]))


def _model_point_response(solver, derived: DerivedParams, omega: float) -> ModelPoint:
    resp = solver(derived, omega)
    sf = standard_form_reduce(assemble_covariance(resp, derived.n_m))
    m = ent_metrics(sf)
    return ModelPoint(epr_variance=m.epr_variance, S_db=m.S_db, eof=m.eof)


_MODEL_SOLVERS = {"rwa3": rwa3_solve, "full6": full6_solve, "adiabatic_response": adiabatic_response}


def compare_models(derived: DerivedParams, omega_grid,
                   models: tuple[str, ...] = ("adiabatic", "rwa3", "full6")) -> ComparisonReport:
    """Cross-validate the closed-form model against the exact solvers.

    The first model in ``models`` is the deviation baseline.  ``adiabatic``
    is the closed form from :mod:`optoepr.spectrum`; ``adiabatic_response`` (the eliminated
    model assembled exactly) is also accepted.  Per-point failures are
    recorded in-row and excluded from the deviation summary.
    """
    if not models:
        raise ValueError("at least one model required")
    baseline = models[0]
    rows = []
    worst: dict[str, float] = {m: 0.0 for m in models[1:]}
    for omega in omega_grid:
        omega = float(omega)
        values: dict[str, ModelPoint] = {}
        for model in models:
            try:
                if model == "adiabatic":
                    values[model] = _model_point_closed_form(derived, omega)
                else:
                    values[model] = _model_point_response(_MODEL_SOLVERS[model], derived, omega)
            except KeyError:
                raise ValueError(f"unknown model {model!r}")
            except Exception as exc:
                values[model] = ModelPoint(None, None, None, error=type(exc).__name__)
        deviations = {}
        base = values[baseline]
        for model in models[1:]:
            pt = values[model]
            if base.error is None and pt.error is None and base.epr_variance:
                dev = abs(pt.epr_variance - base.epr_variance) / abs(base.epr_variance)
                deviations[model] = dev
                worst[model] = max(worst[model], dev)
        rows.append(ComparisonRow(omega=omega, values=values, deviations=deviations))
    return ComparisonReport(rows=rows, max_deviation=worst, baseline=baseline)
