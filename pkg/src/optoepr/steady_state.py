"""Classical steady state of the driven cavity and the linearized-model parameters.

The c-number displacements (alpha_1, alpha_2, beta) satisfy

    alpha_j = (Omega_j / 2) / (Delta_j + 2 eta^2 omega_m N + i gamma / 2),
    N       = |alpha_1|^2 + |alpha_2|^2,
    beta    ~= -eta * N,

so N obeys the scalar self-consistency equation

    N = sum_j (Omega_j^2 / 4) / ((Delta_j + 2 eta^2 omega_m N)^2 + gamma^2 / 4).

The equation is Kerr-cubic-like and can have several roots (optical
bistability); the solver brackets [0, sum Omega_j^2/gamma^2], scans for sign
changes, bisects each, and returns the smallest-N branch with a
``multistable`` flag when more than one root exists.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .errors import NoSteadyState, SignConventionViolated
from .params import DriveSpec, PhysicalParams, thermal_occupancy

# Relative tolerance on the bisection for the intensity root N.
ROOT_RTOL = 1e-14
BRACKET_SCAN_POINTS = 1024


@dataclass(frozen=True)
class DerivedParams:
    """Parameters of the linearized model, all in rad/s unless noted.

    Attributes
    ----------
    alpha_1, alpha_2 : complex
        Intracavity displacement amplitudes (dimensionless photon amplitudes).
    beta : float
        Mechanical displacement (real part; the imaginary part is dropped and
        its magnitude recorded in ``beta_imag_dropped``).
    Delta_1p, Delta_2p : float
        Intensity-shifted detunings; the operating point has Delta_1p < 0 < Delta_2p.
    delta : float
        Residual mechanical detuning (Delta_2p - Delta_1p)/2 - omega_m, > 0.
    d : float
        Common normal-mode offset -(Delta_1p + Delta_2p)/2, the entanglement knob.
    g : float
        Effective parametric rate eta^2 |alpha|^2 omega_m^2 / delta.
    g_prime : float
        g + d.
    gamma_m_tilde : float
        Effective mechanical noise rate (eta |alpha| omega_m / delta)^2 gamma_m.
    n_m : float
        Thermal occupancy of the mechanical bath.
    multistable : bool
        True when the intensity equation had more than one root.
    """

    alpha_1: complex
    alpha_2: complex
    beta: float
    beta_imag_dropped: float
    Delta_1p: float
    Delta_2p: float
    delta: float
    d: float
    g: float
    g_prime: float
    gamma_m_tilde: float
    n_m: float
    gamma: float
    gamma_m: float
    omega_m: float
    eta: float
    multistable: bool

    @property
    def alpha(self) -> float:
        """Common amplitude |alpha| used by the adiabatic model."""
        return 0.5 * (abs(self.alpha_1) + abs(self.alpha_2))

    @property
    def n_total(self) -> float:
        return abs(self.alpha_1) ** 2 + abs(self.alpha_2) ** 2

    def alpha_mismatch(self) -> float:
        """Relative mismatch between |alpha_1| and |alpha_2|."""
        a1, a2 = abs(self.alpha_1), abs(self.alpha_2)
        scale = max(a1, a2)
        return 0.0 if scale == 0 else abs(a1 - a2) / scale


def _intensity_rhs(N, omegas, deltas, eta2wm2, gamma):
    """Right-hand side of the self-consistency equation at intensity N."""
    total = 0.0
    for om, dj in zip(omegas, deltas):
        shifted = dj + eta2wm2 * N
        total += (om * om / 4.0) / (shifted * shifted + gamma * gamma / 4.0)
    return total


def _scan_grid(upper, deltas, eta2wm2):
    """Scan abscissas: uniform + logarithmic + resonance neighbourhoods.

    The response resonances N = -Delta_j / (2 eta^2 omega_m) pack roots into
    narrow clusters, and the physical (smallest) root can sit far below the
    bracket top, so a purely uniform scan can straddle an even number of
    crossings and miss them.
    """
    pts = {0.0, upper}
    for k in range(1, BRACKET_SCAN_POINTS):
        pts.add(upper * k / BRACKET_SCAN_POINTS)
    lo = upper * 1e-14
    ratio = (upper / lo) ** (1.0 / 512)
    x = lo
    for _ in range(512):
        pts.add(x)
        x *= ratio
    if eta2wm2 > 0:
        for dj in deltas:
            n_res = -dj / eta2wm2
            if 0.0 < n_res < upper:
                for frac in (0.9, 0.99, 0.999, 1.001, 1.01, 1.1):
                    pts.add(min(upper, n_res * frac))
    return sorted(pts)


def _find_roots(omegas, deltas, eta2wm2, gamma):
    """All roots of N = rhs(N) in [0, sum Omega^2/gamma^2], smallest first."""
    upper = sum(om * om for om in omegas) / gamma**2
    if upper == 0.0:
        return [0.0]

    def f(N):
        return N - _intensity_rhs(N, omegas, deltas, eta2wm2, gamma)

    grid = _scan_grid(upper, deltas, eta2wm2)
    vals = [f(N) for N in grid]
    roots = []
    for lo, hi, flo, fhi in zip(grid, grid[1:], vals, vals[1:]):
        if flo == 0.0:
            roots.append(lo)
            continue
        if flo * fhi < 0.0:
            a, b, fa = lo, hi, flo
            while b - a > ROOT_RTOL * max(b, 1.0):
                mid = 0.5 * (a + b)
                fm = f(mid)
                if fm == 0.0:
                    a = b = mid
                elif fa * fm < 0.0:
                    b = mid
                else:
                    a, fa = mid, fm
            roots.append(0.5 * (a + b))
    if vals[-1] == 0.0:
        roots.append(grid[-1])
    return roots


def solve_steady_state(params: PhysicalParams) -> DerivedParams:
    """Solve the displacement steady state and derive the linearized-model parameters.

    Returns the smallest-N stable branch; sets ``multistable`` when the
    intensity equation has several roots.

    Raises
    ------
    NoSteadyState
        If no root exists in the physical bracket (cannot happen for finite
        drives; kept as a guard).
    SignConventionViolated
        If the resulting operating point violates Delta_1p < 0 < Delta_2p or
        delta <= 0, i.e. the drive frequencies are inconsistent with the
        two-sideband arrangement the model assumes.
    """
    omega_1, omega_2 = params.drive_amplitudes()
    delta_1, delta_2 = params.bare_detunings()
    eta2wm2 = 2.0 * params.eta**2 * params.omega_m

    roots = _find_roots((omega_1, omega_2), (delta_1, delta_2), eta2wm2, params.gamma)
    if not roots:
        raise NoSteadyState("no intensity root in [0, sum Omega^2/gamma^2]")
    N = roots[0]
    multistable = len(roots) > 1

    # one Newton polish on the bisected root
    if N > 0:
        h = 1e-7 * N
        f0 = N - _intensity_rhs(N, (omega_1, omega_2), (delta_1, delta_2), eta2wm2, params.gamma)
        f1 = (N + h) - _intensity_rhs(N + h, (omega_1, omega_2), (delta_1, delta_2),
                                      eta2wm2, params.gamma)
        slope = (f1 - f0) / h
        if slope != 0.0:
            step = f0 / slope
            if abs(step) < 0.5 * N:
                N -= step

    shift = eta2wm2 * N
    d1p = delta_1 + shift
    d2p = delta_2 + shift
    alpha_1 = (omega_1 / 2.0) / (d1p + 1j * params.gamma / 2.0)
    alpha_2 = (omega_2 / 2.0) / (d2p + 1j * params.gamma / 2.0)

    # beta from the mechanical c-number balance; imaginary part ~ gamma_m/(2 omega_m).
    denom = params.omega_m**2 + params.gamma_m**2 / 4.0
    beta = -params.eta * params.omega_m * N * params.omega_m / denom
    beta_imag = params.eta * params.omega_m * N * (params.gamma_m / 2.0) / denom

    if d1p >= 0.0 or d2p <= 0.0:
        raise SignConventionViolated(
            f"operating point requires Delta_1' < 0 < Delta_2'; got {d1p:.4e}, {d2p:.4e}"
        )
    delta = 0.5 * (d2p - d1p) - params.omega_m
    d = -0.5 * (d1p + d2p)
    if delta <= 0.0:
        raise SignConventionViolated(f"elimination requires delta > 0; got {delta:.4e}")

    a1, a2 = abs(alpha_1), abs(alpha_2)
    if max(a1, a2) > 0 and abs(a1 - a2) > 1e-3 * max(a1, a2):
        warnings.warn(
            f"unequal cavity amplitudes |alpha_1| = {a1:.6g}, |alpha_2| = {a2:.6g}; "
            "the adiabatic output model assumes alpha_1 = alpha_2",
            stacklevel=2,
        )
    alpha = 0.5 * (a1 + a2)

    g = params.eta**2 * alpha**2 * params.omega_m**2 / delta
    gamma_m_tilde = (params.eta * alpha * params.omega_m / delta) ** 2 * params.gamma_m

    return DerivedParams(
        alpha_1=alpha_1,
        alpha_2=alpha_2,
        beta=beta,
        beta_imag_dropped=beta_imag,
        Delta_1p=d1p,
        Delta_2p=d2p,
        delta=delta,
        d=d,
        g=g,
        g_prime=g + d,
        gamma_m_tilde=gamma_m_tilde,
        n_m=thermal_occupancy(params.omega_m, params.T, params.constants),
        gamma=params.gamma,
        gamma_m=params.gamma_m,
        omega_m=params.omega_m,
        eta=params.eta,
        multistable=multistable,
    )


def steady_state_residual(params: PhysicalParams, derived: DerivedParams) -> float:
    """Largest residual |i Delta_j a_j + 2i eta^2 w_m a_j N - (gamma/2) a_j - i Omega_j/2|.

    Diagnostic for the root quality; < 1e-10 |Omega_j| for a converged solve.
    """
    omega_1, omega_2 = params.drive_amplitudes()
    delta_1, delta_2 = params.bare_detunings()
    N = derived.n_total
    worst = 0.0
    for om, dj, aj in ((omega_1, delta_1, derived.alpha_1), (omega_2, delta_2, derived.alpha_2)):
        res = (1j * dj * aj + 2j * params.eta**2 * params.omega_m * aj * N
               - params.gamma / 2.0 * aj - 1j * om / 2.0)
        if om > 0:
            worst = max(worst, abs(res) / om)
    return worst


def amplitude_to_drive(target_alpha: float, Delta_j: float, params: PhysicalParams,
                       rtol: float = 1e-3, max_iter: int = 60) -> float:
    """Drive amplitude Omega_j that puts |alpha_j| at ``target_alpha``.

    ``Delta_j`` is the mode's detuning at the operating point, i.e. the
    intensity-shifted Delta_j' for eta > 0 (for eta = 0 the bare and shifted
    detunings coincide and the closed form is exact with no iteration).  The
    intensity shift itself is evaluated under the symmetric two-mode
    configuration alpha_1 = alpha_2 = target_alpha, which is how every caller
    in this package drives the system.

    The closed-form seed Omega = target_alpha sqrt(gamma^2 + 4 Delta_j^2) is
    polished against the single-mode magnitude response until the round trip
    reproduces the target within ``rtol``.
    """
    if target_alpha <= 0:
        raise ValueError("target_alpha must be > 0")
    gamma = params.gamma
    omega = target_alpha * math.sqrt(gamma**2 + 4.0 * Delta_j**2)
    if params.eta == 0.0:
        return omega
    for _ in range(max_iter):
        achieved = (omega / 2.0) / math.hypot(Delta_j, gamma / 2.0)
        if abs(achieved - target_alpha) <= rtol * target_alpha:
            break
        omega *= target_alpha / achieved
    return omega


def operating_point_params(base: PhysicalParams, target_alpha: float,
                           target_delta: float, target_d: float) -> PhysicalParams:
    """Re-derive laser frequencies and drive amplitudes hitting a requested operating point.

    Chooses the effective detunings Delta_1' = -(omega_m + delta + d) and
    Delta_2' = omega_m + delta - d, backs out the bare detunings by removing
    the intensity shift at N = 2 target_alpha^2, and sets the drive
    amplitudes so that |alpha_1| = |alpha_2| = target_alpha exactly at that
    root.
    """
    if target_delta <= 0:
        raise ValueError("target_delta must be > 0")
    d1p_t = -(base.omega_m + target_delta + target_d)
    d2p_t = base.omega_m + target_delta - target_d
    if d2p_t <= 0:
        raise SignConventionViolated(
            f"target d = {target_d:.4e} too large: Delta_2' = {d2p_t:.4e} would not be positive"
        )

    shift = 2.0 * base.eta**2 * base.omega_m * (2.0 * target_alpha**2)
    delta_1 = d1p_t - shift
    delta_2 = d2p_t - shift
    omega_l = base.omega_p + base.nu + delta_1
    omega_lp = base.omega_p - base.nu + delta_2

    omega_1 = amplitude_to_drive(target_alpha, d1p_t, base)
    omega_2 = amplitude_to_drive(target_alpha, d2p_t, base)
    drive = DriveSpec(mode="amplitudes", omega_l=omega_l, omega_lp=omega_lp,
                      omega_1=omega_1, omega_2=omega_2)
    return base.scaled(drive=drive)


def retuned_d(params: PhysicalParams, new_d: float) -> PhysicalParams:
    """Move the offset d to ``new_d``, holding delta and the common amplitude.

    Both effective detunings shift by the same amount -(new_d - d); the
    drive amplitudes are rebalanced at the same time so that
    |alpha_1| = |alpha_2| stays at the current common value (detuning and
    power are always tuned together to keep the amplitudes equal).  The
    returned drive is in amplitudes mode.
    """
    derived = solve_steady_state(params)
    return operating_point_params(params, target_alpha=derived.alpha,
                                  target_delta=derived.delta, target_d=new_d)
