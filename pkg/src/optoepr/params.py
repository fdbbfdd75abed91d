"""Laboratory parameters, unit conventions and validity-regime checks.

All frequencies and rates are stored as angular quantities [rad/s].  Linear
frequencies (Hz) are accepted only at configuration boundaries, where they
are multiplied by 2*pi once.  Types are immutable after construction and all
operations are pure functions, so everything here is safe to share between
workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .constants import CODATA, PhysicalConstants
from .errors import ConstraintViolated

TWO_PI = 2.0 * math.pi

# Balance tolerance for the normal-mode drive conditions.
DRIVE_BALANCE_TOL = 1e-9

# "Much greater than" is operationalised as a ratio of at least this value.
DEFAULT_REGIME_THRESHOLD = 5.0


@dataclass(frozen=True)
class DriveSpec:
    """Four-laser drive reduced to the two normal-mode drives.

    Exactly one of the pairs (omega_1, omega_2) or (p_1, p_2) is
    authoritative, selected by ``mode``; the other pair may be left None and
    is derived on demand (the power/amplitude conversion needs the cavity
    decay rate, so it lives on :class:`PhysicalParams`).

    Attributes
    ----------
    mode : str
        "amplitudes" or "powers".
    omega_1, omega_2 : float or None
        Drive amplitudes of the two normal modes [rad/s].
    p_1, p_2 : float or None
        Input laser powers for the two normal-mode drives [W].
    omega_l, omega_lp : float
        Absolute laser angular frequencies driving mode 1 and mode 2 [rad/s].
    """

    mode: str
    omega_l: float
    omega_lp: float
    omega_1: float | None = None
    omega_2: float | None = None
    p_1: float | None = None
    p_2: float | None = None

    def __post_init__(self):
        if self.mode not in ("amplitudes", "powers"):
            raise ValueError(f"drive mode must be 'amplitudes' or 'powers', got {self.mode!r}")
        if self.mode == "amplitudes":
            if self.omega_1 is None or self.omega_2 is None:
                raise ValueError("amplitude-mode drive requires omega_1 and omega_2")
            if self.omega_1 < 0 or self.omega_2 < 0:
                raise ValueError("drive amplitudes must be >= 0")
        else:
            if self.p_1 is None or self.p_2 is None:
                raise ValueError("power-mode drive requires p_1 and p_2")
            if self.p_1 < 0 or self.p_2 < 0:
                raise ValueError("drive powers must be >= 0")


@dataclass(frozen=True)
class PhysicalParams:
    """Laboratory-frame constants of the device and its drives.

    Attributes
    ----------
    omega_p : float
        Cavity resonance angular frequency [rad/s].
    omega_m : float
        Mechanical resonance angular frequency [rad/s].
    gamma : float
        Cavity amplitude decay rate [rad/s].
    gamma_m : float
        Mechanical decay rate [rad/s].
    nu : float
        Coupling rate between the two degenerate cavity modes [rad/s].
    eta : float
        Dimensionless optomechanical coupling parameter, 0 < eta < 1.
    T : float
        Bath temperature [K].
    R : float
        Cavity radius [m].
    n0 : float
        Refractive index of the cavity material.
    drive : DriveSpec
    constants : PhysicalConstants
    """

    omega_p: float
    omega_m: float
    gamma: float
    gamma_m: float
    nu: float
    eta: float
    T: float
    R: float
    n0: float
    drive: DriveSpec
    constants: PhysicalConstants = field(default=CODATA)

    def __post_init__(self):
        for name in ("omega_p", "omega_m", "gamma", "gamma_m", "nu", "R", "n0"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")
        if self.T < 0:
            raise ValueError("T must be >= 0")
        if not 0 < self.eta < 1:
            raise ValueError("eta must satisfy 0 < eta < 1")
        if self.gamma_m >= self.omega_m:
            raise ValueError("gamma_m must be << omega_m; got gamma_m >= omega_m")
        for name in ("omega_l", "omega_lp"):
            w = getattr(self.drive, name)
            if abs(w - self.omega_p) >= 10.0 * self.omega_m:
                raise ValueError(
                    f"{name} is {abs(w - self.omega_p):.3e} rad/s from omega_p; the sideband "
                    f"expansion requires |omega_L - omega_p| < 10 omega_m"
                )

    @property
    def q_factor(self) -> float:
        return self.omega_m / self.gamma_m

    def drive_amplitudes(self) -> tuple[float, float]:
        """Normal-mode drive amplitudes (Omega_1, Omega_2) [rad/s]."""
        d = self.drive
        if d.mode == "amplitudes":
            return d.omega_1, d.omega_2
        return (
            power_to_amplitude(d.p_1, d.omega_l, self.gamma, self.constants),
            power_to_amplitude(d.p_2, d.omega_lp, self.gamma, self.constants),
        )

    def drive_powers(self) -> tuple[float, float]:
        """Input laser powers (P_1, P_2) [W]."""
        d = self.drive
        if d.mode == "powers":
            return d.p_1, d.p_2
        return (
            amplitude_to_power(d.omega_1, d.omega_l, self.gamma, self.constants),
            amplitude_to_power(d.omega_2, d.omega_lp, self.gamma, self.constants),
        )

    def bare_detunings(self) -> tuple[float, float]:
        """Signed bare detunings (Delta_1, Delta_2) of the two normal modes [rad/s]."""
        return detunings(self.drive.omega_l, self.drive.omega_lp, self.omega_p, self.nu)

    def free_spectral_range(self) -> float:
        """Distance between adjacent cavity modes, c/(R n0) [rad/s-equivalent]."""
        return self.constants.c / (self.R * self.n0)

    def scaled(self, **changes) -> "PhysicalParams":
        """Copy with selected fields replaced."""
        return replace(self, **changes)


@dataclass(frozen=True)
class RegimeCheck:
    name: str
    ratio: float
    threshold: float
    passed: bool


@dataclass(frozen=True)
class RegimeReport:
    """Outcome of the approximation-validity checks; report-only, never raises."""

    checks: tuple[RegimeCheck, ...]
    overall_pass: bool

    def __str__(self) -> str:
        lines = []
        for c in self.checks:
            status = "pass" if c.passed else "FAIL"
            lines.append(f"  [{status}] {c.name}: ratio = {c.ratio:.3g} (threshold {c.threshold:g})")
        lines.append(f"  overall: {'pass' if self.overall_pass else 'FAIL'}")
        return "\n".join(lines)


def thermal_occupancy(omega_m: float, T: float, constants: PhysicalConstants = CODATA) -> float:
    """Bose-Einstein occupancy of a bath mode at angular frequency omega_m.

    Returns exactly 0 for T = 0 instead of evaluating the exponential.
    """
    if omega_m <= 0:
        raise ValueError("omega_m must be > 0")
    if T < 0:
        raise ValueError("T must be >= 0")
    if T == 0:
        return 0.0
    x = constants.hbar * omega_m / (constants.k_B * T)
    return 1.0 / math.expm1(x)


def power_to_amplitude(P: float, omega_L: float, gamma: float,
                       constants: PhysicalConstants = CODATA) -> float:
    """Drive amplitude Omega = 2 sqrt(P gamma / (hbar omega_L)) [rad/s]."""
    if P < 0:
        raise ValueError("P must be >= 0")
    if omega_L <= 0 or gamma <= 0:
        raise ValueError("omega_L and gamma must be > 0")
    return 2.0 * math.sqrt(P * gamma / (constants.hbar * omega_L))


def amplitude_to_power(Omega: float, omega_L: float, gamma: float,
                       constants: PhysicalConstants = CODATA) -> float:
    """Inverse of :func:`power_to_amplitude`: P = hbar omega_L Omega^2 / (4 gamma)."""
    if Omega < 0:
        raise ValueError("Omega must be >= 0")
    if omega_L <= 0 or gamma <= 0:
        raise ValueError("omega_L and gamma must be > 0")
    return constants.hbar * omega_L * Omega**2 / (4.0 * gamma)


def normal_mode_drives(Omega_a: float, Omega_b: float, Omega_ap: float, Omega_bp: float,
                       tol: float = DRIVE_BALANCE_TOL) -> tuple[float, float]:
    """Combine the four laser amplitudes into the two normal-mode drives.

    The symmetric/antisymmetric balance conditions Omega_a = Omega_b and
    Omega_a' = -Omega_b' must hold; otherwise each laser would drive both
    normal modes and the two-drive reduction is physically inconsistent.

    Returns
    -------
    (Omega_1, Omega_2) = (Omega_a + Omega_b, Omega_a' - Omega_b')
    """
    if abs(Omega_a - Omega_b) > tol * abs(Omega_a + Omega_b):
        raise ConstraintViolated(
            f"symmetric drive unbalanced: |Omega_a - Omega_b| = {abs(Omega_a - Omega_b):.3e}"
        )
    if abs(Omega_ap + Omega_bp) > tol * abs(Omega_ap - Omega_bp):
        raise ConstraintViolated(
            f"antisymmetric drive unbalanced: |Omega_a' + Omega_b'| = {abs(Omega_ap + Omega_bp):.3e}"
        )
    return Omega_a + Omega_b, Omega_ap - Omega_bp


def detunings(omega_L: float, omega_Lp: float, omega_p: float, nu: float) -> tuple[float, float]:
    """Signed detunings of the lasers from the two normal modes.

    Delta_1 = omega_L - omega_p - nu (mode at omega_p + nu),
    Delta_2 = omega_L' - omega_p + nu (mode at omega_p - nu).
    """
    return omega_L - omega_p - nu, omega_Lp - omega_p + nu


def eta_from_geometry(omega_p: float, omega_m: float, m: float, R: float,
                      constants: PhysicalConstants = CODATA) -> float:
    """Dimensionless coupling (omega_p/omega_m) x_zpf / R with x_zpf = sqrt(hbar/(m omega_m))."""
    if min(omega_p, omega_m, m, R) <= 0:
        raise ValueError("all arguments must be > 0")
    x_zpf = math.sqrt(constants.hbar / (m * omega_m))
    return (omega_p / omega_m) * x_zpf / R


def validate_regime(params: PhysicalParams, derived, omega_max: float,
                    thresholds: dict[str, float] | None = None) -> RegimeReport:
    """Evaluate the approximation-validity ratios for a solved operating point.

    Checks (each ratio must reach its threshold, default 5):

    * ``rwa``            omega_m / max(delta, d, gamma, gamma_m)
    * ``elimination``    delta / max(omega_max, gamma_m)
    * ``mode_spacing``   FSR / max(Omega_1, Omega_2) with FSR = c/(R n0)
    * ``linearization``  |Delta_j| / (2 eta^2 omega_m (|alpha_1|^2 + |alpha_2|^2)), both modes

    Parameters
    ----------
    derived : DerivedParams
        Output of ``solve_steady_state(params)``.
    omega_max : float
        Largest sideband frequency magnitude the caller intends to evaluate.
    """
    thr = dict(thresholds or {})

    def threshold(name):
        return thr.get(name, DEFAULT_REGIME_THRESHOLD)

    checks = []

    def add(name, ratio):
        t = threshold(name)
        checks.append(RegimeCheck(name, ratio, t, ratio >= t))

    add("rwa", params.omega_m / max(abs(derived.delta), abs(derived.d), params.gamma, params.gamma_m))
    add("elimination", derived.delta / max(abs(omega_max), params.gamma_m))

    omega_1, omega_2 = params.drive_amplitudes()
    biggest_drive = max(omega_1, omega_2)
    fsr = params.free_spectral_range()
    add("mode_spacing", math.inf if biggest_drive == 0 else fsr / biggest_drive)

    n_tot = abs(derived.alpha_1) ** 2 + abs(derived.alpha_2) ** 2
    shift = 2.0 * params.eta**2 * params.omega_m * n_tot
    d1, d2 = params.bare_detunings()
    for name, dj in (("linearization_1", d1), ("linearization_2", d2)):
        add(name, math.inf if shift == 0 else abs(dj) / shift)

    return RegimeReport(tuple(checks), all(c.passed for c in checks))
