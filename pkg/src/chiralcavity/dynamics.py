"""Mean-field dynamics of a driven cavity coupled to N identical two-level molecules.

Three closures of the moment hierarchy are provided:

``first``
    Fully factorized (first-order cumulant) equations.
``dissipative``
    First order plus free-space decay, collective decay and a bounded
    dipole-dipole shift.
``second``
    Second-order cumulant equations.  Molecules are identical and see the
    same coupling, so every single-molecule moment and every cross-molecule
    pair moment is represented by one variable.

Complex variables are integrated as interleaved (real, imag) pairs.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from numpy.typing import NDArray
from scipy.integrate import solve_ivp

logger = logging.getLogger(__name__)

MODELS = ("first", "dissipative", "second")


class IntegrationError(RuntimeError):
    def __init__(self, message: str, t_fail: float):
        super().__init__(f"{message} (at t={t_fail:.6g} s)")
        self.t_fail = t_fail


@dataclass(frozen=True)
class DriveConfig:
    """Probe drive.  All rates in rad/s; ``lam`` is N0 / N_cr."""

    eta: float
    kappa: float
    Delta_m: float
    Delta_c: float = 0.0
    lam: float = float("nan")

    @classmethod
    def from_lambda(
        cls, lam: float, kappa: float, g0: float, Delta_m: float, Delta_c: float = 0.0
    ) -> "DriveConfig":
        if lam < 0:
            raise ValueError("lambda must be non-negative")
        n_cr = 4.0 * Delta_m**2 / g0**2
        return cls(
            eta=kappa * math.sqrt(lam * n_cr),
            kappa=kappa,
            Delta_m=Delta_m,
            Delta_c=Delta_c,
            lam=lam,
        )

    @property
    def photon_number(self) -> float:
        """Empty-cavity photon number eta^2 / kappa^2."""
        return (self.eta / self.kappa) ** 2


@dataclass(frozen=True)
class SampleConfig:
    N_m: float
    v: float = 1.0
    Ybar0: float = float("nan")
    trapped: bool = False
    sigma_z0: float = 1.0
    L: float = float("nan")

    def __post_init__(self):
        if self.N_m < 0:
            raise ValueError("N_m must be non-negative")
        if not self.trapped and not self.v > 0:
            raise ValueError("a moving sample needs v > 0")


@dataclass(frozen=True)
class DissipationParams:
    gamma: float = 0.0
    V_max: float = 0.0

    def __post_init__(self):
        if self.gamma < 0 or self.V_max < 0:
            raise ValueError("dissipation parameters must be non-negative")


@dataclass(frozen=True)
class IntegratorConfig:
    rtol: float = 1e-8
    atol: float = 1e-10
    method: str = "DOP853"
    max_step: float = math.inf


@dataclass
class MeanFieldState:
    c: complex
    sigma: complex
    sigma_z: float

    def to_array(self) -> NDArray[np.float64]:
        return np.array([self.c.real, self.c.imag, self.sigma.real, self.sigma.imag, self.sigma_z])

    @classmethod
    def from_array(cls, y) -> "MeanFieldState":
        return cls(complex(y[0], y[1]), complex(y[2], y[3]), float(y[4]))


# index map of the homogenized second-order state
SECOND_ORDER_FIELDS = (
    "c",  # <c>
    "s",  # <sigma_l>
    "z",  # <sigma^z_l>
    "zc",  # <sigma^z_l c>
    "sdc",  # <sigma^dag_l c>
    "sc",  # <sigma_l c>
    "cc",  # <c c>
    "cdc",  # <c^dag c>
    "sds",  # <sigma^dag_l sigma_p>, l != p
    "zs",  # <sigma^z_l sigma_p>
    "zz",  # <sigma^z_l sigma^z_p>
    "ss",  # <sigma_l sigma_p>
)
_IDX = {name: i for i, name in enumerate(SECOND_ORDER_FIELDS)}


@dataclass
class SecondOrderState:
    """First moments plus the homogeneous second moments, all complex."""

    values: NDArray[np.complex128]

    def __getattr__(self, name):
        try:
            return self.values[_IDX[name]]
        except KeyError:
            raise AttributeError(name) from None

    @classmethod
    def factorized(cls, c: complex, s: complex, z: float) -> "SecondOrderState":
        """Second moments equal to products of first moments (no correlations)."""
        sc, z = complex(s), complex(z)
        c = complex(c)
        v = np.empty(len(SECOND_ORDER_FIELDS), dtype=complex)
        v[_IDX["c"]] = c
        v[_IDX["s"]] = sc
        v[_IDX["z"]] = z
        v[_IDX["zc"]] = z * c
        v[_IDX["sdc"]] = sc.conjugate() * c
        v[_IDX["sc"]] = sc * c
        v[_IDX["cc"]] = c * c
        v[_IDX["cdc"]] = abs(c) ** 2
        v[_IDX["sds"]] = abs(sc) ** 2
        v[_IDX["zs"]] = z * sc
        v[_IDX["zz"]] = z * z
        v[_IDX["ss"]] = sc * sc
        return cls(v)

    def connected(self) -> dict[str, complex]:
        """Second moments minus their factorized parts."""
        ref = SecondOrderState.factorized(self.c, self.s, self.z.real).values
        return {k: self.values[i] - ref[i] for k, i in _IDX.items() if i >= 3}


def coupling_profile(sample: SampleConfig, g0: float, w0: float, t):
    """Sample-averaged coupling at time ``t`` (scalar or array)."""
    if sample.trapped:
        out = np.full(np.shape(t), 0.5 * g0)
        return float(out) if out.ndim == 0 else out
    y = (sample.Ybar0 + sample.v * np.asarray(t, dtype=float)) / w0
    out = 0.5 * g0 * np.exp(-(y * y))
    return float(out) if out.ndim == 0 else out


def deriv_first_order(
    state: MeanFieldState, gbar: float, drive: DriveConfig, sample: SampleConfig
) -> MeanFieldState:
    c, s, z = state.c, state.sigma, state.sigma_z
    dc = -drive.kappa * c - 1j * gbar * sample.N_m * s + drive.eta
    ds = -1j * drive.Delta_m * s + 1j * gbar * c * z
    dz = 2j * gbar * (c.conjugate() * s - c * s.conjugate())
    return MeanFieldState(dc, ds, dz.real)


def deriv_dissipative(
    state: MeanFieldState,
    gbar: float,
    drive: DriveConfig,
    sample: SampleConfig,
    diss: DissipationParams,
) -> MeanFieldState:
    c, s, z = state.c, state.sigma, state.sigma_z
    g, V = diss.gamma, diss.V_max
    pairs = sample.N_m - 1.0
    dc = -(drive.kappa + 1j * drive.Delta_c) * c - 1j * gbar * sample.N_m * s + drive.eta
    ds = -(g + 1j * drive.Delta_m) * s + 1j * gbar * c * z + pairs * (1j * V + g) * z * s
    dz = (
        -2.0 * g * (z + 1.0)
        + (2j * gbar * (c.conjugate() * s - c * s.conjugate())).real
        - 4.0 * pairs * g * abs(s) ** 2
    )
    return MeanFieldState(dc, ds, dz)


def _second_order_rhs(v: NDArray[np.complex128], gbar: float, kappa, Dm, eta, N) -> NDArray:
    c, s, z, zc, sdc, sc, cc, cdc, sds, zs, zz, ss = v
    cs, ss_, cds = c.conjugate(), s.conjugate(), sdc.conjugate()  # <c^dag>, <sigma^dag>, <c^dag sigma>
    czd = zc.conjugate()  # <c^dag sigma^z>
    szd = zs.conjugate()  # <sigma^dag sigma^z>
    sz = zs  # <sigma_l sigma^z_p>, symmetric under l <-> p
    ig = 1j * gbar
    M = N - 1.0

    d = np.empty(12, dtype=complex)
    d[0] = -kappa * c - ig * N * s + eta
    d[1] = -1j * Dm * s + ig * zc
    d[2] = 2.0 * ig * (cds - sdc)
    d[3] = (
        -kappa * zc
        + ig * s
        - ig * M * zs
        + eta * z
        + 2.0 * ig * (cds * c + cs * sc + cdc * s - 2.0 * cs * s * c - ss_ * cc - 2.0 * sdc * c + 2.0 * ss_ * c * c)
    )
    d[4] = (
        -(kappa - 1j * Dm) * sdc
        - ig * (0.5 * (z + 1.0) + M * sds)
        + eta * ss_
        - ig * (cs * zc + czd * c + z * cdc - 2.0 * cs * z * c)
    )
    d[8] = -ig * (
        z * cds
        + czd * s
        + zs * cs
        - 2.0 * z * cs * s
        - ss_ * zc
        - szd * c
        - sdc * z
        + 2.0 * ss_ * z * c
    )
    d[9] = (
        -1j * Dm * zs
        + ig * (z * zc + zz * c + zc * z - 2.0 * z * z * c)
        + 2.0 * ig * (cs * ss + cds * s + cds * s - 2.0 * cs * s * s - ss_ * sc - sdc * s - sds * c + 2.0 * ss_ * c * s)
    )
    # The minus sign on the last term keeps <sigma^z sigma^z> real.
    d[10] = 4.0 * ig * (
        cs * sz + cds * z + czd * s - 2.0 * cs * s * z - ss_ * zc - sdc * z - szd * c + 2.0 * ss_ * c * z
    )
    d[6] = -2.0 * kappa * cc - 2.0 * ig * N * sc + 2.0 * eta * c
    d[5] = (
        -1j * Dm * sc
        + ig * (z * cc + 2.0 * zc * c - 2.0 * z * c * c)
        - kappa * sc
        - ig * M * ss
        + eta * s
    )
    d[7] = -2.0 * kappa * cdc + ig * N * (sdc - cds) + eta * (c + cs)
    d[11] = -2j * Dm * ss + 2.0 * ig * (z * sc + sz * c + zc * s - 2.0 * z * c * s)
    return d


def deriv_second_order(
    state: SecondOrderState, gbar: float, drive: DriveConfig, sample: SampleConfig
) -> SecondOrderState:
    return SecondOrderState(
        _second_order_rhs(state.values, gbar, drive.kappa, drive.Delta_m, drive.eta, float(sample.N_m))
    )


def steady_state_dispersive(gbar: float, drive: DriveConfig, sample: SampleConfig, sigma_z: float) -> complex:
    """Quasi-static cavity amplitude with the molecular coherence eliminated."""
    if drive.kappa <= 0:
        raise ValueError("kappa must be positive")
    return drive.eta / (drive.kappa + 1j * gbar**2 * sample.N_m * sigma_z / drive.Delta_m)


@dataclass
class Trajectory:
    """Dense samples of an integrated run.  Times in s, rates in rad/s."""

    t: NDArray[np.float64]
    c: NDArray[np.complex128]
    sigma: NDArray[np.complex128]
    sigma_z: NDArray[np.float64]
    gbar: NDArray[np.float64]
    kappa: float
    model: str
    moments: Optional[dict[str, NDArray[np.complex128]]] = field(default=None, repr=False)
    nfev: int = 0

    def signal(self, phi_lo: float) -> NDArray[np.float64]:
        """Homodyne signal per unit local-oscillator amplitude, sqrt(Hz)."""
        return math.sqrt(2.0 * self.kappa) * np.real(np.exp(-1j * phi_lo) * self.c)

    @property
    def bloch_norm(self) -> NDArray[np.float64]:
        return self.sigma_z**2 + 4.0 * np.abs(self.sigma) ** 2

    def to_csv(self, path_or_file, phi_lo: float = -math.pi / 2, header: dict | None = None) -> None:
        cols = np.column_stack(
            [
                self.t,
                self.c.real,
                self.c.imag,
                np.abs(self.c),
                np.angle(self.c),
                self.sigma.real,
                self.sigma.imag,
                self.sigma_z,
                self.gbar,
                self.signal(phi_lo),
            ]
        )
        lines = [
            f"# model: {self.model}",
            "# units: t [s]; c [sqrt(photons)]; arg c [rad]; sigma, sigma_z [1]; "
            "gbar [rad/s]; N [sqrt(Hz)] per unit |c_lo|",
            f"# phi_lo: {phi_lo!r}",
        ]
        for k, v in (header or {}).items():
            lines.append(f"# {k}: {v}")
        lines.append("t,Re_c,Im_c,abs_c,arg_c,Re_sigma,Im_sigma,sigma_z,gbar,N")
        body = "\n".join(",".join(repr(float(x)) for x in row) for row in cols)
        text = "\n".join(lines) + "\n" + body + "\n"
        if hasattr(path_or_file, "write"):
            path_or_file.write(text)
        else:
            with open(path_or_file, "w") as fh:
                fh.write(text)


def default_grid(sample: SampleConfig, w0: float, t_end: float | None = None) -> NDArray[np.float64]:
    """Output grid: [0, 8 tau] in steps of tau/1000 when moving, 10^4 samples when trapped."""
    if sample.trapped:
        t_end = 10.0 if t_end is None else t_end
        return np.linspace(0.0, t_end, 10_001)
    tau = w0 / sample.v
    if t_end is None:
        return np.linspace(0.0, 8.0 * tau, 8001)
    n = int(round(t_end / tau * 1000))
    return np.linspace(0.0, t_end, n + 1)


def _pack(z: NDArray[np.complex128]) -> NDArray[np.float64]:
    return z.view(np.float64).copy()


def _unpack(y: NDArray[np.float64]) -> NDArray[np.complex128]:
    return np.ascontiguousarray(y).view(np.complex128)


def make_rhs(
    model: str,
    g0: float,
    w0: float,
    drive: DriveConfig,
    sample: SampleConfig,
    diss: DissipationParams | None = None,
) -> Callable[[float, NDArray], NDArray]:
    """Real-valued right-hand side for ``solve_ivp``."""
    kappa, Dm, Dc, eta, N = drive.kappa, drive.Delta_m, drive.Delta_c, drive.eta, float(sample.N_m)
    trapped, v, Y0 = sample.trapped, sample.v, sample.Ybar0
    half_g0 = 0.5 * g0
    if not trapped and not math.isfinite(Y0):
        raise ValueError("moving sample needs a finite initial position Ybar0")

    def gbar_at(t):
        if trapped:
            return half_g0
        y = (Y0 + v * t) / w0
        return half_g0 * math.exp(-y * y)

    if model == "first":

        def rhs(t, y):
            g = gbar_at(t)
            c = complex(y[0], y[1])
            s = complex(y[2], y[3])
            z = y[4]
            dc = -kappa * c - 1j * g * N * s + eta
            ds = -1j * Dm * s + 1j * g * c * z
            dz = -4.0 * g * (c.real * s.imag - c.imag * s.real)
            return [dc.real, dc.imag, ds.real, ds.imag, dz]

        return rhs

    if model == "dissipative":
        diss = diss or DissipationParams()
        gam, V = diss.gamma, diss.V_max
        pairs = N - 1.0

        def rhs(t, y):
            g = gbar_at(t)
            c = complex(y[0], y[1])
            s = complex(y[2], y[3])
            z = y[4]
            dc = -(kappa + 1j * Dc) * c - 1j * g * N * s + eta
            ds = -(gam + 1j * Dm) * s + 1j * g * c * z + pairs * (1j * V + gam) * z * s
            dz = (
                -2.0 * gam * (z + 1.0)
                - 4.0 * g * (c.real * s.imag - c.imag * s.real)
                - 4.0 * pairs * gam * (s.real**2 + s.imag**2)
            )
            return [dc.real, dc.imag, ds.real, ds.imag, dz]

        return rhs

    if model == "second":

        def rhs(t, y):
            return _pack(_second_order_rhs(_unpack(y), gbar_at(t), kappa, Dm, eta, N))

        return rhs

    raise ValueError(f"unknown model {model!r}; expected one of {MODELS}")


def initial_state(model: str, drive: DriveConfig, sigma_z0: float, c0: complex | None = None) -> NDArray[np.float64]:
    """c(0) = eta/kappa, sigma(0) = 0, sigma_z(0) = sigma_z0."""
    c0 = complex(drive.eta / drive.kappa) if c0 is None else complex(c0)
    if model == "second":
        return _pack(SecondOrderState.factorized(c0, 0.0, sigma_z0).values)
    return MeanFieldState(c0, 0j, float(sigma_z0)).to_array()


def integrate(
    model: str,
    config,
    t_span: tuple[float, float] | None = None,
    output_grid=None,
    *,
    sigma_z0: float | None = None,
    diss: DissipationParams | None = None,
    check_conservation: bool = True,
) -> Trajectory:
    """Integrate ``config`` (a :class:`chiralcavity.config.RunConfig`) with ``model``.

    ``output_grid`` defaults to :func:`default_grid`.  First-order runs check
    that (sigma_z)^2 + 4|sigma|^2 stays at its initial value to 1e-6.
    """
    if model not in MODELS:
        raise ValueError(f"unknown model {model!r}; expected one of {MODELS}")
    cav, drive, sample, integ = config.cavity, config.drive, config.sample, config.integrator
    if sigma_z0 is None:
        sigma_z0 = sample.sigma_z0
    if output_grid is None:
        t_end = None if t_span is None else t_span[1]
        output_grid = default_grid(sample, cav.w0, t_end)
    output_grid = np.asarray(output_grid, dtype=float)
    if t_span is None:
        t_span = (float(output_grid[0]), float(output_grid[-1]))
    if not (np.all(np.isfinite(t_span)) and t_span[1] > t_span[0]):
        raise ValueError("t_span must be finite and increasing")
    if output_grid[0] < t_span[0] - 1e-15 or output_grid[-1] > t_span[1] + 1e-12 * abs(t_span[1]):
        raise ValueError("output grid must lie within t_span")
    output_grid = np.clip(output_grid, t_span[0], t_span[1])

    if diss is None:
        diss = getattr(config, "dissipation", None)
    rhs = make_rhs(model, cav.g0, cav.w0, drive, sample, diss)
    y0 = initial_state(model, drive, sigma_z0)
    sol = solve_ivp(
        rhs,
        t_span,
        y0,
        method=integ.method,
        t_eval=output_grid,
        rtol=integ.rtol,
        atol=integ.atol,
        max_step=integ.max_step,
    )
    if sol.status != 0:
        t_fail = float(sol.t[-1]) if sol.t.size else float(t_span[0])
        raise IntegrationError(f"integration failed: {sol.message}", t_fail)

    t = sol.t
    gbar = coupling_profile(sample, cav.g0, cav.w0, t)
    moments = None
    if model == "second":
        Z = _unpack(sol.y.T.copy())
        c, sigma, sigma_z = Z[:, 0], Z[:, 1], Z[:, 2].real
        moments = {name: Z[:, i] for name, i in _IDX.items()}
    else:
        y = sol.y
        c = y[0] + 1j * y[1]
        sigma = y[2] + 1j * y[3]
        sigma_z = y[4].copy()
    traj = Trajectory(t, c, sigma, sigma_z, np.asarray(gbar), drive.kappa, model, moments, sol.nfev)

    if model == "first" and check_conservation:
        drift = float(np.max(np.abs(traj.bloch_norm - traj.bloch_norm[0])))
        if drift > 1e-6:
            raise IntegrationError(f"Bloch norm drifted by {drift:.3g}; tighten tolerances", float(t[-1]))
    return traj
