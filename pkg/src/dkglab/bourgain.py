"""Space-time spectra of sampled fields and discrete Bourgain-type norms.

Space-time coefficients extend the spatial convention to time,

    C(xi_k, tau_j) = dx dt / (2 pi) * sum_{x, t} u(x, t) exp(-i (x xi_k + t tau_j)),

over a periodic time window of ``N_t`` samples, ``T_w = N_t * dt`` and
``tau_j = 2 pi j / T_w`` for ``j = -N_t/2, ..., N_t/2 - 1``.  Arrays are laid
out ``(..., N, N_t)``: frequency axis second to last, ``tau`` last.  All
l^q sums carry the weight ``dxi * dtau`` so that ``q = 2`` is Parseval.

A free wave ``exp(i k (x - t))`` lands on ``tau = -xi``, i.e. on zero
modulation for the ``+`` line phase ``tau + xi``.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .spectral import SQRT_2PI, GridSpec, dual_index, forward, inverse, japanese

WINDOWS = ("none", "bump")
MIN_SAMPLES = 8


def tau_grid(n_t: int, T_w: float) -> np.ndarray:
    return 2.0 * np.pi / T_w * np.arange(-(n_t // 2), n_t - n_t // 2)


def window_weights(kind: str, n_t: int) -> np.ndarray:
    """Taper over the window; ``bump`` is the C-infinity bump exp(1 - 1/(1 - u^2))."""
    if kind == "none":
        return np.ones(n_t)
    if kind != "bump":
        raise ValueError(f"unknown window {kind!r}; choose from {WINDOWS}")
    u = 2.0 * np.arange(n_t) / n_t - 1.0
    w = np.zeros(n_t)
    inside = np.abs(u) < 1.0
    w[inside] = np.exp(1.0 - 1.0 / (1.0 - u[inside] ** 2))
    return w


def _time_forward(c, dt: float, t0: float = 0.0) -> np.ndarray:
    # c: (..., N_t) -> (..., N_t) over tau, monotone order
    n_t = c.shape[-1]
    out = np.fft.fftshift(np.fft.fft(c, axis=-1), axes=-1) * (dt / SQRT_2PI)
    if t0 != 0.0:
        out = out * np.exp(-1j * tau_grid(n_t, n_t * dt) * t0)
    return out


def _time_inverse(c, dt: float, t0: float = 0.0) -> np.ndarray:
    n_t = c.shape[-1]
    if t0 != 0.0:
        c = c * np.exp(1j * tau_grid(n_t, n_t * dt) * t0)
    return np.fft.ifft(np.fft.ifftshift(c, axes=-1), axis=-1) * (SQRT_2PI / dt)


def st_forward(values, grid: GridSpec, dt: float, t0: float = 0.0) -> np.ndarray:
    """Physical samples ``(..., N, N_t)`` -> space-time coefficients, same layout."""
    values = np.asarray(values)
    spatial = forward(np.swapaxes(values, -1, -2), grid)  # (..., N_t, N)
    return _time_forward(np.swapaxes(spatial, -1, -2), dt, t0)


def st_inverse(coeffs, grid: GridSpec, dt: float, t0: float = 0.0) -> np.ndarray:
    coeffs = np.asarray(coeffs)
    c = np.swapaxes(_time_inverse(coeffs, dt, t0), -1, -2)
    return np.swapaxes(inverse(c, grid), -1, -2)


@dataclass(frozen=True)
class SpaceTimeSpectrum:
    """Coefficients ``(..., N, N_t)`` on the (xi, tau) lattice, with window metadata."""

    grid: GridSpec
    dt: float
    coeffs: np.ndarray = field(repr=False)
    window: str = "none"
    t0: float = 0.0

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim < 2 or c.shape[-2] != self.grid.N:
            raise ValueError(f"coeffs must be (..., {self.grid.N}, N_t), got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("space-time coefficients must be finite")
        if self.window not in WINDOWS:
            raise ValueError(f"unknown window {self.window!r}")
        object.__setattr__(self, "coeffs", c)

    @property
    def n_t(self) -> int:
        return self.coeffs.shape[-1]

    @property
    def T_w(self) -> float:
        return self.n_t * self.dt

    @property
    def dtau(self) -> float:
        return 2.0 * np.pi / self.T_w

    @property
    def tau(self) -> np.ndarray:
        return tau_grid(self.n_t, self.T_w)

    @property
    def xi(self) -> np.ndarray:
        return self.grid.xi

    def samples(self) -> np.ndarray:
        """Physical (tapered) samples in trajectory layout ``(N_t, ..., N)``."""
        v = st_inverse(self.coeffs, self.grid, self.dt, self.t0)
        return np.moveaxis(np.swapaxes(v, -1, -2), -2, 0)

    def l2_norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.coeffs) ** 2) * self.grid.dxi * self.dtau))

    def meta(self) -> dict:
        return {"N": self.grid.N, "L": self.grid.L, "N_t": self.n_t, "T_w": self.T_w,
                "dt": self.dt, "window": self.window}


def _from_spatial_coeffs(c_t, grid, dt, window, t0) -> SpaceTimeSpectrum:
    c_t = np.asarray(c_t)
    n_t = c_t.shape[0]
    if n_t < MIN_SAMPLES:
        raise ValueError(f"need at least {MIN_SAMPLES} time samples, got {n_t}")
    w = window_weights(window, n_t)
    c = np.moveaxis(c_t, 0, -1) * w  # (..., N, N_t)
    return SpaceTimeSpectrum(grid, dt, _time_forward(c, dt, t0), window, t0)


def spacetime_spectrum_from_samples(values, grid: GridSpec, dt: float, window: str = "none",
                                    t0: float = 0.0) -> SpaceTimeSpectrum:
    """Spectrum of physical samples laid out ``(N_t, ..., N)`` at times ``t0 + n dt``."""
    return _from_spatial_coeffs(forward(np.asarray(values), grid), grid, dt, window, t0)


def spacetime_spectrum(traj, component: str = "psi_plus", window: str = "none") -> SpaceTimeSpectrum:
    """Spectrum of one unknown of a trajectory.

    The final sample is dropped so the periodic window is ``[t0, t0 + T)`` with
    ``T_w = T``; a trajectory over a full period then closes up exactly.
    """
    data = traj.component(component)[:-1]
    return _from_spatial_coeffs(data, traj.grid, traj.config.dt, window, float(traj.times[0]))


# --- norms ------------------------------------------------------------------------------

@dataclass(frozen=True)
class PhaseSpec:
    """Weight ``<xi>^l <tau + phase(xi)>^b`` with phase ``sign*xi`` (line) or ``sign*|xi|`` (cone)."""

    kind: str
    sign: int
    l: float
    b: float
    p: float

    def __post_init__(self):
        if self.kind not in ("line", "cone"):
            raise ValueError(f"phase kind must be 'line' or 'cone', got {self.kind!r}")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        if not 1.0 < self.p <= 2.0:
            raise ValueError(f"p must lie in (1, 2], got {self.p}")

    @property
    def p_dual(self) -> float:
        return dual_index(self.p)

    def phase(self, xi) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        return self.sign * (xi if self.kind == "line" else np.abs(xi))

    def label(self) -> str:
        return ("X" if self.kind == "line" else "Y") + ("+" if self.sign > 0 else "-")


def phase_weight(xi, tau, kind: str, sign: int, l: float, b: float) -> np.ndarray:
    """``<xi>^l <tau + phase(xi)>^b`` on the (xi, tau) lattice, shape (N, N_t)."""
    xi = np.asarray(xi, dtype=float)[:, None]
    tau = np.asarray(tau, dtype=float)[None, :]
    ph = xi if kind == "line" else np.abs(xi)
    return japanese(xi) ** l * japanese(tau + sign * ph) ** b


def weighted_norm(coeffs, xi, tau, dxi: float, dtau: float, kind: str, sign: int,
                  l: float, b: float, q: float) -> float:
    """Weighted l^q norm over (xi, tau) of the Euclidean modulus over leading axes."""
    c = np.asarray(coeffs)
    amp = np.sqrt(np.sum(np.abs(c.reshape((-1,) + c.shape[-2:])) ** 2, axis=0))
    w = phase_weight(xi, tau, kind, sign, l, b)
    a = amp * w
    if np.isinf(q):
        return float(a.max())
    return float((np.sum(a ** q) * dxi * dtau) ** (1.0 / q))


def xsb_norm(spec: SpaceTimeSpectrum, phase: PhaseSpec) -> float:
    """Discrete X/Y norm: l^{p'} of ``<xi>^l <tau + phase(xi)>^b |C|`` with weight dxi dtau."""
    return weighted_norm(spec.coeffs, spec.xi, spec.tau, spec.grid.dxi, spec.dtau,
                         phase.kind, phase.sign, phase.l, phase.b, phase.p_dual)


def mixed_norm(coeffs, dxi: float, dtau: float, p: float, q: float) -> float:
    """``||f||_{L^p_x(L^q_t)}`` (hatted) ``= || ||C||_{l^{q'}_tau} ||_{l^{p'}_xi}``."""
    c = np.asarray(coeffs)
    amp = np.sqrt(np.sum(np.abs(c.reshape((-1,) + c.shape[-2:])) ** 2, axis=0))
    pq, qq = dual_index(p), dual_index(q)
    if np.isinf(qq):
        inner = amp.max(axis=-1)
    else:
        inner = (np.sum(amp ** qq, axis=-1) * dtau) ** (1.0 / qq)
    if np.isinf(pq):
        return float(inner.max())
    return float((np.sum(inner ** pq) * dxi) ** (1.0 / pq))


def norm_report(spec: SpaceTimeSpectrum, phase: PhaseSpec) -> dict:
    return {
        "phase": {"kind": phase.kind, "sign": phase.sign, "label": phase.label()},
        "l": phase.l,
        "b": phase.b,
        "p": phase.p,
        "value": xsb_norm(spec, phase),
        "grid": spec.meta(),
    }


def norm_report_json(reports) -> str:
    return json.dumps(reports, indent=1, sort_keys=True)


# --- modulation variables -----------------------------------------------------------

@dataclass(frozen=True)
class ModulationTriple:
    sigma1_plus: float
    sigma2_minus: float
    sigma_plus: float
    sigma_minus: float
    xi: float
    tau: float

    def as_dict(self) -> dict:
        return asdict(self)


def modulation_triple(xi1, tau1, xi2, tau2) -> ModulationTriple:
    """``tau1 + xi1``, ``tau2 - xi2`` and ``tau +- |xi|`` for ``xi = xi1 + xi2``, ``tau = tau1 + tau2``.

    Works elementwise on arrays as well.
    """
    xi = xi1 + xi2
    tau = tau1 + tau2
    return ModulationTriple(tau1 + xi1, tau2 - xi2, tau + abs(xi), tau - abs(xi), xi, tau)
