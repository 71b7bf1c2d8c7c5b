"""Gaussian-measure phase-space pair transform of two functions.

For f, g on R^d the transform at Z = (z, zeta) is

    W_h(f, g)(Z) = exp(|zeta|^2/h) int exp(-2i zeta.t/h) f(z+t) conj(g(z-t))
                   dmu_{d, h/2}(t),

computed by Gauss-Hermite quadrature whose order grows with the oscillation
|zeta|^2/h (order >= 40 + 10 |zeta|^2/h; past the configured cap the value
is still returned but flagged through a LowConfidenceWarning).  It relates
to the Lebesgue-measure pair transform of the gamma-images by

    W_h(f, g)(Z) = 2^(-d) exp(|Z|^2/h) W^Leb_h(gamma f, gamma g)(Z),
    W^Leb_h(u, v)(Z) = int exp(-i t.zeta/h) u(z + t/2) conj(v(z - t/2)) dt,

and admits the kernel representation

    W_h(f, g)(Z) = int weyl_kernel(X, Y, Z) (T f)(X) conj((T g)(Y))
                   dmu_{2d x 2d, h}(X, Y).

For coherent states the closed form is
exp(-(|X|^2+|Y|^2)/(4h)) weyl_kernel(X, Y, Z).
"""

import csv
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InputError, ResourceError
from .gaussian import PhasePoint, tensor_rule
from .hermite import FunctionRep, gamma_map
from .bargmann import transform_on_nodes, weyl_kernel, weyl_kernel_grid

MAX_OSC_ORDER = 2400


class LowConfidenceWarning(UserWarning):
    """Oscillation outpaced the quadrature budget; value returned anyway."""


def oscillation_order(zeta_sq_over_h: float, cap: int = MAX_OSC_ORDER) -> int:
    """Quadrature order for oscillation exp(-2i zeta.t/h): 40 + 10 |zeta|^2/h.

    Orders round up to multiples of 16 so the cached root tables are reused.
    """
    need = 40 + int(math.ceil(10.0 * zeta_sq_over_h))
    need = 16 * ((need + 15) // 16)
    if need > cap:
        warnings.warn(
            f"oscillatory quadrature order {need} capped at {cap}; "
            "value is low-confidence",
            LowConfidenceWarning,
        )
        return cap
    return need


def wigner_gauss(f: FunctionRep, g: FunctionRep, Z: PhasePoint,
                 order: int | None = None) -> complex:
    """Pair transform W_h(f, g)(Z) by oscillation-adapted quadrature."""
    basis = f.basis
    if g.basis.dim != basis.dim or abs(g.basis.h - basis.h) > 1e-12:
        raise InputError("f and g must live on the same space")
    if Z.dim != basis.dim:
        raise InputError("phase point dimension mismatch")
    h, d = basis.h, basis.dim
    z, zeta = Z.x, Z.xi
    if order is None:
        order = oscillation_order(float(zeta @ zeta) / h)
    nodes, weights = tensor_rule([0.5 * h] * d, order)
    phase = np.exp(-2j * (nodes @ zeta) / h)
    vals = f(z[None, :] + nodes) * np.conj(g(z[None, :] - nodes))
    return complex(math.exp(float(zeta @ zeta) / h) * (weights @ (phase * vals)))


def _leb_pair_transform(u, v, Z: PhasePoint, h: float, half_width: float,
                        n_grid: int) -> complex:
    """W^Leb_h(u, v)(Z) on a uniform trapezoid grid (independent oracle path)."""
    d = Z.dim
    if d != 1:
        raise InputError("the Lebesgue pair transform oracle is 1-dim")
    ts = np.linspace(-half_width, half_width, n_grid)
    dt = ts[1] - ts[0]
    pts_p = Z.x[None, :] + 0.5 * ts[:, None]
    pts_m = Z.x[None, :] - 0.5 * ts[:, None]
    vals = np.asarray(u(pts_p)) * np.conj(np.asarray(v(pts_m)))
    phase = np.exp(-1j * ts * Z.xi[0] / h)
    return complex(np.sum(vals * phase) * dt)


def wigner_leb_relation_check(f: FunctionRep, g: FunctionRep, Z: PhasePoint,
                              n_grid: int = 2001):
    """Both sides of the Gaussian/Lebesgue pair-transform relation.

    Returns (W_h(f,g)(Z), 2^(-d) exp(|Z|^2/h) W^Leb(gamma f, gamma g)(Z)),
    each by an independent quadrature (Gauss-Hermite vs uniform trapezoid).
    """
    basis = f.basis
    h, d = basis.h, basis.dim
    lhs = wigner_gauss(f, g, Z)
    spread = math.sqrt(h * (2 * basis.max_degree + 1)) + 8.0 * math.sqrt(h)
    width = 2.0 * (spread + float(np.linalg.norm(Z.x)))
    rhs_leb = _leb_pair_transform(
        lambda p: np.asarray(gamma_map(f, p)),
        lambda p: np.asarray(gamma_map(g, p)),
        Z, h, width, n_grid,
    )
    rhs = 2.0 ** (-d) * math.exp(Z.norm_sq / h) * rhs_leb
    return lhs, rhs


def wigner_coherent(X: PhasePoint, Y: PhasePoint, Z: PhasePoint, h: float) -> complex:
    """Closed form exp(-(|X|^2+|Y|^2)/(4h)) weyl_kernel(X, Y, Z)."""
    return math.exp(-(X.norm_sq + Y.norm_sq) / (4.0 * h)) * weyl_kernel(X, Y, Z, h)


def wigner_via_bargmann(f: FunctionRep, g: FunctionRep, Z: PhasePoint,
                        order: int | None = None) -> complex:
    """Kernel representation of the pair transform (4d-dim quadrature)."""
    basis = f.basis
    d, h = basis.dim, basis.h
    if d > 2:
        raise ResourceError("kernel representation is limited to dim <= 2")
    q = order if order is not None else (32 if d == 1 else 10)
    nodes, weights = tensor_rule([h] * (2 * d), q)
    tf = transform_on_nodes(f, nodes)
    tg = transform_on_nodes(g, nodes)
    wn = nodes[:, :d] + 1j * nodes[:, d:]
    kern = weyl_kernel_grid(wn, wn, Z.w, h)
    return complex((weights * tf) @ kern @ (weights * np.conj(tg)))


@dataclass
class WignerGrid:
    """Pair-transform values on an evaluation set, with provenance."""

    zs: np.ndarray       # (n, d)
    zetas: np.ndarray    # (n, d)
    values: np.ndarray   # (n,) complex
    h: float
    provenance: str = "quadrature"

    def bound_defects(self, f_norm: float, g_norm: float) -> np.ndarray:
        """values against the growth bound exp(|Z|^2/h) |f| |g|; <= 0 means ok."""
        r2 = np.sum(self.zs**2, axis=1) + np.sum(self.zetas**2, axis=1)
        return np.abs(self.values) - np.exp(r2 / self.h) * f_norm * g_norm

    def to_csv(self, path, metadata: dict | None = None):
        with open(path, "w", newline="") as fh:
            for key, val in (metadata or {}).items():
                fh.write(f"# {key}={val}\n")
            writer = csv.writer(fh)
            d = self.zs.shape[1]
            writer.writerow(
                [f"z{j}" for j in range(d)]
                + [f"zeta{j}" for j in range(d)]
                + ["re", "im"]
            )
            for i in range(self.zs.shape[0]):
                writer.writerow(
                    [f"{float(v):.17g}" for v in self.zs[i]]
                    + [f"{float(v):.17g}" for v in self.zetas[i]]
                    + [f"{float(self.values[i].real):.17g}",
                       f"{float(self.values[i].imag):.17g}"]
                )


def wigner_grid(f: FunctionRep, g: FunctionRep, zs, zetas) -> WignerGrid:
    """Evaluate the pair transform on a point set."""
    zs = np.atleast_2d(np.asarray(zs, dtype=float))
    zetas = np.atleast_2d(np.asarray(zetas, dtype=float))
    vals = np.array(
        [
            wigner_gauss(f, g, PhasePoint(zs[i], zetas[i]))
            for i in range(zs.shape[0])
        ]
    )
    return WignerGrid(zs, zetas, vals, f.basis.h)
