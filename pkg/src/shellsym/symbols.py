"""Douglis-Nirenberg systems, ellipticity and the Shapiro-Lopatinskii test.

A system is described by integer indices ``t_j`` (unknowns) and ``s_k``
(equations) together with a generator for its frozen-coefficient principal
symbol ``L'(x, xi)``: entry ``(k, j)`` is homogeneous in ``xi`` of degree
``s_k + t_j`` (or identically zero).  Ellipticity asks the determinant of
``L'`` not to vanish for real ``xi != 0``; the Shapiro-Lopatinskii (SL)
condition asks whether a set of half of the characteristic boundary data
determines the decaying half-space solutions uniquely.

The boundary frame convention is the usual one: ``x1`` tangential, ``x2``
the inward normal, symbols written in ``D = -i d/dx`` so that solutions of
the half-space ODE system are ``exp(i*xi2*x2)`` times vector polynomials
with ``Im(xi2) > 0`` for decay.

Four built-in systems are provided on surface-elliptic points: the
first-order rigidity system (zero membrane strain), its adjoint tension
system, the second-order membrane system and the fourth-order
membrane+bending system with thickness weight ``eps**2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .geometry import ElasticityTensor, MetricData
from .polymat import ExpPolyMode, PolyMatrix, apply_normal_ode

DET_RTOL = 1e-8           # relative threshold for "determinant is nonzero"
KERNEL_RTOL = 1e-5        # singular-value threshold for null-space dimension
ROOT_CLUSTER_RTOL = 1e-5  # radius for grouping repeated characteristic roots


class EllipticityError(ValueError):
    """The system fails Douglis-Nirenberg ellipticity where it is required."""


class JordanDepthError(NotImplementedError):
    """Characteristic root with a Jordan structure deeper than chains of 2."""


class DegenerateModeError(ValueError):
    """A mode construction hit a numerically defective configuration."""


@dataclass(frozen=True)
class DNSystem:
    """Douglis-Nirenberg system with a principal-symbol generator.

    ``symbol_gen(point, xi)`` must return the complex ``n x n`` matrix
    ``L'(x, xi)`` for ``xi`` a complex 2-vector; entries are polynomials of
    degree ``s_k + t_j`` in ``xi``.
    """

    name: str
    n_unknowns: int
    n_equations: int
    t_indices: tuple
    s_indices: tuple
    symbol_gen: Callable[[MetricData, Sequence[complex]], np.ndarray]

    def __post_init__(self):
        if len(self.t_indices) != self.n_unknowns:
            raise ValueError("one t index per unknown")
        if len(self.s_indices) != self.n_equations:
            raise ValueError("one s index per equation")
        if self.total_order % 2 != 0:
            raise ValueError("total order must be even")

    @property
    def total_order(self) -> int:
        return sum(self.s_indices) + sum(self.t_indices)

    @property
    def half_order(self) -> int:
        return self.total_order // 2

    @property
    def max_entry_degree(self) -> int:
        return max(max(self.s_indices) + max(self.t_indices), 0)


@dataclass(frozen=True)
class BoundaryConditionSet:
    """``m`` boundary operators with indices ``r_k``; entry degrees ``r_k + t_j``."""

    name: str
    r_indices: tuple
    symbol_gen: Callable[[MetricData, Sequence[complex]], np.ndarray]

    @property
    def count(self) -> int:
        return len(self.r_indices)


@dataclass
class SLReport:
    """Outcome of a Shapiro-Lopatinskii check at one boundary point."""

    point_id: str
    xi1: float
    half_order: int
    decaying_roots: np.ndarray
    sl_matrix: np.ndarray
    sl_determinant: complex
    satisfied: bool
    witness: list | None = None   # ExpPolyMode list spanning a nonzero null solution

    CSV_HEADER = "point_id,xi1,m,abs_det,satisfied"

    def csv_row(self, fmt=lambda x: format(x, ".17g")) -> str:
        return ",".join([self.point_id, fmt(self.xi1), str(self.half_order),
                         fmt(abs(self.sl_determinant)), str(self.satisfied).lower()])


# ---------------------------------------------------------------------------
# built-in symbol matrices
# ---------------------------------------------------------------------------

def strain_symbol(point: MetricData, xi) -> np.ndarray:
    """Symbol of the strain operator rows ``(g11, g22, 2*g12)``, ``d -> i*xi``."""
    b11, b12, b22 = point.b_triple
    x1, x2 = xi
    return np.array([
        [1j * x1, 0.0, -b11],
        [0.0, 1j * x2, -b22],
        [1j * x2, 1j * x1, -2.0 * b12],
    ], dtype=complex)


def strain_symbol_conj(point: MetricData, xi) -> np.ndarray:
    """Coefficient-conjugated strain symbol (the formal-adjoint factor)."""
    b11, b12, b22 = point.b_triple
    x1, x2 = xi
    return np.array([
        [-1j * x1, 0.0, -b11],
        [0.0, -1j * x2, -b22],
        [-1j * x2, -1j * x1, -2.0 * b12],
    ], dtype=complex)


def bending_strain_symbol(point: MetricData, xi, conj: bool = False) -> np.ndarray:
    """Principal symbol of the curvature-change rows ``(r11, r22, 2*r12)``.

    Tangential entries are first order through the mixed curvature tensor,
    the normal entry second order.
    """
    bm = point.b_mixed
    x1, x2 = xi
    s = -1j if conj else 1j
    m = np.empty((3, 3), dtype=complex)
    # rho_ab row: u_k coefficient  s*(b^k_b * xi_a + b^k_a * xi_b);
    #             u3  coefficient  -xi_a * xi_b  (doubled on the shear row)
    pairs = [(x1, x1, 0, 0), (x2, x2, 1, 1), (x1, x2, 0, 1)]
    for r, (xa, xb, a, b) in enumerate(pairs):
        scale = 2.0 if r == 2 else 1.0
        for k in range(2):
            m[r, k] = scale * s * (bm[k, b] * xa + bm[k, a] * xb)
        m[r, 2] = -scale * xa * xb
    return m


def _require_kind(name):
    kinds = ("rigidity", "membrane_tension", "membrane", "koiter")
    if name not in kinds:
        raise ValueError(f"unknown system {name!r}; choose from {kinds}")


def builtin_system(name: str, point: MetricData,
                   elasticity: ElasticityTensor | None = None,
                   eps: float = 0.0) -> DNSystem:
    """One of the four built-in shell systems at a boundary-frame point.

    The generators re-read the curvature data from the point they are handed,
    so a system built here can be evaluated at other points; ``elasticity``
    and ``eps`` are bound at construction.  Points are assumed expressed in
    the orthonormal boundary frame.
    """
    _require_kind(name)
    if name != "rigidity":
        point.require_surface_elliptic()
    if name in ("membrane", "koiter") and elasticity is None:
        raise ValueError(f"{name} system needs an elasticity tensor")
    if eps < 0:
        raise ValueError("eps must be nonnegative")

    if name == "rigidity":
        return DNSystem("rigidity", 3, 3, (1, 1, 0), (0, 0, 0), strain_symbol)

    if name == "membrane_tension":
        def gen(pt, xi):
            return strain_symbol_conj(pt, xi).T
        return DNSystem("membrane_tension", 3, 3, (0, 0, 0), (1, 1, 0), gen)

    ma = elasticity.membrane if elasticity is not None else None

    if name == "membrane":
        def gen(pt, xi, _ma=ma):
            g = strain_symbol(pt, xi)
            gc = strain_symbol_conj(pt, xi)
            return gc.T @ _ma @ g
        return DNSystem("membrane", 3, 3, (1, 1, 0), (1, 1, 0), gen)

    mb = elasticity.bending

    def gen(pt, xi, _ma=ma, _mb=mb, _e2=eps ** 2):
        g = strain_symbol(pt, xi)
        gc = strain_symbol_conj(pt, xi)
        membrane = gc.T @ _ma @ g
        r = bending_strain_symbol(pt, xi)
        rc = bending_strain_symbol(pt, xi, conj=True)
        out = _e2 * (rc.T @ _mb @ r)
        # membrane terms are principal only in the tangential block; the
        # remaining membrane entries are of lower order for indices (1,1,2)
        out[:2, :2] += membrane[:2, :2]
        return out

    return DNSystem("koiter", 3, 3, (1, 1, 2), (1, 1, 2), gen)


_DIRICHLET_ROWS = {"u1": 0, "u2": 1, "u3": 2}


def builtin_boundary_conditions(name: str,
                                elasticity: ElasticityTensor | None = None
                                ) -> BoundaryConditionSet:
    """Standard boundary-condition sets.

    ``u1`` / ``u2`` / ``u3``
        single Dirichlet condition for the rigidity system;
    ``membrane_dirichlet``
        tangential-displacement pair ``u1 = u2 = 0``;
    ``membrane_traction``
        traction-free pair ``T^{2b}(u) = 0`` (normal rows of the stress);
    ``koiter_clamped``
        ``u1 = u2 = u3 = d_n u3 = 0``.
    """
    if name in _DIRICHLET_ROWS:
        row = _DIRICHLET_ROWS[name]

        def gen(pt, xi, _row=row):
            out = np.zeros((1, 3), dtype=complex)
            out[0, _row] = 1.0
            return out
        r = (-1,) if row < 2 else (0,)
        return BoundaryConditionSet(name, r, gen)

    if name == "membrane_dirichlet":
        def gen(pt, xi):
            return np.array([[1, 0, 0], [0, 1, 0]], dtype=complex)
        return BoundaryConditionSet(name, (-1, -1), gen)

    if name == "membrane_traction":
        if elasticity is None:
            raise ValueError("traction conditions need an elasticity tensor")

        def gen(pt, xi, _ma=elasticity.membrane):
            stress = _ma @ strain_symbol(pt, xi)   # rows (T11, T22, T12)
            return stress[[2, 1], :]               # (T21, T22) = normal rows
        return BoundaryConditionSet("membrane_traction", (0, 0), gen)

    if name == "koiter_clamped":
        def gen(pt, xi):
            x1, x2 = xi
            return np.array([
                [1, 0, 0],
                [0, 1, 0],
                [0, 0, 1],
                [0, 0, 1j * x2],
            ], dtype=complex)
        return BoundaryConditionSet("koiter_clamped", (-1, -1, -2, -1), gen)

    raise ValueError(f"unknown boundary condition set {name!r}")


# ---------------------------------------------------------------------------
# determinant, ellipticity, characteristic roots
# ---------------------------------------------------------------------------

def principal_determinant(system: DNSystem, point: MetricData, xi) -> complex:
    """Determinant of the principal symbol at ``xi`` (complex 2-vector)."""
    if abs(complex(xi[0])) == 0 and abs(complex(xi[1])) == 0:
        raise ValueError("xi must be nonzero")
    return complex(np.linalg.det(system.symbol_gen(point, xi)))


@dataclass(frozen=True)
class EllipticityReport:
    elliptic: bool
    min_abs_det: float
    max_abs_det: float
    n_angles: int


def ellipticity_check(system: DNSystem, point: MetricData,
                      n_angles: int = 360) -> EllipticityReport:
    """Scan ``|det L'|`` over the unit circle of real frequencies.

    Homogeneity reduces real ``xi != 0`` to the unit circle.  The verdict is
    relative: elliptic iff ``min |D| > DET_RTOL * max |D|``.
    """
    if n_angles < 8:
        raise ValueError("n_angles must be at least 8")
    thetas = np.linspace(0.0, 2.0 * np.pi, n_angles, endpoint=False)
    vals = np.array([abs(principal_determinant(
        system, point, (np.cos(t), np.sin(t)))) for t in thetas])
    lo, hi = float(vals.min()), float(vals.max())
    return EllipticityReport(lo > DET_RTOL * hi, lo, hi, n_angles)


def _det_poly_in_xi2(system: DNSystem, point: MetricData, xi1: float) -> np.ndarray:
    """Ascending coefficients of ``det L'(xi1, .)``; exact degree ``2m``."""
    deg = system.total_order
    radius = max(1.0, abs(xi1))
    n = deg + 1
    zs = radius * np.exp(2j * np.pi * np.arange(n) / n)
    dets = np.array([np.linalg.det(system.symbol_gen(point, (xi1, z)))
                     for z in zs])
    js = np.arange(n)
    phases = np.exp(-2j * np.pi * np.outer(js, js) / n)
    coeffs = phases @ dets / n
    coeffs /= radius ** js
    return coeffs


def characteristic_roots(system: DNSystem, point: MetricData,
                         xi1: float) -> np.ndarray:
    """Roots in ``xi2`` of ``det L'(x, xi1, xi2) = 0``, with multiplicity.

    Exactly ``m`` roots must have positive and ``m`` negative imaginary part;
    a root that is real to within tolerance signals an ellipticity failure.
    Root-finding goes through the companion matrix of the degree-``2m``
    polynomial.
    """
    if xi1 == 0:
        raise ValueError("xi1 must be nonzero")
    coeffs = _det_poly_in_xi2(system, point, xi1)
    scale = np.abs(coeffs).max()
    if scale == 0:
        raise EllipticityError("principal determinant vanishes identically")
    if abs(coeffs[-1]) < 1e-10 * scale:
        raise EllipticityError(
            f"{system.name}: determinant degenerates in the normal frequency "
            f"(leading coefficient ~ {abs(coeffs[-1]):.2e})")
    roots = np.roots(coeffs[::-1])
    im_tol = 1e-8 * (1.0 + np.abs(roots))
    if np.any(np.abs(roots.imag) < im_tol):
        bad = roots[np.abs(roots.imag) < im_tol]
        raise EllipticityError(
            f"{system.name}: real characteristic root(s) {bad} at xi1={xi1}")
    m = system.half_order
    if np.sum(roots.imag > 0) != m:
        raise EllipticityError(
            f"{system.name}: expected {m} decaying roots, found "
            f"{int(np.sum(roots.imag > 0))}")
    order = np.lexsort((roots.real, roots.imag))
    return roots[order]


def verify_homogeneity(system: DNSystem, point: MetricData,
                       rng=None, n_samples: int = 20) -> float:
    """Max relative error of the per-entry scaling ``L'(c xi) = c^(s+t) L'(xi)``."""
    rng = np.random.default_rng(0) if rng is None else rng
    worst = 0.0
    s, t = system.s_indices, system.t_indices
    for _ in range(n_samples):
        xi = rng.normal(size=2) + 1j * rng.normal(size=2)
        c = rng.normal() + 1j * rng.normal()
        left = system.symbol_gen(point, tuple(c * np.asarray(xi)))
        base = system.symbol_gen(point, tuple(xi))
        for k in range(system.n_equations):
            for j in range(system.n_unknowns):
                want = c ** (s[k] + t[j]) * base[k, j]
                err = abs(left[k, j] - want) / max(abs(want), 1.0)
                worst = max(worst, err)
    return worst


# ---------------------------------------------------------------------------
# Shapiro-Lopatinskii check
# ---------------------------------------------------------------------------

def _entry_polymatrix(gen, point, xi1, degree) -> PolyMatrix:
    radius = max(1.0, abs(xi1))
    return PolyMatrix.from_samples(
        lambda z: gen(point, (xi1, z)), max(degree, 0), radius)


def _cluster_roots(roots: np.ndarray, xi1: float) -> list:
    """Group near-coincident roots; returns (center, multiplicity) pairs."""
    tol = ROOT_CLUSTER_RTOL * max(1.0, abs(xi1))
    clusters = []
    for z in sorted(roots, key=lambda z: (z.real, z.imag)):
        for c in clusters:
            if abs(z - c[0][0]) < tol:
                c[0].append(z)
                break
        else:
            clusters.append([[z]])
    return [(complex(np.mean(c[0])), len(c[0])) for c in clusters]


def _kernel_vectors(mat: np.ndarray) -> np.ndarray:
    """Orthonormal null vectors of a (nearly) singular matrix via SVD."""
    _, sv, vh = np.linalg.svd(mat)
    keep = sv < KERNEL_RTOL * max(sv[0], 1e-300)
    return vh[keep].conj()


def decaying_solution_basis(system: DNSystem, point: MetricData,
                            xi1: float) -> list:
    """Basis of half-space solutions decaying as ``x2 -> +infty``.

    Returns ``m`` :class:`ExpPolyMode` objects ``exp(i*xi2*x2) p(x2)``.
    Simple roots give pure exponentials; a double root with one-dimensional
    kernel gives a Jordan pair ``(w, x2*w + v)`` with ``S(xi2) v = i S'(xi2) w``;
    deeper structures raise :class:`JordanDepthError`.
    """
    roots = characteristic_roots(system, point, xi1)
    upper = roots[roots.imag > 0]
    spoly = _entry_polymatrix(system.symbol_gen, point, xi1,
                              system.max_entry_degree)
    spoly_d = spoly.derivative()
    basis = []
    for center, mult in _cluster_roots(upper, xi1):
        s_at = spoly.eval(center)
        kernel = _kernel_vectors(s_at)
        kd = kernel.shape[0]
        if kd >= mult:
            for w in kernel[:mult]:
                basis.append(ExpPolyMode(1j * center, [w], center))
        elif kd == 1 and mult == 2:
            w = kernel[0]
            rhs = 1j * (spoly_d.eval(center) @ w)
            v, *_ = np.linalg.lstsq(s_at, rhs, rcond=None)
            resid = np.linalg.norm(s_at @ v - rhs)
            if resid > 1e-6 * (np.linalg.norm(rhs) + 1.0):
                raise DegenerateModeError(
                    f"{system.name}: Jordan chain unsolvable at root {center} "
                    f"(residual {resid:.2e}, xi1={xi1})")
            basis.append(ExpPolyMode(1j * center, [w], center))
            basis.append(ExpPolyMode(1j * center, [v, w], center))
        else:
            raise JordanDepthError(
                f"{system.name}: root {center} has multiplicity {mult} with "
                f"kernel dimension {kd}; chains longer than 2 are not handled")
    if len(basis) != system.half_order:
        raise EllipticityError(
            f"{system.name}: decaying basis has {len(basis)} modes, "
            f"expected {system.half_order}")
    return basis


def sl_check(system: DNSystem, bc: BoundaryConditionSet, point: MetricData,
             xi1: float, point_id: str = "") -> SLReport:
    """Shapiro-Lopatinskii verdict for ``system`` with conditions ``bc``.

    Builds the decaying solution basis, applies the boundary symbols at
    ``x2 = 0`` and tests the resulting ``m x m`` determinant against the
    relative threshold ``DET_RTOL * max|entry|^m``.  When the condition
    fails, a nonzero decaying solution annihilated by all boundary operators
    is returned as the witness.
    """
    m = system.half_order
    if bc.count != m:
        raise ValueError(
            f"{bc.name}: {bc.count} boundary conditions, system needs {m}")
    report_ok = ellipticity_check(system, point, n_angles=64)
    if not report_ok.elliptic:
        raise EllipticityError(
            f"{system.name}: not elliptic at this point "
            f"(min |D| = {report_ok.min_abs_det:.3e})")

    basis = decaying_solution_basis(system, point, xi1)
    basis = [mode.scaled(1.0 / mode.norm()) for mode in basis]
    max_bc_degree = max(max(bc.r_indices) + max(system.t_indices), 0)
    bpoly = _entry_polymatrix(
        lambda pt, xi: np.asarray(bc.symbol_gen(pt, xi), dtype=complex),
        point, xi1, max_bc_degree)

    cols = []
    for mode in basis:
        applied = apply_normal_ode(bpoly, mode)
        cols.append(applied.value_at_zero())
    sl_matrix = np.column_stack(cols)
    det = complex(np.linalg.det(sl_matrix))
    max_entry = float(np.abs(sl_matrix).max())
    threshold = DET_RTOL * max_entry ** m
    satisfied = abs(det) > threshold

    witness = None
    if not satisfied:
        _, _, vh = np.linalg.svd(sl_matrix)
        null = vh[-1].conj()
        witness = [mode.scaled(c) for mode, c in zip(basis, null)
                   if abs(c) > 1e-12]

    roots = np.array([mode.frequency for mode in basis])
    return SLReport(point_id or f"b={point.b_triple}", float(xi1), m, roots,
                    sl_matrix, det, bool(satisfied), witness)


def rigidity_strain_residual(witness: list, point: MetricData,
                             xi1: float) -> float:
    """Sup-norm of the frozen membrane strain of an exponential witness.

    Applies the strain rows to each mode of the witness and returns the
    largest polynomial-coefficient magnitude, normalized by the witness size.
    """
    spoly = _entry_polymatrix(strain_symbol, point, xi1, 1)
    worst = 0.0
    scale = sum(mode.norm() for mode in witness)
    for mode in witness:
        out = apply_normal_ode(spoly, mode)
        worst = max(worst, max(np.linalg.norm(c) for c in out.coeffs))
    return worst / max(scale, 1e-300)
