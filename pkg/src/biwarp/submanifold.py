"""Extrinsic geometry of a parametrized submanifold of flat R^N.

Everything at a point is computed from the exact 2-jet of the immersion
phi: the coordinate frame d_i phi, the second derivatives d_i d_j phi, and
quantities built from them (induced metric and its first derivatives,
Christoffel symbols, second fundamental form, the tangent projector and its
first derivatives). No finite differences are involved.

Index conventions: ``jac[a, i] = d_i phi^a``, ``second[a, i, j] = d_i d_j phi^a``,
``christoffel[k, i, j] = Gamma^k_ij``, ``metric_deriv[k, i, j] = d_k g_ij``.
Frame-indexed arrays (suffix ``_frame``) use the orthonormal tangent frame.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import TYPE_CHECKING

import numpy as np

from .ambient import AmbientSpace
from .errors import ConfigError, DomainError, NotNormal
from .expr import Expr, check_identifiers
from .jets import compile_jet, coordinate_jets
from .linalg import complete_basis, orthonormalize
from .tolerances import DEFAULT_TOLERANCES, Tolerances

if TYPE_CHECKING:
    from .warped import BlockStructure


@dataclass(frozen=True)
class ParamSpec:
    name: str
    lower: float
    upper: float

    def __post_init__(self):
        if not self.lower < self.upper:
            raise ConfigError(f"parameter {self.name!r}: lower bound must be below upper bound")


@dataclass(frozen=True)
class ImmersionChart:
    """A map from a parameter box into R^{2m}, one expression per coordinate.

    The parameter bounds are the sampling box; points are accepted on the
    closed box. ``excluded`` lists parameter values grids skip (e.g. the
    u, v != 0, 1 restriction of the R^14 example).
    """

    name: str
    ambient: AmbientSpace
    params: tuple[ParamSpec, ...]
    components: tuple[Expr, ...]
    blocks: "BlockStructure | None" = None
    excluded: tuple[tuple[str, tuple[float, ...]], ...] = ()
    default_grid: int = 3

    def __post_init__(self):
        if len(self.components) != self.ambient.real_dim:
            raise ConfigError(
                f"{len(self.components)} component expressions for R^{self.ambient.real_dim}"
            )
        names = self.param_names
        if len(set(names)) != len(names):
            raise ConfigError("duplicate parameter names")
        if len(names) > self.ambient.real_dim:
            raise ConfigError("more parameters than ambient dimensions")
        for comp in self.components:
            check_identifiers(comp, names)

    @property
    def param_names(self) -> tuple[str, ...]:
        return tuple(p.name for p in self.params)

    @property
    def dim(self) -> int:
        return len(self.params)

    @property
    def lower(self) -> np.ndarray:
        return np.array([p.lower for p in self.params])

    @property
    def upper(self) -> np.ndarray:
        return np.array([p.upper for p in self.params])

    @cached_property
    def _compiled(self):
        return [compile_jet(c, self.param_names) for c in self.components]

    def check_domain(self, points: np.ndarray) -> None:
        lo, hi = self.lower, self.upper
        slack = 1e-12 * np.maximum(1.0, np.maximum(abs(lo), abs(hi)))
        bad = np.any((points < lo - slack) | (points > hi + slack), axis=-1)
        if np.any(bad):
            first = np.asarray(points)[bad][0] if points.ndim > 1 else points
            raise DomainError(f"point {np.round(first, 6).tolist()} outside the parameter box")

    def jets(self, points):
        """Value (B, N), Jacobian (B, N, d) and second derivatives (B, N, d, d)."""
        points = np.asarray(points, dtype=float)
        self.check_domain(points)
        xs = coordinate_jets(points, self.dim)
        with np.errstate(all="raise", under="ignore"):
            try:
                comps = [f(xs) for f in self._compiled]
            except FloatingPointError as exc:
                raise DomainError(str(exc)) from None
        value = np.stack([c.value for c in comps], axis=-1)
        jac = np.stack([c.grad for c in comps], axis=-2)
        second = np.stack([c.hess for c in comps], axis=-3)
        return value, jac, second

    def grid(self, n: int | None = None, strict: bool = False) -> np.ndarray:
        """Tensor grid with ``n`` points per axis (endpoints included), row-major order.

        With ``strict`` the values in ``excluded`` are dropped.
        """
        n = self.default_grid if n is None else n
        if n < 1:
            raise ConfigError("grid needs at least one point per axis")
        axes = []
        for p in self.params:
            ax = np.linspace(p.lower, p.upper, n) if n > 1 else np.array([0.5 * (p.lower + p.upper)])
            axes.append(ax)
        pts = np.array(list(itertools.product(*axes)), dtype=float).reshape(-1, self.dim)
        if strict and self.excluded:
            keep = np.ones(len(pts), dtype=bool)
            for name, values in self.excluded:
                col = pts[:, self.param_names.index(name)]
                for v in values:
                    keep &= ~np.isclose(col, v, rtol=0.0, atol=1e-12)
            pts = pts[keep]
        return pts

    def scaled(self, c: float) -> "ImmersionChart":
        """The homothetic chart c * phi."""
        from .expr import BinOp, Num

        comps = tuple(BinOp("*", Num(float(c)), comp) for comp in self.components)
        return ImmersionChart(
            f"{c}*{self.name}", self.ambient, self.params, comps, self.blocks, self.excluded, self.default_grid
        )


@dataclass
class PointGeometry:
    point: np.ndarray
    position: np.ndarray
    coord_frame: np.ndarray  # (N, d)
    second: np.ndarray  # (N, d, d)
    metric: np.ndarray
    metric_inv: np.ndarray
    metric_deriv: np.ndarray
    tangent_frame: np.ndarray  # (N, d) orthonormal columns
    normal_frame: np.ndarray  # (N, N - d)
    frame_coeffs: np.ndarray  # tangent_frame = coord_frame @ frame_coeffs
    christoffel: np.ndarray  # metric-derivative route
    christoffel_proj: np.ndarray  # tangential-projection route
    sff: np.ndarray  # (N - d, d, d): normal-frame components of h(d_i, d_j)
    tolerances: Tolerances = field(default=DEFAULT_TOLERANCES, repr=False)

    @property
    def dim(self) -> int:
        return self.coord_frame.shape[1]

    @property
    def ambient_dim(self) -> int:
        return self.coord_frame.shape[0]

    @cached_property
    def tangent_projector(self) -> np.ndarray:
        return self.tangent_frame @ self.tangent_frame.T

    @cached_property
    def normal_projector(self) -> np.ndarray:
        return np.eye(self.ambient_dim) - self.tangent_projector

    @cached_property
    def sff_ambient(self) -> np.ndarray:
        """h(d_i, d_j) as ambient vectors, shape (N, d, d)."""
        return np.einsum("ab,bij->aij", self.normal_projector, self.second)

    @cached_property
    def sff_frame(self) -> np.ndarray:
        """h(e_a, e_b) on the orthonormal tangent frame as ambient vectors, (N, d, d)."""
        c = self.frame_coeffs
        return np.einsum("nij,ia,jb->nab", self.sff_ambient, c, c)

    @cached_property
    def projector_deriv(self) -> np.ndarray:
        """d_k of the tangent projector jac g^-1 jac^T, shape (d, N, N)."""
        jac, ginv = self.coord_frame, self.metric_inv
        out = np.empty((self.dim, self.ambient_dim, self.ambient_dim))
        for k in range(self.dim):
            dj = self.second[:, k, :]
            dginv = -ginv @ self.metric_deriv[k] @ ginv
            a = dj @ ginv @ jac.T
            out[k] = a + a.T + jac @ dginv @ jac.T
        return out

    def coords(self, u: np.ndarray) -> np.ndarray:
        """Coordinate components of tangent vector(s) ``u`` (shape (N,) or (N, k))."""
        return self.metric_inv @ (self.coord_frame.T @ u)

    def h(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Second fundamental form of two ambient tangent vectors."""
        return np.einsum("aij,i,j->a", self.sff_ambient, self.coords(u), self.coords(v))

    def d_projector(self, u: np.ndarray) -> np.ndarray:
        """Directional derivative of the tangent projector along tangent vector ``u``."""
        return np.einsum("k,kab->ab", self.coords(u), self.projector_deriv)


def geometry_from_jets(point, position, jac, second, tols: Tolerances = DEFAULT_TOLERANCES) -> PointGeometry:
    jac = np.asarray(jac, dtype=float)
    n, d = jac.shape
    tangent = orthonormalize(jac.T, rank_tol=tols.rank_tol).vectors.T
    r = tangent.T @ jac  # upper triangular: jac = tangent @ r
    coeffs = np.linalg.solve(r, np.eye(d))
    metric = jac.T @ jac
    metric_inv = coeffs @ coeffs.T
    normal = complete_basis(tangent)

    dmetric = np.einsum("aki,aj->kij", second, jac)
    dmetric = dmetric + dmetric.transpose(0, 2, 1)
    # Gamma^k_ij = 1/2 g^kl (d_i g_jl + d_j g_il - d_l g_ij)
    lowered = 0.5 * (
        np.einsum("ijl->ijl", dmetric) + np.einsum("jil->ijl", dmetric) - np.einsum("lij->ijl", dmetric)
    )
    christoffel = np.einsum("kl,ijl->kij", metric_inv, lowered)
    christoffel_proj = np.einsum("kl,al,aij->kij", metric_inv, jac, second)
    sff = np.einsum("an,aij->nij", normal, second)
    return PointGeometry(
        point=np.asarray(point, dtype=float),
        position=np.asarray(position, dtype=float),
        coord_frame=jac,
        second=np.asarray(second, dtype=float),
        metric=metric,
        metric_inv=metric_inv,
        metric_deriv=dmetric,
        tangent_frame=tangent,
        normal_frame=normal,
        frame_coeffs=coeffs,
        christoffel=christoffel,
        christoffel_proj=christoffel_proj,
        sff=sff,
        tolerances=tols,
    )


def point_geometry(chart: ImmersionChart, p, tols: Tolerances = DEFAULT_TOLERANCES) -> PointGeometry:
    """Induced metric, frames, Christoffel symbols and second fundamental form at ``p``."""
    p = np.asarray(p, dtype=float)
    value, jac, second = chart.jets(p)
    return geometry_from_jets(p, value, jac, second, tols)


def grid_geometries(chart: ImmersionChart, points, tols: Tolerances = DEFAULT_TOLERANCES) -> list[PointGeometry]:
    """Geometry at every row of ``points``; jets for the whole batch in one pass."""
    points = np.asarray(points, dtype=float).reshape(-1, chart.dim)
    value, jac, second = chart.jets(points)
    return [geometry_from_jets(points[i], value[i], jac[i], second[i], tols) for i in range(len(points))]


def shape_operator(geom: PointGeometry, xi) -> np.ndarray:
    """A_xi on the orthonormal tangent frame, via the Weingarten formula.

    xi is extended as the normal field (I - P) xi; then
    A_xi U = -tan(D_U xi) = P (D_U P) xi.
    """
    xi = np.asarray(xi, dtype=float)
    scale = max(float(np.linalg.norm(xi)), 1.0)
    tangential = geom.tangent_frame.T @ xi
    if np.linalg.norm(tangential) > geom.tolerances.ortho_tol * scale:
        raise NotNormal(f"vector has tangential part of size {np.linalg.norm(tangential):.3e}")
    e = geom.tangent_frame
    dp_frame = np.einsum("ka,kxy->axy", geom.frame_coeffs, geom.projector_deriv)
    # column a = frame coordinates of A_xi e_a
    return np.einsum("xb,axy,y->ba", e, dp_frame, xi)


def shape_operator_from_sff(geom: PointGeometry, xi) -> np.ndarray:
    """A_xi from g(A_xi U, V) = <h(U, V), xi> on the orthonormal frame."""
    return np.einsum("nab,n->ab", geom.sff_frame, np.asarray(xi, dtype=float))


def mean_curvature(geom: PointGeometry) -> np.ndarray:
    """H = (1/d) g^ij h(d_i, d_j), an ambient normal vector."""
    return np.einsum("ij,aij->a", geom.metric_inv, geom.sff_ambient) / geom.dim


def second_fundamental_norm(geom: PointGeometry, rotation: np.ndarray | None = None) -> float:
    """||h||^2 summed over an orthonormal tangent frame (optionally re-mixed by ``rotation``)."""
    h = geom.sff_frame
    if rotation is not None:
        h = np.einsum("nab,ac,bd->ncd", h, rotation, rotation)
    return float(np.sum(h * h))


def gauss_split_residual(geom: PointGeometry) -> float:
    """max |d_i d_j phi - Gamma^k_ij d_k phi - h(d_i, d_j)| relative to the second-derivative scale."""
    recon = np.einsum("ak,kij->aij", geom.coord_frame, geom.christoffel) + geom.sff_ambient
    scale = max(1.0, float(np.abs(geom.second).max()))
    return float(np.abs(geom.second - recon).max()) / scale


def christoffel_consistency(geom: PointGeometry) -> float:
    scale = max(1.0, float(np.abs(geom.christoffel).max()))
    return float(np.abs(geom.christoffel - geom.christoffel_proj).max()) / scale


def totally_geodesic_residual(geom: PointGeometry) -> float:
    return float(np.abs(geom.sff_frame).max(initial=0.0))


def umbilic_residual(geom: PointGeometry) -> float:
    """max over frame pairs of |h(e_a, e_b) - delta_ab H|."""
    h = geom.sff_frame.copy()
    hvec = mean_curvature(geom)
    for a in range(geom.dim):
        h[:, a, a] -= hvec
    return float(np.abs(h).max(initial=0.0))


def mixed_geodesic_residual(geom: PointGeometry, first: np.ndarray, second: np.ndarray) -> float:
    """max |h(U, V)| over columns U of ``first`` and V of ``second`` (ambient tangent vectors)."""
    if first.shape[1] == 0 or second.shape[1] == 0:
        return 0.0
    cu, cv = geom.coords(first), geom.coords(second)
    h = np.einsum("aij,ip,jq->apq", geom.sff_ambient, cu, cv)
    return float(np.abs(h).max())


def distribution_geodesic_residual(geom: PointGeometry, basis: np.ndarray) -> float:
    """D-geodesic residual: max |h(U, V)| for U, V in span(basis)."""
    return mixed_geodesic_residual(geom, basis, basis)


__all__ = [
    "ImmersionChart",
    "ParamSpec",
    "PointGeometry",
    "christoffel_consistency",
    "distribution_geodesic_residual",
    "gauss_split_residual",
    "geometry_from_jets",
    "grid_geometries",
    "mean_curvature",
    "mixed_geodesic_residual",
    "point_geometry",
    "second_fundamental_norm",
    "shape_operator",
    "shape_operator_from_sff",
    "totally_geodesic_residual",
    "umbilic_residual",
]
