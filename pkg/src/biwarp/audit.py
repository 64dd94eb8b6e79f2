"""Numeric audits of the structure identities on a classified chart.

Every identity is evaluated on orthonormal frame vectors of the
distributions D^T (U, V), D^perp (X, Y) and D^theta (Z, W); bilinearity makes
frame tuples sufficient. Left sides that involve the induced connection use
the Christoffel symbols together with derivatives of the spectral projectors
(so that a frame vector is extended to a local section of its distribution).
Right sides use shape operators from the Weingarten formula and the second
fundamental form from the 2-jet. The two routes share only the jets.

Residuals are ``|lhs - rhs| / max(1, |lhs|, |rhs|)`` (norms for vector
identities), maximized over frame tuples and grid points.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Iterable

import numpy as np

from .errors import ConfigError, ImproperSplit, Unclassifiable
from .report import AuditReport, EqualityRow, IdentityEntry, InequalityRow, Section
from .slant import (
    SlantSplit,
    TangentialOperator,
    classify_point,
    operator_identity_residual,
    slant_spectrum,
    tangential_operator,
    verify_slant_identities,
)
from .submanifold import (
    ImmersionChart,
    PointGeometry,
    christoffel_consistency,
    gauss_split_residual,
    grid_geometries,
    mean_curvature,
    mixed_geodesic_residual,
    second_fundamental_norm,
)
from .tolerances import DEFAULT_TOLERANCES, Tolerances
from .warped import BlockStructure, WarpSamples, recover_warping, triviality_check


@dataclass
class ChartSample:
    chart: ImmersionChart
    points: np.ndarray
    geoms: list[PointGeometry]
    ops: list[TangentialOperator]
    splits: list[SlantSplit]
    tols: Tolerances
    grid_n: int | None = None

    def __len__(self) -> int:
        return len(self.points)

    def grid_info(self) -> dict:
        return {
            "points_per_axis": self.grid_n,
            "count": len(self.points),
            "lower": [float(x) for x in self.chart.lower],
            "upper": [float(x) for x in self.chart.upper],
        }


def sample_chart(
    chart: ImmersionChart,
    points=None,
    tols: Tolerances = DEFAULT_TOLERANCES,
    grid: int | None = None,
    strict: bool = False,
) -> ChartSample:
    """Geometry, tangential operator and order-1 split at every grid point."""
    if points is None:
        grid = chart.default_grid if grid is None else grid
        pts = chart.grid(grid, strict=strict)
    else:
        pts = np.asarray(points, dtype=float).reshape(-1, chart.dim)
    geoms = grid_geometries(chart, pts, tols)
    ops = [tangential_operator(g, chart.ambient) for g in geoms]
    splits = [classify_point(op, slant_spectrum(op, tols), tols) for op in ops]
    return ChartSample(chart, pts, geoms, ops, splits, tols, grid if points is None else None)


def require_proper(sample: ChartSample) -> None:
    for s in sample.splits:
        if not s.proper:
            k, n, m, _ = s.dims
            raise ImproperSplit(
                f"split at {np.round(s.point, 6).tolist()} is not proper: (k, n, m) = ({k}, {n}, {m}), "
                f"theta = {s.theta:.6g}"
            )


def require_constant_dims(sample: ChartSample) -> None:
    """The split dimensions may not jump across the grid.

    A slant eigenvalue that drifts into 0 or 1 snaps into D^perp or D^T at
    that point, which shows up here as a change of (k, n, m, l).
    """
    if not sample.splits:
        return
    first = sample.splits[0].dims
    for s in sample.splits:
        if s.dims != first:
            raise Unclassifiable(
                f"split dimensions jump from {first} to {s.dims} at {np.round(s.point, 6).tolist()}"
            )


# --------------------------------------------------------------------------
# per-point machinery


def _cluster_name(eigenvalue: float) -> str:
    if eigenvalue == 1.0:
        return "T"
    if eigenvalue == 0.0:
        return "perp"
    return "theta"


def _cols(a: np.ndarray) -> list[np.ndarray]:
    return [a[:, i] for i in range(a.shape[1])]


@dataclass
class PointWarp:
    dlog_f: np.ndarray  # coordinate differential of ln f
    dlog_s: np.ndarray  # coordinate differential of ln sigma
    f: float
    sigma: float
    grad_f: float  # |grad ln f| on the base block
    grad_s: float


def point_warp(samples: WarpSamples, i: int) -> PointWarp:
    nfib = samples.values.shape[1]
    d = samples.points.shape[1]
    if nfib >= 2:
        return PointWarp(
            samples.log_grad[i, 0],
            samples.log_grad[i, 1],
            float(samples.values[i, 0]),
            float(samples.values[i, 1]),
            float(samples.grad_norm[i, 0]),
            float(samples.grad_norm[i, 1]),
        )
    return PointWarp(
        samples.log_grad[i, 0], np.zeros(d), float(samples.values[i, 0]), 1.0, float(samples.grad_norm[i, 0]), 0.0
    )


class PointContext:
    """Operators J, T, F, A, h and the induced connection at one point."""

    def __init__(self, geom: PointGeometry, op: TangentialOperator, split: SlantSplit, warp: PointWarp | None = None):
        self.geom = geom
        self.op = op
        self.split = split
        self.space = op.space
        self.warp = warp
        e = geom.tangent_frame
        dp_frame = np.einsum("ka,kxy->axy", geom.frame_coeffs, geom.projector_deriv)
        self._w = np.einsum("xb,axy->bay", e, dp_frame)
        self.U = _cols(split.D_T)
        self.X = _cols(split.D_perp)
        self.Z = _cols(split.D_theta)
        self.theta = split.theta
        self.s2 = float(np.sin(split.theta) ** 2)
        self.c2 = float(np.cos(split.theta) ** 2)
        self._dproj = self._projector_derivatives()

    def _projector_derivatives(self) -> dict[str, np.ndarray]:
        """d_k of the coordinate spectral projectors of -T^2, keyed by distribution."""
        g = self.geom
        jac, ginv, J = g.coord_frame, g.metric_inv, self.space.J
        tc = ginv @ (jac.T @ J @ jac)
        dt = np.empty((g.dim, g.dim, g.dim))
        for k in range(g.dim):
            dj = g.second[:, :, k]
            dt[k] = -ginv @ g.metric_deriv[k] @ tc + ginv @ (dj.T @ J @ jac + jac.T @ J @ dj)
        ds = -(np.einsum("kij,jl->kil", dt, tc) + np.einsum("ij,kjl->kil", tc, dt))
        projs = []
        for c in self.split.clusters:
            amb = g.tangent_frame @ c.vectors
            projs.append((c, ginv @ jac.T @ amb @ amb.T @ jac))
        out = {}
        for c, p in projs:
            dp = np.zeros_like(ds)
            for c2, p2 in projs:
                if c2 is c:
                    continue
                dp += (np.einsum("ij,kjl,lm->kim", p2, ds, p) + np.einsum("ij,kjl,lm->kim", p, ds, p2)) / (
                    c.raw - c2.raw
                )
            out[_cluster_name(c.eigenvalue)] = dp
        return out

    # algebra ------------------------------------------------------------
    def J(self, v):
        return self.space.apply_J(v)

    def T(self, v):
        return self.geom.tangent_projector @ self.space.apply_J(v)

    def F(self, v):
        return self.geom.normal_projector @ self.space.apply_J(v)

    def A(self, xi, v):
        """Shape operator A_xi applied to the tangent vector v (ambient vectors in and out)."""
        e = self.geom.tangent_frame
        return e @ ((self._w @ xi) @ (e.T @ v))

    def h(self, u, v):
        return self.geom.h(u, v)

    def nabla(self, dist: str, u, v):
        """nabla_u V where V is the section of ``dist`` through v obtained from its projector field."""
        g = self.geom
        cu, cv = g.coords(u), g.coords(v)
        w = np.einsum("k,kij,j->i", cu, self._dproj[dist], cv) + np.einsum("kij,i,j->k", g.christoffel, cu, cv)
        return g.coord_frame @ w

    def dlog(self, which: str, v) -> float:
        """v(ln f) or v(ln sigma)."""
        if self.warp is None:
            raise ConfigError("warping functions are needed for this audit")
        d = self.warp.dlog_f if which == "f" else self.warp.dlog_s
        return float(d @ self.geom.coords(v))

    def grad_log(self, which: str) -> np.ndarray:
        """grad(ln f) or grad(ln sigma) as an ambient tangent vector."""
        d = self.warp.dlog_f if which == "f" else self.warp.dlog_s
        return self.geom.coord_frame @ (self.geom.metric_inv @ d)


def _rel(lhs, rhs) -> float:
    lhs, rhs = np.asarray(lhs, dtype=float), np.asarray(rhs, dtype=float)
    if lhs.ndim == 0:
        return abs(float(lhs - rhs)) / max(1.0, abs(float(lhs)), abs(float(rhs)))
    return float(np.linalg.norm(lhs - rhs)) / max(1.0, float(np.linalg.norm(lhs)), float(np.linalg.norm(rhs)))


class _Worst(dict):
    def add(self, name: str, lhs, rhs=0.0) -> None:
        r = _rel(lhs, rhs)
        if r > self.get(name, 0.0):
            self[name] = r

    def touch(self, *names: str) -> "_Worst":
        for n in names:
            self.setdefault(n, 0.0)
        return self


# --------------------------------------------------------------------------
# identity families at a point


CONNECTION = {
    "conn_TT_theta": "g(nabla_U V, Z) = csc^2(theta) g(A_FZ JV - A_FTZ V, U)",
    "conn_thth_T": "g(nabla_Z W, V) = csc^2(theta) g(A_FTW V - A_FW JV, Z)",
    "conn_TT_perp": "g(nabla_U V, X) = g(A_JX U, JV)",
    "conn_Tperp_theta": "g(nabla_U X, Z) = -sec^2(theta) g(A_JX TZ - A_FTZ X, U)",
    "conn_perpperp_T": "g(nabla_X Y, U) = -g(A_JY X, JU)",
    "conn_thth_perp": "g(nabla_Z W, Y) = sec^2(theta) g(A_JY TW - A_FTW Y, Z)",
    "conn_thperp_T": "g(nabla_Z Y, U) = -g(A_JY JU, Z)",
    "conn_perpperp_theta": "g(nabla_X Y, Z) = -sec^2(theta) (g(A_JY X, TZ) - g(A_FTZ X, Y))",
    "conn_perpT_theta": "g(nabla_X U, Z) = csc^2(theta) g(A_FZ JU - A_FTZ U, X)",
}


def connection_residuals(c: PointContext) -> dict[str, float]:
    r = _Worst().touch(*CONNECTION)
    csc2, sec2 = 1.0 / c.s2, 1.0 / c.c2
    for U in c.U:
        for V in c.U:
            for Z in c.Z:
                r.add("conn_TT_theta", c.nabla("T", U, V) @ Z, csc2 * (c.A(c.F(Z), c.J(V)) - c.A(c.F(c.T(Z)), V)) @ U)
            for X in c.X:
                r.add("conn_TT_perp", c.nabla("T", U, V) @ X, c.A(c.J(X), U) @ c.J(V))
    for Z in c.Z:
        for W in c.Z:
            for V in c.U:
                r.add(
                    "conn_thth_T", c.nabla("theta", Z, W) @ V, csc2 * (c.A(c.F(c.T(W)), V) - c.A(c.F(W), c.J(V))) @ Z
                )
            for Y in c.X:
                r.add(
                    "conn_thth_perp",
                    c.nabla("theta", Z, W) @ Y,
                    sec2 * (c.A(c.J(Y), c.T(W)) - c.A(c.F(c.T(W)), Y)) @ Z,
                )
    for U in c.U:
        for X in c.X:
            for Z in c.Z:
                ftz = c.F(c.T(Z))
                r.add("conn_Tperp_theta", c.nabla("perp", U, X) @ Z, -sec2 * (c.A(c.J(X), c.T(Z)) - c.A(ftz, X)) @ U)
                r.add("conn_perpT_theta", c.nabla("T", X, U) @ Z, csc2 * (c.A(c.F(Z), c.J(U)) - c.A(ftz, U)) @ X)
                r.add("conn_thperp_T", c.nabla("perp", Z, X) @ U, -(c.A(c.J(X), c.J(U)) @ Z))
    for X in c.X:
        for Y in c.X:
            for U in c.U:
                r.add("conn_perpperp_T", c.nabla("perp", X, Y) @ U, -(c.A(c.J(Y), X) @ c.J(U)))
            for Z in c.Z:
                r.add(
                    "conn_perpperp_theta",
                    c.nabla("perp", X, Y) @ Z,
                    -sec2 * (c.A(c.J(Y), X) @ c.T(Z) - c.A(c.F(c.T(Z)), X) @ Y),
                )
    return dict(r)


DISTRIBUTIONS = {
    "holo_geodesic_perp": "g(A_JX U, JV) = 0",
    "holo_geodesic_theta": "g(A_FZ U, JV) = g(A_FTZ U, V)",
    "holo_geodesic_direct": "g(nabla_U V, X) = g(nabla_U V, Z) = 0",
    "slant_integrable_T": "g(A_FTZ V - A_FZ JV, W) = g(A_FTW V - A_FW JV, Z)",
    "slant_integrable_perp": "g(A_JX TW - A_FTW X, Z) = g(A_JX TZ - A_FTZ X, W)",
    "slant_bracket_direct": "g([Z, W], V) = g([Z, W], X) = 0",
}


def distribution_residuals(c: PointContext) -> dict[str, float]:
    r = _Worst().touch(*DISTRIBUTIONS)
    for U in c.U:
        for V in c.U:
            for X in c.X:
                r.add("holo_geodesic_perp", c.A(c.J(X), U) @ c.J(V))
                r.add("holo_geodesic_direct", c.nabla("T", U, V) @ X)
            for Z in c.Z:
                r.add("holo_geodesic_theta", c.A(c.F(Z), U) @ c.J(V), c.A(c.F(c.T(Z)), U) @ V)
                r.add("holo_geodesic_direct", c.nabla("T", U, V) @ Z)
    for Z in c.Z:
        for W in c.Z:
            bracket = c.nabla("theta", Z, W) - c.nabla("theta", W, Z)
            for V in c.U:
                r.add(
                    "slant_integrable_T",
                    (c.A(c.F(c.T(Z)), V) - c.A(c.F(Z), c.J(V))) @ W,
                    (c.A(c.F(c.T(W)), V) - c.A(c.F(W), c.J(V))) @ Z,
                )
                r.add("slant_bracket_direct", bracket @ V)
            for X in c.X:
                r.add(
                    "slant_integrable_perp",
                    (c.A(c.J(X), c.T(W)) - c.A(c.F(c.T(W)), X)) @ Z,
                    (c.A(c.J(X), c.T(Z)) - c.A(c.F(c.T(Z)), X)) @ W,
                )
                r.add("slant_bracket_direct", bracket @ X)
    return dict(r)


CHARACTERIZATION = {
    "shape_JX_V": "A_JX V = -JV(lambda) X",
    "shape_FTZ_V": "A_FTZ V - A_FZ JV = -sin^2(theta) V(mu) Z",
    "shape_JY_TZ_perp": "g(A_JY TZ, X) = g(A_FTZ Y, X)",
    "shape_JY_TW_theta": "g(A_JY TW, Z) = g(A_FTZ Y, W)",
    "warp_fiber_independence": "X(lambda) = Z(lambda) = X(mu) = Z(mu) = 0",
    "block_alignment": "base, fiber1, fiber2 coordinate fields span D^T, D^perp, D^theta",
}


def characterization_residuals(c: PointContext, blocks: BlockStructure) -> dict[str, float]:
    r = _Worst().touch(*CHARACTERIZATION)
    for V in c.U:
        for X in c.X:
            r.add("shape_JX_V", c.A(c.J(X), V), -c.dlog("f", c.J(V)) * X)
        for Z in c.Z:
            r.add(
                "shape_FTZ_V",
                c.A(c.F(c.T(Z)), V) - c.A(c.F(Z), c.J(V)),
                -c.s2 * c.dlog("s", V) * Z,
            )
    for Y in c.X:
        for Z in c.Z:
            ftz = c.F(c.T(Z))
            for X in c.X:
                r.add("shape_JY_TZ_perp", c.A(c.J(Y), c.T(Z)) @ X, c.A(ftz, Y) @ X)
            for W in c.Z:
                r.add("shape_JY_TW_theta", c.A(c.J(Y), c.T(W)) @ Z, c.A(ftz, Y) @ W)
    for v in c.X + c.Z:
        r.add("warp_fiber_independence", c.dlog("f", v))
        r.add("warp_fiber_independence", c.dlog("s", v))
    jac = c.geom.coord_frame
    dists = [c.split.D_T, c.split.D_perp, c.split.D_theta]
    for idx, dist in zip([blocks.base, *blocks.fibers], dists):
        cols = jac[:, list(idx)]
        off = cols - dist @ (dist.T @ cols)
        r.add("block_alignment", np.linalg.norm(off) / max(1.0, np.linalg.norm(cols)))
    return dict(r)


SFF = {
    "sff_TT_Jperp": "g(h(U, V), JX) = 0",
    "sff_Tperp_Jperp": "g(h(V, X), JY) = -JV(ln f) g(X, Y)",
    "sff_Ttheta_Jperp": "g(h(V, Z), JX) = 0",
    "sff_TT_Ftheta": "g(h(U, V), FZ) = 0",
    "sff_Tperp_Ftheta": "g(h(V, X), FZ) = 0",
    "sff_Ttheta_Ftheta": "g(h(V, Z), FW) = -JV(ln sigma) g(Z, W) - V(ln sigma) g(Z, TW)",
}


def sff_residuals(c: PointContext) -> dict[str, float]:
    r = _Worst().touch(*SFF)
    for V in c.U:
        for U in c.U:
            huv = c.h(U, V)
            for X in c.X:
                r.add("sff_TT_Jperp", huv @ c.J(X))
            for Z in c.Z:
                r.add("sff_TT_Ftheta", huv @ c.F(Z))
        jv_f, jv_s, v_s = c.dlog("f", c.J(V)), c.dlog("s", c.J(V)), c.dlog("s", V)
        for X in c.X:
            hvx = c.h(V, X)
            for Y in c.X:
                r.add("sff_Tperp_Jperp", hvx @ c.J(Y), -jv_f * (X @ Y))
            for Z in c.Z:
                r.add("sff_Tperp_Ftheta", hvx @ c.F(Z))
        for Z in c.Z:
            hvz = c.h(V, Z)
            for X in c.X:
                r.add("sff_Ttheta_Jperp", hvz @ c.J(X))
            for W in c.Z:
                r.add("sff_Ttheta_Ftheta", hvz @ c.F(W), -jv_s * (Z @ W) - v_s * (Z @ c.T(W)))
    return dict(r)


def slant_residuals(c: PointContext) -> dict[str, float]:
    r9, r10 = verify_slant_identities(c.op, c.split)
    return {
        "slant_operator": operator_identity_residual(c.op, c.split),
        "slant_tangential_norm": r9,
        "slant_normal_norm": r10,
        "T_skew": c.op.skew_residual(),
        "invariant_normal": c.split.invariant_residual,
    }


SLANT = {
    "slant_operator": "T^2 V = -cos^2(theta) V on D^theta",
    "slant_tangential_norm": "g(TZ, TW) = cos^2(theta) g(Z, W)",
    "slant_normal_norm": "g(FZ, FW) = sin^2(theta) g(Z, W)",
    "T_skew": "g(TU, V) = -g(U, TV)",
    "invariant_normal": "J maps the normal complement of J D^perp + F D^theta into itself",
}

GEOMETRY = {
    "gauss_split": "d_i d_j phi = Gamma^k_ij d_k phi + h(d_i, d_j)",
    "christoffel_routes": "Gamma from metric derivatives = Gamma from tangential projection",
}


# --------------------------------------------------------------------------
# grid reductions


def _entries(
    per_point: list[dict[str, float]],
    points: np.ndarray,
    formulas: dict[str, str],
    tol: float,
    kinds: dict[str, str] | None = None,
) -> list[IdentityEntry]:
    kinds = kinds or {}
    out = []
    for name, formula in formulas.items():
        vals = np.array([pp.get(name, 0.0) for pp in per_point])
        i = int(np.argmax(vals)) if len(vals) else 0
        worst = float(vals[i]) if len(vals) else 0.0
        out.append(
            IdentityEntry(name, formula, kinds.get(name, "identity"), worst, points[i] if len(vals) else None, tol, worst <= tol)
        )
    return out


def _contexts(sample: ChartSample, warps: WarpSamples | None = None) -> Iterable[PointContext]:
    for i, (g, op, s) in enumerate(zip(sample.geoms, sample.ops, sample.splits)):
        yield PointContext(g, op, s, point_warp(warps, i) if warps is not None else None)


def _blocks(sample: ChartSample, blocks: BlockStructure | None) -> BlockStructure:
    blocks = blocks if blocks is not None else sample.chart.blocks
    if blocks is None:
        raise ConfigError(f"chart {sample.chart.name!r} declares no block structure")
    if len(blocks.fibers) != 2:
        raise ConfigError("the biwarped audits need exactly two fibers")
    return blocks


def warp_samples(sample: ChartSample, blocks: BlockStructure | None = None) -> WarpSamples:
    blocks = blocks if blocks is not None else sample.chart.blocks
    return recover_warping(sample.chart, blocks, tols=sample.tols, geometries=sample.geoms)


def audit_geometry(sample: ChartSample) -> Section:
    per = [{"gauss_split": gauss_split_residual(g), "christoffel_routes": christoffel_consistency(g)} for g in sample.geoms]
    return Section("geometry", _entries(per, sample.points, GEOMETRY, sample.tols.identity_tol))


def audit_slant(sample: ChartSample) -> Section:
    per = [slant_residuals(c) for c in _contexts(sample)]
    dims = sorted({s.dims for s in sample.splits})
    notes = {"dims": [list(d) for d in dims], "order": max(s.order for s in sample.splits)}
    return Section("slant", _entries(per, sample.points, SLANT, sample.tols.identity_tol), notes=notes)


def audit_connection(sample: ChartSample) -> Section:
    """Connection identities on D^T, D^perp, D^theta."""
    require_proper(sample)
    per = [connection_residuals(c) for c in _contexts(sample)]
    return Section("connection", _entries(per, sample.points, CONNECTION, sample.tols.audit_tol))


def audit_distributions(sample: ChartSample) -> Section:
    """Shape-operator conditions for D^T totally geodesic and D^theta integrable, against direct checks."""
    require_proper(sample)
    tol = sample.tols.audit_tol
    per = [distribution_residuals(c) for c in _contexts(sample)]
    kinds = {k: "condition" for k in DISTRIBUTIONS}
    entries = _entries(per, sample.points, DISTRIBUTIONS, tol, kinds)

    def agreement(name, cond_names, direct_name, formula):
        bad = []
        for p, pp in zip(sample.points, per):
            cond = max(pp[n] for n in cond_names) <= tol
            direct = pp[direct_name] <= tol
            if cond != direct:
                bad.append(p)
        return IdentityEntry(
            name,
            formula,
            "agreement",
            float(len(bad)),
            bad[0] if bad else None,
            0.0,
            not bad,
            {"disagreements": len(bad)},
        )

    entries.append(
        agreement(
            "holo_geodesic_equivalence",
            ("holo_geodesic_perp", "holo_geodesic_theta"),
            "holo_geodesic_direct",
            "shape conditions hold <=> D^T totally geodesic",
        )
    )
    entries.append(
        agreement(
            "slant_integrable_equivalence",
            ("slant_integrable_T", "slant_integrable_perp"),
            "slant_bracket_direct",
            "shape conditions hold <=> D^theta integrable",
        )
    )
    return Section("distributions", entries)


def audit_characterization(
    sample: ChartSample, blocks: BlockStructure | None = None, warps: WarpSamples | None = None
) -> Section:
    """Shape-operator characterization of the biwarped structure with lambda = ln f, mu = ln sigma."""
    require_proper(sample)
    blocks = _blocks(sample, blocks)
    warps = warps if warps is not None else warp_samples(sample, blocks)
    per = [characterization_residuals(c, blocks) for c in _contexts(sample, warps)]
    return Section("characterization", _entries(per, sample.points, CHARACTERIZATION, sample.tols.audit_tol))


def audit_sff(
    sample: ChartSample, blocks: BlockStructure | None = None, warps: WarpSamples | None = None
) -> Section:
    require_proper(sample)
    blocks = _blocks(sample, blocks)
    warps = warps if warps is not None else warp_samples(sample, blocks)
    per = [sff_residuals(c) for c in _contexts(sample, warps)]
    return Section("second_fundamental_form", _entries(per, sample.points, SFF, sample.tols.audit_tol))


def audit_triviality(
    sample: ChartSample, blocks: BlockStructure | None = None, warps: WarpSamples | None = None
) -> Section:
    """Warps constant <=> (D^T, D^perp)- and (D^T, D^theta)-mixed geodesic, when D-bar^T = 0."""
    tol = sample.tols.audit_tol
    blocks = blocks if blocks is not None else sample.chart.blocks
    if blocks is None:
        raise ConfigError(f"chart {sample.chart.name!r} declares no block structure")
    warps = warps if warps is not None else warp_samples(sample, blocks)
    trivial, grad_max = triviality_check(warps, sample.tols.trivial_tol)
    mix_perp = [mixed_geodesic_residual(g, s.D_T, s.D_perp) for g, s in zip(sample.geoms, sample.splits)]
    mix_theta = [mixed_geodesic_residual(g, s.D_T, s.D_theta) for g, s in zip(sample.geoms, sample.splits)]
    ls = sorted({s.l for s in sample.splits})
    hypothesis = ls == [0]
    mixed = max(mix_perp) <= tol and max(mix_theta) <= tol
    i_p, i_t = int(np.argmax(mix_perp)), int(np.argmax(mix_theta))
    i_g = int(np.argmax(warps.grad_norm.max(axis=1)))
    agree = trivial == mixed
    entries = [
        IdentityEntry("warps_trivial", "max |grad ln f_i| = 0", "condition", grad_max, sample.points[i_g],
                      sample.tols.trivial_tol, trivial),
        IdentityEntry("mixed_geodesic_T_perp", "h(D^T, D^perp) = 0", "condition", mix_perp[i_p], sample.points[i_p],
                      tol, mix_perp[i_p] <= tol),
        IdentityEntry("mixed_geodesic_T_theta", "h(D^T, D^theta) = 0", "condition", mix_theta[i_t],
                      sample.points[i_t], tol, mix_theta[i_t] <= tol),
        IdentityEntry(
            "triviality_equivalence",
            "warps trivial <=> mixed geodesic in both pairs (needs D-bar^T = 0)",
            "agreement" if hypothesis else "info",
            0.0 if agree else 1.0,
            None,
            0.0,
            agree if hypothesis else True,
            {"hypothesis": "met" if hypothesis else "hypothesis not met", "l": ls, "trivial": trivial,
             "mixed_geodesic": mixed},
        ),
    ]  # fmt: skip
    return Section("triviality", entries, notes={"hypothesis": "met" if hypothesis else "hypothesis not met", "l": ls})


_PAIRS = (("T", "T"), ("T", "perp"), ("T", "theta"), ("perp", "perp"), ("perp", "theta"), ("theta", "theta"))


def sff_decomposition(geom: PointGeometry, split: SlantSplit) -> dict[str, float]:
    """|h|^2 split by (distribution pair, normal subbundle); off-diagonal pairs counted twice."""
    tangent = {"T": split.D_T, "perp": split.D_perp, "theta": split.D_theta}
    normal = {"Jperp": split.J_perp, "Ftheta": split.F_theta, "inv": split.inv_normal}
    out = {}
    for a, b in _PAIRS:
        ca, cb = geom.coords(tangent[a]), geom.coords(tangent[b])
        hab = np.einsum("nij,ip,jq->npq", geom.sff_ambient, ca, cb)
        weight = 1.0 if a == b else 2.0
        for name, nb in normal.items():
            out[f"{a}.{b}.{name}"] = weight * float(np.sum(np.einsum("npq,nr->pqr", hab, nb) ** 2))
    return out


def inequality_row(c: PointContext) -> InequalityRow:
    geom, split, w = c.geom, c.split, c.warp
    lhs = second_fundamental_norm(geom)
    n, m = split.n, split.m
    rhs = 2.0 * (n * w.grad_f**2 + m * (1.0 / c.s2 + c.c2 / c.s2) * w.grad_s**2)
    dec = sff_decomposition(geom, split)
    bound = dec["T.perp.Jperp"] + dec["T.theta.Ftheta"]
    return InequalityRow(geom.point, lhs, rhs, lhs - rhs, split.theta, w.f, w.sigma, bound, dec)


def inequality_audit(
    sample: ChartSample, blocks: BlockStructure | None = None, warps: WarpSamples | None = None
) -> tuple[Section, list[InequalityRow]]:
    """|h|^2 >= 2 (n |grad ln f|^2 + m (csc^2 + cot^2) |grad ln sigma|^2) at every point."""
    require_proper(sample)
    blocks = _blocks(sample, blocks)
    warps = warps if warps is not None else warp_samples(sample, blocks)
    tols = sample.tols
    rows = [inequality_row(c) for c in _contexts(sample, warps)]
    pts = sample.points
    slack = np.array([r.slack for r in rows])
    dec_res = np.array([abs(sum(r.decomposition.values()) - r.lhs) / max(1.0, r.lhs) for r in rows])
    bound_res = np.array([abs(r.mixed_bound - r.rhs) / max(1.0, r.rhs) for r in rows])
    i_s, i_d, i_b = int(np.argmin(slack)), int(np.argmax(dec_res)), int(np.argmax(bound_res))
    entries = [
        IdentityEntry("slack_nonnegative", "|h|^2 - rhs >= -tol", "identity", float(max(0.0, -slack[i_s])), pts[i_s],
                      tols.slack_tol, bool(slack[i_s] >= -tols.slack_tol), {"min_slack": float(slack[i_s])}),
        IdentityEntry("decomposition_total", "sum of subbundle parts = |h|^2", "identity", float(dec_res[i_d]),
                      pts[i_d], 1e-10, bool(dec_res[i_d] <= 1e-10)),
        IdentityEntry("mixed_bound", "2 |h(D^T,D^perp)_Jperp|^2 + 2 |h(D^T,D^theta)_Ftheta|^2 = rhs", "identity",
                      float(bound_res[i_b]), pts[i_b], tols.audit_tol, bool(bound_res[i_b] <= tols.audit_tol)),
    ]  # fmt: skip
    return Section("inequality", entries), rows


def equality_row(c: PointContext, row: InequalityRow, blocks: BlockStructure, tols: Tolerances) -> EqualityRow:
    geom, s = c.geom, c.split
    near = row.slack <= tols.equality_tol * max(row.lhs, 1.0)
    res = {
        "a_TT": mixed_geodesic_residual(geom, s.D_T, s.D_T),
        "b_perp_perp": mixed_geodesic_residual(geom, s.D_perp, s.D_perp),
        "b_theta_theta": mixed_geodesic_residual(geom, s.D_theta, s.D_theta),
        "c_mean_curvature": float(np.linalg.norm(mean_curvature(geom))),
        "d_perp_theta": mixed_geodesic_residual(geom, s.D_perp, s.D_theta),
    }
    # second fundamental form of the fiber leaves inside M
    for key, dist, frame, which in (("perp", "perp", c.X, "f"), ("theta", "theta", c.Z, "s")):
        basis = s.D_perp if dist == "perp" else s.D_theta
        grad = c.grad_log(which)
        worst = 0.0
        for X in frame:
            for Y in frame:
                w = c.nabla(dist, X, Y)
                leaf_h = w - basis @ (basis.T @ w)
                worst = max(worst, _rel(leaf_h, -(X @ Y) * grad))
        res[f"umbilic_{key}"] = worst
    # the same relation read off the coordinate Christoffel symbols
    base = list(blocks.base)
    g0 = geom.metric[np.ix_(base, base)]
    worst = 0.0
    for fib, which in zip(blocks.fibers, ("f", "s")):
        d = c.warp.dlog_f if which == "f" else c.warp.dlog_s
        grad_base = np.linalg.solve(g0, d[base])
        for x in fib:
            for y in fib:
                worst = max(worst, _rel(geom.christoffel[base, x, y], -geom.metric[x, y] * grad_base))
    res["umbilic_christoffel"] = worst
    # normal-invariant part of the mixed terms: not covered by (a)-(d)
    inv = s.inv_normal
    if inv.shape[1]:
        ct = geom.coords(s.D_T)
        other = geom.coords(np.hstack([s.D_perp, s.D_theta]))
        res["inv_mixed"] = float(np.abs(np.einsum("nij,ip,jq,nr->pqr", geom.sff_ambient, ct, other, inv)).max(initial=0))
    else:
        res["inv_mixed"] = 0.0
    tol = tols.equality_tol
    flags = {
        "a": res["a_TT"] <= tol,
        "b": max(res["b_perp_perp"], res["b_theta_theta"], res["umbilic_perp"], res["umbilic_theta"]) <= tol,
        "c": res["c_mean_curvature"] <= tol,
        "d": res["d_perp_theta"] <= tol,
    }
    return EqualityRow(geom.point, bool(near), flags, res)


def equality_diagnostics(
    sample: ChartSample,
    blocks: BlockStructure | None = None,
    warps: WarpSamples | None = None,
    rows: list[InequalityRow] | None = None,
) -> tuple[Section, list[EqualityRow]]:
    """Flags (a)-(d) of the equality case next to near-equality, per point."""
    require_proper(sample)
    blocks = _blocks(sample, blocks)
    warps = warps if warps is not None else warp_samples(sample, blocks)
    ctxs = list(_contexts(sample, warps))
    rows = rows if rows is not None else [inequality_row(c) for c in ctxs]
    out = [equality_row(c, r, blocks, sample.tols) for c, r in zip(ctxs, rows)]
    pts = sample.points
    umb = np.array([max(e.residuals["umbilic_perp"], e.residuals["umbilic_theta"]) for e in out])
    chris = np.array([e.residuals["umbilic_christoffel"] for e in out])
    i_u, i_c = int(np.argmax(umb)), int(np.argmax(chris))
    disagree = [e for e in out if not e.agree]
    tol = sample.tols.audit_tol
    entries = [
        IdentityEntry("fiber_umbilic", "h_fiber(X, Y) = -g(X, Y) grad(ln f), likewise sigma", "identity",
                      float(umb[i_u]), pts[i_u], tol, bool(umb[i_u] <= tol)),
        IdentityEntry("fiber_umbilic_christoffel", "Gamma^base_xy = -g_xy grad(ln f_i)", "identity",
                      float(chris[i_c]), pts[i_c], tol, bool(chris[i_c] <= tol)),
        IdentityEntry("equality_flags", "near-equality <=> (a)-(d)", "info", float(len(disagree)),
                      disagree[0].point if disagree else None, 0.0, not disagree,
                      {"near_equality": sum(e.near_equality for e in out), "all_flags": sum(e.all_flags for e in out),
                       "disagreements": len(disagree)}),
    ]  # fmt: skip
    return Section("equality", entries), out


SECTIONS_NEEDING_BLOCKS = ("characterization", "second_fundamental_form", "triviality", "inequality", "equality")


def run_audit(
    chart: ImmersionChart,
    points=None,
    tols: Tolerances = DEFAULT_TOLERANCES,
    grid: int | None = None,
    blocks: BlockStructure | None = None,
    warps: WarpSamples | None = None,
    strict: bool = False,
) -> AuditReport:
    """Every audit section on one grid. Sections that need a block structure are skipped without one."""
    sample = sample_chart(chart, points, tols, grid, strict)
    require_constant_dims(sample)
    report = AuditReport(chart.name, sample.grid_info(), asdict(tols))
    report.sections += [audit_geometry(sample), audit_slant(sample)]
    report.sections += [audit_connection(sample), audit_distributions(sample)]
    blocks = blocks if blocks is not None else chart.blocks
    if blocks is None:
        for name in SECTIONS_NEEDING_BLOCKS:
            report.sections.append(Section(name, skipped="no block structure declared"))
        return report
    warps = warps if warps is not None else warp_samples(sample, blocks)
    report.sections.append(audit_characterization(sample, blocks, warps))
    report.sections.append(audit_sff(sample, blocks, warps))
    report.sections.append(audit_triviality(sample, blocks, warps))
    section, rows = inequality_audit(sample, blocks, warps)
    report.sections.append(section)
    report.inequality = rows
    section, diag = equality_diagnostics(sample, blocks, warps, rows)
    report.sections.append(section)
    report.diagnostics = diag
    return report

