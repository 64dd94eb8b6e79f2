"""Multiply warped product metrics and warping functions.

Two entry points:

* metric level: a :class:`WarpedProductSpec` is a base metric, fiber metrics
  and warping functions given as expressions. Its Levi-Civita connection is
  computed from jets of the assembled metric and compared, component by
  component, with the covariant-derivative formulas for lifts of coordinate
  fields (base-base, base-fiber, fiber-fiber).
* chart level: :func:`recover_warping` reads the warping functions off the
  induced metric of an immersion with a declared block structure.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConfigError, InconsistentScaling, NotBlockDiagonal, NotPositiveDefinite
from .expr import Expr, Num, check_identifiers
from .jets import Jet2, compile_jet, coordinate_jets
from .linalg import SymMatrix
from .submanifold import ImmersionChart, PointGeometry, grid_geometries
from .tolerances import DEFAULT_TOLERANCES, Tolerances

MAX_FIBERS = 2


@dataclass(frozen=True)
class BlockStructure:
    """Partition of a chart's parameters into a base and one or two fibers.

    ``warps`` (optional) are declared warping functions over the base
    parameters, one per fiber. ``fiber_metrics`` (optional) give each fiber's
    own metric as a matrix of expressions in that fiber's parameters; the
    default is the flat coordinate metric.
    """

    base: tuple[int, ...]
    fibers: tuple[tuple[int, ...], ...]
    warps: tuple[Expr, ...] | None = None
    fiber_metrics: tuple[tuple[tuple[Expr, ...], ...], ...] | None = None

    def validate(self, params: Sequence[str]) -> None:
        d = len(params)
        groups = [self.base, *self.fibers]
        flat = [i for g in groups for i in g]
        if sorted(flat) != list(range(d)):
            raise ConfigError("block index sets must partition the parameter list")
        if not self.base or any(not f for f in self.fibers):
            raise ConfigError("base and fibers must be non-empty")
        if len(self.fibers) > MAX_FIBERS:
            raise ConfigError(f"at most {MAX_FIBERS} fibers are supported, got {len(self.fibers)}")
        base_names = [params[i] for i in self.base]
        if self.warps is not None:
            if len(self.warps) != len(self.fibers):
                raise ConfigError("need one declared warp per fiber")
            for w in self.warps:
                check_identifiers(w, base_names)
        if self.fiber_metrics is not None:
            if len(self.fiber_metrics) != len(self.fibers):
                raise ConfigError("need one fiber metric per fiber")
            for fib, mat in zip(self.fibers, self.fiber_metrics):
                if len(mat) != len(fib) or any(len(row) != len(fib) for row in mat):
                    raise ConfigError("fiber metric has the wrong shape")
                for row in mat:
                    for entry in row:
                        check_identifiers(entry, [params[i] for i in fib])

    def group_of(self) -> np.ndarray:
        """Group label per parameter: 0 for base, i for fiber i."""
        labels = np.zeros(sum(len(g) for g in (self.base, *self.fibers)), dtype=int)
        for i, fib in enumerate(self.fibers, start=1):
            labels[list(fib)] = i
        return labels


# --------------------------------------------------------------------------
# metric level


@dataclass(frozen=True)
class WarpedProductSpec:
    """g = g0 + sum_i f_i^2 g_i on a product of coordinate boxes."""

    params: tuple[str, ...]
    base: tuple[int, ...]
    fibers: tuple[tuple[int, ...], ...]
    base_metric: tuple[tuple[Expr, ...], ...]
    fiber_metrics: tuple[tuple[tuple[Expr, ...], ...], ...]
    warps: tuple[Expr, ...]
    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self):
        BlockStructure(self.base, self.fibers).validate(self.params)
        if len(self.fiber_metrics) != len(self.fibers) or len(self.warps) != len(self.fibers):
            raise ConfigError("one fiber metric and one warp per fiber")
        base_names = [self.params[i] for i in self.base]
        for row in self.base_metric:
            for e in row:
                check_identifiers(e, base_names)
        for w in self.warps:
            check_identifiers(w, base_names)
        for fib, mat in zip(self.fibers, self.fiber_metrics):
            for row in mat:
                for e in row:
                    check_identifiers(e, [self.params[i] for i in fib])

    @property
    def dim(self) -> int:
        return len(self.params)

    def random_points(self, rng: np.random.Generator, count: int) -> np.ndarray:
        lo, hi = np.array(self.lower), np.array(self.upper)
        return lo + (hi - lo) * rng.random((count, self.dim))


def _matrix_jets(mat, params, xs) -> list[list[Jet2]]:
    return [[compile_jet(e, params)(xs) for e in row] for row in mat]


def _warp_jets(spec: WarpedProductSpec, xs) -> list[Jet2]:
    out = []
    for w in spec.warps:
        j = compile_jet(w, spec.params)(xs)
        if np.any(j.value <= 0):
            raise NotPositiveDefinite("warping function must be positive")
        out.append(j)
    return out


def metric_jets(spec: WarpedProductSpec, p) -> tuple[np.ndarray, np.ndarray]:
    """Metric value (d, d) and first derivatives (d, d, d) [k, i, j] = d_k g_ij."""
    p = np.asarray(p, dtype=float)
    d = spec.dim
    xs = coordinate_jets(p, d)
    g = np.zeros((d, d))
    dg = np.zeros((d, d, d))
    base = list(spec.base)
    for a, row in zip(base, _matrix_jets(spec.base_metric, spec.params, xs)):
        for b, jet in zip(base, row):
            g[a, b] = jet.value
            dg[:, a, b] = jet.grad
    for fib, mat, f in zip(spec.fibers, spec.fiber_metrics, _warp_jets(spec, xs)):
        f2 = f * f
        for x, row in zip(fib, _matrix_jets(mat, spec.params, xs)):
            for y, jet in zip(fib, row):
                entry = f2 * jet
                g[x, y] = entry.value
                dg[:, x, y] = entry.grad
    return g, dg


def assemble_metric(spec: WarpedProductSpec, p, tols: Tolerances = DEFAULT_TOLERANCES) -> SymMatrix:
    g, _ = metric_jets(spec, p)
    return SymMatrix(g).require_positive_definite(tols.pd_tol)


def levi_civita(g: np.ndarray, dg: np.ndarray, tols: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Gamma^k_ij = 1/2 g^kl (d_i g_jl + d_j g_il - d_l g_ij) from metric value and derivatives."""
    SymMatrix(g).require_positive_definite(tols.pd_tol)
    ginv = np.linalg.inv(g)
    lowered = 0.5 * (np.einsum("ijl->ijl", dg) + np.einsum("jil->ijl", dg) - np.einsum("lij->ijl", dg))
    return np.einsum("kl,ijl->kij", ginv, lowered)


def christoffel_of_metric(spec: WarpedProductSpec, p, tols: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    g, dg = metric_jets(spec, p)
    return levi_civita(g, dg, tols)


def _block_christoffel(mat, idx, spec: WarpedProductSpec, xs, tols) -> np.ndarray:
    """Christoffel symbols of one factor's own metric, indexed within the factor."""
    k = len(idx)
    g = np.zeros((k, k))
    dg = np.zeros((k, k, k))
    for a, row in enumerate(_matrix_jets(mat, spec.params, xs)):
        for b, jet in enumerate(row):
            g[a, b] = jet.value
            dg[:, a, b] = jet.grad[list(idx)]
    return levi_civita(g, dg, tols)


def _predict(g, base, fibers, gamma0, fiber_gammas, dlogs) -> np.ndarray:
    """Christoffel symbols demanded by the warped-product covariant derivative formulas.

    * base-base: the base metric's own connection, no fiber component;
    * base-fiber: D_V X = V(ln f_i) X;
    * fiber-fiber, same fiber: fiber connection minus g(X, Z) grad(ln f_i);
      distinct fibers: zero.
    """
    d = g.shape[0]
    base = list(base)
    pred = np.zeros((d, d, d))
    g0 = g[np.ix_(base, base)]
    pred[np.ix_(base, base, base)] = gamma0
    for fib, gam, dlog in zip(fibers, fiber_gammas, dlogs):
        fib = list(fib)
        grad_base = np.linalg.solve(g0, dlog[base])
        for a in base:
            for x in fib:
                pred[x, a, x] = pred[x, x, a] = dlog[a]
        pred[np.ix_(fib, fib, fib)] = gam
        for x in fib:
            for z in fib:
                pred[base, x, z] = -g[x, z] * grad_base
    return pred


def christoffel_split_prediction(spec: WarpedProductSpec, p, tols: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    xs = coordinate_jets(p, spec.dim)
    g, _ = metric_jets(spec, p)
    gamma0 = _block_christoffel(spec.base_metric, spec.base, spec, xs, tols)
    fiber_gammas = [_block_christoffel(m, fib, spec, xs, tols) for fib, m in zip(spec.fibers, spec.fiber_metrics)]
    dlogs = [f.grad / f.value for f in _warp_jets(spec, xs)]
    return _predict(g, spec.base, spec.fibers, gamma0, fiber_gammas, dlogs)


def _split_residuals(gamma, pred, base, d) -> dict[str, float]:
    diff = np.abs(gamma - pred)
    is_base = np.zeros(d, dtype=bool)
    is_base[list(base)] = True
    out = {}
    for name, mask in (
        ("base_base", np.outer(is_base, is_base)),
        ("base_fiber", np.outer(is_base, ~is_base) | np.outer(~is_base, is_base)),
        ("fiber_fiber", np.outer(~is_base, ~is_base)),
    ):
        out[name] = float(diff[:, mask].max(initial=0.0))
    return out


def verify_christoffel_split(spec: WarpedProductSpec, p, tols: Tolerances = DEFAULT_TOLERANCES) -> dict[str, float]:
    """Max |Gamma - prediction| over the base-base, base-fiber and fiber-fiber slots."""
    gamma = christoffel_of_metric(spec, p, tols)
    return _split_residuals(gamma, christoffel_split_prediction(spec, p, tols), spec.base, spec.dim)


# --------------------------------------------------------------------------
# chart level


@dataclass
class WarpSamples:
    points: np.ndarray  # (P, d)
    values: np.ndarray  # (P, fibers): f_i
    log_grad: np.ndarray  # (P, fibers, d): differential of ln f_i in chart coordinates
    grad_norm: np.ndarray  # (P, fibers): |grad ln f_i| in the induced metric on the base block
    spread: float  # worst relative disagreement of f_i^2 across a fiber block
    fiber_leak: float  # worst |X(ln f_i)| over fiber coordinate directions
    declared_residual: float | None = None
    base: tuple[int, ...] = field(default=())

    def log_gradient_vector(self, i: int, fiber: int, metric: np.ndarray) -> np.ndarray:
        """Coordinate components of grad(ln f) using the base block of ``metric``."""
        base = list(self.base)
        out = np.zeros(self.points.shape[1])
        out[base] = np.linalg.solve(metric[np.ix_(base, base)], self.log_grad[i, fiber, base])
        return out

    def scaled_log(self, fiber: int, factor: float) -> "WarpSamples":
        """Copy with ln f_fiber multiplied by ``factor`` (a deliberately wrong warp)."""
        values = self.values.copy()
        log_grad = self.log_grad.copy()
        grad_norm = self.grad_norm.copy()
        values[:, fiber] = values[:, fiber] ** factor
        log_grad[:, fiber] *= factor
        grad_norm[:, fiber] *= abs(factor)
        return WarpSamples(self.points, values, log_grad, grad_norm, self.spread, self.fiber_leak, None, self.base)


def _reference_fiber_metric(blocks: BlockStructure, fiber: int, params, points):
    """Fiber metric values (P, k, k) and derivatives (P, d, k, k); flat by default."""
    fib = blocks.fibers[fiber]
    k = len(fib)
    npts, d = points.shape
    if blocks.fiber_metrics is None:
        return np.broadcast_to(np.eye(k), (npts, k, k)), np.zeros((npts, d, k, k))
    xs = coordinate_jets(points, d)
    val = np.zeros((npts, k, k))
    der = np.zeros((npts, d, k, k))
    for a, row in enumerate(blocks.fiber_metrics[fiber]):
        for b, e in enumerate(row):
            j = compile_jet(e, params)(xs)
            val[:, a, b] = j.value
            der[:, :, a, b] = j.grad
    return val, der


def warp_at_point(geom: PointGeometry, blocks: BlockStructure, ref_val, ref_der, tols: Tolerances):
    """(f_i, d ln f_i, spread_i, leak_i) per fiber from one point's induced metric."""
    g, dg = geom.metric, geom.metric_deriv
    labels = blocks.group_of()
    scale = max(1.0, float(np.abs(g).max()))
    off = labels[:, None] != labels[None, :]
    worst = float(np.abs(g[off]).max(initial=0.0))
    if worst > tols.block_tol * scale:
        raise NotBlockDiagonal(f"induced metric couples different blocks (|g| = {worst:.3e})")
    base = list(blocks.base)
    out = []
    for i, fib in enumerate(blocks.fibers):
        fib = list(fib)
        gff = g[np.ix_(fib, fib)]
        dgff = dg[:, fib][:, :, fib]
        ref, dref = ref_val[i], ref_der[i]
        nonzero = np.abs(ref) > 1e-14
        if np.any(np.abs(gff[~nonzero]) > tols.block_tol * scale):
            raise InconsistentScaling("fiber block has entries where the fiber metric vanishes")
        ratios = gff[nonzero] / ref[nonzero]
        f2 = float(ratios.mean())
        if f2 <= 0:
            raise InconsistentScaling("non-positive fiber scaling")
        spread = float(np.abs(ratios - f2).max()) / f2
        if spread > tols.warp_tol:
            raise InconsistentScaling(
                f"fiber {i + 1}: block is not a multiple of the fiber metric (spread {spread:.3e})"
            )
        a = int(np.argmax(np.abs(np.diag(ref))))
        dlog_f2 = dgff[:, a, a] / gff[a, a] - dref[:, a, a] / ref[a, a]
        dlog = 0.5 * dlog_f2
        non_base = np.ones(len(dlog), dtype=bool)
        non_base[base] = False
        leak = float(np.abs(dlog[non_base]).max(initial=0.0))
        if leak > tols.warp_tol * max(1.0, float(np.abs(dlog).max())):
            raise InconsistentScaling(
                f"fiber {i + 1}: scaling depends on fiber coordinates (|d ln f| = {leak:.3e} off the base)"
            )
        out.append((np.sqrt(f2), dlog, spread, leak))
    return out


def recover_warping(
    chart: ImmersionChart,
    blocks: BlockStructure | None = None,
    points=None,
    tols: Tolerances = DEFAULT_TOLERANCES,
    geometries: Sequence[PointGeometry] | None = None,
) -> WarpSamples:
    """Sample the warping functions f_i and d(ln f_i) on a grid.

    f_i^2 is the ratio of the induced fiber block to the fiber's reference
    metric; it must be the same for every entry of the block and independent
    of the fiber coordinates. Declared warps, when present, replace the
    recovered values after a cross-check.
    """
    blocks = blocks if blocks is not None else chart.blocks
    if blocks is None:
        raise ConfigError(f"chart {chart.name!r} has no block structure")
    blocks.validate(chart.param_names)
    if geometries is None:
        pts = chart.grid() if points is None else np.asarray(points, dtype=float).reshape(-1, chart.dim)
        geometries = grid_geometries(chart, pts, tols)
    pts = np.array([g.point for g in geometries]).reshape(-1, chart.dim)
    nfib = len(blocks.fibers)
    refs = [_reference_fiber_metric(blocks, i, chart.param_names, pts) for i in range(nfib)]
    values = np.zeros((len(pts), nfib))
    log_grad = np.zeros((len(pts), nfib, chart.dim))
    grad_norm = np.zeros((len(pts), nfib))
    spread = leak = 0.0
    base = list(blocks.base)
    for p, geom in enumerate(geometries):
        per = warp_at_point(geom, blocks, [r[0][p] for r in refs], [r[1][p] for r in refs], tols)
        g0 = geom.metric[np.ix_(base, base)]
        for i, (f, dlog, s, lk) in enumerate(per):
            values[p, i] = f
            log_grad[p, i] = dlog
            grad_norm[p, i] = np.sqrt(max(float(dlog[base] @ np.linalg.solve(g0, dlog[base])), 0.0))
            spread, leak = max(spread, s), max(leak, lk)
    declared_residual = None
    if blocks.warps is not None:
        xs = coordinate_jets(pts, chart.dim)
        declared_residual = 0.0
        for i, w in enumerate(blocks.warps):
            j = compile_jet(w, chart.param_names)(xs)
            if np.any(j.value <= 0):
                raise InconsistentScaling("declared warp is not positive")
            dlog = j.grad / j.value[:, None]
            res = max(
                float(np.abs(j.value - values[:, i]).max() / max(1.0, np.abs(values[:, i]).max())),
                float(np.abs(dlog - log_grad[:, i]).max() / max(1.0, np.abs(log_grad[:, i]).max())),
            )
            declared_residual = max(declared_residual, res)
            values[:, i] = j.value
            log_grad[:, i] = dlog
        if declared_residual > tols.warp_tol:
            raise InconsistentScaling(f"declared warps disagree with the induced metric ({declared_residual:.3e})")
    return WarpSamples(pts, values, log_grad, grad_norm, spread, leak, declared_residual, tuple(base))


def triviality_check(samples: WarpSamples, tol: float = DEFAULT_TOLERANCES.trivial_tol) -> tuple[bool, float]:
    """(all warps constant on the grid, max |grad ln f_i|)."""
    worst = float(samples.grad_norm.max(initial=0.0))
    return worst <= tol, worst


def constant_warp(value: float = 1.0) -> Expr:
    return Num(float(value))


def chart_christoffel_split(
    geoms: Sequence[PointGeometry],
    blocks: BlockStructure,
    samples: WarpSamples,
    params: Sequence[str],
    tols: Tolerances = DEFAULT_TOLERANCES,
) -> list[dict[str, float]]:
    """Christoffel split residuals of an immersed chart's induced Christoffel symbols, per point.

    The base connection comes from the induced base block; fiber connections
    from the reference fiber metrics; warps from ``samples``.
    """
    pts = np.array([g.point for g in geoms]).reshape(-1, len(params))
    refs = [_reference_fiber_metric(blocks, i, params, pts) for i in range(len(blocks.fibers))]
    base = list(blocks.base)
    out = []
    for p, geom in enumerate(geoms):
        g0 = geom.metric[np.ix_(base, base)]
        dg0 = geom.metric_deriv[np.ix_(base, base, base)]
        gamma0 = levi_civita(g0, dg0, tols)
        fiber_gammas = []
        for (val, der), fib in zip(refs, blocks.fibers):
            fiber_gammas.append(levi_civita(val[p], der[p][list(fib)], tols))
        pred = _predict(geom.metric, base, blocks.fibers, gamma0, fiber_gammas, samples.log_grad[p])
        out.append(_split_residuals(geom.christoffel, pred, base, geom.dim))
    return out


def roundtrip_residual(geom: PointGeometry, blocks: BlockStructure, f: Sequence[float], refs) -> float:
    """max |g_induced - (g0 + sum f_i^2 g_i)| at one point; ``refs`` are the fiber reference metrics there."""
    g = np.zeros_like(geom.metric)
    base = list(blocks.base)
    g[np.ix_(base, base)] = geom.metric[np.ix_(base, base)]
    for fi, ref, fib in zip(f, refs, blocks.fibers):
        g[np.ix_(list(fib), list(fib))] = fi**2 * ref
    return float(np.abs(g - geom.metric).max())


def fiber_reference(blocks: BlockStructure, params: Sequence[str], points) -> list[tuple[np.ndarray, np.ndarray]]:
    pts = np.asarray(points, dtype=float).reshape(-1, len(params))
    return [_reference_fiber_metric(blocks, i, params, pts) for i in range(len(blocks.fibers))]
