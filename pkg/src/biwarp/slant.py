"""Tangential/normal parts of J and the spectral split of the tangent space.

With an orthonormal tangent frame, T is skew and -T^2 = T^T T is symmetric
positive semidefinite with spectrum in [0, 1]. Eigenvalue 1 is the
holomorphic part D^T, eigenvalue 0 the totally real part D^perp, and an
intermediate eigenvalue cos^2(theta) a pointwise slant block D^theta.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .ambient import AmbientSpace
from .errors import HigherOrder, Unclassifiable
from .linalg import orthonormalize, sym_eigen
from .submanifold import PointGeometry
from .tolerances import DEFAULT_TOLERANCES, Tolerances


@dataclass
class TangentialOperator:
    T: np.ndarray  # (d, d), orthonormal tangent frame
    F: np.ndarray  # (N - d, d), normal frame coordinates of the normal part of J e_b
    geom: PointGeometry = field(repr=False)
    space: AmbientSpace = field(repr=False)

    def skew_residual(self) -> float:
        return float(np.abs(self.T + self.T.T).max(initial=0.0))

    def apply_T(self, v: np.ndarray) -> np.ndarray:
        """Tangential part of J v for ambient tangent vector(s) v."""
        return self.geom.tangent_projector @ self.space.apply_J(v)

    def apply_F(self, v: np.ndarray) -> np.ndarray:
        """Normal part of J v, as an ambient vector."""
        return self.geom.normal_projector @ self.space.apply_J(v)


@dataclass
class SpectralCluster:
    eigenvalue: float  # snapped to exactly 0 or 1 when within cluster_tol
    raw: float  # mean of the unsnapped eigenvalues
    multiplicity: int
    vectors: np.ndarray  # (d, multiplicity), orthonormal tangent frame coordinates
    spread: float


@dataclass
class SlantSplit:
    point: np.ndarray
    clusters: list[SpectralCluster]
    D_T: np.ndarray  # (N, k) ambient orthonormal columns
    D_perp: np.ndarray
    D_theta: np.ndarray
    theta: float  # nan when undefined (several clusters, none intermediate)
    J_perp: np.ndarray  # (N, n) basis of J(D^perp)
    F_theta: np.ndarray  # (N, m) basis of F(D^theta)
    inv_normal: np.ndarray  # (N, l) invariant normal complement
    invariant_residual: float
    proper: bool

    @property
    def dims(self) -> tuple[int, int, int, int]:
        return (self.D_T.shape[1], self.D_perp.shape[1], self.D_theta.shape[1], self.inv_normal.shape[1])

    @property
    def k(self) -> int:
        return self.D_T.shape[1]

    @property
    def n(self) -> int:
        return self.D_perp.shape[1]

    @property
    def m(self) -> int:
        return self.D_theta.shape[1]

    @property
    def l(self) -> int:  # noqa: E743
        return self.inv_normal.shape[1]

    @property
    def cos_theta(self) -> float:
        return float(np.cos(self.theta))

    @property
    def order(self) -> int:
        return int(self.m > 0)


def tangential_operator(geom: PointGeometry, space: AmbientSpace) -> TangentialOperator:
    je = space.apply_J(geom.tangent_frame)
    return TangentialOperator(geom.tangent_frame.T @ je, geom.normal_frame.T @ je, geom, space)


def slant_spectrum(op: TangentialOperator, tols: Tolerances = DEFAULT_TOLERANCES) -> list[SpectralCluster]:
    """Clusters of the spectrum of T^T T, ascending; eigenvalues clipped to [0, 1]."""
    lam, vecs = sym_eigen(op.T.T @ op.T, tols.eig_tol)
    lam = np.clip(lam, 0.0, 1.0)
    groups: list[list[int]] = []
    for i in range(len(lam)):
        if groups and lam[i] - lam[groups[-1][-1]] <= tols.cluster_tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    clusters = []
    for g in groups:
        raw = float(lam[g].mean())
        value = raw
        if raw <= tols.cluster_tol:
            value = 0.0
        elif raw >= 1.0 - tols.cluster_tol:
            value = 1.0
        clusters.append(SpectralCluster(value, raw, len(g), vecs[:, g], float(lam[g[-1]] - lam[g[0]])))
    return clusters


def _empty(n: int) -> np.ndarray:
    return np.zeros((n, 0))


def classify_point(
    op: TangentialOperator,
    clusters: list[SpectralCluster],
    tols: Tolerances = DEFAULT_TOLERANCES,
) -> SlantSplit:
    """Order-1 split D^T + D^perp + D^theta and the normal split J D^perp + F D^theta + invariant part."""
    for c in clusters:
        if c.spread > tols.cluster_tol:
            raise Unclassifiable(f"eigenvalue cluster near {c.raw:.6g} is not separated (spread {c.spread:.2e})")
    middle = [c for c in clusters if 0.0 < c.eigenvalue < 1.0]
    if len(middle) > 1:
        angles = ", ".join(f"{np.degrees(np.arccos(np.sqrt(c.eigenvalue))):.4f} deg" for c in middle)
        raise HigherOrder(f"{len(middle)} distinct slant angles ({angles}); only order 1 is supported")
    by_value = {c.eigenvalue: c for c in clusters if c.eigenvalue in (0.0, 1.0)}
    hol = by_value.get(1.0)
    real = by_value.get(0.0)
    slant = middle[0] if middle else None
    if hol is not None and hol.multiplicity % 2:
        raise Unclassifiable("holomorphic block has odd dimension")
    if slant is not None and slant.multiplicity % 2:
        raise Unclassifiable("slant block has odd dimension")
    geom = op.geom
    n_amb = geom.ambient_dim
    e = geom.tangent_frame

    def lift(c):
        return e @ c.vectors if c is not None else _empty(n_amb)

    d_t, d_perp, d_theta = lift(hol), lift(real), lift(slant)
    if slant is not None:
        theta = float(np.arccos(np.sqrt(slant.eigenvalue)))
    elif len(clusters) == 1:
        theta = 0.0 if hol is not None else float(np.pi / 2)
    else:
        theta = float("nan")

    space = op.space
    j_perp = space.apply_J(d_perp) if d_perp.shape[1] else _empty(n_amb)
    if d_theta.shape[1]:
        f_theta = orthonormalize(op.apply_F(d_theta).T, rank_tol=tols.rank_tol).vectors.T
    else:
        f_theta = _empty(n_amb)
    known = np.hstack([j_perp, f_theta])
    nf = geom.normal_frame
    rest = nf.T @ (np.eye(n_amb) - known @ known.T) @ nf
    lam, vecs = sym_eigen(0.5 * (rest + rest.T), tols.eig_tol)
    inv_normal = nf @ vecs[:, lam > 0.5]
    if inv_normal.shape[1]:
        jb = space.apply_J(inv_normal)
        invariant_residual = float(np.abs(jb - inv_normal @ (inv_normal.T @ jb)).max())
    else:
        invariant_residual = 0.0
    proper = bool(d_t.shape[1] and d_perp.shape[1] and d_theta.shape[1] and 0.0 < theta < np.pi / 2)
    return SlantSplit(
        point=geom.point,
        clusters=clusters,
        D_T=d_t,
        D_perp=d_perp,
        D_theta=d_theta,
        theta=theta,
        J_perp=j_perp,
        F_theta=f_theta,
        inv_normal=inv_normal,
        invariant_residual=invariant_residual,
        proper=proper,
    )


def slant_split(geom: PointGeometry, space: AmbientSpace, tols: Tolerances = DEFAULT_TOLERANCES) -> SlantSplit:
    op = tangential_operator(geom, space)
    return classify_point(op, slant_spectrum(op, tols), tols)


def _slant_block(op: TangentialOperator, split: SlantSplit) -> np.ndarray:
    """Frame coordinates of the block the slant identities apply to."""
    if split.m:
        return op.geom.tangent_frame.T @ split.D_theta
    if len(split.clusters) == 1:
        return np.eye(op.T.shape[0])
    return np.zeros((op.T.shape[0], 0))


def verify_slant_identities(op: TangentialOperator, split: SlantSplit) -> tuple[float, float]:
    """Max residuals of <TU,TV> = cos^2 <U,V> and <FU,FV> = sin^2 <U,V> over the slant block."""
    b = _slant_block(op, split)
    if b.shape[1] == 0:
        return 0.0, 0.0
    c2 = np.cos(split.theta) ** 2
    s2 = np.sin(split.theta) ** 2
    tb, fb = op.T @ b, op.F @ b
    gram = b.T @ b
    r9 = np.abs(tb.T @ tb - c2 * gram).max()
    r10 = np.abs(fb.T @ fb - s2 * gram).max()
    return float(r9), float(r10)


def operator_identity_residual(op: TangentialOperator, split: SlantSplit) -> float:
    """max |(T^2 + cos^2(theta) Id) V| over the slant block."""
    b = _slant_block(op, split)
    if b.shape[1] == 0:
        return 0.0
    return float(np.abs(op.T @ (op.T @ b) + np.cos(split.theta) ** 2 * b).max())


def isometry_residual(op: TangentialOperator, v_frame: np.ndarray) -> float:
    """| |Tv|^2 + |Fv|^2 - |v|^2 | / |v|^2 for frame coordinates v."""
    v = np.asarray(v_frame, dtype=float)
    nv = float(v @ v)
    return abs(float(np.sum((op.T @ v) ** 2) + np.sum((op.F @ v) ** 2)) - nv) / max(nv, 1e-300)
