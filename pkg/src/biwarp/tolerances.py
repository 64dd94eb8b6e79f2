from dataclasses import dataclass, fields, replace


@dataclass(frozen=True)
class Tolerances:
    ortho_tol: float = 1e-10
    eig_tol: float = 1e-10
    pd_tol: float = 1e-12
    rank_tol: float = 1e-10
    # identity residuals, relative to the scale of the quantities compared
    identity_tol: float = 1e-8
    # two-sided audits (max relative residual over a grid)
    audit_tol: float = 1e-7
    fd_tol: float = 1e-5
    cluster_tol: float = 1e-6
    slack_tol: float = 1e-8
    # near-equality in the curvature inequality: slack <= equality_tol * max(lhs, 1)
    equality_tol: float = 1e-6
    warp_tol: float = 1e-8
    block_tol: float = 1e-9
    # trivial warp: max |grad ln f| below this
    trivial_tol: float = 1e-8

    def updated(self, **overrides: float) -> "Tolerances":
        known = {f.name for f in fields(self)}
        unknown = set(overrides) - known
        if unknown:
            raise KeyError(f"unknown tolerance(s): {sorted(unknown)}")
        return replace(self, **{k: float(v) for k, v in overrides.items()})


DEFAULT_TOLERANCES = Tolerances()
