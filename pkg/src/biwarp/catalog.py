"""Built-in charts with known ground truth.

``r14`` is the five-dimensional biwarped example in R^14 = C^7. The rest are
small controls: planes of each slant type, flat and warped products, and
negative fixtures that the engine must reject.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .ambient import AmbientSpace
from .errors import UnknownFixture
from .expr import parse_expression
from .submanifold import ImmersionChart, ParamSpec
from .warped import BlockStructure, WarpedProductSpec

EDGE = 0.05
HALF_PI = math.pi / 2


@dataclass(frozen=True)
class Expected:
    dims: tuple[int, int, int, int] | None = None
    proper: bool | None = None
    theta: float | None = None  # constant slant angle, when there is one
    cos_theta: Callable[[np.ndarray], float] | None = None
    metric: Callable[[np.ndarray], np.ndarray] | None = None
    warps: Callable[[np.ndarray], tuple[float, ...]] | None = None
    trivial: bool | None = None
    raises: str | None = None  # name of the error the engine must raise


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    chart: ImmersionChart
    blocks: BlockStructure | None
    expected: Expected = field(default_factory=Expected)
    description: str = ""


def _chart(name, complex_dim, params, components, blocks=None, excluded=(), grid=3) -> ImmersionChart:
    return ImmersionChart(
        name=name,
        ambient=AmbientSpace(complex_dim),
        params=tuple(ParamSpec(*p) for p in params),
        components=tuple(parse_expression(c) for c in components),
        blocks=blocks,
        excluded=excluded,
        default_grid=grid,
    )


R14_COMPONENTS = (
    "u*cos(z)", "v*cos(z)", "u*cos(w)", "v*cos(w)",
    "u*sin(z)", "v*sin(z)", "u*sin(w)", "v*sin(w)",
    "z", "w",
    "u*cos(x)", "v*cos(x)", "u*sin(x)", "v*sin(x)",
)  # fmt: skip

ANGLE_BOX = (EDGE, HALF_PI - EDGE)


def _r14_metric(p):
    u, v = p[0], p[1]
    r2 = u * u + v * v
    return np.diag([3.0, 3.0, r2, 1 + r2, 1 + r2])


def r14_example(strict_domain: bool = False, lower: float = 0.5, upper: float = 2.5) -> CatalogEntry:
    """The biwarped example M_T x_f M_perp x_sigma M_theta in C^7.

    ``strict_domain`` drops u, v in {0, 1} from grids.
    """
    blocks = BlockStructure(base=(0, 1), fibers=((2,), (3, 4)))
    chart = _chart(
        "r14",
        7,
        [("u", lower, upper), ("v", lower, upper), ("x", *ANGLE_BOX), ("z", *ANGLE_BOX), ("w", *ANGLE_BOX)],
        R14_COMPONENTS,
        blocks,
        excluded=(("u", (0.0, 1.0)), ("v", (0.0, 1.0))) if strict_domain else (),
        grid=5,
    )
    expected = Expected(
        dims=(2, 1, 2, 6),
        proper=True,
        cos_theta=lambda p: 1.0 / (1.0 + p[0] ** 2 + p[1] ** 2),
        metric=_r14_metric,
        warps=lambda p: (math.hypot(p[0], p[1]), math.sqrt(1 + p[0] ** 2 + p[1] ** 2)),
        trivial=False,
    )
    return CatalogEntry("r14", chart, blocks, expected, "five-dimensional biwarped product in C^7")


def _holomorphic_plane() -> CatalogEntry:
    chart = _chart("holomorphic_plane", 2, [("u", -1, 1), ("v", -1, 1)], ["u", "v", "0", "0"])
    return CatalogEntry(
        "holomorphic_plane",
        chart,
        None,
        Expected(dims=(2, 0, 0, 2), proper=False, theta=0.0, metric=lambda p: np.eye(2)),
        "complex line C x {0} in C^2",
    )


def _totally_real_plane() -> CatalogEntry:
    chart = _chart("totally_real_plane", 2, [("u", -1, 1), ("v", -1, 1)], ["u", "0", "v", "0"])
    return CatalogEntry(
        "totally_real_plane",
        chart,
        None,
        Expected(dims=(0, 2, 0, 0), proper=False, theta=HALF_PI, metric=lambda p: np.eye(2)),
        "real plane R^2 in C^2",
    )


def slant_plane(theta0: float = math.pi / 4) -> CatalogEntry:
    """(u, v cos t, v sin t, 0): a slant plane with angle t in C^2."""
    if not 0.0 < theta0 < HALF_PI:
        raise UnknownFixture(f"slant_plane angle must lie in (0, pi/2), got {theta0}")
    c, s = repr(math.cos(theta0)), repr(math.sin(theta0))
    chart = _chart("slant_plane", 2, [("u", -1, 1), ("v", -1, 1)], ["u", f"v*{c}", f"v*{s}", "0"])
    return CatalogEntry(
        f"slant_plane({theta0!r})",
        chart,
        None,
        Expected(dims=(0, 0, 2, 0), proper=False, theta=theta0, cos_theta=lambda p: math.cos(theta0)),
        "slant plane in C^2",
    )


def _product_chart() -> CatalogEntry:
    blocks = BlockStructure(base=(0,), fibers=((1,),))
    chart = _chart("product_chart", 2, [("u", -1, 1), ("x", -1, 1)], ["u", "0", "x", "0"], blocks)
    return CatalogEntry(
        "product_chart",
        chart,
        blocks,
        Expected(dims=(0, 2, 0, 0), proper=False, metric=lambda p: np.eye(2), warps=lambda p: (1.0,), trivial=True),
        "flat product R x R, warp 1",
    )


def _singly_warped() -> CatalogEntry:
    # z (cos x, sin x) with z = u + iv: a CR-warped product with f = |z|
    blocks = BlockStructure(base=(0, 1), fibers=((2,),))
    chart = _chart(
        "singly_warped",
        2,
        [("u", 0.5, 2.5), ("v", 0.5, 2.5), ("x", *ANGLE_BOX)],
        ["u*cos(x)", "v*cos(x)", "u*sin(x)", "v*sin(x)"],
        blocks,
    )
    return CatalogEntry(
        "singly_warped",
        chart,
        blocks,
        Expected(
            dims=(2, 1, 0, 0),
            proper=False,
            metric=lambda p: np.diag([1.0, 1.0, p[0] ** 2 + p[1] ** 2]),
            warps=lambda p: (math.hypot(p[0], p[1]),),
            trivial=False,
        ),
        "warped product of a complex line and a totally real curve in C^2",
    )


def _two_angle_higher_order() -> CatalogEntry:
    c1, s1 = repr(math.cos(math.pi / 6)), repr(math.sin(math.pi / 6))
    c2, s2 = repr(math.cos(math.pi / 3)), repr(math.sin(math.pi / 3))
    chart = _chart(
        "two_angle_higher_order",
        4,
        [("a", -1, 1), ("b", -1, 1), ("c", -1, 1), ("d", -1, 1)],
        ["a", f"b*{c1}", f"b*{s1}", "0", "c", f"d*{c2}", f"d*{s2}", "0"],
    )
    return CatalogEntry(
        "two_angle_higher_order",
        chart,
        None,
        Expected(raises="HigherOrder"),
        "two slant planes with angles pi/6 and pi/3",
    )


def _perturbed_nonwarped() -> CatalogEntry:
    blocks = BlockStructure(base=(0,), fibers=((1,),))
    chart = _chart(
        "perturbed_nonwarped",
        2,
        [("u", 0.5, 2.0), ("x", 0.1, 1.5)],
        ["u*cos(x)", "u*sin(x)", "x^2/2", "0"],
        blocks,
    )
    return CatalogEntry(
        "perturbed_nonwarped",
        chart,
        blocks,
        Expected(metric=lambda p: np.diag([1.0, p[0] ** 2 + p[1] ** 2]), raises="InconsistentScaling"),
        "fiber block u^2 + x^2 depends on the fiber coordinate",
    )


def _trivial_biwarped(theta0: float = math.pi / 3) -> CatalogEntry:
    c, s = repr(math.cos(theta0)), repr(math.sin(theta0))
    blocks = BlockStructure(base=(0, 1), fibers=((2,), (3, 4)))
    chart = _chart(
        "trivial_biwarped",
        4,
        [("u", -1, 1), ("v", -1, 1), ("x", -1, 1), ("z", -1, 1), ("w", -1, 1)],
        ["u", "v", "x", "0", "z", f"w*{c}", f"w*{s}", "0"],
        blocks,
    )
    return CatalogEntry(
        "trivial_biwarped",
        chart,
        blocks,
        Expected(
            dims=(2, 1, 2, 0),
            proper=True,
            theta=theta0,
            metric=lambda p: np.eye(5),
            warps=lambda p: (1.0, 1.0),
            trivial=True,
        ),
        "flat product C x R x (slant plane), totally geodesic",
    )


def _twisted_r14(eps: float = 0.1) -> CatalogEntry:
    # r14 with z + i w replaced by z + i w + eps (u + iv)^2; D^T stays a complex line
    # but is no longer totally geodesic and the metric is not block diagonal
    comps = list(R14_COMPONENTS)
    comps[8] = f"z + {eps!r}*(u^2 - v^2)"
    comps[9] = f"w + {2 * eps!r}*u*v"
    chart = _chart(
        "twisted_r14",
        7,
        [("u", 0.5, 2.5), ("v", 0.5, 2.5), ("x", *ANGLE_BOX), ("z", *ANGLE_BOX), ("w", *ANGLE_BOX)],
        comps,
    )
    return CatalogEntry(
        "twisted_r14",
        chart,
        None,
        Expected(dims=(2, 1, 2, 6), proper=True),
        "holomorphic deformation of r14; order 1 but not a warped product",
    )


def _unit_circle() -> CatalogEntry:
    chart = _chart("unit_circle", 1, [("t", -3, 3)], ["cos(t)", "sin(t)"])
    return CatalogEntry("unit_circle", chart, None, Expected(metric=lambda p: np.eye(1)), "unit circle in R^2")


def _round_sphere(radius: float = 2.0) -> CatalogEntry:
    r = repr(float(radius))
    chart = _chart(
        "round_sphere",
        2,
        [("a", 0.2, 2.9), ("b", -3, 3)],
        [f"{r}*sin(a)*cos(b)", f"{r}*sin(a)*sin(b)", f"{r}*cos(a)", "0"],
    )
    return CatalogEntry(
        "round_sphere",
        chart,
        None,
        Expected(metric=lambda p: radius**2 * np.diag([1.0, math.sin(p[0]) ** 2])),
        f"sphere of radius {radius} in R^3 x {{0}}",
    )


FIXTURES: dict[str, Callable[..., CatalogEntry]] = {
    "r14": r14_example,
    "holomorphic_plane": _holomorphic_plane,
    "totally_real_plane": _totally_real_plane,
    "slant_plane": slant_plane,
    "product_chart": _product_chart,
    "singly_warped": _singly_warped,
    "two_angle_higher_order": _two_angle_higher_order,
    "perturbed_nonwarped": _perturbed_nonwarped,
    "trivial_biwarped": _trivial_biwarped,
    "twisted_r14": _twisted_r14,
    "unit_circle": _unit_circle,
    "round_sphere": _round_sphere,
}


def fixture(name: str, **kwargs) -> CatalogEntry:
    """Catalog entry by name. ``slant_plane:0.3`` passes the angle inline."""
    base, _, arg = name.partition(":")
    if base not in FIXTURES:
        raise UnknownFixture(f"unknown catalog entry {name!r}; known: {', '.join(sorted(FIXTURES))}")
    if arg:
        if base != "slant_plane":
            raise UnknownFixture(f"catalog entry {base!r} takes no argument")
        try:
            kwargs["theta0"] = float(arg)
        except ValueError:
            raise UnknownFixture(f"bad slant angle {arg!r}") from None
    return FIXTURES[base](**kwargs)


def catalog_names() -> list[str]:
    return sorted(FIXTURES)


# --------------------------------------------------------------------------
# abstract warped product metrics (no immersion)


def _mat(rows) -> tuple[tuple, ...]:
    return tuple(tuple(parse_expression(e) for e in row) for row in rows)


def _spec(params, base, fibers, base_metric, fiber_metrics, warps, lower, upper) -> WarpedProductSpec:
    return WarpedProductSpec(
        params=tuple(params),
        base=tuple(base),
        fibers=tuple(tuple(f) for f in fibers),
        base_metric=_mat(base_metric),
        fiber_metrics=tuple(_mat(m) for m in fiber_metrics),
        warps=tuple(parse_expression(w) for w in warps),
        lower=tuple(lower),
        upper=tuple(upper),
    )


def metric_fixtures() -> dict[str, WarpedProductSpec]:
    """Warped product metrics with hand-checkable connections."""
    return {
        # curved base, two fibers, constant warps 1 and 2
        "product": _spec(
            "stxy", (0, 1), ((2,), (3,)), [["1 + s^2", "0"], ["0", "1"]], [[["1"]], [["1 + y^2"]]], ["1", "2"],
            (-1, -1, -1, -1), (1, 1, 1, 1),
        ),
        "exp_warped": _spec("tx", (0,), ((1,),), [["1"]], [[["1"]]], ["exp(t)"], (-1, -1), (1, 1)),
        "two_fiber": _spec(
            "txy", (0,), ((1,), (2,)), [["1"]], [[["1"]], [["1"]]], ["exp(t)", "sqrt(1 + t^2)"],
            (-1, -1, -1), (1, 1, 1),
        ),
        # flat R^3 in polar form: dr^2 + r^2 (da^2 + sin^2(a) db^2)
        "sphere_fiber": _spec(
            "rab", (0,), ((1, 2),), [["1"]], [[["1", "0"], ["0", "sin(a)^2"]]], ["r"], (0.5, 0.3, -3), (2, 2.8, 3),
        ),
        # the ds^2 of the r14 example, assembled abstractly
        "r14_metric": _spec(
            ("u", "v", "x", "z", "w"), (0, 1), ((2,), (3, 4)), [["3", "0"], ["0", "3"]],
            [[["1"]], [["1", "0"], ["0", "1"]]], ["sqrt(u^2 + v^2)", "sqrt(1 + u^2 + v^2)"],
            (0.5, 0.5, EDGE, EDGE, EDGE), (2.5, 2.5, HALF_PI - EDGE, HALF_PI - EDGE, HALF_PI - EDGE),
        ),
    }  # fmt: skip
