"""Freeze symbolic reference values into tests/data/oracles.json.

Everything here is computed with sympy from the component formulas alone
(no biwarp imports), so the test suite compares the engine against an
independent route. Rerun after changing the fixture corpus:

    python3 scripts/make_oracles.py
"""

import json
from pathlib import Path

import sympy as sp

OUT = Path(__file__).resolve().parent.parent / "tests" / "data" / "oracles.json"
DIGITS = 30

u, v, x, z, w = sp.symbols("u v x z w", positive=True)
R14_PARAMS = (u, v, x, z, w)
R14 = [
    u * sp.cos(z), v * sp.cos(z), u * sp.cos(w), v * sp.cos(w),
    u * sp.sin(z), v * sp.sin(z), u * sp.sin(w), v * sp.sin(w),
    z, w,
    u * sp.cos(x), v * sp.cos(x), u * sp.sin(x), v * sp.sin(x),
]  # fmt: skip

JET_CORPUS = [
    ("u*cos(z)", ("u", "z"), [(1.0, 1.0471975511965976), (0.3, -2.0)]),
    ("sqrt(1+u^2+v^2)", ("u", "v"), [(1.0, 1.0), (0.5, 2.0)]),
    ("exp(-u*v)/(1+u^2)", ("u", "v"), [(0.7, 0.2), (-1.0, 1.5)]),
    ("log(1+u^2)*sin(v)^2", ("u", "v"), [(2.0, 0.5)]),
    ("tan(u)*v - u^3", ("u", "v"), [(0.4, 3.0)]),
    ("u^2.5 + v^-2", ("u", "v"), [(1.3, 0.8)]),
    ("-u^2", ("u",), [(1.5,)]),
    ("2^3^2 + u", ("u",), [(0.0,)]),
    ("sin(x)*cos(y)*exp(z)", ("x", "y", "z"), [(0.1, 0.2, 0.3)]),
    ("(u - v)/(u + v)", ("u", "v"), [(2.0, 1.0)]),
]

R14_POINTS = [
    (1.0, 1.0, 0.3, 0.4, 0.5),
    (2.0, 1.0, 0.7853981633974483, 0.7853981633974483, 0.7853981633974483),
    (0.5, 2.5, 1.2, 0.05, 1.5),
    (1.7, 0.6, 0.9, 1.1, 0.2),
]


def _f(e) -> float:
    return float(sp.N(e, DIGITS))


def jets():
    out = []
    for text, names, points in JET_CORPUS:
        syms = sp.symbols(names)
        expr = sp.sympify(text.replace("^", "**"), locals=dict(zip(names, syms)))
        grad = [sp.diff(expr, s) for s in syms]
        hess = [[sp.diff(expr, a, b) for b in syms] for a in syms]
        for p in points:
            sub = dict(zip(syms, p))
            out.append(
                {
                    "expr": text,
                    "params": list(names),
                    "point": list(p),
                    "value": _f(expr.subs(sub)),
                    "grad": [_f(g.subs(sub)) for g in grad],
                    "hess": [[_f(h.subs(sub)) for h in row] for row in hess],
                }
            )
    return out


def J_matrix(n):
    j = sp.zeros(n, n)
    for i in range(0, n, 2):
        j[i + 1, i] = 1
        j[i, i + 1] = -1
    return j


def r14():
    phi = sp.Matrix(R14)
    jac = phi.jacobian(R14_PARAMS)
    g = sp.simplify(jac.T * jac)
    ginv = sp.simplify(g.inv())
    d = 5
    christ = [[[sp.simplify(sum(ginv[k, l] * (sp.diff(g[j, l], R14_PARAMS[i]) + sp.diff(g[i, l], R14_PARAMS[j])
                                               - sp.diff(g[i, j], R14_PARAMS[l])) for l in range(d)) / 2)
                for j in range(d)] for i in range(d)] for k in range(d)]  # fmt: skip
    second = [[sp.diff(phi, a, b) for b in R14_PARAMS] for a in R14_PARAMS]
    h = [[second[i][j] - sum((christ[k][i][j] * jac[:, k] for k in range(d)), sp.zeros(14, 1)) for j in range(d)]
         for i in range(d)]  # fmt: skip
    jz, jw = jac[:, 3], jac[:, 4]
    J = J_matrix(14)
    cos_theta = sp.simplify(sp.Abs((J * jz).dot(jw)) / sp.sqrt(jz.dot(jz) * jw.dot(jw)))
    f = sp.sqrt(g[2, 2])
    sigma = sp.sqrt(g[3, 3])
    g0inv = g[:2, :2].inv()

    def grad_sq(func):
        dl = sp.Matrix([sp.diff(sp.log(func), s) for s in (u, v)])
        return sp.simplify((dl.T * g0inv * dl)[0, 0])

    gf, gs = grad_sq(f), grad_sq(sigma)
    n, m = 1, 2
    rhs = sp.simplify(2 * (n * gf + m * (1 + cos_theta**2) / (1 - cos_theta**2) * gs))
    out = {
        "cos_theta": str(cos_theta),
        "grad_log_f_sq": str(gf),
        "grad_log_sigma_sq": str(gs),
        "rhs": str(rhs),
        "rhs_at_1_1": str(sp.nsimplify(rhs.subs({u: 1, v: 1}))),
        "points": [],
    }
    for p in R14_POINTS:
        sub = dict(zip(R14_PARAMS, p))
        gn = g.subs(sub).evalf(DIGITS)
        gi = gn.inv()
        hn = [[h[i][j].subs(sub).evalf(DIGITS) for j in range(d)] for i in range(d)]
        norm2 = sum(gi[i, a] * gi[j, b] * hn[i][j].dot(hn[a][b]) for i in range(d) for j in range(d)
                    for a in range(d) for b in range(d))  # fmt: skip
        hvec = sum((gi[i, j] * hn[i][j] for i in range(d) for j in range(d)), sp.zeros(14, 1)) / d
        out["points"].append(
            {
                "point": list(p),
                "metric": [[_f(gn[i, j]) for j in range(d)] for i in range(d)],
                "christoffel": [[[_f(christ[k][i][j].subs(sub)) for j in range(d)] for i in range(d)]
                                for k in range(d)],  # fmt: skip
                "sff_norm2": _f(norm2),
                "mean_curvature_norm": _f(sp.sqrt(hvec.dot(hvec))),
                "cos_theta": _f(cos_theta.subs(sub)),
                "f": _f(f.subs(sub)),
                "sigma": _f(sigma.subs(sub)),
                "rhs": _f(rhs.subs(sub)),
            }
        )
    return out


def main():
    data = {"jets": jets(), "r14": r14()}
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps(data, indent=1) + "\n")
    print(f"wrote {OUT}")
    print("cos theta =", data["r14"]["cos_theta"], "; rhs(1, 1) =", data["r14"]["rhs_at_1_1"])


if __name__ == "__main__":
    main()
