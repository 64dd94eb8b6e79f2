"""Chart transformations used by the invariance tests."""

from dataclasses import replace

import numpy as np

from biwarp.expr import BinOp, Num


def random_unitary_real(rng, m: int) -> np.ndarray:
    """A random element of U(m) acting on R^{2m} with consecutive pairing (commutes with J)."""
    z = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    q, r = np.linalg.qr(z)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    out = np.zeros((2 * m, 2 * m))
    out[0::2, 0::2] = q.real
    out[0::2, 1::2] = -q.imag
    out[1::2, 0::2] = q.imag
    out[1::2, 1::2] = q.real
    return out


def linear_image(chart, matrix: np.ndarray):
    """The chart composed with a constant linear map of the ambient space."""
    comps = []
    for row in matrix:
        acc = None
        for coeff, comp in zip(row, chart.components):
            if coeff == 0.0:
                continue
            term = BinOp("*", Num(float(coeff)), comp)
            acc = term if acc is None else BinOp("+", acc, term)
        comps.append(acc if acc is not None else Num(0.0))
    return replace(chart, name=f"U*{chart.name}", components=tuple(comps))
