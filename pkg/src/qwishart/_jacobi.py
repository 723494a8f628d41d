"""Cyclic Jacobi eigendecomposition for small dense symmetric matrices."""

from __future__ import annotations

import math
from typing import Sequence


def jacobi_eigh(
    matrix: Sequence[Sequence[float]],
    *,
    tol_factor: float = 1e-14,
    max_sweeps: int = 50,
) -> tuple[list[float], list[list[float]]]:
    """Eigenvalues and eigenvectors (as columns) of a symmetric matrix.

    Sweeps all off-diagonal entries cyclically until their Frobenius norm
    drops below ``tol_factor`` times the matrix norm; raises if ``max_sweeps``
    does not suffice.
    """
    a = [[float(x) for x in row] for row in matrix]
    n = len(a)
    if any(len(row) != n for row in a):
        raise ValueError("matrix must be square")
    v = [[1.0 if i == j else 0.0 for j in range(n)] for i in range(n)]
    fro = math.sqrt(sum(x * x for row in a for x in row))

    def off_norm() -> float:
        return math.sqrt(
            sum(a[i][j] ** 2 for i in range(n) for j in range(n) if i != j)
        )

    for _ in range(max_sweeps):
        if off_norm() <= tol_factor * fro:
            return [a[i][i] for i in range(n)], v
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p][q]
                if apq == 0.0:
                    continue
                theta = (a[q][q] - a[p][p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (
                    abs(theta) + math.sqrt(theta * theta + 1.0)
                )
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                app, aqq = a[p][p], a[q][q]
                a[p][p] = app - t * apq
                a[q][q] = aqq + t * apq
                a[p][q] = a[q][p] = 0.0
                for k in range(n):
                    if k in (p, q):
                        continue
                    akp, akq = a[k][p], a[k][q]
                    a[k][p] = a[p][k] = c * akp - s * akq
                    a[k][q] = a[q][k] = s * akp + c * akq
                for k in range(n):
                    vkp, vkq = v[k][p], v[k][q]
                    v[k][p] = c * vkp - s * vkq
                    v[k][q] = s * vkp + c * vkq
    if off_norm() <= tol_factor * fro:
        return [a[i][i] for i in range(n)], v
    raise RuntimeError("Jacobi iteration did not converge")


def jacobi_eigenvalues(matrix: Sequence[Sequence[float]]) -> list[float]:
    eigs, _ = jacobi_eigh(matrix)
    return sorted(eigs)
