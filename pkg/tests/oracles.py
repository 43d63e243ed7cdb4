"""Independent reference computations used by the tests.

Plain-Python arithmetic only, in pixel coordinates, with no shared code
paths with the package under test.
"""

import math


def kernel(r):
    return 0.0 if r == 0.0 else r * r * math.log(r * r)


def gauss_jordan(A, b):
    """Solve ``A x = b`` (``b`` a list of rows) with partial pivoting."""
    n = len(A)
    m = len(b[0])
    M = [list(map(float, A[i])) + list(map(float, b[i])) for i in range(n)]
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(M[r][col]))
        if abs(M[piv][col]) < 1e-14:
            raise ZeroDivisionError("singular")
        M[col], M[piv] = M[piv], M[col]
        pv = M[col][col]
        M[col] = [v / pv for v in M[col]]
        for r in range(n):
            if r != col and M[r][col] != 0.0:
                f = M[r][col]
                M[r] = [vr - f * vc for vr, vc in zip(M[r], M[col])]
    return [row[n : n + m] for row in M]


def tps_params(P, Q):
    """``(C, M, W)`` in pixel units from the bordered system ``[[K, P1], [P1^T, 0]]``."""
    n = len(P)
    A = [[0.0] * (n + 3) for _ in range(n + 3)]
    for i in range(n):
        for j in range(n):
            A[i][j] = kernel(math.dist(P[i], P[j]))
        A[i][n], A[i][n + 1], A[i][n + 2] = 1.0, P[i][0], P[i][1]
        A[n][i], A[n + 1][i], A[n + 2][i] = 1.0, P[i][0], P[i][1]
    b = [list(map(float, q)) for q in Q] + [[0.0, 0.0]] * 3
    x = gauss_jordan(A, b)
    W = x[:n]
    C = x[n]
    M = [[x[n + 1][0], x[n + 2][0]], [x[n + 1][1], x[n + 2][1]]]
    return C, M, W


def tps_eval(P, Q, p):
    C, M, W = tps_params(P, Q)
    out = [C[k] + M[k][0] * p[0] + M[k][1] * p[1] for k in range(2)]
    for pi, wi in zip(P, W):
        k = kernel(math.dist(p, pi))
        out[0] += wi[0] * k
        out[1] += wi[1] * k
    return out


def energy_double_sum(P, W):
    total = 0.0
    for i in range(len(P)):
        for j in range(len(P)):
            total += (W[i][0] * W[j][0] + W[i][1] * W[j][1]) * kernel(math.dist(P[i], P[j]))
    return total


def normalize_points(P, width, height):
    cx, cy = (width - 1) / 2.0, (height - 1) / 2.0
    s = 2.0 / max(width, height)
    return [((x - cx) * s, (y - cy) * s) for x, y in P]
