"""Independent oracles for the golden fixtures in this directory.

gmean_2x2.mat       A # B for A = [[2,1],[1,2]], B = diag(3,1), evaluated in
                    50-digit arithmetic from analytic 2x2 eigendecompositions.
hh_mr_inv_2x2.json  link slacks of the chain
                    f(A#B) <= int f(A #_t B) dt <= int f(A) #_t f(B) dt
                    for f(x) = 1/x on the same pair, by dense eigh and a
                    10^4-interval trapezoid rule.

Run from this directory: python3 oracle.py
"""

import json

import mpmath as mp
import numpy as np

mp.mp.dps = 50


def eig2(a, b, c):
    """Eigenpairs of [[a, b], [b, c]] in closed form, ascending."""
    mid = (a + c) / 2
    rad = mp.sqrt(((a - c) / 2) ** 2 + b**2)
    out = []
    for lam in (mid - rad, mid + rad):
        if b != 0:
            v = mp.matrix([b, lam - a])
        elif abs(lam - a) <= abs(lam - c):
            v = mp.matrix([1, 0])
        else:
            v = mp.matrix([0, 1])
        out.append((lam, v / mp.norm(v)))
    return out


def fn2(m, g):
    pairs = eig2(m[0, 0], m[0, 1], m[1, 1])
    r = mp.zeros(2, 2)
    for lam, v in pairs:
        r += g(lam) * (v * v.T)
    return r


def gmean_golden():
    a = mp.matrix([[2, 1], [1, 2]])
    b = mp.matrix([[3, 0], [0, 1]])
    s = fn2(a, mp.sqrt)
    si = fn2(a, lambda x: 1 / mp.sqrt(x))
    m = si * b * si
    m = (m + m.T) / 2
    g = s * fn2(m, mp.sqrt) * s
    return (g + g.T) / 2


def write_matrix(path, m):
    with open(path, "w") as fh:
        fh.write("2\n")
        for i in range(2):
            fh.write(" ".join(mp.nstr(m[i, j], 17, min_fixed=0, max_fixed=0) for j in range(2)) + "\n")


def np_fn(m, g):
    w, v = np.linalg.eigh(m)
    return (v * g(w)) @ v.T


def np_gmean(a, b, t):
    s = np_fn(a, np.sqrt)
    si = np_fn(a, lambda x: 1 / np.sqrt(x))
    m = si @ b @ si
    m = (m + m.T) / 2
    return s @ np_fn(m, lambda x: x**t) @ s


def trapezoid(g, n):
    ts = np.linspace(0.0, 1.0, n + 1)
    vals = [g(t) for t in ts]
    acc = (vals[0] + vals[-1]) / 2
    for v in vals[1:-1]:
        acc = acc + v
    return acc / n


def hh_mr_golden(n=10_000):
    a = np.array([[2.0, 1.0], [1.0, 2.0]])
    b = np.diag([3.0, 1.0])
    inv = np.linalg.inv
    t0 = inv(np_gmean(a, b, 0.5))
    t1 = trapezoid(lambda t: inv(np_gmean(a, b, t)), n)
    t2 = trapezoid(lambda t: np_gmean(inv(a), inv(b), t), n)
    lmin = lambda m: float(np.linalg.eigvalsh((m + m.T) / 2)[0])
    return {
        "a": a.tolist(),
        "b": b.tolist(),
        "f": "inv",
        "intervals": n,
        "slacks": [lmin(t1 - t0), lmin(t2 - t1)],
        "terms": [t0.tolist(), t1.tolist(), t2.tolist()],
    }


if __name__ == "__main__":
    write_matrix("gmean_2x2.mat", gmean_golden())
    with open("hh_mr_inv_2x2.json", "w") as fh:
        json.dump(hh_mr_golden(), fh, indent=2)
        fh.write("\n")
