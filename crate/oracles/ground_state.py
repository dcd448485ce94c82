"""Independent ground-state oracle for d=3, alpha=2.

Solves the coupled radial system in log-radius t = ln r with scipy's
collocation BVP solver:

    -(v'' + v'/r) + v = phi * r^{-(p-2)/2} * v^{p-1}
    -(phi'' + 2 phi'/r) = r^{-p/2} v^p

where v = r^{1/2} u and phi = I_2 * |u|^p. Prints mass, Hardy norm,
Choquard integral and the Weinstein value of the solution.
"""
import sys

import numpy as np
from scipy.integrate import quad, solve_bvp


def solve(p, t_lo=np.log(1e-9), t_hi=np.log(32.0), amp=1.5, sigma2=1.0):
    def rhs(t, y):
        v, vt, ph, pt = y
        e2 = np.exp(2 * t)
        vp = np.abs(v)
        return np.vstack([
            vt,
            e2 * (v - ph * np.exp(-t * (p - 2) / 2) * vp ** (p - 2) * v),
            pt,
            -pt - np.exp((2 - p / 2) * t) * vp ** p,
        ])

    def bc(ya, yb):
        r = np.exp(t_hi)
        return np.array([ya[1], ya[3], yb[1] + (r + 0.5) * yb[0], yb[3] + yb[2]])

    t = np.linspace(t_lo, t_hi, 4000)
    r = np.exp(t)
    v = amp * np.exp(-r ** 2 / sigma2)
    ph = np.minimum(1.0, 1.0 / r)
    y0 = np.vstack([v, np.gradient(v, t), ph, np.gradient(ph, t)])
    sol = solve_bvp(rhs, bc, t, y0, tol=1e-10, max_nodes=2_000_000)
    if sol.status != 0:
        raise RuntimeError(sol.message)
    return sol


def norms(sol, p):
    t_lo, t_hi = sol.x[0], sol.x[-1]
    pts = list(np.linspace(t_lo, t_hi, 200))
    f = lambda g: quad(g, t_lo, t_hi, points=pts, limit=2000, epsabs=0, epsrel=1e-13)[0]
    four_pi = 4 * np.pi
    m2 = four_pi * f(lambda t: sol.sol(t)[0] ** 2 * np.exp(2 * t))
    h2 = four_pi * f(lambda t: sol.sol(t)[1] ** 2)
    n = four_pi * f(lambda t: sol.sol(t)[2] * abs(sol.sol(t)[0]) ** p * np.exp((3 - p / 2) * t))
    return m2, h2, n


def main():
    p = float(eval(sys.argv[1])) if len(sys.argv) > 1 else 3.0
    d, alpha = 3, 2
    theta = (d * p - d - alpha) / (2 * p)
    sigma2 = 2 * (1 - theta) / theta
    sol = solve(p, sigma2=sigma2)
    m2, h2, n = norms(sol, p)
    w = h2 ** (theta / 2) * m2 ** ((1 - theta) / 2) / n ** (1 / (2 * p))
    chain = theta ** (theta / 2) * (1 - theta) ** (1 / (2 * p) - theta / 2) * m2 ** ((p - 1) / (2 * p))
    print(f"p={p} nodes={sol.x.size} v0={sol.sol(sol.x[0])[0]:.12f}")
    print(f"M_gs={np.sqrt(m2):.12f} H_gs={np.sqrt(h2):.12f} N_gs={n:.12f}")
    print(f"H2/M2={h2 / m2:.12f} N/M2={n / m2:.12f}")
    print(f"W(Q)={w:.12f} chain={chain:.12f}")


if __name__ == "__main__":
    main()
