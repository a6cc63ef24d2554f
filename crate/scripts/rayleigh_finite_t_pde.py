"""Finite-t oracle for the law of R(t)/sqrt(t) started on the unit circle.

With h = ln r, E_r[f(R_t)] = E_r[f(W_t) ln|W_t|; t < tau] / ln r for planar
Brownian motion W killed on the unit circle. Letting r -> 1 turns this into
the normal derivative at the circle of the killed heat flow of f(rho) ln rho.
In y = ln rho that flow is v_t = exp(-2y) v_yy / 2 with v(0, t) = 0, so

    P(R(t) <= x sqrt(t)) = d/dy v(t, 0),   v(0, y) = y 1{e^y <= x sqrt(t)}.

The same solve with v(0, y) = y e^{2y} / t gives E R(t)^2 / t. Crank-Nicolson
after a few implicit Euler steps, with time steps doubling from dt0 and a far
boundary where the data are known exactly. Prints the CDF table on
x = 0.025, 0.05, ..., 5.5 in the layout of the Rust constant.
"""
import numpy as np, scipy.sparse as sp, scipy.sparse.linalg as spl

T = 1000.0


def steps(dt0, per, T):
    out = []; dt = dt0; s = 0.0
    while s < T:
        for _ in range(per):
            d = min(dt, T - s)
            if d <= 0: break
            out.append(d); s += d
        dt = min(dt * 2, 0.25)
    return out


def solve(G, N, Y, dt0, per, far):
    y = np.linspace(0, Y, N + 1); h = y[1] - y[0]; yi = y[1:-1]
    c = 0.5 * np.exp(-2 * yi) / h**2
    L = sp.diags([c[1:], -2 * c, c[:-1]], [-1, 0, 1], format='csc')
    I = sp.identity(len(yi), format='csc')
    W = G(yi); cache = {}; s = 0.0
    for k, dt in enumerate(steps(dt0, per, T)):
        th = 1.0 if k < 8 else 0.5
        if (dt, th) not in cache:
            cache[(dt, th)] = (spl.splu((I - th * dt * L).tocsc()), (I + (1 - th) * dt * L).tocsc())
        lu, B = cache[(dt, th)]
        rhs = B @ W
        rhs[-1] = rhs[-1] + dt * c[-1] * (th * far(s + dt) + (1 - th) * far(s))
        W = lu.solve(rhs); s += dt
    return (4 * W[0] - W[1]) / (2 * h)


def main(N=12000, dt0=2.5e-5, per=600):
    Y = np.log(40 * np.sqrt(T))
    xs = np.round(np.arange(1, 221) * 0.025, 3)
    cols = lambda yi: np.stack([np.where(np.exp(yi) <= x * np.sqrt(T), yi, 0.0) for x in xs] + [yi], axis=1)
    res = solve(cols, N, Y, dt0, per, lambda s: np.concatenate([np.zeros(len(xs)), [Y]]))
    F = res[:-1]
    m2 = solve(lambda yi: yi * np.exp(2 * yi) / T, N, Y, dt0, per,
               lambda s: (np.exp(2 * Y) * Y + 2 * s * Y + 2 * s) / T)
    print(f"# N={N} normalisation={res[-1]!r} E R^2/t={m2!r}")
    print(f"# KS vs Rayleigh = {np.max(np.abs(F - (1 - np.exp(-xs**2 / 2))))!r}")
    for i in range(0, len(F), 5):
        print("    " + " ".join(f"{v:.6e}," for v in F[i:i + 5]))


if __name__ == "__main__":
    main()
