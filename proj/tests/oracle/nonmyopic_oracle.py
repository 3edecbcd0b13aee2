"""Oracles for non-myopic demands.

1. q=2 equilibrium from the three closed-form clearing conditions, solved with
   mpmath.findroot at 40 digits (independent of the general recursion).
2. Brute-force dynamic program for an agent facing a fixed affine price rule:
   Gauss-Hermite quadrature over next-period dividends and golden-section
   search over the position at each age. No adjusted-Gaussian algebra is used.
"""
import numpy as np
from mpmath import mp, mpf, findroot

mp.dps = 40


def weights(lam, age):
    raw = np.array([(age + 1 - k) ** lam for k in range(age + 1)], dtype=float)
    return raw / raw.sum()


def q2_conditions(R, lam):
    R = mpf(R)
    om = mpf(2) ** lam / (1 + mpf(2) ** lam)

    def parts(b0, b1):
        e = 1 + b0
        l01 = e * om + b1 - R * b0
        l11 = e * (1 - om) - R * b1
        ratio = (l01**2 + e**2) / e**2  # sigma^2 / s^2
        return e, l01, l11, ratio

    def f(b0, b1):
        e, l01, l11, ratio = parts(b0, b1)
        c2 = l01 + ratio * (b1 - R * b0) / R + e * (1 - l11 * l01 / e**2) / R
        c3 = l11 - ratio * b1
        return [c2, c3]

    # Myopic start.
    w0 = (1 + om) / 2
    den = 1 - w0 / R - (1 - w0) / R**2
    start = [(w0 / R + (1 - w0) / R**2) / den - 0, ((1 - w0) / R) / den]
    b0, b1 = findroot(f, start)
    return b0, b1, parts(b0, b1)


def q2_solution(R, gamma, sigma, lam):
    b0, b1, (e, l01, l11, ratio) = q2_conditions(R, lam)
    R = mpf(R)
    G = gamma * e**2 * mpf(sigma) ** 2
    alpha = 2 * R * G / ((1 - R) * (R + ratio - l01 / e))
    s2 = mpf(sigma) ** 2 / ratio
    return alpha, b0, b1, s2, l01, l11


GH_X, GH_W = np.polynomial.hermite_e.hermegauss(160)
GH_W = GH_W / GH_W.sum()


def golden(f, lo, hi, iters=200):
    g = (np.sqrt(5) - 1) / 2
    a, b = lo, hi
    c, d = b - g * (b - a), a + g * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - g * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + g * (b - a)
            fd = f(d)
    return (a + b) / 2


def brute_force_demand(q, R, gamma, sigma, lam, alpha, betas, hist, age):
    """Position of an agent of `age` facing p_t = alpha + sum betas[k] d_{t-k}.
    hist[0] = d_t, hist[1] = d_{t-1}, ... (the agent's lifetime and the price
    lags must be covered). Returns (x, log of minimized expected exp-loss)."""
    L = len(betas)

    def payoff_const(h):
        return alpha * (1 - R) + sum((betas[k + 1] if k + 1 < L else 0.0) * h[k] - R * betas[k] * h[k] for k in range(L))

    def solve(h, a):
        # Returns (x*, log E[exp(-loss)]) for the agent of age a at history h.
        w = weights(lam, a)
        mu = float(np.dot(w, h[: a + 1]))
        zs = mu + sigma * GH_X
        c = payoff_const(h)
        s = c + (1 + betas[0]) * zs
        D = gamma * R ** (q - 1 - a)
        if a == q - 1:
            cont = np.zeros_like(zs)
        else:
            cont = np.array([solve(np.concatenate(([z], h[:-1])), a + 1)[1] for z in zs])

        def obj(x):
            v = cont - D * x * s
            mx = v.max()
            return mx + np.log(np.dot(GH_W, np.exp(v - mx)))

        # Bracket around the static demand.
        x0 = (c + (1 + betas[0]) * mu) / (D * (1 + betas[0]) ** 2 * sigma**2)
        span = 5.0 * (abs(x0) + 1.0)
        x = golden(obj, x0 - span, x0 + span)
        return x, obj(x)

    return solve(np.array(hist, dtype=float), age)[0]


if __name__ == "__main__":
    for R in ["1.05", "1.1", "1.5"]:
        for lam in [0.5, 1, 3]:
            a, b0, b1, s2, l01, l11 = q2_solution(R, 1, 1, lam)
            print(f"R={R} lam={lam}: alpha={mp.nstr(a, 17)} b0={mp.nstr(b0, 17)} b1={mp.nstr(b1, 17)} "
                  f"s2={mp.nstr(s2, 17)} l01={mp.nstr(l01, 17)} l11={mp.nstr(l11, 17)}")
    a, b0, b1, s2, l01, l11 = q2_solution("1.1", 2, "0.5", 1)
    print("gamma=2 sigma=0.5 R=1.1 lam=1:", mp.nstr(a, 17), mp.nstr(b0, 17), mp.nstr(b1, 17))
    # Brute force for an arbitrary q=3 price rule.
    betas = [4.0, 1.5, 0.3]
    hist = [0.7, -0.2, 1.1]
    for age in [0, 1, 2]:
        x = brute_force_demand(3, 1.1, 0.5, 0.5, 1.0, -30.0, betas, hist, age)
        print("q3 brute age", age, repr(x))
    betas = [6.0, 2.0]
    for age in [0, 1]:
        x = brute_force_demand(2, 1.1, 1.0, 1.0, 1.0, -50.0, betas, [0.4, 1.3], age)
        print("q2 brute age", age, repr(x))
