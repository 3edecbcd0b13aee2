"""Definitional trade volume computed from explicit demands in 50-digit
arithmetic, for a fixed path. Frozen into test_trade_volume.cpp."""
from mpmath import mp, mpf, sqrt

from equilibrium_oracle import prices, weights

mp.dps = 50


def tv(q, R, gamma, sigma, lam, d, t, convention):
    alpha, betas = prices(q, R, gamma, sigma, lam)
    R = mpf(R)
    b = lambda k: betas[k] if 0 <= k < q else mpf(0)
    G = gamma * (1 + b(0)) ** 2 * sigma**2

    def x(n, s):
        if n > s or n < s - q + 1:
            return mpf(0)
        w = weights(lam, s - n)
        theta = sum(w[k] * d[s - k] for k in range(s - n + 1))
        es = alpha * (1 - R) + (1 + b(0)) * theta + sum((b(k + 1) - R * b(k)) * d[s - k] for k in range(q))
        return es / G

    if convention == "entry_exit":
        ch = [x(n, t) - x(n, t - 1) for n in range(t - q, t + 1)]
    elif convention == "replacement":
        ch = [x(n, t) - x(n, t - 1) for n in range(t - q + 1, t)] + [x(t, t) - x(t - q, t - 1)]
    else:
        ch = [x(n, t) - x(n, t - 1) for n in range(t - q + 1, t)]
    return sqrt(sum(c * c for c in ch) / q)


if __name__ == "__main__":
    d = [mpf(v) for v in ["1.0", "0.4", "2.3", "1.7", "-0.6", "3.1", "2.2", "0.9"]]
    for conv in ["entry_exit", "replacement", "interior"]:
        print(conv, mp.nstr(tv(3, "1.1", 1, 1, 1, d, 7, conv), 17))
    print("gamma=2 sigma=0.5 q=4 lam=2 entry_exit", mp.nstr(tv(4, "1.05", 2, mpf("0.5"), 2, d, 7, "entry_exit"), 17))
