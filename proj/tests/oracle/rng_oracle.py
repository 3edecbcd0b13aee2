"""Reference values for the counter-based generator and the inverse normal CDF.

Philox4x32-10 is implemented here from its published round function; the
known-answer vectors from the Random123 distribution are checked first.
Quantiles come from mpmath at 60 digits.
"""
from mpmath import mp, mpf, sqrt, erfinv

mp.dps = 60
M0, M1 = 0xD2511F53, 0xCD9E8D57
W0, W1 = 0x9E3779B9, 0xBB67AE85
MASK = 0xFFFFFFFF


def philox(ctr, key):
    c = list(ctr)
    k = list(key)
    for r in range(10):
        p0 = M0 * c[0]
        p1 = M1 * c[2]
        c = [(p1 >> 32) ^ c[1] ^ k[0], p1 & MASK, (p0 >> 32) ^ c[3] ^ k[1], p0 & MASK]
        k = [(k[0] + W0) & MASK, (k[1] + W1) & MASK]
    return c


def stream(seed, index, n):
    """Uniforms for (seed, index): key = seed words, counter = (block, index)."""
    key = [seed & MASK, seed >> 32]
    out = []
    block = 0
    while len(out) < n:
        w = philox([block & MASK, block >> 32, index & MASK, index >> 32], key)
        for lo, hi in ((w[0], w[1]), (w[2], w[3])):
            bits = (hi << 32) | lo
            out.append((mpf(bits >> 11) + mpf("0.5")) * mpf(2) ** -53)
        block += 1
    return out[:n]


def quantile(u):
    # 2u - 1 must resolve u = 1e-300 next to -1.
    with mp.workdps(700):
        return sqrt(2) * erfinv(2 * mpf(u) - 1)



def main():
    kat = [
        ([0, 0, 0, 0], [0, 0], [0x6627E8D5, 0xE169C58D, 0xBC57AC4C, 0x9B00DBD8]),
        ([MASK] * 4, [MASK] * 2, [0x408F276D, 0x41C83B0E, 0xA20BC7C6, 0x6D5451FD]),
        ([0x243F6A88, 0x85A308D3, 0x13198A2E, 0x03707344], [0xA4093822, 0x299F31D0],
         [0xD16CFE09, 0x94FDCCEB, 0x5001E420, 0x24126EA1]),
    ]
    for ctr, key, want in kat:
        assert philox(ctr, key) == want, (ctr, key)
    print("philox KAT ok")


    us = stream(42, 3, 6)
    print("uniforms", [repr(float(u)) for u in us])
    print("normals", [repr(float(quantile(u))) for u in us])
    for u in ["1e-300", "1e-20", "1e-10", "0.001", "0.02425", "0.075", "0.3", "0.5", "0.9", "0.97575", "0.999",
              "0.999999999999"]:
        print(u, repr(float(quantile(mpf(float(u))))))  # the double nearest u


if __name__ == "__main__":
    main()
