"""Independent high-precision reference values frozen into the C++ unit tests.

Bernoulli quantities come from brute-force enumeration of the joint law of
(W, supersample, membership) in mpmath; Gaussian ones from mpmath quadrature.
Run: python3 tests/oracle_values.py
"""
import itertools

import mpmath as mp

mp.mp.dps = 30


def h(p):
    p = mp.mpf(p)
    return -p * mp.log(p) - (1 - p) * mp.log(1 - p)


def kl(p, q):
    p, q = mp.mpf(p), mp.mpf(q)
    s = mp.mpf(0)
    if p > 0:
        s += p * mp.log(p / q)
    if p < 1:
        s += (1 - p) * mp.log((1 - p) / (1 - q))
    return s


def js(t, p, q):
    t = mp.mpf(t)
    mix = t * p + (1 - t) * q
    return t * kl(p, mix) + (1 - t) * kl(q, mix)


def mutual_info(joint, a, b, c=lambda x: 0):
    pabc, pac, pbc, pc = {}, {}, {}, {}
    for atom, w in joint:
        ka, kb, kc = a(atom), b(atom), c(atom)
        pabc[(ka, kb, kc)] = pabc.get((ka, kb, kc), 0) + w
        pac[(ka, kc)] = pac.get((ka, kc), 0) + w
        pbc[(kb, kc)] = pbc.get((kb, kc), 0) + w
        pc[kc] = pc.get(kc, 0) + w
    return sum(w * mp.log(w * pc[kc] / (pac[(ka, kc)] * pbc[(kb, kc)])) for (ka, kb, kc), w in pabc.items() if w > 0)


def joint(n, m, k, p):
    """Atoms (z tuple, per-block training subsets, x = training sum) for average-ERM."""
    p = mp.mpf(p)
    b, t = (n + m) // k, n // k
    subsets = list(itertools.combinations(range(b), t))
    out = []
    for z in itertools.product((0, 1), repeat=n + m):
        like = mp.mpf(1)
        for v in z:
            like *= p if v else 1 - p
        for us in itertools.product(subsets, repeat=k):
            x = sum(z[b * i + j] for i in range(k) for j in us[i])
            out.append(((z, us, x), like / len(subsets) ** k))
    return out, b


def scmi(n, m, p, z0=None):
    J, b = joint(n, m, 1, p)
    W = lambda a: a[2]
    U = lambda a: a[1]
    if z0 is None:
        return mutual_info(J, W, U, lambda a: a[0][0])
    sub = [(a, w) for a, w in J if a[0][0] == z0]
    tot = sum(w for _, w in sub)
    return mutual_info([(a, w / tot) for a, w in sub], W, U)


def main():
    print("H(0.4)", mp.nstr(h(0.4), 20))
    print("KL(0.25,0.5)", mp.nstr(kl(0.25, 0.5), 20))
    print("KL(0,0.5)", mp.nstr(kl(0, 0.5), 20))
    print("KL(1e-12,2e-12)", mp.nstr(kl(mp.mpf("1e-12"), mp.mpf("2e-12")), 20))
    print("JS(0.3;0.2,0.6)", mp.nstr(js(0.3, mp.mpf("0.2"), mp.mpf("0.6")), 20))
    print("JS(0.5;0.1,0.9)", mp.nstr(js(0.5, mp.mpf("0.1"), mp.mpf("0.9")), 20))

    J, _ = joint(2, 1, 1, "0.3")
    print("LOO_CMI n=2 p=0.3", mp.nstr(mutual_info(J, lambda a: a[2], lambda a: a[1], lambda a: a[0]), 20))
    J, _ = joint(3, 3, 3, "0.5")
    print("ICIMI n=3 p=0.5", mp.nstr(mutual_info(J, lambda a: a[2], lambda a: a[1][0], lambda a: a[0][0:2]), 20))
    J, _ = joint(2, 1, 1, "0.5")
    print("MI_FULL n=2 p=0.5", mp.nstr(mutual_info(J, lambda a: a[2], lambda a: tuple(a[0][j] for j in a[1][0])), 20))
    J, _ = joint(3, 1, 1, "0.4")
    print("IMI n=3 p=0.4", mp.nstr(mutual_info(J, lambda a: a[2], lambda a: a[0][a[1][0][0]]), 20))
    J, _ = joint(2, 4, 2, "0.3")
    print("MN_IPCIMI n=2 m=4 p=0.3", mp.nstr(mutual_info(J, lambda a: a[2], lambda a: a[1][0], lambda a: a[0][0:3]), 20))
    J, _ = joint(4, 2, 2, "0.3")
    print("LOFO_CMI n=4 m=2 p=0.3", mp.nstr(mutual_info(J, lambda a: a[2], lambda a: a[1][0], lambda a: a[0][0:3]), 20))
    J, _ = joint(3, 2, 1, "0.6")
    print("LMO_CMI n=3 m=2 p=0.6", mp.nstr(mutual_info(J, lambda a: a[2], lambda a: a[1], lambda a: a[0]), 20))
    print("LMO_SCMI n=2 m=2 p=0.4", mp.nstr(scmi(2, 2, "0.4"), 20))
    print("LMO_SCMI|z=1 n=2 m=3 p=0.4", mp.nstr(scmi(2, 3, "0.4", 1), 20))
    print("LMO_SCMI|z=0 n=2 m=3 p=0.4", mp.nstr(scmi(2, 3, "0.4", 0), 20))
    print("SICIMI n=2 p=0.4", mp.nstr(scmi(2, 2, "0.4"), 20))

    # Gaussian: closed-form IMI bound and a two-component mixture MI.
    print("IMI_GAUSS n=2", mp.nstr(mp.sqrt(mp.mpf(9) / 2 * mp.log(2)), 20))
    mix = lambda x: (mp.npdf(x, 0, 1) + mp.npdf(x, 1, 1)) / 2
    f = lambda x: 0.5 * (mp.npdf(x, 0, 1) * mp.log(mp.npdf(x, 0, 1) / mix(x)) + mp.npdf(x, 1, 1) * mp.log(mp.npdf(x, 1, 1) / mix(x)))
    print("mixture MI means(0,1) var 1", mp.nstr(mp.quad(f, [-mp.inf, 0, 1, mp.inf]), 20))

    # Sign rule with truncated loss: I(W; Z_1) at n=10, mu=1, sigma=0.5.
    n, mu, sg = 10, mp.mpf(1), mp.mpf("0.5")
    qbar = mp.ncdf(-mp.sqrt(n) * mu / sg)
    q = lambda z: mp.ncdf(-(z + (n - 1) * mu) / (sg * mp.sqrt(n - 1)))
    g = lambda z: mp.npdf(z, mu, sg) * kl(q(z), qbar)
    print("finite-W IMI info n=10", mp.nstr(mp.quad(g, [mu - 12 * sg, -2, 0, 1, mu + 12 * sg]), 20))


if __name__ == "__main__":
    main()
