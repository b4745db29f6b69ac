"""Independent high-precision reference values frozen into the C++ tests.

Uses mpmath / sympy / fractions only; nothing here shares code with the
library. Run: python3 tests/oracles/generate.py
"""
from fractions import Fraction
from math import comb, factorial

import mpmath as mp
import sympy as sp

mp.mp.dps = 50


def hyp_exact(n, lam, c, z):
    z = Fraction(z)
    total = Fraction(0)
    for m in range(min(n, lam) + 1):
        poch = Fraction(1)
        for r in range(m):
            poch *= Fraction((-n + r) * (-lam + r), (c + r) * (r + 1))
        total += poch * z**m
    return total


def g_direct(kappa, lam, eta, pdc, terms=10**6):
    eta, pdc = mp.mpf(eta), mp.mpf(pdc)
    b = eta * pdc / (eta * pdc + 1 - eta)
    z = (eta - 1) / eta
    m = kappa - lam
    total = mp.mpf(0)
    for n in range(terms):
        f = mp.hyp2f1(-n, -lam, m + 1, z)
        t = comb(kappa, lam) * mp.binomial(m + n, m) * b**n * f**2
        total += t
        if n > 50 and t < mp.mpf(10) ** -45:
            break
    return total


def thermal_x(eta, pdc):
    eta, pdc = mp.mpf(eta), mp.mpf(pdc)
    return mp.findroot(lambda x: (1 - eta) * x / (1 - eta * x) - pdc, pdc)


def bs(m, n, mo, no, t):
    """<mo,no|B|m,n>, c -> sqrt(t) c - sqrt(1-t) e, e -> sqrt(1-t) c + sqrt(t) e."""
    if m + n != mo + no:
        return mp.mpf(0)
    st, sr = mp.sqrt(t), mp.sqrt(1 - t)
    s = mp.mpf(0)
    for a in range(m + 1):
        b = mo - a
        if 0 <= b <= n:
            s += comb(m, a) * st**a * (-sr) ** (m - a) * comb(n, b) * sr**b * st ** (n - b)
    return s * mp.sqrt(mp.factorial(mo) * mp.factorial(no) / (mp.factorial(m) * mp.factorial(n)))


def detector(q, i, eta, pdc):
    x = thermal_x(eta, pdc)
    s = mp.mpf(0)
    for n in range(400):
        e = i + n - q
        if e < 0:
            continue
        s += (1 - x) * x**n * bs(i, n, q, e, mp.mpf(eta)) ** 2
    return s


def f_count_bayes(q, i, chi, eta, pdc, imax=60):
    t = mp.tanh(chi) ** 2
    num = lambda k: (1 - t) * t**k * detector(q, k, eta, pdc)
    return num(i) / mp.fsum(num(k) for k in range(imax))


def f_threshold_bayes(click, i, chi, eta, pdc, imax=80):
    t = mp.tanh(chi) ** 2

    def lik(k):
        nc = detector(0, k, eta, pdc)
        return 1 - nc if click else nc

    num = lambda k: (1 - t) * t**k * lik(k)
    return num(i) / mp.fsum(num(k) for k in range(imax))


def phi_table(i, j, k, l):
    """Expand the creation-operator polynomial symbolically."""
    aH, aV, dV, dH = sp.symbols("aH aV dV dH", commutative=True)
    cH = (dH - aH) / sp.sqrt(2)
    cV = (dV - aV) / sp.sqrt(2)
    bV = (aV + dV) / sp.sqrt(2)
    bH = (aH + dH) / sp.sqrt(2)
    poly = sp.expand(cH**i * cV**j * bV**k * bH**l / sp.sqrt(factorial(i) * factorial(j) * factorial(k) * factorial(l)))
    out = {}
    for mono, coeff in sp.Poly(poly, aH, aV, dV, dH).terms():
        occ = mono
        amp = coeff * sp.sqrt(sp.prod([factorial(x) for x in occ]))
        out[occ] = sp.nsimplify(sp.simplify(amp))
    return out


def rot_expm(n, theta):
    J = mp.zeros(n + 1, n + 1)
    for k in range(1, n + 1):
        J[k - 1, k] = J[k, k - 1] = mp.sqrt(k * (n - k + 1)) / 2
    return mp.expm(1j * theta * J)


def label_rotation(frm, to, alpha, delta):
    table = phi_table(*frm)
    total = mp.mpc(0)
    for (aH, aV, dV, dH), amp in table.items():
        na, nd = aH + aV, dV + dH
        if to[0] + to[1] != na or to[2] + to[3] != nd:
            continue
        Ua = rot_expm(na, 2 * alpha)
        Ud = rot_expm(nd, 2 * delta)
        total += mp.mpf(sp.N(amp, 50)) * Ua[to[0], aH] * Ud[to[3], dH]
    return total


def bs_symbolic(m, n, mo, no, t):
    c, e = sp.symbols("c e")
    st, sr = sp.sqrt(t), sp.sqrt(1 - t)
    poly = sp.expand((st * c - sr * e) ** m * (sr * c + st * e) ** n)
    coeff = sp.Poly(poly, c, e).coeff_monomial(c**mo * e**no)
    return sp.N(coeff * sp.sqrt(sp.Rational(factorial(mo) * factorial(no), factorial(m) * factorial(n))), 30)


if __name__ == "__main__":
    print("binomial(40,20)", comb(40, 20))
    z = Fraction(0.3 - 1.0) / Fraction(0.3)  # the double that the library sees
    z_double = (0.3 - 1.0) / 0.3
    print("hyp2f1(4,3,2,z(0.3))", mp.nstr(mp.mpf(hyp_exact(4, 3, 2, Fraction(z_double)).numerator) / hyp_exact(4, 3, 2, Fraction(z_double)).denominator, 20))
    print("G(3,1;0.1,1e-3)", mp.nstr(g_direct(3, 1, 0.1, 1e-3), 20))
    print("G(4,2;0.3,1e-3)", mp.nstr(g_direct(4, 2, 0.3, 1e-3), 20))
    print("tanh2r(0.1,1e-5)", mp.nstr(thermal_x(0.1, 1e-5), 20))
    print("p(3|1;0.2,1e-3)", mp.nstr(detector(3, 1, 0.2, 1e-3), 20))
    print("p(0|3;0.135,1e-5)", mp.nstr(detector(0, 3, 0.135, 1e-5), 20))
    print("f_count(2,1;0.24,0.045,3e-5)", mp.nstr(f_count_bayes(2, 1, 0.24, 0.045, 3e-5), 20))
    print("f_thr(no_click,1;0.24,0.135,1e-5)", mp.nstr(f_threshold_bayes(False, 1, 0.24, 0.135, 1e-5), 20))
    print("f_thr(click,2;0.24,0.045,3e-5)", mp.nstr(f_threshold_bayes(True, 2, 0.24, 0.045, 3e-5), 20))
    print("phi(2,1,0,1)", phi_table(2, 1, 0, 1))
    a = label_rotation((1, 0, 1, 0), (0, 1, 1, 0), mp.pi / 4, 0)
    print("A(1010->0110; pi/4, 0)", mp.nstr(a, 20), "W", mp.nstr(abs(a) ** 2, 20))
    a = label_rotation((1, 0, 1, 0), (1, 0, 1, 0), mp.pi / 4, mp.pi / 4)
    print("W(1010->1010; pi/4, pi/4)", mp.nstr(abs(a) ** 2, 20))
    print("bs(2,1->0,3;0.3)", bs_symbolic(2, 1, 0, 3, sp.Rational(3, 10)))
