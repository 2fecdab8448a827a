#!/usr/bin/env python3
"""Independent high-precision evaluation of the uniform-rate CIR formulas.

Implements the hitting rate, the cumulative fraction (closed form) and the
asymptotic fraction directly in mpmath. The closed-form cumulative fraction
is cross-checked against mpmath quadrature of the hitting rate before any
value is frozen, so a transcription error in either expression would show
up here first.
"""
import mpmath as mp

mp.mp.dps = 40

D = mp.mpf("79.4")
R = mp.mpf(10)      # receiver radius, um
R0 = mp.mpf(20)     # TX distance, um


def coeffs(w, kd):
    eps = (R0 - R) / mp.sqrt(4 * D)
    gam = (w * R + D) / (D * R)
    zet = gam ** 2 * D - kd
    bet = (R0 - R) * mp.sqrt(kd / D)
    return eps, gam, zet, bet


def h_u(t, w, kd):
    eps, gam, zet, _ = coeffs(w, kd)
    term1 = mp.exp(-eps ** 2 / t - kd * t) / mp.sqrt(mp.pi * D * t)
    term2 = gam * mp.exp(gam * (R0 - R) + zet * t) * mp.erfc(eps / mp.sqrt(t) + gam * mp.sqrt(D * t))
    return R * w / R0 * (term1 - term2)


def H_u_closed(t, w, kd):
    eps, gam, zet, bet = coeffs(w, kd)
    st = mp.sqrt(t)
    a1 = (mp.exp(-bet) * mp.erfc(eps / st - mp.sqrt(kd * t))
          - mp.exp(bet) * mp.erfc(eps / st + mp.sqrt(kd * t))) / (2 * mp.sqrt(kd * D))
    psi1 = 2 * gam * mp.exp(gam * (R0 - R) + zet * t) * mp.erfc(eps / st + gam * mp.sqrt(D * t))
    psi2 = ((gam ** 2 * mp.sqrt(D / kd) - gam) * mp.exp(-bet) * mp.erf(eps / st - mp.sqrt(kd * t))
            - (gam ** 2 * mp.sqrt(D / kd) + gam)
            * (mp.exp(-bet) - mp.exp(bet) * mp.erfc(eps / st + mp.sqrt(kd * t))))
    a2 = (psi1 - psi2) / (2 * zet) - gam * mp.exp(-bet) / zet
    return R * w / R0 * (a1 - a2)


def H_u_quad(t, w, kd):
    return mp.quad(lambda u: h_u(u, w, kd), [0, t / 100, t])


def H_inf(w, kd):
    eps, gam, zet, bet = coeffs(w, kd)
    if kd == 0:
        return R ** 2 * w / (R0 * (w * R + D))
    return R * w * (gam - mp.sqrt(kd / D)) * mp.exp(-bet) / (R0 * zet)


def main():
    kd = mp.mpf("0.8")

    print("# cross-check: closed-form cumulative fraction vs quadrature of the rate")
    worst = mp.mpf(0)
    for t in (mp.mpf("0.05"), mp.mpf("0.5"), mp.mpf(2), mp.mpf(10)):
        for w in (mp.mpf("0.03"), mp.mpf(1), mp.mpf(5), mp.mpf(200)):
            diff = abs(H_u_closed(t, w, kd) - H_u_quad(t, w, kd))
            worst = max(worst, diff)
    print("max |closed - quad| over grid:", mp.nstr(worst, 5))

    print("# frozen spot values, default channel constants, kd=0.8")
    for t, w in ((mp.mpf("0.1"), mp.mpf(5)), (mp.mpf(1), mp.mpf(5)),
                 (mp.mpf("0.5"), mp.mpf("6.3")), (mp.mpf(2), mp.mpf(100))):
        print("h_u(t=%s, w=%s)  = %s" % (mp.nstr(t, 6), mp.nstr(w, 6), mp.nstr(h_u(t, w, kd), 17)))
        print("H_u(t=%s, w=%s)  = %s" % (mp.nstr(t, 6), mp.nstr(w, 6), mp.nstr(H_u_closed(t, w, kd), 17)))

    print("# kd=0 spot values (quadrature route)")
    for t, w in ((mp.mpf("0.5"), mp.mpf(5)), (mp.mpf(2), mp.mpf(5))):
        print("H_u(t=%s, w=%s; kd=0) = %s" % (mp.nstr(t, 6), mp.nstr(w, 6),
                                              mp.nstr(H_u_quad(t, w, 0), 17)))

    print("# asymptotic values")
    for w in (mp.mpf("0.03"), mp.mpf(1), mp.mpf(5), mp.mpf(200)):
        print("H_inf(w=%s, kd=0.8) = %s" % (mp.nstr(w, 6), mp.nstr(H_inf(w, kd), 17)))
    print("H_inf(w=5, kd=0)    =", mp.nstr(H_inf(mp.mpf(5), 0), 17))

    print("# zeta root at the default constants: w* solving gamma(w)^2 D = kd")
    wstar = mp.sqrt(kd * D) - D / R
    print("w* =", mp.nstr(wstar, 17))
    eps, gam, zet, bet = coeffs(wstar, kd)
    print("zeta(w*) =", mp.nstr(zet, 5))
    print("H_inf(w*) via factored form =",
          mp.nstr(R * wstar * mp.exp(-bet) / (R0 * D * (gam + mp.sqrt(kd / D))), 17))
    print("H_u(100, w*) quad =", mp.nstr(mp.quad(lambda u: h_u(u, wstar, kd), [0, 1, 100]), 17))

    print("# fully absorbing finite-time fraction, kd=0: H_a(t) = (R/R0) erfc(eps/sqrt(t))")
    eps = (R0 - R) / mp.sqrt(4 * D)
    for t in (mp.mpf(1), mp.mpf(20)):
        print("H_a(%s) = %s" % (mp.nstr(t, 4), mp.nstr(R / R0 * mp.erfc(eps / mp.sqrt(t)), 17)))

    print("# first-passage density spot check vs h_u(w=1e8, kd=0)")
    for t in (mp.mpf("0.05"), mp.mpf("0.5"), mp.mpf(2)):
        fp = (R / R0) * (R0 - R) / mp.sqrt(4 * mp.pi * D * t ** 3) * mp.exp(-(R0 - R) ** 2 / (4 * D * t))
        hv = h_u(t, mp.mpf("1e8"), 0)
        print("t=%s fp=%s  rel_dev=%s" % (mp.nstr(t, 4), mp.nstr(fp, 17), mp.nstr(abs(hv - fp) / fp, 5)))


if __name__ == "__main__":
    main()
