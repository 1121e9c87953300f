"""Independent reference values for the C++ tests.

Re-implements the Sellmeier evaluation, phase matching, walk-off and the
planar ray-trace phase with mpmath, then prints the numbers frozen in
tests/unit. Run: python3 tests/oracles/oracles.py
"""
import mpmath as mp

mp.mp.dps = 40

KATO_O = (2.7359, 0.01878, 0.01822, 0.01354)
KATO_E = (2.3753, 0.01224, 0.01667, 0.01516)
YVO4_O = (3.77834, 0.069736, 0.04724, 0.0108133)
YVO4_E = (4.59905, 0.110534, 0.04813, 0.0122676)


def abcd(c, lam_um):
    lam2 = mp.mpf(lam_um) ** 2
    return mp.sqrt(c[0] + c[1] / (lam2 - c[2]) - c[3] * lam2)


def n_theta(no, ne, theta):
    return 1 / mp.sqrt(mp.cos(theta) ** 2 / no**2 + mp.sin(theta) ** 2 / ne**2)


def conj(lp, ls):
    return 1 / (1 / mp.mpf(lp) - 1 / mp.mpf(ls))


def phase_matching_angle(lp_nm, ls_nm, li_nm):
    lp, ls, li = mp.mpf(lp_nm) / 1000, mp.mpf(ls_nm) / 1000, mp.mpf(li_nm) / 1000
    target = lp * (abcd(KATO_O, ls) / ls + abcd(KATO_O, li) / li)
    nop, nep = abcd(KATO_O, lp), abcd(KATO_E, lp)
    f = lambda th: n_theta(nop, nep, th) - target
    return mp.findroot(f, (mp.radians(20), mp.radians(40)), solver="anderson")


def walkoff_fd(lam_um, theta):
    no, ne = abcd(KATO_O, lam_um), abcd(KATO_E, lam_um)
    n = lambda th: n_theta(no, ne, th)
    return mp.atan(-mp.diff(n, theta) / n(theta))


# ---------------------------------------------------------------- ray trace

CUT = mp.radians(mp.mpf("28.8"))
AX_C = (0, mp.sin(CUT), mp.cos(CUT))
AX_H = (1, 0, 0)


def stack():
    # (role, kind, thickness, data, axis, collimated)
    return [
        ("crystal1", "u", mp.mpf(6), (KATO_O, KATO_E), AX_C, False),
        ("gap", "i", mp.mpf("0.5"), mp.mpf(1), None, False),
        ("hwp", "i", mp.mpf(1), mp.mpf("1.5"), None, False),
        ("gap", "i", mp.mpf("0.5"), mp.mpf(1), None, False),
        ("crystal2", "u", mp.mpf(6), (KATO_O, KATO_E), AX_C, False),
        ("compensator", "u", mp.mpf("3.6"), (YVO4_O, YVO4_E), AX_H, True),
    ]


def index(el, lam, pol, u):
    role, kind, t, data, axis, coll = el
    if kind == "i":
        return data
    no, ne = abcd(data[0], lam / 1000), abcd(data[1], lam / 1000)
    extra = abs(axis[0]) > abs(axis[1]) if pol == "H" else abs(axis[1]) > abs(axis[0])
    if not extra:
        return no
    c = sum(a * b for a, b in zip(u, axis))
    return 1 / mp.sqrt(c**2 / no**2 + (1 - c**2) / ne**2)


def internal(el, lam, pol, sx, sy):
    def u_of(n):
        ux, uy = sx / n, sy / n
        return (ux, uy, mp.sqrt(1 - ux**2 - uy**2))

    n = index(el, lam, pol, (0, 0, 1))
    for _ in range(200):
        nxt = index(el, lam, pol, u_of(n))
        if abs(nxt - n) < mp.mpf(10) ** (-mp.mp.dps + 3):
            break
        n = nxt
    return n, u_of(n)


def photon(lam, birth, sx, sy):
    els = stack()
    k = 2 * mp.pi / (lam * mp.mpf("1e-6"))  # rad/mm
    pol = "H"
    n, u = internal(els[birth], lam, pol, sx, sy)
    rate = k * n / u[2]
    down = mp.mpf(0)
    for el in els[birth + 1:]:
        if el[2] != 0:
            if el[5]:
                down += k * index(el, lam, pol, (0, 0, 1)) * el[2]
            else:
                n, u = internal(el, lam, pol, sx, sy)
                down += k * n * el[2] / u[2]
        if el[0] == "hwp":
            pol = "V"
    return rate, down


def raw_delta_phi(ax_deg, ay_deg, ls_nm=785, lp_nm=405):
    els = stack()
    lp = mp.mpf(lp_nm) / 1000
    ls = mp.mpf(ls_nm)
    li = conj(lp_nm, ls_nm)
    tx, ty = mp.tan(mp.radians(ax_deg)), mp.tan(mp.radians(ay_deg))
    norm = mp.sqrt(1 + tx**2 + ty**2)
    sx, sy = tx / norm, ty / norm
    r = li / ls
    kp = 2 * mp.pi / (lp / 1000)  # rad/mm
    z = (0, 0, 1)
    p1 = kp * index(els[0], lp * 1000, "V", z)
    p2 = kp * index(els[4], lp * 1000, "V", z)
    between = sum(kp * el[3] * el[2] for el in els[1:4])
    L1 = L2 = mp.mpf(6)
    zm = L1 / 2
    vv = p1 * zm
    hh = p1 * L1 + between + p2 * zm
    for lam, tsx, tsy in ((ls, sx, sy), (li, -r * sx, -r * sy)):
        rate, down = photon(lam, 0, tsx, tsy)
        vv += rate * (L1 - zm) + down
        rate, down = photon(lam, 4, tsx, tsy)
        hh += rate * (L2 - zm) + down
    return vv - hh


def main():
    print("n_o(BBO Kato, 532 nm) =", mp.nstr(abcd(KATO_O, mp.mpf("0.532")), 12))
    print("n_o(BBO Kato, 405 nm) =", mp.nstr(abcd(KATO_O, mp.mpf("0.405")), 12))
    print("n_o(YVO4, 810 nm) =", mp.nstr(abcd(YVO4_O, mp.mpf("0.810")), 12))
    print("n_e(YVO4, 810 nm) =", mp.nstr(abcd(YVO4_E, mp.mpf("0.810")), 12))
    li = conj(405, 785)
    print("conjugate idler nm =", mp.nstr(li, 12))
    th = phase_matching_angle(405, 785, li)
    print("theta_pm (405/785/conj) deg =", mp.nstr(mp.degrees(th), 12))
    print("theta_pm (405/785/837) deg =", mp.nstr(mp.degrees(phase_matching_angle(405, 785, 837)), 12))
    nep = n_theta(abcd(KATO_O, mp.mpf("0.405")), abcd(KATO_E, mp.mpf("0.405")), CUT)
    print("n_e_eff(BBO, 405 nm, 28.8 deg) =", mp.nstr(nep, 12))
    rp = walkoff_fd(mp.mpf("0.405"), CUT)
    rs = walkoff_fd(mp.mpf("0.785"), CUT)
    ri = walkoff_fd(li / 1000, CUT)
    print("rho pump/signal/idler deg =", mp.nstr(mp.degrees(rp), 12), mp.nstr(mp.degrees(rs), 12),
          mp.nstr(mp.degrees(ri), 12))
    print("mismatch signal/idler =", mp.nstr(abs(rp - rs) / rp, 12), mp.nstr(abs(rp - ri) / rp, 12))
    print("refract 1 deg into n=1.66 (deg) =", mp.nstr(mp.degrees(mp.asin(mp.sin(mp.radians(1)) / mp.mpf("1.66"))), 12))
    print("6/cos(0.6 deg) =", mp.nstr(6 / mp.cos(mp.radians(mp.mpf("0.6"))), 12))
    print("sin(1)/2 =", mp.nstr(mp.sin(1) / 2, 15), " F =", mp.nstr(mp.mpf(1) / 2 + mp.sin(1) / 2, 15))

    ref = raw_delta_phi(0, 0)
    f = lambda x, y: raw_delta_phi(x, y) - ref
    # Central differences in degrees; at 40 digits the O(h^2) truncation dominates.
    h = mp.mpf("1e-5")
    gx = (f(h, 0) - f(-h, 0)) / (2 * h)
    gy = (f(0, h) - f(0, -h)) / (2 * h)
    hxx = (f(h, 0) - 2 * f(0, 0) + f(-h, 0)) / h**2
    hyy = (f(0, h) - 2 * f(0, 0) + f(0, -h)) / h**2
    hxy = (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4 * h * h)
    print("gradient (rad/deg) =", mp.nstr(gx, 12), mp.nstr(gy, 12))
    print("hessian (rad/deg^2) =", mp.nstr(hxx, 12), mp.nstr(hyy, 12), mp.nstr(hxy, 12))
    for x, y in ((0, mp.mpf("0.1")), (0, mp.mpf("-0.1")), (mp.mpf("0.1"), 0), (mp.mpf("0.07"), mp.mpf("0.07")),
                 (0, mp.mpf("0.5")), (mp.mpf("-0.3"), mp.mpf("0.4"))):
        quad = gx * x + gy * y + (hxx * x * x + 2 * hxy * x * y + hyy * y * y) / 2
        print(f"alpha=({mp.nstr(x, 3)},{mp.nstr(y, 3)}) exact =", mp.nstr(f(x, y), 12), " second-order =",
              mp.nstr(quad, 12))


if __name__ == "__main__":
    main()
