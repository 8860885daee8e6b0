"""High-precision evaluation of the closed-form rates used as frozen test values.

Run: python3 closed_forms.py
"""
from mpmath import mp, mpf, log, pi

mp.dps = 40
c = mpf(299792458)
fc = mpf(28e9)
eta = c**2 / (16 * pi**2 * fc**2)
P = mpf(10) ** ((mpf(10) - 30) / 10)
s2 = mpf(10) ** ((mpf(-114) - 30) / 10)
L, alpha_s, d, yt, yr = 5, mpf(10), mpf(3), mpf(-2), mpf(2)


def log2(x):
    return log(x, 2)


def dc2(yc):
    return (yc - yt) ** 2 + d**2


def dr2(ys):
    return d**2 + (ys - yr) ** 2


g_c = P * eta / s2  # N = 1


def g_s(ys):
    return P * L * eta**2 * alpha_s / (s2 * dr2(ys))


out = {}
# user (0, 0), antenna at 0: d_c^2 = 13
out["comm_snr_user_0_0_t0"] = g_c / dc2(0)
out["comm_rate_user_0_0_t0"] = log2(1 + g_c / dc2(0))
out["sense_rate_aligned_ys_m1"] = log2(1 + g_s(-1) / dc2(-1)) / L
# fixed antennas at 0; user (3, 1), target (-8, -1)
xc, yc, xs, ys = 3, 1, -8, -1
out["fixed_cr"] = log2(1 + g_c / (dc2(yc) + (0 - xc) ** 2))
gsf = P * L * eta**2 * alpha_s / (s2 * (dr2(ys) + (0 - xs) ** 2))
out["fixed_sr"] = log2(1 + gsf / (dc2(ys) + (0 - xs) ** 2)) / L
# C-C and S-C designs, user (0, 1), target (-8, -1)
xc, yc, xs, ys = 0, 1, -8, -1
dx = abs(xc - xs)
out["cc_cr"] = log2(1 + g_c / dc2(yc))
out["cc_sr"] = log2(1 + g_s(ys) / (dc2(ys) + dx**2)) / L
out["sc_cr"] = log2(1 + g_c / (dc2(yc) + dx**2))
out["sc_sr"] = log2(1 + g_s(ys) / dc2(ys)) / L
for k, v in out.items():
    print(f"{k} = {mp.nstr(v, 17)}")
