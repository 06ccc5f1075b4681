# Independent high-precision oracle computations used to freeze expected
# values into the C++ test suite. Not part of the deliverable build.
import mpmath as mp

mp.mp.dps = 50


def b_coeff(m, k, t, theta):
    # (theta+2k-1)/(m!(k-m)!) * Gamma(theta+m+k-1)/Gamma(theta+m) * exp(-k(k+theta-1)t/2)
    m, k = int(m), int(k)
    t = mp.mpf(t)
    theta = mp.mpf(theta)
    pref = (theta + 2 * k - 1) / (mp.factorial(m) * mp.factorial(k - m))
    gr = mp.gamma(theta + m + k - 1) / mp.gamma(theta + m)
    return pref * gr * mp.e ** (-k * (k + theta - 1) * t / 2)


def q_m(m, t, theta, kmax=400):
    s = mp.mpf(0)
    for k in range(m, kmax):
        s += (-1) ** (k - m) * b_coeff(m, k, t, theta)
    return s


def beta_pdf(y, a, b):
    y = mp.mpf(y)
    return y ** (a - 1) * (1 - y) ** (b - 1) / mp.beta(a, b)


def density_given_m(m, x, y, ta, tA):
    x = mp.mpf(x)
    s = mp.mpf(0)
    for l in range(m + 1):
        w = mp.binomial(m, l) * x**l * (1 - x) ** (m - l)
        s += w * beta_pdf(y, ta + l, tA + m - l)
    return s


def transition_density(x, y, t, ta, tA, mmax=250):
    th = mp.mpf(ta) + mp.mpf(tA)
    s = mp.mpf(0)
    for m in range(mmax):
        qm = q_m(m, t, th)
        if m > 30 and abs(qm) < mp.mpf(10) ** -40:
            break
        s += qm * density_given_m(m, x, y, mp.mpf(ta), mp.mpf(tA))
    return s


print("== b coefficients ==")
print("b(0,0,1,0.04) =", mp.nstr(b_coeff(0, 0, 1, "0.04"), 30))
print("b(0,1,1,0.04) =", mp.nstr(b_coeff(0, 1, 1, "0.04"), 30))
print("log b(0,1,1,0.04) =", mp.nstr(mp.log(b_coeff(0, 1, 1, "0.04")), 30))
print("b(2,5,0.5,0.04) =", mp.nstr(b_coeff(2, 5, "0.5", "0.04"), 30))
print("log b(2,5,0.5,0.04) =", mp.nstr(mp.log(b_coeff(2, 5, "0.5", "0.04")), 30))
print("b(3,7,0.25,0.5) =", mp.nstr(b_coeff(3, 7, "0.25", "0.5"), 30))
print("log b(3,7,0.25,0.5) =", mp.nstr(mp.log(b_coeff(3, 7, "0.25", "0.5")), 30))

print("== q pmf ==")
for (t, th) in [("1", "0.04"), ("0.25", "0.04"), ("5", "0.04"), ("1", "0.5"), ("0.25", "0.5")]:
    qs = [q_m(m, t, th) for m in range(12)]
    tot = sum(q_m(m, t, th) for m in range(100))
    print(f"t={t} theta={th}: q0..q5 =", [mp.nstr(q, 17) for q in qs[:6]], " sum100 =", mp.nstr(tot, 20))

print("q0(50, 0.04) =", mp.nstr(q_m(0, 50, "0.04"), 20))
print("q0(1000,0.04) =", mp.nstr(q_m(0, 1000, "0.04"), 20))
print("1-q0(1000,0.04) =", mp.nstr(1 - q_m(0, 1000, "0.04"), 20))

print("== density given m ==")
v = density_given_m(5, "0.3", "0.6", mp.mpf("0.02"), mp.mpf("0.02"))
print("p(m=5,x=0.3,y=0.6;th=.02/.02) =", mp.nstr(v, 30))
v0 = beta_pdf("0.6", mp.mpf("0.02"), mp.mpf("0.02"))
print("beta_pdf(0.6;0.02,0.02) =", mp.nstr(v0, 30))

print("== transition density oracle ==")
for (x, y, t) in [("0.3", "0.6", "0.5"), ("0.2", "0.35", "0.5"), ("0.2", "0.7", "1")]:
    v = transition_density(x, y, t, "0.02", "0.02")
    print(f"p({x},{y};{t}) =", mp.nstr(v, 25))

# Chapman-Kolmogorov spot value: p(x,z;s) p(z,y;t-s) integrated should equal p(x,y;t)
print("p(0.3,0.6;1) =", mp.nstr(transition_density("0.3", "0.6", "1", "0.02", "0.02"), 25))

print("== haploid closed forms ==")
theta_a = mp.mpf("0.02")
theta_A = mp.mpf("0.02")
th = mp.mpf("0.7")


def alpha(x):
    return (theta_a - (theta_a + theta_A) * x) / 2


def phi_hap(x, v):
    return (x * (1 - x) * v**2 / 4 + v * alpha(x)) / 2


k1 = (th**2 + 4 * th * (theta_a - theta_A) + 4 * (theta_a + theta_A) ** 2) / 32
print("k1(0.7) =", mp.nstr(k1, 20), " k2 =", mp.nstr(th * theta_a / 4, 20), " k3 =", mp.nstr(-th * theta_A / 4, 20))
print("phi(0;0.7) =", mp.nstr(phi_hap(0, th), 20))
print("A(0.6)-A(0.3) at 0.7:", mp.nstr(th / 2 * mp.mpf("0.6") - th / 2 * mp.mpf("0.3"), 20))
k1_1 = (1 + 4 * (theta_a + theta_A) ** 2) / 32
print("sam over [-1,1]:", mp.nstr(k1_1 + mp.mpf("0.02") / 4 + 0 * k1_1, 20), "(k1(1)+thetaA/4) =", mp.nstr(k1_1 + theta_A / 4, 20))
print("exp prefactor exp(0.1085) =", mp.nstr(mp.e ** mp.mpf("0.1085"), 20))

print("== bridge midpoint product normalization (x=0.2,y=0.7,t=1) ==")
f = lambda z: transition_density("0.2", z, "0.5", "0.02", "0.02", mmax=120) * transition_density(z, "0.7", "0.5", "0.02", "0.02", mmax=120)
# just a couple of values for later cross-checks
for z in ["0.1", "0.45", "0.9"]:
    print("prod(", z, ") =", mp.nstr(f(mp.mpf(z)), 20))
