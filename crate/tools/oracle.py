"""High-precision reference values for crates/core/tests/oracle_values.rs.

Run with `python3 tools/oracle.py`; prints Rust constant blocks.
"""
import mpmath as mp

mp.mp.dps = 50


def inv(rows):
    return mp.matrix(rows) ** -1


def fmt_matrix(name, m):
    n = m.rows
    body = ",\n".join(
        "    [" + ", ".join(mp.nstr(m[i, j], 20, min_fixed=-30, max_fixed=30) for j in range(n)) + "]"
        for i in range(n))
    return f"const {name}: [[f64; {n}]; {n}] = [\n{body},\n];"


def is_bip(u, t, eps):
    n = u.rows
    a = mp.eye(n) + t * u
    g = a ** -1
    for i in range(n):
        for j in range(n):
            if i != j and g[i, j] > eps:
                return False
    ones = mp.matrix([1] * n)
    mu = a ** -1 * ones
    nu = (a.T) ** -1 * ones
    return all(x >= -eps for x in mu) and all(x >= -eps for x in nu)


def tau(u, eps=mp.mpf(0), t_max=mp.mpf(10) ** 6):
    if is_bip(u, t_max, eps):
        return None
    lo, hi = mp.mpf(0), t_max
    for _ in range(200):
        mid = (lo + hi) / 2
        if is_bip(u, mid, eps):
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


# dense example: P tridiagonal, f(x) = x^2 - cos x + 1
P = mp.matrix([[0, 0.5, 0], [0.5, 0, 0.5], [0, 0.5, 0]])
U = (mp.eye(3) - P) ** -1
FU = mp.matrix(3, 3)
for i in range(3):
    for j in range(3):
        x = U[i, j]
        FU[i, j] = x * x - mp.cos(x) + 1
print(fmt_matrix("F_U_INV", FU ** -1))

# squares: Q(2) = I - (U∘U)^{-1}
U2 = mp.matrix(3, 3)
for i in range(3):
    for j in range(3):
        U2[i, j] = U[i, j] ** 2
print(fmt_matrix("Q_TWO", mp.eye(3) - U2 ** -1))

# thresholds of increasing CBFs (exact arithmetic, no slack)
for name, rows in [
    ("CBF2", [[2, 3], [1, 5]]),
    ("CBF3", [[2, 3, 3], [1, 5, 1.5], [1, 4, 2]]),
]:
    t = tau(mp.matrix(rows))
    print(f"const TAU_{name}: f64 = {mp.nstr(t, 20)};")

# inverse of I + tU for the 4x4 nested block example
a, b, c, d = 9, 8, 7, 6
U4 = mp.matrix([[a, 3, 1, 1], [5, b, 1, 1], [2, 2, c, 2.5], [2, 2, 4, d]])
for t in [1, 10]:
    print(fmt_matrix(f"NBF4_INV_T{t}", (mp.eye(4) + t * U4) ** -1))
