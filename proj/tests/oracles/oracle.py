"""Reference values for the C++ test-suite, computed independently with
dense NumPy matrices. Run: python3 tests/oracles/oracle.py > values.txt"""

import math
import numpy as np


class Grid:
    def __init__(self, nx, ny, lx=1.0, ly=1.0):
        self.nx, self.ny = nx, ny
        self.hx, self.hy = lx / (nx - 1), ly / (ny - 1)
        self.x = np.array([i * self.hx for j in range(ny) for i in range(nx)])
        self.y = np.array([j * self.hy for j in range(ny) for i in range(nx)])
        w = np.ones((ny, nx))
        w[:, 0] *= 0.5
        w[:, -1] *= 0.5
        w[0, :] *= 0.5
        w[-1, :] *= 0.5
        self.w = w.ravel()

    def idx(self, i, j):
        return j * self.nx + i

    def boundary(self):
        """Counter-clockwise from (0,0): bottom, right, top, left."""
        nx, ny = self.nx, self.ny
        seq = [(i, 0) for i in range(nx)]
        seq += [(nx - 1, j) for j in range(1, ny)]
        seq += [(i, ny - 1) for i in range(nx - 2, -1, -1)]
        seq += [(0, j) for j in range(ny - 2, 0, -1)]
        return seq

    def ds(self, i, j):
        on_x = i in (0, self.nx - 1)
        on_y = j in (0, self.ny - 1)
        if on_x and on_y:
            return 0.5 * (self.hx + self.hy)
        return self.hy if on_x else self.hx

    def ghost(self, i, j):
        g = 0.0
        if i in (0, self.nx - 1):
            g += 2.0 / self.hx
        if j in (0, self.ny - 1):
            g += 2.0 / self.hy
        return g

    def neumann_laplacian(self):
        """5-point Laplacian with mirrored ghost values (du/dn = 0)."""
        n = self.nx * self.ny
        L = np.zeros((n, n))
        for j in range(self.ny):
            for i in range(self.nx):
                k = self.idx(i, j)
                for (a, b, h) in (((i - 1, j), (i + 1, j), self.hx), ((i, j - 1), (i, j + 1), self.hy)):
                    for (p, q), (pp, qq) in ((a, b), (b, a)):
                        if 0 <= p < self.nx and 0 <= q < self.ny:
                            L[k, self.idx(p, q)] += 1.0 / h**2
                        else:
                            L[k, self.idx(pp, qq)] += 1.0 / h**2
                    L[k, k] -= 2.0 / h**2
        return L


def run(g, c, q, lam, dt, nt, u0=None, zeta=None):
    """Leapfrog with du/dn + lam u_t = zeta through the ghost node.
    Returns levels u^0..u^{nt+1}."""
    n = g.nx * g.ny
    bnodes = g.boundary()
    A = (c**2)[:, None] * g.neumann_laplacian() - np.diag(q)
    inj = np.zeros((n, len(bnodes)))
    alpha = np.zeros(n)
    for b, (i, j) in enumerate(bnodes):
        k = g.idx(i, j)
        inj[k, b] = dt**2 * c[k] ** 2 * g.ghost(i, j)
        alpha[k] = 0.5 * dt * c[k] ** 2 * g.ghost(i, j) * lam[b]
    u = [np.zeros(n) if u0 is None else u0.copy()]
    src = lambda k: np.zeros(len(bnodes)) if zeta is None else zeta[k]
    u.append(u[0] + 0.5 * dt**2 * A @ u[0] + 0.5 * (inj @ src(0)) / (1 + alpha))
    for m in range(1, nt + 1):
        rhs = 2 * u[m] - (1 - alpha) * u[m - 1] + dt**2 * A @ u[m] + inj @ src(m)
        u.append(rhs / (1 + alpha))
    return u


def trace_weights(g, c, dt, nt):
    bn = g.boundary()
    wt = np.array([[(0.5 if k in (0, nt) else 1.0) * dt * g.ds(i, j) / c[g.idx(i, j)] ** 2
                    for (i, j) in bn] for k in range(nt + 1)])
    return wt.ravel()


def show(name, values):
    print(name + " = {" + ", ".join("%.17g" % v for v in values) + "};")


# inner_omega on a 5x5 unit square grid
g = Grid(5, 5)
f = np.sin(g.x + 2 * g.y)
h = np.cos(3 * g.x - g.y)
c = 1 + 0.5 * g.x * g.y
show("inner_omega_5x5", [np.sum(f * h / c**2 * g.w) * g.hx * g.hy])

# inner_trace on a 4x5 grid over [0,1.5]x[0,2], 3 steps of 0.1
g = Grid(4, 5, 1.5, 2.0)
c = 1 + 0.1 * g.x + 0.2 * g.y
nb = len(g.boundary())
a = np.array([[math.sin(k + b) for b in range(nb)] for k in range(4)]).ravel()
bb = np.array([[math.cos(2 * k - b) for b in range(nb)] for k in range(4)]).ravel()
show("inner_trace_4x5", [np.sum(a * bb * trace_weights(g, c, 0.1, 3))])

# energy of (x^2 y, x y) on a 6x5 grid over [0,1]x[0,0.8]; the one-sided and
# centred differences are exact for this u, so use the exact gradient.
g = Grid(6, 5, 1.0, 0.8)
c = 1 + 0.2 * g.x
q = 0.5 * g.y
u = g.x**2 * g.y
ut = g.x * g.y
ux, uy = 2 * g.x * g.y, g.x**2
E = 0.5 * np.sum((ux**2 + uy**2 + q * u**2 / c**2 + ut**2 / c**2) * g.w) * g.hx * g.hy
show("energy_6x5", [E])

# forward solve: 6x5 grid over [0,1]x[0,0.8], lambda 0.7 on bottom and right
g = Grid(6, 5, 1.0, 0.8)
c = 1 + 0.3 * g.x * g.y
q = 0.2 * g.x
bn = g.boundary()
lam = np.array([0.7 if (j == 0 or i == g.nx - 1) else 0.0 for (i, j) in bn])
u0 = np.exp(-((g.x - 0.4) ** 2 + (g.y - 0.45) ** 2) / 0.05)
dt, nt = 0.05, 12
levels = run(g, c, q, lam, dt, nt, u0=u0)
probe = [(0, 0), (3, 0), (5, 2), (2, 4), (0, 3), (2, 2)]
show("forward_probe_nodes_ij", [v for p in probe for v in p])
show("forward_u_nt", [levels[nt][g.idx(i, j)] for (i, j) in probe])
show("forward_trace_k5", [levels[5][g.idx(i, j)] for (i, j) in bn[:6]])

# control solve on the same run: zeta(k, b) = sin(0.3 k + b) on {lambda > 0}
gam = lam > 0
zeta = np.array([[math.sin(0.3 * k + b) if gam[b] else 0.0 for b in range(len(bn))] for k in range(nt + 1)])
lv = run(g, c, q, lam, dt, nt, zeta=zeta)
S_zeta = (lv[nt + 1] - lv[nt - 1]) / (2 * dt)
show("control_field_probe", [S_zeta[g.idx(i, j)] for (i, j) in probe])

# exact adjoint via the dense matrix: S* = T^-1 S^T M
n = g.nx * g.ny
cols = []
for k in range(nt + 1):
    for b in range(len(bn)):
        e = np.zeros((nt + 1, len(bn)))
        e[k, b] = 1.0
        l2 = run(g, c, q, lam, dt, nt, zeta=e)
        cols.append((l2[nt + 1] - l2[nt - 1]) / (2 * dt))
S = np.array(cols).T
M = g.w * g.hx * g.hy / c**2
T = trace_weights(g, c, dt, nt)
z = np.cos(2 * g.x - g.y) * g.x * (1 - g.x)
Sz = (S.T @ (M * z)) / T
Sz = Sz.reshape(nt + 1, len(bn))
mask = np.array(gam, dtype=float)
Sz = Sz * mask[None, :]
show("adjoint_k0", list(Sz[0, :6]))
show("adjoint_k7", list(Sz[7, :6]))
show("adjoint_knt", list(Sz[nt, :6]))

# back-projection: source -lambda d_t(data), reversed time, returns v(0)
data = np.array([[math.cos(0.2 * k) * (b + 1) / len(bn) if gam[b] else 0.0 for b in range(len(bn))]
                 for k in range(nt + 1)])
dd = np.zeros_like(data)
dd[0] = (-3 * data[0] + 4 * data[1] - data[2]) / (2 * dt)
dd[nt] = (3 * data[nt] - 4 * data[nt - 1] + data[nt - 2]) / (2 * dt)
dd[1:nt] = (data[2:] - data[:-2]) / (2 * dt)
src = -lam[None, :] * dd
rev = src[::-1]
lv = run(g, c, q, np.zeros(len(bn)), dt, nt - 1, zeta=np.vstack([rev, np.zeros((1, len(bn)))]))
show("backproject_probe", [lv[nt][g.idx(i, j)] for (i, j) in probe])

# ray oracle: unit square, c = 1, observed set = right face, start lattice
# 20x20 cell centres, 21 directions in each of the sectors +-10 deg about +x
# and -x. Unfolded billiard: horizontal progress alone fixes the hit time;
# contacts with top/bottom below 5 deg from the tangent mark a ray grazing.
def hit(x0, y0, th):
    cx, sy = math.cos(th), math.sin(th)
    if abs(cx) < 1e-15:
        return None
    t = (1 - x0) / cx if cx > 0 else (x0 + 1) / -cx
    ylen = abs(sy) * t
    dist_first = (1 - y0) if sy > 0 else y0
    touches_tb = abs(sy) > 0 and ylen >= dist_first
    grazing = touches_tb and abs(sy) < math.sin(math.radians(5))
    if cx < 0 and abs(cx) < math.sin(math.radians(5)):
        grazing = True
    if cx > 0 and cx < math.sin(math.radians(5)):
        grazing = True
    return t, grazing


tau = 0.0
n_pts, per = 20, 21
for jy in range(n_pts):
    for ix in range(n_pts):
        x0, y0 = (ix + 0.5) / n_pts, (jy + 0.5) / n_pts
        for centre in (0.0, math.pi):
            for k in range(per):
                th = centre - math.radians(10) + 2 * math.radians(10) * k / (per - 1)
                r = hit(x0, y0, th)
                if r and not r[1]:
                    tau = max(tau, r[0])
show("tau_hat_right_face", [tau])
