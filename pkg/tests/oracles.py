"""Independent reference computations used only by the tests."""

import numpy as np


def mink(u, v):
    return -u[0] * v[0] + u[1:] @ v[1:]


def rk4(f, y0, t1=1.0, steps=2000):
    y = np.array(y0, dtype=float)
    h = t1 / steps
    for _ in range(steps):
        k1 = f(y)
        k2 = f(y + 0.5 * h * k1)
        k3 = f(y + 0.5 * h * k2)
        k4 = f(y + h * k3)
        y = y + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    return y


def hyperboloid_geodesic(p, v, t1=1.0, steps=2000):
    """Integrate x'' = <x', x'> x with x(0) = p, x'(0) = v."""
    n = len(p)

    def f(y):
        x, dx = y[:n], y[n:]
        return np.concatenate([dx, mink(dx, dx) * x])

    y = rk4(f, np.concatenate([p, v]), t1, steps)
    return y[:n], y[n:]


def hyperboloid_transport(p, v, u, t1=1.0, steps=2000):
    """Transport u along t -> exp_p(t v) by integrating U' = <U, x'> x."""
    n = len(p)

    def f(y):
        x, dx, U = y[:n], y[n:2 * n], y[2 * n:]
        return np.concatenate([dx, mink(dx, dx) * x, mink(U, dx) * x])

    y = rk4(f, np.concatenate([p, v, u]), t1, steps)
    return y[:n], y[2 * n:]


def arc_length(p, v, steps=4000):
    """Length of the integrated geodesic by summing chord lengths of the polyline."""
    n = len(p)
    x = np.array(p, dtype=float)
    dx = np.array(v, dtype=float)
    h = 1.0 / steps
    total = 0.0

    def f(y):
        return np.concatenate([y[n:], mink(y[n:], y[n:]) * y[:n]])

    y = np.concatenate([x, dx])
    for _ in range(steps):
        k1 = f(y)
        k2 = f(y + 0.5 * h * k1)
        k3 = f(y + 0.5 * h * k2)
        k4 = f(y + h * k3)
        y_new = y + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        total += h * np.sqrt(max(mink(y_new[n:], y_new[n:]), 0.0))
        y = y_new
    return total


def flat_extragradient(F, project, p0, alpha, beta, delta_minus, delta_plus, iters):
    """Textbook projection-type extragradient method on R^n with a single-valued map F.

    Armijo search along [p, z] and a hyperplane projection, written
    directly with vector arithmetic.
    """
    p = np.array(p0, dtype=float)
    out = [p.copy()]
    for _ in range(iters):
        z = project(p - alpha * F(p))
        r = z - p
        if np.linalg.norm(r) == 0:
            break
        i = 0
        while True:
            lam = beta * 2.0 ** (-i)
            y = p + lam * r
            if F(y) @ r <= -(delta_minus / alpha) * (r @ r):
                break
            i += 1
        v = F(y)
        s = v @ (p - y)
        q = p - max(s, 0.0) / (v @ v) * v
        p = project(q)
        out.append(p.copy())
    return out


def hyperboloid_log(p, a):
    """Closed-form log map on the hyperboloid."""
    d = np.arccosh(max(-mink(p, a), 1.0))
    if d == 0:
        return np.zeros_like(p)
    return d / np.sinh(d) * (a - np.cosh(d) * p)


def hyperboloid_exp(p, v):
    n = np.sqrt(max(mink(v, v), 0.0))
    if n == 0:
        return np.array(p, dtype=float)
    x = np.cosh(n) * p + np.sinh(n) / n * v
    return x / np.sqrt(-mink(x, x))


def hyperboloid_mean(anchors, weights, p0, tol=1e-10, max_iter=10_000):
    """Weighted Frechet mean by Riemannian gradient descent with Armijo line search."""
    anchors = [np.asarray(a, dtype=float) for a in anchors]

    def value(x):
        return 0.5 * sum(w * np.arccosh(max(-mink(x, a), 1.0)) ** 2 for w, a in zip(weights, anchors))

    p = np.asarray(p0, dtype=float)
    for _ in range(max_iter):
        g = -sum(w * hyperboloid_log(p, a) for w, a in zip(weights, anchors))
        gn2 = mink(g, g)
        if np.sqrt(max(gn2, 0.0)) < tol:
            break
        t, f0 = 1.0, value(p)
        while value(hyperboloid_exp(p, -t * g)) > f0 - 0.5 * t * gn2 and t > 1e-12:
            t *= 0.5
        p = hyperboloid_exp(p, -t * g)
    return p
