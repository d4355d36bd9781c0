"""Reference energy norms ||grad u|| of the two benchmark solutions."""
from mpmath import mp, mpf, quad, exp, sqrt, atan2, sin, cos, pi, hypot

mp.dps = 30


def gaussian():
    # u = (x^2-1)(y^2-1) exp(-100(x^2+y^2)); the integrand is symmetric in x, y.
    def ux(x, y):
        a, b = x * x - 1, y * y - 1
        return b * exp(-100 * (x * x + y * y)) * (2 * x - 200 * x * a)

    pts = [-1, -0.5, -0.2, -0.1, 0, 0.1, 0.2, 0.5, 1]
    ix = quad(lambda x, y: ux(x, y) ** 2, pts, pts)
    return sqrt(2 * ix)


def lshape():
    # Harmonic u: ||grad u||^2 = boundary integral of u du/dn; u = 0 on the re-entrant edges.
    def phi(x, y):
        t = atan2(y, x)
        return t if t >= 0 else t + 2 * pi

    def u(x, y):
        r = hypot(x, y)
        return r ** (mpf(2) / 3) * sin(2 * phi(x, y) / 3)

    def grad(x, y):
        r, p = hypot(x, y), phi(x, y)
        c = mpf(2) / 3 * r ** (-mpf(1) / 3)
        return -c * sin(p / 3), c * cos(p / 3)

    total = quad(lambda y: u(1, y) * grad(1, y)[0], [0, 1])
    total += quad(lambda x: u(x, 1) * grad(x, 1)[1], [-1, 0, 1])
    total += quad(lambda y: -u(-1, y) * grad(-1, y)[0], [-1, 0, 1])
    total += quad(lambda x: -u(x, -1) * grad(x, -1)[1], [-1, 0])
    return sqrt(total)


if __name__ == "__main__":
    print("gaussian", mp.nstr(gaussian(), 20))
    print("lshape  ", mp.nstr(lshape(), 20))
