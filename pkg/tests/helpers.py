import math

from hearshape.polygon import PolygonError, TrapezoidParams


def random_acute(rng):
    """Random trapezoid with alpha + beta < pi/2 and both bases positive."""
    while True:
        a = rng.uniform(0.05, math.pi / 2 - 0.1)
        b = rng.uniform(0.03, math.pi / 2 - a - 0.02)
        h = rng.uniform(0.2, 2.0)
        B = h * (1 / math.tan(a) + 1 / math.tan(b)) + rng.uniform(0.05, 5.0)
        try:
            return TrapezoidParams.from_base(B, h, max(a, b), min(a, b))
        except PolygonError:
            continue
