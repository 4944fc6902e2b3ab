"""2-D convex hulls (Andrew's monotone chain)."""

from __future__ import annotations

import numpy as np

COLLINEAR_TOL = 1e-12


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points) -> np.ndarray | None:
    """Counter-clockwise hull vertices, or ``None`` when the points should be
    drawn individually (fewer than 3 distinct points, or all collinear).

    Collinear boundary points are not reported as vertices.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    uniq = sorted({(float(x), float(y)) for x, y in pts})
    if len(uniq) < 3:
        return None

    lower: list[tuple[float, float]] = []
    for p in uniq:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[tuple[float, float]] = []
    for p in reversed(uniq):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        return None
    # points that are collinear up to rounding give a sliver of zero area
    h = np.array(hull)
    area = 0.5 * abs(float(np.sum(h[:, 0] * np.roll(h[:, 1], -1) - np.roll(h[:, 0], -1) * h[:, 1])))
    extent = float(np.ptp(h, axis=0).max())
    if area <= COLLINEAR_TOL * extent**2:
        return None
    return h


def point_in_polygon(pt, poly, eps: float = 1e-9) -> bool:
    """True when ``pt`` lies inside or on the convex CCW polygon ``poly``."""
    m = len(poly)
    for i in range(m):
        a, b = poly[i], poly[(i + 1) % m]
        scale = max(1.0, float(np.hypot(b[0] - a[0], b[1] - a[1])))
        if _cross(a, b, pt) < -eps * scale:
            return False
    return True
