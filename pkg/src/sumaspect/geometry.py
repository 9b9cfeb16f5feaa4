"""Numerical primitives: 2D PCA, quickhull, polygon area/clipping, Pearson.

Everything here is pure and operates on float64. Tolerances follow the
unit scale of normalized embeddings (collinearity and point-on-edge at
1e-9) but are applied relative to the data's coordinate scale so that
uniformly rescaled inputs make identical decisions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

COLLINEAR_EPS = 1e-9
PCA_TOL = 1e-10
PCA_MAX_ITER = 1000


@dataclass(frozen=True)
class ConvexPolygon:
    """Hull vertices in CCW order starting from the lowest-(y, x) vertex.

    ``indices`` are positions of the vertices in the input point list
    (lowest index wins for coincident points). Degenerate hulls, from
    fewer than 3 distinct or all-collinear points, keep 0 to 2 extreme
    points and have zero area.
    """

    vertices: np.ndarray
    indices: tuple[int, ...]

    def __post_init__(self):
        verts = np.asarray(self.vertices, dtype=np.float64).reshape(-1, 2)
        verts.setflags(write=False)
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "indices", tuple(int(i) for i in self.indices))

    @property
    def is_degenerate(self) -> bool:
        return len(self.vertices) < 3


def _cross(o: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    return float((a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]))


def _coord_scale(pts: np.ndarray) -> float:
    if pts.size == 0:
        return 1.0
    return max(1.0, float(np.abs(pts).max()))


def quickhull(points: np.ndarray | list) -> ConvexPolygon:
    """Convex hull of 2D points by recursive farthest-point partitioning.

    Collinear points interior to an edge are excluded; fewer than 3
    distinct points (or an all-collinear set) produce a degenerate hull
    holding the extreme points.
    """
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if pts.size and not np.isfinite(pts).all():
        raise ValidationError("hull input contains NaN/Inf")

    first_at: dict[tuple[float, float], int] = {}
    for i, (x, y) in enumerate(pts):
        first_at.setdefault((float(x), float(y)), i)
    uniq = sorted(first_at.values())

    def degenerate(idxs: list[int]) -> ConvexPolygon:
        ordered = sorted(idxs, key=lambda i: (pts[i][1], pts[i][0], i))
        return ConvexPolygon(pts[ordered], tuple(ordered))

    if len(uniq) < 3:
        return degenerate(uniq)

    scale = _coord_scale(pts[uniq])
    eps = COLLINEAR_EPS * scale * scale  # cross products scale quadratically

    left = min(uniq, key=lambda i: (pts[i][0], pts[i][1], i))
    right = max(uniq, key=lambda i: (pts[i][0], pts[i][1], -i))

    def strictly_left(a: int, b: int, cands: list[int]) -> list[int]:
        return [i for i in cands if _cross(pts[a], pts[b], pts[i]) > eps]

    hull: set[int] = {left, right}

    def expand(cands: list[int], a: int, b: int) -> None:
        if not cands:
            return
        far = max(cands, key=lambda i: (_cross(pts[a], pts[b], pts[i]), -i))
        hull.add(far)
        expand(strictly_left(a, far, cands), a, far)
        expand(strictly_left(far, b, cands), far, b)

    others = [i for i in uniq if i != left and i != right]
    expand(strictly_left(left, right, others), left, right)
    expand(strictly_left(right, left, others), right, left)

    if len(hull) == 2:
        return degenerate(sorted(hull))  # every point collinear with the chord

    idxs = sorted(hull)
    centroid = pts[idxs].mean(axis=0)
    idxs.sort(key=lambda i: (math.atan2(pts[i][1] - centroid[1], pts[i][0] - centroid[0]), i))
    start = min(range(len(idxs)), key=lambda j: (pts[idxs[j]][1], pts[idxs[j]][0]))
    idxs = idxs[start:] + idxs[:start]
    return ConvexPolygon(pts[idxs], tuple(idxs))


def polygon_area(poly: ConvexPolygon) -> float:
    """Shoelace area; degenerate polygons have area 0."""
    if poly.is_degenerate:
        return 0.0
    v = poly.vertices
    x, y = v[:, 0], v[:, 1]
    return abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))) / 2.0


def _clip_edge(subject: list[np.ndarray], c1: np.ndarray, c2: np.ndarray, eps: float) -> list[np.ndarray]:
    out: list[np.ndarray] = []
    if not subject:
        return out

    def inside(p: np.ndarray) -> bool:
        return (c2[0] - c1[0]) * (p[1] - c1[1]) - (c2[1] - c1[1]) * (p[0] - c1[0]) >= -eps

    def intersection(s: np.ndarray, p: np.ndarray) -> np.ndarray:
        dc = c1 - c2
        dp = s - p
        denom = dc[0] * dp[1] - dc[1] * dp[0]
        if denom == 0.0:
            return p
        n1 = c1[0] * c2[1] - c1[1] * c2[0]
        n2 = s[0] * p[1] - s[1] * p[0]
        return np.array(
            [(n1 * dp[0] - n2 * dc[0]) / denom, (n1 * dp[1] - n2 * dc[1]) / denom]
        )

    s = subject[-1]
    for p in subject:
        if inside(p):
            if not inside(s):
                out.append(intersection(s, p))
            out.append(p)
        elif inside(s):
            out.append(intersection(s, p))
        s = p
    return out


def polygon_intersection_area(a: ConvexPolygon, b: ConvexPolygon) -> float:
    """Area of the intersection of two convex polygons (Sutherland-Hodgman).

    Any degenerate input gives 0.
    """
    if a.is_degenerate or b.is_degenerate:
        return 0.0
    scale = max(_coord_scale(a.vertices), _coord_scale(b.vertices))
    eps = COLLINEAR_EPS * scale * scale
    subject = [v.copy() for v in a.vertices]
    nb = len(b.vertices)
    for i in range(nb):
        subject = _clip_edge(subject, b.vertices[i], b.vertices[(i + 1) % nb], eps)
        if not subject:
            return 0.0
    if len(subject) < 3:
        return 0.0
    arr = np.array(subject)
    x, y = arr[:, 0], arr[:, 1]
    return abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))) / 2.0


@dataclass(frozen=True)
class Pca2D:
    """Top-2 principal directions of a row matrix.

    ``components`` is (2, d); rank-deficient data leaves the missing
    component rows (and the matching projection columns) at zero.
    """

    mean: np.ndarray
    components: np.ndarray
    projected: np.ndarray
    rank: int

    def transform(self, rows: np.ndarray) -> np.ndarray:
        rows = np.asarray(rows, dtype=np.float64)
        return (rows - self.mean) @ self.components.T


def _power_iteration(mat: np.ndarray, tol: float, max_iter: int) -> tuple[float, np.ndarray]:
    d = mat.shape[0]
    # Fixed generic start vector; no randomness so results are reproducible.
    v = np.cos(np.arange(d, dtype=np.float64) * 0.9) + 1.1
    v /= np.linalg.norm(v)
    for _ in range(max_iter):
        w = mat @ v
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0, v
        w /= nw
        if np.linalg.norm(w - v) < tol:
            v = w
            break
        v = w
    return float(v @ mat @ v), v


def _canonical_sign(v: np.ndarray) -> np.ndarray:
    pivot = int(np.argmax(np.abs(v)))
    return -v if v[pivot] < 0 else v


def pca2d(rows: np.ndarray) -> Pca2D:
    """Project rows onto the top-2 eigenvectors of their sample covariance.

    Power iteration with deflation (tolerance 1e-10, at most 1000
    iterations); each eigenvector is flipped so its largest-magnitude
    entry is positive.
    """
    X = np.asarray(rows, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 2:
        raise ValidationError("pca2d expects an N x d matrix with N >= 1, d >= 2")
    n, d = X.shape
    mean = X.mean(axis=0)
    Xc = X - mean
    components = np.zeros((2, d), dtype=np.float64)
    rank = 0
    if n >= 2:
        cov = (Xc.T @ Xc) / (n - 1)
        trace = float(np.trace(cov))
        if trace > 0.0:
            lam1, v1 = _power_iteration(cov, PCA_TOL, PCA_MAX_ITER)
            if lam1 > 1e-12 * trace:
                components[0] = _canonical_sign(v1)
                rank = 1
                deflated = cov - lam1 * np.outer(v1, v1)
                lam2, v2 = _power_iteration(deflated, PCA_TOL, PCA_MAX_ITER)
                if lam2 > 1e-12 * max(lam1, trace):
                    # Re-orthogonalize against the first direction before accepting.
                    v2 = v2 - (v2 @ components[0]) * components[0]
                    nv2 = np.linalg.norm(v2)
                    if nv2 > 0.0:
                        components[1] = _canonical_sign(v2 / nv2)
                        rank = 2
    projected = Xc @ components.T
    return Pca2D(mean=mean, components=components, projected=projected, rank=rank)


def pearson(u: np.ndarray | list, v: np.ndarray | list) -> float:
    """Sample Pearson correlation; 0 when either side has zero variance."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape or u.ndim != 1:
        raise ValidationError("pearson expects two equal-length vectors")
    if u.size < 2:
        raise ValidationError("pearson needs vectors of length >= 2")
    if np.ptp(u) == 0.0 or np.ptp(v) == 0.0:
        return 0.0
    uc = u - u.mean()
    vc = v - v.mean()
    nu = float(np.dot(uc, uc))
    nv = float(np.dot(vc, vc))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    r = float(np.dot(uc, vc)) / math.sqrt(nu * nv)
    return min(1.0, max(-1.0, r))


def pearson_matrix(rows: np.ndarray) -> np.ndarray:
    """Pairwise Pearson correlations between rows; degenerate rows give 0."""
    X = np.asarray(rows, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] < 2:
        raise ValidationError("pearson_matrix expects an N x d matrix with d >= 2")
    Xc = X - X.mean(axis=1, keepdims=True)
    norms = np.sqrt((Xc * Xc).sum(axis=1))
    constant = np.ptp(X, axis=1) == 0.0
    safe = np.where((norms == 0.0) | constant, 1.0, norms)
    R = (Xc @ Xc.T) / np.outer(safe, safe)
    R[constant, :] = 0.0
    R[:, constant] = 0.0
    return np.clip(R, -1.0, 1.0)
