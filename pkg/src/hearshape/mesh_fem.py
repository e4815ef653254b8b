"""Piecewise-linear finite elements for the Dirichlet Laplacian on polygons.

Meshes start from a fan (convex polygons) or an ear-clipping triangulation
and are refined uniformly by edge midpoints, so the finite element spaces
are nested and eigenvalues decrease monotonically with the level.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
from scipy.sparse.linalg import eigsh

from .exact_spectra import Spectrum
from .polygon import GEOM_TOL, Polygon

DENSE_LIMIT = 3000


class MeshError(RuntimeError):
    pass


class EigenSolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class Mesh:
    nodes: np.ndarray
    triangles: np.ndarray
    boundary: np.ndarray  # boolean mask over nodes
    refinement_level: int = 0
    parent: Polygon | None = field(default=None, repr=False, compare=False)

    @property
    def boundary_nodes(self) -> np.ndarray:
        return np.flatnonzero(self.boundary)

    @property
    def interior_nodes(self) -> np.ndarray:
        return np.flatnonzero(~self.boundary)

    def areas(self) -> np.ndarray:
        p = self.nodes[self.triangles]
        d1 = p[:, 1] - p[:, 0]
        d2 = p[:, 2] - p[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    def max_diameter(self) -> float:
        p = self.nodes[self.triangles]
        lens = [np.hypot(*(p[:, i] - p[:, (i + 1) % 3]).T) for i in range(3)]
        return float(np.max(lens))

    def refined(self) -> "Mesh":
        return _refine(self)

    def transformed(self, matrix, shift=(0.0, 0.0)) -> "Mesh":
        """Apply ``x -> matrix @ x + shift``; orientation is fixed up for reflections."""
        matrix = np.asarray(matrix, dtype=float)
        nodes = self.nodes @ matrix.T + np.asarray(shift, float)
        tris = self.triangles if np.linalg.det(matrix) > 0 else self.triangles[:, [0, 2, 1]]
        return Mesh(nodes, tris.copy(), self.boundary.copy(), self.refinement_level, None)

    def save(self, path) -> None:
        """Text export: ``x y`` node lines followed by 0-based ``i j k`` triangle lines."""
        lines = [f"{x!r} {y!r}" for x, y in self.nodes.tolist()]
        lines += [f"{i} {j} {k}" for i, j, k in self.triangles.tolist()]
        Path(path).write_text("\n".join(lines) + "\n")

    @classmethod
    def load(cls, path) -> "Mesh":
        nodes, tris = [], []
        for line in Path(path).read_text().splitlines():
            tok = line.split()
            if len(tok) == 2:
                nodes.append([float(t) for t in tok])
            elif len(tok) == 3:
                tris.append([int(t) for t in tok])
            elif tok:
                raise MeshError(f"bad mesh line: {line!r}")
        tris = np.array(tris, dtype=np.int64)
        return cls(np.array(nodes), tris, _boundary_mask(len(nodes), tris))


def _edges(triangles: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Unique sorted edges and, for each triangle, the ids of edges (01, 12, 20)."""
    e = np.concatenate([triangles[:, [0, 1]], triangles[:, [1, 2]], triangles[:, [2, 0]]])
    e.sort(axis=1)
    uniq, inv = np.unique(e, axis=0, return_inverse=True)
    return uniq, inv.reshape(3, -1).T


def _boundary_mask(n_nodes: int, triangles: np.ndarray) -> np.ndarray:
    uniq, ids = _edges(triangles)
    counts = np.bincount(ids.ravel(), minlength=len(uniq))
    mask = np.zeros(n_nodes, dtype=bool)
    mask[uniq[counts == 1].ravel()] = True
    return mask


def _refine(mesh: Mesh) -> Mesh:
    uniq, ids = _edges(mesh.triangles)
    n = len(mesh.nodes)
    mid = 0.5 * (mesh.nodes[uniq[:, 0]] + mesh.nodes[uniq[:, 1]])
    counts = np.bincount(ids.ravel(), minlength=len(uniq))
    nodes = np.vstack([mesh.nodes, mid])
    boundary = np.concatenate([mesh.boundary, counts == 1])
    a, b, c = mesh.triangles.T
    ab, bc, ca = (ids + n).T
    tris = np.concatenate([
        np.column_stack([a, ab, ca]),
        np.column_stack([ab, b, bc]),
        np.column_stack([ca, bc, c]),
        np.column_stack([ab, bc, ca]),
    ])
    return Mesh(nodes, tris, boundary, mesh.refinement_level + 1, mesh.parent)


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _in_triangle(p, a, b, c) -> bool:
    return _cross(a, b, p) >= -GEOM_TOL and _cross(b, c, p) >= -GEOM_TOL and _cross(c, a, p) >= -GEOM_TOL


def _min_angle(a, b, c) -> float:
    pts = np.array([a, b, c])
    ang = []
    for i in range(3):
        u = pts[(i + 1) % 3] - pts[i]
        v = pts[(i + 2) % 3] - pts[i]
        ang.append(np.arccos(np.clip(u @ v / np.linalg.norm(u) / np.linalg.norm(v), -1, 1)))
    return min(ang)


def ear_clip(p: Polygon) -> np.ndarray:
    """Ear-clipping triangulation of a simple polygon (vertex index triples).

    Among the valid ears the one with the largest minimum angle is cut
    first, which keeps the base mesh reasonably shaped and deterministic.
    """
    v = p.vertices
    idx = list(range(p.n))
    tris = []
    while len(idx) > 3:
        best, best_q = None, -1.0
        m = len(idx)
        for k in range(m):
            i0, i1, i2 = idx[k - 1], idx[k], idx[(k + 1) % m]
            if _cross(v[i0], v[i1], v[i2]) <= GEOM_TOL:
                continue
            if any(_in_triangle(v[j], v[i0], v[i1], v[i2]) for j in idx if j not in (i0, i1, i2)):
                continue
            q = _min_angle(v[i0], v[i1], v[i2])
            if q > best_q:
                best, best_q = k, q
        if best is None:
            raise MeshError("ear clipping found no ear; polygon is degenerate")
        tris.append((idx[best - 1], idx[best], idx[(best + 1) % len(idx)]))
        del idx[best]
    tris.append(tuple(idx))
    return np.array(tris, dtype=np.int64)


def triangulate(p: Polygon, level: int = 0) -> Mesh:
    """Fan from the centroid (convex) or ear clipping, then ``level`` uniform refinements."""
    if level < 0:
        raise ValueError("level must be >= 0")
    n = p.n
    if p.is_convex():
        nodes = np.vstack([p.vertices, p.centroid])
        tris = np.array([(i, (i + 1) % n, n) for i in range(n)], dtype=np.int64)
    else:
        nodes = p.vertices.copy()
        tris = ear_clip(p)
    mesh = Mesh(nodes, tris, _boundary_mask(len(nodes), tris), 0, p)
    for _ in range(level):
        mesh = _refine(mesh)
    return mesh


def assemble(mesh: Mesh) -> tuple[sp.csr_matrix, sp.csr_matrix]:
    """P1 stiffness and mass matrices over all nodes (exact element integrals)."""
    p = mesh.nodes[mesh.triangles]
    area = mesh.areas()
    if np.any(area <= 0):
        raise MeshError("mesh has non-positively oriented triangles")
    # edge opposite each vertex, rotated: grad(phi_i) = rot(p_{i+2} - p_{i+1}) / (2 area)
    e = np.stack([p[:, 2] - p[:, 1], p[:, 0] - p[:, 2], p[:, 1] - p[:, 0]], axis=1)
    kloc = np.einsum("tid,tjd->tij", e, e) / (4 * area)[:, None, None]
    mloc = (np.ones((3, 3)) + np.eye(3))[None] * (area / 12)[:, None, None]
    rows = np.repeat(mesh.triangles, 3, axis=1).ravel()
    cols = np.tile(mesh.triangles, (1, 3)).ravel()
    n = len(mesh.nodes)
    K = sp.coo_matrix((kloc.ravel(), (rows, cols)), shape=(n, n)).tocsr()
    M = sp.coo_matrix((mloc.ravel(), (rows, cols)), shape=(n, n)).tocsr()
    return K, M


def mesh_eigenvalues(mesh: Mesh, count: int) -> np.ndarray:
    """Lowest ``count`` eigenvalues of the Dirichlet problem on ``mesh``."""
    vals, _ = mesh_eigenpairs(mesh, count)
    return vals


def mesh_eigenpairs(mesh: Mesh, count: int) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and nodal eigenvectors (zero on the boundary), sorted."""
    if count < 1:
        raise ValueError("count must be >= 1")
    K, M = assemble(mesh)
    inner = mesh.interior_nodes
    if len(inner) < count:
        raise MeshError(f"only {len(inner)} interior nodes for {count} eigenvalues; raise the level")
    Ki = K[inner][:, inner]
    Mi = M[inner][:, inner]
    if len(inner) <= DENSE_LIMIT:
        vals, vecs = la.eigh(Ki.toarray(), Mi.toarray(), subset_by_index=[0, count - 1])
    else:
        v0 = np.ones(len(inner))
        try:
            vals, vecs = eigsh(Ki.tocsc(), k=count, M=Mi.tocsc(), sigma=0.0, which="LM", v0=v0, tol=1e-13)
        except Exception as exc:  # ArpackNoConvergence and friends
            raise EigenSolverError(str(exc)) from exc
        order = np.argsort(vals)
        vals, vecs = vals[order], vecs[:, order]
    full = np.zeros((len(mesh.nodes), count))
    full[inner] = vecs
    return np.asarray(vals), full


def rayleigh_quotient(mesh: Mesh, nodal_values) -> float:
    """Discrete Rayleigh quotient ``v'Kv / v'Mv`` of a function vanishing on the boundary."""
    v = np.asarray(nodal_values, dtype=float)
    if v.shape != (len(mesh.nodes),):
        raise ValueError("need one value per mesh node")
    scale = np.max(np.abs(v))
    if scale == 0:
        raise ValueError("the zero function has no Rayleigh quotient")
    if np.max(np.abs(v[mesh.boundary])) > 1e-12 * scale:
        raise ValueError("nodal values must vanish on boundary nodes")
    K, M = assemble(mesh)
    return float(v @ (K @ v) / (v @ (M @ v)))


@dataclass(frozen=True)
class FemResult:
    spectrum: Spectrum
    refinement_level: int
    extrapolated: bool
    history: dict  # level -> eigenvalue array

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.spectrum.eigenvalues


def dirichlet_eigenvalues(p: Polygon, count: int, level: int, extrapolate: bool = False) -> FemResult:
    """Lowest ``count`` Dirichlet eigenvalues of ``p`` by P1 finite elements.

    Plain values are upper bounds of the true eigenvalues. With
    ``extrapolate`` the result is ``(4 lam_level - lam_{level-1}) / 3``, which
    may undershoot. Error estimates are ``|lam_level - lam_{level-1}| / 3``
    (the O(h^2) Richardson correction); at level 0 the comparison level is 1.
    """
    if extrapolate and level < 1:
        raise ValueError("extrapolation needs level >= 1")
    coarse_level = level - 1 if level >= 1 else 1
    mesh = triangulate(p, min(level, coarse_level))
    first = mesh_eigenvalues(mesh, count)
    second = mesh_eigenvalues(mesh.refined(), count)
    hist = {min(level, coarse_level): first, min(level, coarse_level) + 1: second}
    lam = hist[level]
    err = np.abs(second - first) / 3
    if extrapolate:
        lam = (4 * hist[level] - hist[level - 1]) / 3
        # near-degenerate pairs can swap order after extrapolation
        order = np.argsort(lam, kind="stable")
        lam, err = lam[order], err[order]
    spec = Spectrum(lam, err, ("count", count), "fem",
                    meta={"level": level, "extrapolated": extrapolate})
    return FemResult(spec, level, extrapolate, hist)


def fundamental_gap(p: Polygon, level: int) -> float:
    """``lam_2 - lam_1`` from Richardson-extrapolated finite element values."""
    lam = dirichlet_eigenvalues(p, 2, level, extrapolate=True).eigenvalues
    return float(lam[1] - lam[0])
