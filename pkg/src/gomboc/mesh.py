"""UV-sphere tessellation of a shape and STL / OBJ writers.

Vertex order is fixed: north pole, then the interior latitude rings in
increasing theta (each ring in increasing phi), then the south pole.
Triangles are counter-clockwise seen from outside.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull

from gomboc.errors import MeshIOError, ShapeError
from gomboc.surface import ShapeSpec, cartesian_point

STL_RECORD = np.dtype([
    ("normal", "<f4", (3,)),
    ("v0", "<f4", (3,)),
    ("v1", "<f4", (3,)),
    ("v2", "<f4", (3,)),
    ("attr", "<u2"),
])


@dataclass(frozen=True)
class TriangleMesh:
    vertices: np.ndarray
    triangles: np.ndarray
    shape: ShapeSpec | None = None
    grid: tuple | None = None

    @property
    def provenance(self) -> str:
        if self.shape is None:
            return "gomboc mesh"
        s = self.shape
        grid = "?x?" if self.grid is None else f"{self.grid[0]}x{self.grid[1]}"
        return f"gomboc beta={s.beta:.12g} phase={s.phase.name} r0={s.scale_r0:.12g} grid={grid}"

    def corners(self):
        v = self.vertices[self.triangles]
        return v[:, 0], v[:, 1], v[:, 2]

    def face_normals(self, unit: bool = True):
        a, b, c = self.corners()
        n = np.cross(b - a, c - a)
        if unit:
            n = n / np.linalg.norm(n, axis=1, keepdims=True)
        return n

    def areas(self):
        return 0.5 * np.linalg.norm(self.face_normals(unit=False), axis=1)

    def volume(self) -> float:
        """Signed volume by the divergence theorem."""
        a, b, c = self.corners()
        return float(np.sum(np.einsum("ij,ij->i", a, np.cross(b, c)))) / 6.0


def tessellate(shape: ShapeSpec, n_theta: int, n_phi: int) -> TriangleMesh:
    """(n_theta - 1) latitude rings of n_phi vertices plus two pole vertices.

    Produces 2 * n_phi * (n_theta - 1) triangles.  Ring vertices sit at
    theta_k = k pi / n_theta, phi_j = 2 pi j / n_phi.
    """
    if n_theta < 3 or n_phi < 3:
        raise ShapeError(f"tessellation needs n_theta >= 3 and n_phi >= 3, got {n_theta}x{n_phi}")
    theta = np.arange(1, n_theta) * (math.pi / n_theta)
    phi = np.arange(n_phi) * (2.0 * math.pi / n_phi)
    t, p = np.meshgrid(theta, phi, indexing="ij")
    rings = cartesian_point(shape, t, p).reshape(-1, 3)
    north = cartesian_point(shape, 0.0, 0.0)
    south = cartesian_point(shape, math.pi, 0.0)
    vertices = np.vstack([north, rings, south]) * shape.scale_r0

    n_rings = n_theta - 1
    j = np.arange(n_phi)
    jn = (j + 1) % n_phi
    south_idx = 1 + n_rings * n_phi
    tris = [np.stack([np.zeros(n_phi, dtype=np.int64), 1 + j, 1 + jn], axis=1)]
    for k in range(n_rings - 1):
        a = 1 + k * n_phi + j
        b = 1 + k * n_phi + jn
        c = 1 + (k + 1) * n_phi + j
        d = 1 + (k + 1) * n_phi + jn
        tris.append(np.stack([a, c, d], axis=1))
        tris.append(np.stack([a, d, b], axis=1))
    last = 1 + (n_rings - 1) * n_phi
    tris.append(np.stack([np.full(n_phi, south_idx), last + jn, last + j], axis=1))
    return TriangleMesh(vertices, np.vstack(tris).astype(np.int64), shape, (n_theta, n_phi))


def edge_use_counts(mesh: TriangleMesh):
    """Histogram {uses: number of undirected edges} over all edges."""
    t = mesh.triangles
    e = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
    e.sort(axis=1)
    _, counts = np.unique(e, axis=0, return_counts=True)
    uses, hist = np.unique(counts, return_counts=True)
    return dict(zip(uses.tolist(), hist.tolist()))


def is_watertight(mesh: TriangleMesh) -> bool:
    """Every undirected edge is shared by exactly two triangles, with opposite directions."""
    if edge_use_counts(mesh) != {2: 3 * len(mesh.triangles) // 2}:
        return False
    t = mesh.triangles
    directed = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
    return len(np.unique(directed, axis=0)) == len(directed)


def is_outward(mesh: TriangleMesh) -> bool:
    a, b, c = mesh.corners()
    centroid = (a + b + c) / 3.0
    return bool(np.all(np.einsum("ij,ij->i", centroid, mesh.face_normals(unit=False)) > 0.0))


def min_triangle_area(mesh: TriangleMesh) -> float:
    return float(mesh.areas().min())


def hull_deficit(mesh: TriangleMesh) -> float:
    """Largest distance of any vertex inside the convex hull of all vertices.

    Zero (up to round-off) when every vertex is on the hull.
    """
    hull = ConvexHull(mesh.vertices)
    on = np.zeros(len(mesh.vertices), dtype=bool)
    on[hull.vertices] = True
    worst = 0.0
    if len(hull.coplanar):
        idx, facet = hull.coplanar[:, 0], hull.coplanar[:, 1]
        eq = hull.equations[facet]
        d = np.einsum("ij,ij->i", mesh.vertices[idx], eq[:, :3]) + eq[:, 3]
        worst = max(worst, float(np.max(-d)))
        on[idx] = True
    if not on.all():
        # interior points are dropped by qhull; measure them against all facets
        inner = mesh.vertices[~on]
        eq = hull.equations
        for chunk in np.array_split(inner, max(1, len(inner) // 256)):
            d = chunk @ eq[:, :3].T + eq[:, 3]
            worst = max(worst, float(np.max(-d.max(axis=1))))
    return worst


def on_convex_hull(mesh: TriangleMesh, tol: float = 1e-9) -> bool:
    return hull_deficit(mesh) <= tol


def _open(path, mode):
    if not path:
        raise MeshIOError(f"cannot open mesh file: empty path {path!r}")
    try:
        return open(path, mode)
    except OSError as exc:
        raise MeshIOError(f"cannot open mesh file {os.fspath(path)!r}: {exc.strerror or exc}") from exc


def stl_records(mesh: TriangleMesh) -> np.ndarray:
    rec = np.zeros(len(mesh.triangles), dtype=STL_RECORD)
    a, b, c = mesh.corners()
    rec["normal"] = mesh.face_normals()
    rec["v0"], rec["v1"], rec["v2"] = a, b, c
    return rec


def write_stl(mesh: TriangleMesh, path, mode: str = "binary") -> None:
    """Write binary (little-endian, float32) or ASCII STL.

    Facet normals are recomputed from the vertex winding.
    """
    if mode not in ("binary", "ascii"):
        raise ValueError(f"unknown STL mode {mode!r}")
    rec = stl_records(mesh)
    name = mesh.provenance
    if mode == "binary":
        header = name.encode("ascii", "replace")[:80].ljust(80, b"\0")
        with _open(path, "wb") as f:
            try:
                f.write(header)
                f.write(np.uint32(len(rec)).astype("<u4").tobytes())
                f.write(rec.tobytes())
            except OSError as exc:
                raise MeshIOError(f"failed writing {os.fspath(path)!r}: {exc}") from exc
        return
    fmt = "{:.9e} {:.9e} {:.9e}"
    with _open(path, "w") as f:
        try:
            f.write(f"solid {name}\n")
            for r in rec:
                f.write(f"  facet normal {fmt.format(*r['normal'])}\n    outer loop\n")
                for key in ("v0", "v1", "v2"):
                    f.write(f"      vertex {fmt.format(*r[key])}\n")
                f.write("    endloop\n  endfacet\n")
            f.write(f"endsolid {name}\n")
        except OSError as exc:
            raise MeshIOError(f"failed writing {os.fspath(path)!r}: {exc}") from exc


def read_stl_binary(path):
    """Return (header, records) of a binary STL file."""
    with _open(path, "rb") as f:
        header = f.read(80)
        raw = f.read(4)
        if len(header) < 80 or len(raw) < 4:
            raise MeshIOError(f"truncated STL header in {os.fspath(path)!r}")
        count = int(np.frombuffer(raw, dtype="<u4")[0])
        body = f.read(count * STL_RECORD.itemsize)
    if len(body) != count * STL_RECORD.itemsize:
        raise MeshIOError(f"truncated STL file {os.fspath(path)!r}: expected {count} facets, "
                          f"got {len(body) / STL_RECORD.itemsize:.1f}")
    return header, np.frombuffer(body, dtype=STL_RECORD)


def read_stl_ascii(path):
    """Return an (n, 3, 3) array of facet vertices from an ASCII STL file."""
    with _open(path, "r") as f:
        verts = [list(map(float, line.split()[1:4])) for line in f if line.lstrip().startswith("vertex")]
    return np.asarray(verts).reshape(-1, 3, 3)


def write_obj(mesh: TriangleMesh, path) -> None:
    """Wavefront OBJ with 17 significant digits and 1-based faces."""
    with _open(path, "w") as f:
        try:
            f.write(f"# {mesh.provenance}\n")
            for v in mesh.vertices:
                f.write("v {:.17g} {:.17g} {:.17g}\n".format(*v))
            for t in mesh.triangles + 1:
                f.write("f {} {} {}\n".format(*t))
        except OSError as exc:
            raise MeshIOError(f"failed writing {os.fspath(path)!r}: {exc}") from exc


def read_obj(path) -> TriangleMesh:
    verts, faces = [], []
    with _open(path, "r") as f:
        for line in f:
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "v":
                verts.append([float(x) for x in parts[1:4]])
            elif parts[0] == "f":
                faces.append([int(x.split("/")[0]) - 1 for x in parts[1:4]])
    return TriangleMesh(np.asarray(verts), np.asarray(faces, dtype=np.int64))
