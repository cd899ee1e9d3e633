"""Triangle-mesh container, topology checks, and deterministic file output.

Writers are atomic (temp file in the target directory, then rename) and
fully deterministic: fixed float formatting, no timestamps, sorted JSON
keys.  OBJ is ASCII with 17 significant digits; PLY is binary
little-endian with float64 vertex coordinates, so a round trip through
read_ply is bit-exact.
"""

from __future__ import annotations

import json
import os
import struct
import tempfile
from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass
class Mesh:
    """Vertices (n, 3) float64 and triangle faces (m, 3) int, 0-based."""

    vertices: np.ndarray
    faces: np.ndarray

    def __post_init__(self):
        self.vertices = np.ascontiguousarray(self.vertices, dtype=np.float64)
        self.faces = np.ascontiguousarray(self.faces, dtype=np.int64)
        if self.vertices.ndim != 2 or self.vertices.shape[1] != 3:
            raise DomainError("vertices must have shape (n, 3)")
        if self.faces.ndim != 2 or self.faces.shape[1] != 3:
            raise DomainError("faces must have shape (m, 3)")
        if self.faces.size and (self.faces.min() < 0
                                or self.faces.max() >= len(self.vertices)):
            raise DomainError("face indices out of range")

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_faces(self) -> int:
        return len(self.faces)


def undirected_edges(mesh: Mesh) -> np.ndarray:
    """Unique undirected edges as a sorted (k, 2) array."""
    e = np.concatenate([mesh.faces[:, [0, 1]], mesh.faces[:, [1, 2]],
                        mesh.faces[:, [2, 0]]])
    e = np.sort(e, axis=1)
    return np.unique(e, axis=0)


def euler_characteristic(mesh: Mesh) -> int:
    """V - E + F; 0 for an annulus with open boundary rings."""
    return mesh.n_vertices - len(undirected_edges(mesh)) + mesh.n_faces


def boundary_edge_count(mesh: Mesh) -> int:
    """Edges used by exactly one face."""
    e = np.concatenate([mesh.faces[:, [0, 1]], mesh.faces[:, [1, 2]],
                        mesh.faces[:, [2, 0]]])
    e = np.sort(e, axis=1)
    _, counts = np.unique(e, axis=0, return_counts=True)
    return int(np.sum(counts == 1))


# -- atomic, deterministic writers -------------------------------------------

def _atomic_write_bytes(path, data: bytes):
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_obj(mesh: Mesh, path):
    lines = []
    for x, y, z in mesh.vertices:
        lines.append(f"v {x:.17g} {y:.17g} {z:.17g}")
    for a, b, c in mesh.faces:
        lines.append(f"f {a + 1} {b + 1} {c + 1}")
    _atomic_write_bytes(path, ("\n".join(lines) + "\n").encode())


def read_obj(path) -> Mesh:
    verts, faces = [], []
    with open(path) as fh:
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "v":
                verts.append([float(t) for t in parts[1:4]])
            elif parts[0] == "f":
                faces.append([int(t.split("/")[0]) - 1 for t in parts[1:4]])
    return Mesh(np.array(verts, dtype=np.float64).reshape(-1, 3),
                np.array(faces, dtype=np.int64).reshape(-1, 3))


_PLY_HEADER = """ply
format binary_little_endian 1.0
element vertex {nv}
property double x
property double y
property double z
element face {nf}
property list uchar int32 vertex_indices
end_header
"""


def write_ply(mesh: Mesh, path):
    buf = bytearray()
    buf += _PLY_HEADER.format(nv=mesh.n_vertices, nf=mesh.n_faces).encode()
    buf += mesh.vertices.astype("<f8").tobytes()
    faces = mesh.faces.astype("<i4")
    pack = struct.Struct("<Biii").pack
    for a, b, c in faces:
        buf += pack(3, a, b, c)
    _atomic_write_bytes(path, bytes(buf))


def read_ply(path) -> Mesh:
    with open(path, "rb") as fh:
        data = fh.read()
    end = data.index(b"end_header\n") + len(b"end_header\n")
    header = data[:end].decode()
    nv = nf = 0
    for line in header.splitlines():
        parts = line.split()
        if parts[:2] == ["element", "vertex"]:
            nv = int(parts[2])
        elif parts[:2] == ["element", "face"]:
            nf = int(parts[2])
    verts = np.frombuffer(data, dtype="<f8", count=3 * nv, offset=end)
    verts = verts.reshape(nv, 3)
    off = end + 24 * nv
    faces = np.empty((nf, 3), dtype=np.int64)
    unpack = struct.Struct("<Biii").unpack_from
    for k in range(nf):
        n, a, b, c = unpack(data, off + 13 * k)
        if n != 3:
            raise DomainError("only triangle PLY faces are supported")
        faces[k] = (a, b, c)
    return Mesh(verts.copy(), faces)


def write_mesh(mesh: Mesh, fmt: str, path):
    """Dispatch on format ('obj' or 'ply')."""
    if mesh.n_vertices == 0:
        raise DomainError("refusing to write an empty mesh")
    if fmt == "obj":
        write_obj(mesh, path)
    elif fmt == "ply":
        write_ply(mesh, path)
    else:
        raise DomainError(f"unknown mesh format {fmt!r}")


def write_csv(path, header, rows):
    """CSV with repr-formatted floats (shortest round-trip, deterministic)."""
    def fmt(x):
        return repr(float(x)) if isinstance(x, (float, np.floating)) else str(x)

    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(x) for x in row))
    _atomic_write_bytes(path, ("\n".join(lines) + "\n").encode())


def write_json(path, obj):
    _atomic_write_bytes(path, (json.dumps(obj, indent=2, sort_keys=True)
                               + "\n").encode())


def grid_mesh_faces(nu: int, nv: int, wrap_u: bool) -> np.ndarray:
    """Triangulated faces of an nu x nv vertex grid, vertex id = j * nu + i.

    With wrap_u the last column of cells connects ring nu-1 back to ring 0,
    producing a cylinder (Euler characteristic 0 with both v-ends open).
    """
    cols = nu if wrap_u else nu - 1
    i = np.arange(cols)
    j = np.arange(nv - 1)
    ii, jj = np.meshgrid(i, j, indexing="ij")
    i1 = (ii + 1) % nu if wrap_u else ii + 1
    v00 = jj * nu + ii
    v10 = jj * nu + i1
    v01 = (jj + 1) * nu + ii
    v11 = (jj + 1) * nu + i1
    t1 = np.stack([v00, v10, v11], axis=-1).reshape(-1, 3)
    t2 = np.stack([v00, v11, v01], axis=-1).reshape(-1, 3)
    return np.concatenate([t1, t2])
