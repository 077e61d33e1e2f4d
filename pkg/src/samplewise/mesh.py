"""Structured triangle meshes on the unit square, with optional circular cutout."""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class TriangleMesh:
    nodes: np.ndarray     # (n_nodes, 2)
    elements: np.ndarray  # (n_elements, 3) node indices, ccw

    @property
    def n_nodes(self):
        return self.nodes.shape[0]

    @property
    def n_elements(self):
        return self.elements.shape[0]

    def centroids(self):
        return self.nodes[self.elements].mean(axis=1)

    def areas(self):
        p = self.nodes[self.elements]
        d1 = p[:, 1] - p[:, 0]
        d2 = p[:, 2] - p[:, 0]
        return 0.5 * np.abs(d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])


def rect_mesh(nx, ny, hole_center=None, hole_radius=0.0):
    """nx-by-ny cell triangulation of [0,1]^2, two triangles per cell.

    A positive hole_radius removes every element whose centroid falls inside
    the disk and drops nodes that no remaining element references.
    """
    if nx < 1 or ny < 1:
        raise ValueError("need at least one cell per direction")
    xs = np.linspace(0.0, 1.0, nx + 1)
    ys = np.linspace(0.0, 1.0, ny + 1)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    nodes = np.column_stack([gx.ravel(), gy.ravel()])

    def nid(i, j):
        return i * (ny + 1) + j

    tris = []
    for i in range(nx):
        for j in range(ny):
            n00, n10 = nid(i, j), nid(i + 1, j)
            n01, n11 = nid(i, j + 1), nid(i + 1, j + 1)
            tris.append((n00, n10, n11))
            tris.append((n00, n11, n01))
    elements = np.array(tris, dtype=np.int64)

    if hole_radius > 0.0:
        center = np.array([0.5, 0.5]) if hole_center is None else np.asarray(hole_center)
        cent = nodes[elements].mean(axis=1)
        keep = np.linalg.norm(cent - center, axis=1) > hole_radius
        elements = elements[keep]
        used = np.unique(elements)
        remap = -np.ones(nodes.shape[0], dtype=np.int64)
        remap[used] = np.arange(used.size)
        nodes = nodes[used]
        elements = remap[elements]

    return TriangleMesh(nodes=nodes, elements=elements)


def nodes_where(mesh, predicate):
    """Indices of nodes whose (x, y) satisfies the vectorized predicate."""
    mask = predicate(mesh.nodes[:, 0], mesh.nodes[:, 1])
    return np.flatnonzero(mask)


def nearest_node(mesh, point):
    return int(np.argmin(np.linalg.norm(mesh.nodes - np.asarray(point), axis=1)))


def save_mesh(mesh, path):
    """Plain-text mesh: 'id x y' node lines, then 'id n1 n2 n3' element lines."""
    with open(path, "w") as fh:
        fh.write(f"# nodes {mesh.n_nodes}\n")
        for i, (x, y) in enumerate(mesh.nodes):
            fh.write(f"{i} {float(x)!r} {float(y)!r}\n")
        fh.write(f"# elements {mesh.n_elements}\n")
        for i, (a, b, c) in enumerate(mesh.elements):
            fh.write(f"{i} {a} {b} {c}\n")


def load_mesh(path):
    nodes, elements = [], []
    section = None
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                parts = line[1:].split()
                if parts and parts[0] in ("nodes", "elements"):
                    section = parts[0]
                continue
            parts = line.split()
            if section == "nodes":
                nodes.append((float(parts[1]), float(parts[2])))
            elif section == "elements":
                elements.append(tuple(int(p) for p in parts[1:4]))
            else:
                raise ValueError("mesh file must declare a '# nodes' section first")
    if not nodes or not elements:
        raise ValueError("mesh file missing nodes or elements")
    return TriangleMesh(
        nodes=np.array(nodes, dtype=float), elements=np.array(elements, dtype=np.int64)
    )
