#!/usr/bin/env python3
"""Writes the primitive object meshes under assets/objects/.

Every mesh is closed, consistently wound (counter-clockwise seen from
outside) and centered so that its bounding box center is the origin.
Units are meters.
"""
import math
import os
import sys

import numpy as np

OUT = os.path.join(os.path.dirname(__file__), "..", "assets", "objects")


def write_obj(name, verts, faces, comment):
    verts = np.asarray(verts, dtype=float)
    lo, hi = verts.min(axis=0), verts.max(axis=0)
    verts = verts - 0.5 * (lo + hi)
    path = os.path.join(OUT, name + ".obj")
    with open(path, "w") as f:
        f.write(f"# {comment}\n")
        for v in verts:
            f.write("v {:.9f} {:.9f} {:.9f}\n".format(*v))
        for a, b, c in faces:
            f.write(f"f {a + 1} {b + 1} {c + 1}\n")
    print(f"{path}: {len(verts)} vertices, {len(faces)} faces")


def icosphere(radius, levels):
    t = (1.0 + math.sqrt(5.0)) / 2.0
    verts = [(-1, t, 0), (1, t, 0), (-1, -t, 0), (1, -t, 0),
             (0, -1, t), (0, 1, t), (0, -1, -t), (0, 1, -t),
             (t, 0, -1), (t, 0, 1), (-t, 0, -1), (-t, 0, 1)]
    verts = [np.array(v, dtype=float) / np.linalg.norm(v) for v in verts]
    faces = [(0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
             (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
             (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
             (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1)]
    for _ in range(levels):
        cache = {}

        def mid(a, b):
            key = (min(a, b), max(a, b))
            if key not in cache:
                m = verts[a] + verts[b]
                verts.append(m / np.linalg.norm(m))
                cache[key] = len(verts) - 1
            return cache[key]

        nf = []
        for a, b, c in faces:
            ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
            nf += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = nf
    return [radius * v for v in verts], faces


def box(sx, sy, sz):
    verts = [(x * sx / 2, y * sy / 2, z * sz / 2)
             for x in (-1, 1) for y in (-1, 1) for z in (-1, 1)]
    # index = 4*ix + 2*iy + iz
    quads = [(0, 1, 3, 2), (4, 6, 7, 5),   # -x, +x
             (0, 4, 5, 1), (2, 3, 7, 6),   # -y, +y
             (0, 2, 6, 4), (1, 5, 7, 3)]   # -z, +z
    faces = []
    for a, b, c, d in quads:
        faces += [(a, b, c), (a, c, d)]
    return verts, faces


def revolve(profile, segments):
    """Revolves an (r, z) polyline around the z axis.

    The profile runs from the bottom pole (r=0) to the top pole (r=0),
    counter-clockwise in the (r, z) half plane so that face normals point
    outward.
    """
    verts = []
    rings = []
    for r, z in profile:
        if r == 0.0:
            verts.append((0.0, 0.0, z))
            rings.append([len(verts) - 1] * segments)
        else:
            ring = []
            for k in range(segments):
                a = 2 * math.pi * k / segments
                verts.append((r * math.cos(a), r * math.sin(a), z))
                ring.append(len(verts) - 1)
            rings.append(ring)
    faces = []
    for i in range(len(rings) - 1):
        lo, hi = rings[i], rings[i + 1]
        for k in range(segments):
            k1 = (k + 1) % segments
            a, b, c, d = lo[k], lo[k1], hi[k1], hi[k]
            if a == b:          # bottom pole
                faces.append((a, c, d))
            elif c == d:        # top pole
                faces.append((a, b, c))
            else:
                faces += [(a, b, c), (a, c, d)]
    return verts, faces


def torus(major, minor, seg_major, seg_minor):
    verts = []
    for i in range(seg_major):
        u = 2 * math.pi * i / seg_major
        for j in range(seg_minor):
            v = 2 * math.pi * j / seg_minor
            r = major + minor * math.cos(v)
            verts.append((r * math.cos(u), r * math.sin(u), minor * math.sin(v)))
    faces = []
    for i in range(seg_major):
        i1 = (i + 1) % seg_major
        for j in range(seg_minor):
            j1 = (j + 1) % seg_minor
            a, b = i * seg_minor + j, i1 * seg_minor + j
            c, d = i1 * seg_minor + j1, i * seg_minor + j1
            faces += [(a, b, c), (a, c, d)]
    return verts, faces


def main():
    os.makedirs(OUT, exist_ok=True)
    v, f = icosphere(0.05, 4)
    write_obj("sphere", v, f, "icosphere radius 0.05 m, 4 subdivisions")
    v, f = box(0.08, 0.08, 0.08)
    write_obj("box", v, f, "cube with 0.08 m edges")
    v, f = box(0.12, 0.08, 0.002)
    write_obj("plate", v, f, "thin plate 0.12 x 0.08 x 0.002 m")
    v, f = revolve([(0.0, 0.0), (0.035, 0.0), (0.035, 0.12), (0.0, 0.12)], 48)
    write_obj("cylinder", v, f, "cylinder radius 0.035 m, height 0.12 m")
    v, f = revolve([(0.0, 0.0), (0.04, 0.0), (0.04, 0.09), (0.035, 0.09),
                    (0.035, 0.006), (0.0, 0.006)], 48)
    write_obj("mug", v, f, "cup: outer radius 0.04 m, wall 0.005 m, height 0.09 m")
    v, f = torus(0.05, 0.015, 48, 24)
    write_obj("torus", v, f, "torus major radius 0.05 m, tube radius 0.015 m")


if __name__ == "__main__":
    sys.exit(main())
