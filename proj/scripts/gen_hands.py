#!/usr/bin/env python3
"""Writes the shipped hand specs to assets/hands/*.json.

Frame convention for every palm link: +z is the palm front (grasping side),
+y the finger direction, +x lateral. The palm frame origin is shifted so the
whole hand at mid-range joint angles lies at z <= -3 mm; placing that origin
on the object's enclosing sphere therefore starts the hand collision-free.
Phalanx links extend along their local +y; positive flexion about local +x
curls them toward local +z, where the pad contact regions sit 1 mm proud of
the link surface.
"""

import json
import math
from pathlib import Path

import numpy as np
from scipy.spatial.transform import Rotation

SPACING = 0.005
PAD_LIFT = 0.001
CLEARANCE = 0.003
OUT = Path(__file__).resolve().parent.parent / "assets" / "hands"


def rpy_of(R):
    return [float(v) for v in Rotation.from_matrix(np.asarray(R, float)).as_euler("xyz")]


def frame(x_axis, y_axis):
    x = np.asarray(x_axis, float)
    y = np.asarray(y_axis, float)
    return np.column_stack([x, y, np.cross(x, y)])


def unit(v):
    v = np.asarray(v, float)
    return [float(c) for c in v / np.linalg.norm(v)]


class Hand:
    def __init__(self, name, palm_dims, synthesis_contacts):
        self.name = name
        self.links = []
        self.joints = []
        self.regions = []
        self.synthesis_contacts = synthesis_contacts
        # Palm box behind the front face z = 0.
        self.add_link("palm", [box(palm_dims, [0, 0, -palm_dims[2] / 2])])
        self.palm_dims = palm_dims

    def add_link(self, name, prims):
        self.links.append({"name": name, "primitives": prims})

    def add_joint(self, name, parent, child, xyz, R, axis, limits):
        self.joints.append({
            "name": name, "parent": parent, "child": child,
            "origin": {"xyz": [float(c) for c in xyz], "rpy": rpy_of(R)},
            "axis": unit(axis), "limits": [float(limits[0]), float(limits[1])],
        })

    def add_pad(self, link, length, radius, width, start=0.0):
        self.regions.append({
            "link": link,
            "origin": [-width / 2, start, radius + PAD_LIFT],
            "edge1": [width, 0.0, 0.0],
            "edge2": [0.0, length - start, 0.0],
        })

    def finger(self, prefix, base_xyz, base_R, lengths, radius, flex_limits,
               abduction=None, extra_root=None, pads=None):
        """Chain of capsule phalanges. `abduction` adds a joint about the
        base frame's z axis; `extra_root` = (axis, limits) adds another
        zero-length joint before it."""
        parent = "palm"
        xyz, R = base_xyz, base_R
        pre = []
        if extra_root is not None:
            pre.append(("meta", extra_root[0], extra_root[1]))
        if abduction is not None:
            pre.append(("abd", [0, 0, 1], abduction))
        for tag, axis, limits in pre:
            child = f"{prefix}_{tag}"
            self.add_link(child, [sphere(radius * 0.9, [0, 0, 0])])
            self.add_joint(f"{prefix}_{tag}", parent, child, xyz, R, axis, limits)
            parent, xyz, R = child, [0, 0, 0], np.eye(3)
        pads = pads if pads is not None else list(range(len(lengths)))
        for k, length in enumerate(lengths):
            child = f"{prefix}_{k}"
            self.add_link(child, [capsule(radius, length, [0, length / 2, 0])])
            self.add_joint(f"{prefix}_flex{k}", parent, child, xyz, R, [1, 0, 0], flex_limits[k])
            if k in pads:
                self.add_pad(child, length, radius, radius, start=0.2 * length)
            parent, xyz, R = child, [0, length, 0], np.eye(3)

    def palm_pad(self, x0, x1, y0, y1):
        self.regions.append({
            "link": "palm", "origin": [x0, y0, PAD_LIFT],
            "edge1": [x1 - x0, 0.0, 0.0], "edge2": [0.0, y1 - y0, 0.0],
        })

    def finish(self):
        dz = -(max_front_z(self) + CLEARANCE)
        for prim in self.links[0]["primitives"]:
            prim["transform"]["xyz"][2] += dz
        for j in self.joints:
            if j["parent"] == "palm":
                j["origin"]["xyz"][2] += dz
        for r in self.regions:
            if r["link"] == "palm":
                r["origin"][2] += dz
        return {
            "name": self.name,
            "palm_link": "palm",
            "palm_backward_direction": [0.0, 0.0, -1.0],
            "sample_spacing": SPACING,
            "synthesis_contacts": self.synthesis_contacts,
            "links": self.links,
            "joints": self.joints,
            "contact_regions": self.regions,
        }


def sphere(r, xyz):
    return {"kind": "sphere", "transform": {"xyz": list(map(float, xyz)), "rpy": [0.0, 0.0, 0.0]},
            "dims": [float(r)]}


def capsule(r, length, xyz):
    # Segment along the local z axis, turned onto +y.
    return {"kind": "capsule", "transform": {"xyz": list(map(float, xyz)),
                                             "rpy": [-math.pi / 2, 0.0, 0.0]},
            "dims": [float(r), float(length)]}


def box(dims, xyz):
    return {"kind": "box", "transform": {"xyz": list(map(float, xyz)), "rpy": [0.0, 0.0, 0.0]},
            "dims": list(map(float, dims))}


def link_transforms(hand):
    """Forward kinematics at mid-range joint angles (palm = identity)."""
    T = {"palm": np.eye(4)}
    pending = list(hand.joints)
    while pending:
        rest = []
        for j in pending:
            if j["parent"] not in T:
                rest.append(j)
                continue
            A = np.eye(4)
            A[:3, :3] = Rotation.from_euler("xyz", j["origin"]["rpy"]).as_matrix()
            A[:3, 3] = j["origin"]["xyz"]
            q = 0.5 * (j["limits"][0] + j["limits"][1])
            Q = np.eye(4)
            Q[:3, :3] = Rotation.from_rotvec(np.asarray(j["axis"]) * q).as_matrix()
            T[j["child"]] = T[j["parent"]] @ A @ Q
        pending = rest
    return T


def max_front_z(hand):
    T = link_transforms(hand)
    zmax = -1e9
    for link in hand.links:
        if link["name"] == "palm":
            continue  # the palm front face is z = 0 by construction
        for p in link["primitives"]:
            P = np.eye(4)
            P[:3, :3] = Rotation.from_euler("xyz", p["transform"]["rpy"]).as_matrix()
            P[:3, 3] = p["transform"]["xyz"]
            W = T[link["name"]] @ P
            if p["kind"] == "sphere":
                zmax = max(zmax, W[2, 3] + p["dims"][0])
            elif p["kind"] == "capsule":
                for s in (-0.5, 0.5):
                    end = W @ np.array([0, 0, s * p["dims"][1], 1.0])
                    zmax = max(zmax, end[2] + p["dims"][0])
            else:
                h = np.array(p["dims"]) / 2
                for sx in (-1, 1):
                    for sy in (-1, 1):
                        for sz in (-1, 1):
                            zmax = max(zmax, (W @ np.array([sx * h[0], sy * h[1], sz * h[2], 1]))[2])
    return max(zmax, 0.0)


# Finger frames used below (columns: local x, y, z).
UP = frame([1, 0, 0], [0, 1, 0])                 # extends +y, pad faces +z
FORWARD_PAD_DOWN = frame([1, 0, 0], [0, 0, 1])   # extends +z, pad faces -y
FORWARD_PAD_UP = frame([-1, 0, 0], [0, 0, 1])    # extends +z, pad faces +y
FORWARD_PAD_LEFT = frame([0, -1, 0], [0, 0, 1])  # extends +z, pad faces -x
FORWARD_PAD_RIGHT = frame([0, 1, 0], [0, 0, 1])  # extends +z, pad faces +x


def gripper2():
    h = Hand("gripper2", [0.15, 0.04, 0.025], 2)
    for side, R in (("r", FORWARD_PAD_LEFT), ("l", FORWARD_PAD_RIGHT)):
        x = 0.065 if side == "r" else -0.065
        h.finger(f"{side}f", [x, 0, 0], R, [0.05, 0.045], 0.009,
                 [(-0.6, 1.0), (-0.4, 1.2)])
    return h.finish()


def barrett3():
    h = Hand("barrett3", [0.1, 0.1, 0.03], 3)
    for name, x in (("f1", -0.03), ("f2", 0.03)):
        h.finger(name, [x, 0.045, 0], FORWARD_PAD_DOWN, [0.07, 0.055], 0.011,
                 [(-0.5, 1.3), (-0.3, 1.4)], abduction=(-0.6, 0.6))
    h.finger("f3", [0, -0.045, 0], FORWARD_PAD_UP, [0.07, 0.055], 0.011,
             [(-0.5, 1.3), (-0.3, 1.4)])
    h.palm_pad(-0.03, 0.03, -0.03, 0.03)
    return h.finish()


def robotiq3():
    h = Hand("robotiq3", [0.11, 0.1, 0.03], 3)
    for name, x in (("fa", -0.038), ("fb", 0.038)):
        h.finger(name, [x, 0.04, 0], FORWARD_PAD_DOWN, [0.05, 0.038, 0.03], 0.01,
                 [(-0.5, 1.2), (-0.2, 1.5), (-0.6, 0.9)])
    h.finger("fc", [0, -0.04, 0], FORWARD_PAD_UP, [0.05, 0.038, 0.03], 0.01,
             [(-0.5, 1.2), (-0.2, 1.5), (-0.6, 0.9)])
    return h.finish()


def allegro4():
    h = Hand("allegro4", [0.12, 0.11, 0.03], 4)
    for name, x in (("index", -0.045), ("middle", 0.0), ("ring", 0.045)):
        h.finger(name, [x, 0.055, 0], UP, [0.054, 0.038, 0.044], 0.012,
                 [(-0.25, 1.6), (-0.2, 1.7), (-0.2, 1.6)], abduction=(-0.5, 0.5))
    # Thumb below the palm, extending forward, pad facing the fingers.
    h.finger("thumb", [0.02, -0.06, 0], FORWARD_PAD_UP, [0.05, 0.05, 0.045], 0.012,
             [(-0.3, 1.2), (-0.2, 1.6), (-0.2, 1.6)], abduction=(-0.6, 0.9))
    h.palm_pad(-0.05, 0.05, -0.04, 0.04)
    return h.finish()


def shadow5():
    h = Hand("shadow5", [0.09, 0.1, 0.03], 5)
    xs = (("ff", -0.033), ("mf", -0.011), ("rf", 0.011))
    for name, x in xs:
        h.finger(name, [x, 0.05, 0], UP, [0.045, 0.03, 0.028], 0.0095,
                 [(-0.26, 1.57), (0.0, 1.57), (0.0, 1.57)], abduction=(-0.35, 0.35))
    h.finger("lf", [0.033, 0.045, 0], UP, [0.045, 0.03, 0.028], 0.0095,
             [(-0.26, 1.57), (0.0, 1.57), (0.0, 1.57)], abduction=(-0.35, 0.35),
             extra_root=(unit([0.3, 1, 0]), (0.0, 0.7)))
    h.finger("th", [-0.02, -0.05, 0], FORWARD_PAD_UP, [0.038, 0.032, 0.032], 0.01,
             [(-0.2, 1.2), (-0.5, 0.7), (-0.26, 1.57)], abduction=(-0.7, 0.7),
             extra_root=(unit([0, 0, 1]), (-1.0, 1.0)))
    h.palm_pad(-0.04, 0.04, -0.04, 0.04)
    return h.finish()


def gripper_n1():
    """Test fixture: one revolute finger against a jaw fixed to the palm."""
    h = Hand("gripper_n1", [0.1, 0.03, 0.02], 1)
    h.links[0]["primitives"].append(box([0.01, 0.03, 0.06], [-0.04, 0, 0.03]))
    h.finger("f", [0.04, 0, 0], FORWARD_PAD_LEFT, [0.06], 0.008, [(-0.5, 0.5)])
    h.regions.append({"link": "palm", "origin": [-0.035 + PAD_LIFT, -0.01, 0.01],
                      "edge1": [0.0, 0.02, 0.0], "edge2": [0.0, 0.0, 0.04]})
    return h.finish()


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for spec in (gripper2(), barrett3(), robotiq3(), allegro4(), shadow5()):
        (OUT / f"{spec['name']}.json").write_text(json.dumps(spec, indent=1) + "\n")
        print(spec["name"], "N =", len(spec["joints"]), "regions =", len(spec["contact_regions"]))
    data = Path(__file__).resolve().parent.parent / "tests" / "data"
    data.mkdir(parents=True, exist_ok=True)
    n1 = gripper_n1()
    (data / "gripper_n1.json").write_text(json.dumps(n1, indent=1) + "\n")
    cyclic = json.loads(json.dumps(n1))
    cyclic["links"].append({"name": "a", "primitives": [sphere(0.01, [0, 0, 0])]})
    cyclic["links"].append({"name": "b", "primitives": [sphere(0.01, [0, 0, 0])]})
    for name, parent, child in (("ab", "a", "b"), ("ba", "b", "a")):
        cyclic["joints"].append({"name": name, "parent": parent, "child": child,
                                 "origin": {"xyz": [0, 0, 0], "rpy": [0, 0, 0]},
                                 "axis": [0, 0, 1], "limits": [-1, 1]})
    (data / "cyclic_hand.json").write_text(json.dumps(cyclic, indent=1) + "\n")


if __name__ == "__main__":
    main()
