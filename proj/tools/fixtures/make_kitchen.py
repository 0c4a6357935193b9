#!/usr/bin/env python3
"""Regenerates fixtures/kitchen_scene.json and fixtures/kitchen_route.json.

The layout is hand-designed: counters along the north and east walls, a
central island and a dining table, with small items laid out in slots on
every surface. The route walks along each surface, stopping at every grid
cell to look down at the surface and back up.
"""
import json
import random
import sys
from pathlib import Path

GRID = 0.25

SURFACES = [
    {"id": "counter_north", "height": 0.9, "extent": {"min": [0.0, 5.4], "max": [6.0, 6.0]}},
    {"id": "counter_east", "height": 0.9, "extent": {"min": [7.4, 0.5], "max": [8.0, 4.5]}},
    {"id": "island", "height": 0.9, "extent": {"min": [3.0, 2.6], "max": [5.0, 3.4]}},
    {"id": "dining_table", "height": 0.75, "extent": {"min": [0.8, 0.8], "max": [2.2, 1.8]}},
]

# class -> half extents (x, y, z) in meters
CATALOG = {
    "apple": (0.04, 0.04, 0.04),
    "tomato": (0.04, 0.035, 0.04),
    "potato": (0.045, 0.035, 0.04),
    "lettuce": (0.09, 0.08, 0.09),
    "bread": (0.12, 0.06, 0.07),
    "egg": (0.025, 0.03, 0.025),
    "mug": (0.05, 0.05, 0.05),
    "mug_filled": (0.05, 0.05, 0.05),
    "cup": (0.04, 0.06, 0.04),
    "bowl": (0.08, 0.04, 0.08),
    "bowl_filled": (0.08, 0.045, 0.08),
    "plate": (0.11, 0.015, 0.11),
    "pot": (0.13, 0.08, 0.13),
    "pan": (0.14, 0.03, 0.2),
    "kettle": (0.1, 0.12, 0.08),
    "toaster": (0.14, 0.1, 0.09),
    "coffee_machine": (0.15, 0.2, 0.13),
    "knife": (0.015, 0.01, 0.12),
    "fork": (0.015, 0.01, 0.1),
    "spoon": (0.02, 0.01, 0.09),
    "spatula": (0.03, 0.01, 0.15),
    "ladle": (0.04, 0.02, 0.15),
    "salt_shaker": (0.025, 0.05, 0.025),
    "pepper_shaker": (0.025, 0.05, 0.025),
    "soap_bottle": (0.04, 0.09, 0.04),
    "dish_sponge": (0.05, 0.02, 0.035),
    "wine_bottle": (0.04, 0.15, 0.04),
    "bottle": (0.035, 0.12, 0.035),
    "vase": (0.06, 0.12, 0.06),
    "book": (0.1, 0.025, 0.14),
    "cellphone": (0.04, 0.005, 0.08),
    "houseplant": (0.1, 0.15, 0.1),
    "paper_towel_roll": (0.06, 0.13, 0.06),
    "spray_bottle": (0.05, 0.11, 0.04),
    "lettuce_sliced": (0.09, 0.05, 0.09),
    "bread_sliced": (0.12, 0.05, 0.07),
}

FLOOR = [
    ("fridge_closed", (6.7, 5.6), (0.45, 0.9, 0.35)),
    ("chair", (0.5, 1.05), (0.2, 0.45, 0.2)),
    ("chair", (0.5, 1.55), (0.2, 0.45, 0.2)),
    ("chair", (2.5, 1.05), (0.2, 0.45, 0.2)),
    ("chair", (2.5, 1.55), (0.2, 0.45, 0.2)),
    ("garbage_can", (7.65, 5.2), (0.2, 0.3, 0.2)),
    ("stool", (3.5, 3.65), (0.17, 0.35, 0.17)),
    ("stool", (4.5, 3.65), (0.17, 0.35, 0.17)),
]

DEPTH_AXIS = {"counter_north": "z", "counter_east": "x", "island": "z", "dining_table": "z"}


def plan_rect(x, z, half, yaw):
    hx, hz = (half[0], half[2]) if yaw == 0.0 else (half[2], half[0])
    return (x - hx, z - hz, x + hx, z + hz)


def layout_ok(placed):
    extents = {s["id"]: s["extent"] for s in SURFACES}
    rects = []
    for cls, surface, x, z, half, yaw in placed:
        r = plan_rect(x, z, half, yaw)
        e = extents[surface]
        if r[0] < e["min"][0] or r[1] < e["min"][1] or r[2] > e["max"][0] or r[3] > e["max"][1]:
            return False
        for other_surface, o in rects:
            if other_surface == surface and r[0] < o[2] and o[0] < r[2] and r[1] < o[3] and o[1] < r[3]:
                return False
        rects.append((surface, r))
    return True


# (surface, slot centers) with slot spacing wide enough for every catalog item.
def slots():
    out = []
    for row_z in (5.56, 5.84):
        for k in range(12):
            out.append(("counter_north", 0.25 + k * 0.5, row_z))
    for col_x in (7.56, 7.84):
        for k in range(8):
            out.append(("counter_east", col_x, 0.75 + k * 0.5))
    for row_z in (2.78, 3.2):
        for k in range(5):
            out.append(("island", 3.2 + k * 0.4, row_z))
    for row_z in (1.02, 1.3, 1.58):
        for k in range(3):
            out.append(("dining_table", 1.05 + k * 0.45, row_z))
    return out


def r6(v):
    return round(v, 6)


def make_scene(rng):
    heights = {s["id"]: s["height"] for s in SURFACES}
    classes = sorted(CATALOG)
    objects = []
    counts = {}

    def add(cls, pos, half, yaw, surface):
        counts[cls] = counts.get(cls, 0) + 1
        obj = {
            "instance_id": f"{cls}_{counts[cls]:02d}",
            "class_label": cls,
            "position": [r6(p) for p in pos],
            "half_extents": list(half),
            "yaw": yaw,
        }
        if surface:
            obj["surface_id"] = surface
        objects.append(obj)

    for cls, (x, z), half in FLOOR:
        add(cls, (x, half[1], z), half, 0.0, None)

    slot_list = slots()
    picks = [classes[i % len(classes)] for i in range(len(slot_list))]
    while True:
        rng.shuffle(picks)
        placed = []
        for (surface, x, z), cls in zip(slot_list, picks):
            half = CATALOG[cls]
            depth_axis = DEPTH_AXIS[surface]
            # Keep the short side of the footprint across the surface depth.
            narrow_z = half[2] <= half[0]
            yaw = 0.0 if narrow_z == (depth_axis == "z") else 90.0
            jx = rng.uniform(-0.02, 0.02)
            jz = rng.uniform(-0.01, 0.01)
            if depth_axis == "x":
                jx, jz = jz, jx
            placed.append((cls, surface, x + jx, z + jz, half, yaw))
        if layout_ok(placed):
            break
    for cls, surface, x, z, half, yaw in placed:
        add(cls, (x, heights[surface] + half[1], z), half, yaw, surface)

    return {
        "format_version": 1,
        "scene_id": "kitchen_default",
        "bounds": {"min": [0.0, 0.0, 0.0], "max": [8.0, 3.0, 6.0]},
        "grid_step": GRID,
        "surfaces": SURFACES,
        "objects": objects,
    }


def make_route():
    acts = []
    inspect = ["LookDown", "LookUp"]
    # North counter, facing north, strafing east.
    for _ in range(23):
        acts += inspect + ["MoveRight"]
    acts += inspect + ["MoveRight"] * 3
    # East counter, facing east, strafing south.
    acts += ["RotateRight"]
    for _ in range(17):
        acts += inspect + ["MoveRight"]
    acts += inspect
    # Transit to the south side of the island.
    acts += ["RotateLeft"] + ["MoveAhead"] * 6 + ["MoveLeft"] * 7
    for _ in range(9):
        acts += inspect + ["MoveLeft"]
    acts += inspect
    # Dining table from the north, facing south, strafing west.
    acts += ["RotateRight", "RotateRight", "MoveRight"]
    for _ in range(9):
        acts += inspect + ["MoveRight"]
    acts += inspect
    # Zigzag through the central area, head level, with look-arounds.
    acts += ["RotateLeft", "RotateLeft"] + ["MoveAhead"] * 9
    for leg in range(6):
        acts += ["MoveRight", "MoveRight"]
        acts += ["MoveBack", "MoveBack"] if leg % 2 == 0 else ["MoveAhead", "MoveAhead"]
        acts += ["RotateLeft", "RotateRight", "RotateRight", "RotateLeft"]
    return {
        "format_version": 1,
        "start_pose": {"position": [0.375, 4.875], "yaw": 0, "head_pitch": 0, "camera_height": 1.5},
        "grid_step": GRID,
        "actions": acts,
    }


def main():
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parents[2] / "fixtures"
    rng = random.Random(20240611)
    scene = make_scene(rng)
    route = make_route()
    (out / "kitchen_scene.json").write_text(json.dumps(scene, indent=2) + "\n")
    (out / "kitchen_route.json").write_text(json.dumps(route, indent=2) + "\n")
    print(f"{len(scene['objects'])} objects, {len(route['actions'])} actions")


if __name__ == "__main__":
    main()
