"""Stock body sets used by the pipeline and the table reproduction."""

import json
import math
import os

import numpy as np

from .bodies import Cone, LpBall, body_from_json, regular_polygon, random_polygon, square, triangle, \
    regular_tetrahedron

BATTERY_SEED = 20240501


def battery_2d(seed=BATTERY_SEED):
    """Triangle, square, disc, regular hexagon and six random polygons."""
    rng = np.random.default_rng(seed)
    bodies = {"triangle": triangle(), "square": square(), "disc": LpBall(2, 2),
              "hexagon": regular_polygon(6)}
    for i in range(6):
        bodies[f"polygon{i + 1}"] = random_polygon(rng, int(rng.integers(5, 9)))
    return bodies


def battery_3d():
    """Octahedron, ball, ``l_4`` ball, cube, regular tetrahedron and the cone over a square."""
    return {"K1": LpBall(1, 3), "K2": LpBall(2, 3), "K4": LpBall(4, 3), "cube": LpBall(math.inf, 3),
            "tetrahedron": regular_tetrahedron(),
            "cone_square": Cone(square(), [0.0, 0.0, 1.0])}


def write_battery(bodies, directory):
    os.makedirs(directory, exist_ok=True)
    for name, K in bodies.items():
        with open(os.path.join(directory, f"{name}.json"), "w") as fh:
            json.dump(K.to_json(), fh, indent=1)
            fh.write("\n")


def load_battery(directory):
    """Bodies from every ``*.json`` file of ``directory``, keyed by file stem, sorted."""
    out = {}
    for fn in sorted(os.listdir(directory)):
        if fn.endswith(".json"):
            with open(os.path.join(directory, fn)) as fh:
                out[fn[:-5]] = body_from_json(json.load(fh))
    return out
