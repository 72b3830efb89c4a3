import numpy as np
import pytest

from gdacube.lin_vi import gen_random
from gdacube.pure_circuit import gen_example
from gdacube.reduction import GdaParams, JointPoint, build_instance

# The three desk-scale shapes exercised throughout: a 3-ring with a single
# copy (the logical levels are frozen there since n*m < 3m), a 3-ring with
# enough copies for the distance threshold to activate, and a 6-vertex
# purify tree.
SHAPES = {
    "ring3-m1-n1": dict(kind="ring", size=3, pc_seed=0, m=1, vi_seed=5,
                        n=1, epsilon=1e-3, delta=1.0),
    "ring3-m2-n4": dict(kind="ring", size=3, pc_seed=0, m=2, vi_seed=9,
                        n=4, epsilon=1e-3, delta=0.5),
    "tree6-m2-n8": dict(kind="purify_tree", size=6, pc_seed=1, m=2, vi_seed=13,
                        n=8, epsilon=1e-3, delta=0.25),
}


def make_instance(name):
    cfg = SHAPES[name]
    pc = gen_example(cfg["kind"], cfg["size"], cfg["pc_seed"])
    vi = gen_random(cfg["m"], cfg["vi_seed"])
    params = GdaParams(n=cfg["n"], epsilon=cfg["epsilon"], delta=cfg["delta"])
    return build_instance(pc, vi, params)


def random_point(inst, rng) -> JointPoint:
    return JointPoint(rng.uniform(0.0, 1.0, inst.d), rng.uniform(0.0, 1.0, inst.d))


@pytest.fixture(scope="session")
def shape_instances():
    return {name: make_instance(name) for name in SHAPES}
