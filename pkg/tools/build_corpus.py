"""Regenerates the JSON files under src/tracelogic/data (deterministic)."""

import json
from pathlib import Path

import numpy as np

from tracelogic.games import coloring_game, complete_graph, random_synchronous_game
from tracelogic.matrices import matrix_to_json, random_contraction, random_hermitian, random_pvm

DATA = Path(__file__).resolve().parents[1] / "src" / "tracelogic" / "data"


def dump(name, obj):
    (DATA / name).write_text(json.dumps(obj, sort_keys=True, indent=1) + "\n")


graphs = {
    "triangle": complete_graph(3),
    "k4": complete_graph(4),
    "k5": complete_graph(5),
    "c5": [[(v - 1) % 5, (v + 1) % 5] for v in range(5)],
}
for name, adj in graphs.items():
    dump(f"graph_{name}.json", {"name": name, "adjacency": adj})
for name in ("triangle", "k4", "k5"):
    dump(f"game_{name}_3col.json", coloring_game(graphs[name], 3, name=f"{name}-3col").to_json())

games = [random_synchronous_game(2 + k % 2, 2 + (k // 2) % 2, seed=k) for k in range(20)]
dump("games_random20.json", [g.to_json() for g in games])

cases = []
rng = np.random.default_rng(20240)
for k, eps in enumerate([1e-2, 1e-2, 1e-3, 1e-3, 1e-4, 1e-4]):
    p, n, m = 2 + k % 3, 1 + k % 2, 2 + k % 2
    exact = [random_pvm(p, m, seed=rng) for _ in range(n)]
    noisy = [[x + random_hermitian(p, rng, eps) for x in g] for g in exact]
    cases.append({"eps": eps, "exact": [[matrix_to_json(x) for x in g] for g in exact],
                  "groups": [[matrix_to_json(x) for x in g] for g in noisy]})
dump("perturbed_pvms.json", cases)

rng = np.random.default_rng(7)
dump("tuple_n2_p3.json", {"matrices": [matrix_to_json(random_contraction(3, rng)) for _ in range(2)]})
(DATA / "sigma_sup_xx.txt").write_text("sup x1 . trRe(x1 x1')\n")
