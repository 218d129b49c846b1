"""Write the small JSON inputs used in the README walkthrough."""
from pathlib import Path

import numpy as np

from discrete_sl.atkinson import AtkinsonProblem
from discrete_sl.io import atkinson_to_json, dumps, matrix_to_json, problem_to_json
from discrete_sl.problem import BoundaryChart, SLEquation, dirichlet, neumann

OUT = Path(__file__).parent / "inputs"


def write(name, doc):
    (OUT / name).write_text(dumps(doc))


def main():
    OUT.mkdir(exist_ok=True)
    unit = SLEquation([1, 1, 1], [0, 0], [1, 1])
    write("dirichlet.json", problem_to_json(unit, dirichlet(1)))
    write("neumann.json", problem_to_json(unit, neumann(1)))
    singular = BoundaryChart((), np.diag([-1.0, 0.0]))
    write("singular_chart.json", problem_to_json(unit, singular))
    for name, target in (("jump_down.json", [0, 0, 1]), ("jump_up.json", [1, 0, 0])):
        write(name, {"space": "bc", "problem": problem_to_json(unit, singular), "target": target})
    write("trace_q.json", {
        "problem": problem_to_json(unit, singular.with_S(np.diag([-0.5, 0.0]))),
        "direction": {"Q": [matrix_to_json(np.eye(1)), matrix_to_json(np.zeros((1, 1)))]},
        "t": [float(t) for t in np.linspace(0.0, 1.0, 6)],
    })
    ap = AtkinsonProblem([0, 1, 2, 3, 4, 5], [[[1]]] * 3, [[[0]]] * 3, [[[1]]] * 2)
    write("atkinson.json", atkinson_to_json(ap, BoundaryChart((1,), np.diag([0.0, 1.0]))))


if __name__ == "__main__":
    main()
