#!/usr/bin/env python3
"""Line-protocol adapter for Python 2048 policies.

Usage: run_py_policy.py SOLVER_FILE

The solver file must define ``move(grid, score) -> str`` returning one of
"left", "right", "up" or "down".  Each exchange on stdin is four lines of
four space-separated integers (the grid, row-major) followed by one line
``SCORE <n>``; the chosen direction is written back as a single line.

Solvers written against a 5 s per-move window pace themselves with an
internal wall-clock budget (e.g. ``TIME_LIMIT = 4.8``) polled via
``time.time()``.  To honor the harness budget (EASE_MOVE_BUDGET_MS) without
editing the solver, ``time.time`` is replaced by a deterministic virtual
clock: every call advances it by a fixed tick sized so the solver's 5 s
window corresponds to EASE_MOVE_BUDGET_MS worth of search work (calibrated
at ~40 clock polls per millisecond).  Search effort per move is therefore
an exact function of the grid, making whole games reproducible.
"""

import importlib.util
import os
import sys
import time

import numpy as np

REFERENCE_WINDOW_S = 5.0  # per-move window the solver fixtures assume
POLLS_PER_MS = 40.0       # measured time.time() poll throughput of the solvers


def load_move(path):
    spec = importlib.util.spec_from_file_location("policy", path)
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module.move


def install_virtual_clock(budget_ms):
    tick = REFERENCE_WINDOW_S / max(1.0, budget_ms * POLLS_PER_MS)
    state = {"now": 0.0}

    def virtual_time():
        state["now"] += tick
        return state["now"]

    time.time = virtual_time


def main():
    if len(sys.argv) != 2:
        print("usage: run_py_policy.py SOLVER_FILE", file=sys.stderr)
        return 2
    move = load_move(sys.argv[1])
    install_virtual_clock(float(os.environ.get("EASE_MOVE_BUDGET_MS", 1000.0 * REFERENCE_WINDOW_S)))

    while True:
        rows = []
        for _ in range(4):
            line = sys.stdin.readline()
            if not line:
                return 0
            rows.append([int(x) for x in line.split()])
        score_line = sys.stdin.readline()
        if not score_line:
            return 0
        score = int(score_line.split()[1])
        print(move(np.array(rows), score), flush=True)


if __name__ == "__main__":
    sys.exit(main())
