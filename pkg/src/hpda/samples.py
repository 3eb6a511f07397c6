"""Small hand-checked arrays used as references by tests and the CLI."""
from __future__ import annotations

import numpy as np

from .hpda import Hpda
from .pda import Pda

_ = "*"


def three_mirror_hpda() -> Hpda:
    """A (3,2;6;2,3) HPDA: 3 mirrors with 2 users each and 6 packets per file.

    S_m = {4,5,6}, S_1 = {1,2,4}, S_2 = {1,3,5}, S_3 = {2,3,6}.
    """
    mirror = np.zeros((6, 3), dtype=bool)
    mirror[0:2, 0] = mirror[2:4, 1] = mirror[4:6, 2] = True
    users = [
        [[_, 4], [4, _], [_, 1], [1, _], [_, 2], [2, _]],
        [[_, 1], [1, _], [_, 5], [5, _], [_, 3], [3, _]],
        [[_, 2], [2, _], [_, 3], [3, _], [_, 6], [6, _]],
    ]
    cells = np.array([[[0 if c == _ else c for c in row] for row in arr] for arr in users], dtype=np.int64)
    return Hpda(mirror, cells, Z1=2, Z2=3, S_m={4, 5, 6}, S_k=({1, 2, 4}, {1, 3, 5}, {2, 3, 6}))


def inner_pda_5x5(z: int) -> Pda:
    """A 5 x 5 PDA with ``z`` stars per column, z in 1..4.

    S = 10, 4, 7, 1 for z = 1, 3, 2, 4.
    """
    if z == 1:
        # one integer per unordered pair of users, placed symmetrically
        grid = np.zeros((5, 5), dtype=np.int64)
        s = 0
        for a in range(5):
            for b in range(a + 1, 5):
                s += 1
                grid[a, b] = grid[b, a] = s
        return Pda(grid, Z=1, S=10)
    if z == 2:
        return Pda.from_rows(
            [
                [_, _, 1, 2, 5],
                [1, _, _, 3, 6],
                [_, 1, _, 4, 7],
                [2, 3, 4, _, _],
                [5, 6, 7, _, _],
            ]
        )
    if z == 3:
        return Pda.from_rows(
            [
                [1, _, _, _, 4],
                [2, 3, _, _, _],
                [_, 1, 2, _, _],
                [_, _, 3, 1, _],
                [_, _, _, 2, 3],
            ],
            Z=3,
            S=4,
        )
    if z == 4:
        return Pda(np.eye(5, dtype=np.int64), Z=4, S=1)
    raise KeyError(f"no 5 x 5 reference PDA with {z} stars per column")
