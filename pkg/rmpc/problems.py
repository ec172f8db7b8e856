"""
Built-in example plants.

example1: second-order single-input plant, horizon 4.
example2: 2x2 process given as a transfer matrix; each element is realized in
controllable canonical form, the realizations are stacked block-diagonally
(six states) and the result is sampled with a zero-order hold at Ts = 1 s.
"""

from typing import Callable, Dict

import numpy as np
from models import ProblemSpec
from scipy.linalg import block_diag
from scipy.signal import cont2discrete, tf2ss

# (numerator, denominator) per transfer-matrix element, row-major.
_EXAMPLE2_ELEMENTS = (
    (([0.05], [36.0, 6.0, 1.0]), ([0.04, 0.02], [8.0, 1.0])),
    (([0.04, 0.02], [8.0, 1.0]), ([0.05], [12.0, 3.0, 1.0])),
)


def example1(lam: float = 1.0) -> ProblemSpec:
    return ProblemSpec(
        A=[[0.8955, -0.1897], [0.0948, 0.9903]],
        B=[[0.0948], [0.0048]],
        Q=[[0.01, 0.0], [0.0, 4.0]],
        R=[[0.01]],
        N=4,
        lam=lam,
        x_bounds=[(-3.0, 3.0)] * 2,
        u_bounds=[(-2.0, 2.0)],
    )


def transfer_matrix_model(elements, dt: float) -> tuple[np.ndarray, np.ndarray]:
    """
    Sampled (A, B) of a transfer matrix given as nested (num, den) pairs.

    Every element gets its own states; input j drives only the blocks of column j.
    Outputs are not needed by the controller and are dropped.
    """
    blocks, columns = [], []
    for row in elements:
        for j, (num, den) in enumerate(row):
            A_ij, B_ij, _, _ = tf2ss(num, den)
            blocks.append(A_ij)
            columns.append((j, B_ij))
    A_c = block_diag(*blocks)
    m = len(elements[0])
    B_c = np.zeros((A_c.shape[0], m))
    offset = 0
    for block, (j, B_ij) in zip(blocks, columns):
        size = block.shape[0]
        B_c[offset : offset + size, j] = B_ij[:, 0]
        offset += size
    C_c = np.zeros((1, A_c.shape[0]))
    D_c = np.zeros((1, m))
    A_d, B_d, _, _, _ = cont2discrete((A_c, B_c, C_c, D_c), dt, method="zoh")
    return A_d, B_d


def example2(lam: float = 1.0) -> ProblemSpec:
    A, B = transfer_matrix_model(_EXAMPLE2_ELEMENTS, dt=1.0)
    n, m = B.shape
    return ProblemSpec(
        A=A.tolist(),
        B=B.tolist(),
        Q=(10.0 * np.eye(n)).tolist(),
        R=(0.01 * np.eye(m)).tolist(),
        N=40,
        lam=lam,
        x_bounds=[(-15.0, 15.0)] * n,
        u_bounds=[(-3.0, 3.0)] * m,
    )


EXAMPLES: Dict[str, Callable[..., ProblemSpec]] = {"example1": example1, "example2": example2}
