"""Small vector helpers for 4-dimensional Euclidean space."""

import numpy as np

from .errors import FrameUndefined


def unit(w: np.ndarray, tol: float = 1e-14) -> np.ndarray:
    n = float(np.linalg.norm(w))
    if n <= tol:
        raise FrameUndefined("cannot normalise a (near-)zero vector")
    return w / n


def cross4(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Vector d with <d, w> = det[a b c w] for every w (columns of the 4x4).

    The analogue of the cross product one dimension up: d is orthogonal to
    a, b and c, and [a, b, c, d] is positively oriented whenever the three
    inputs are linearly independent.
    """
    m = np.empty((4, 4))
    m[:, 0], m[:, 1], m[:, 2] = a, b, c
    d = np.empty(4)
    for i in range(4):
        m[:, 3] = 0.0
        m[i, 3] = 1.0
        d[i] = np.linalg.det(m)
    return d


def gram_schmidt_pair(zu: np.ndarray, zv: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormalise (zu, zv) keeping the span and the orientation."""
    x = unit(zu)
    y = zv - np.dot(zv, x) * x
    return x, unit(y)
