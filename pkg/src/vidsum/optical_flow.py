"""Windowed Lucas-Kanade optical flow between consecutive saliency maps.

Under brightness constancy, a pixel's value is conserved between frames, and
for small motion the first-order expansion gives

    V_x * u_x + V_y * u_y + V_t = 0

per pixel, where V_x, V_y are spatial derivatives of the first map and V_t is
the temporal difference. One equation cannot determine the two unknowns, so
all N pixels q_1..q_N inside a window around the sample point are assumed to
share one velocity, stacking into the overdetermined system A v = B with
A = [V_x(q) V_y(q)] and B = -[V_t(q)]. The normal equations (AᵀA) v = AᵀB
are solved in closed form; a window whose AᵀA has its smaller eigenvalue
below ``min_eigen`` is flagged invalid (flat or aperture-limited content).

The per-pair temporal score is the mean flow magnitude over valid samples,
normalized by the overlap (IoU) of the two saliency maps: low overlap means
the attended content changed, which is exactly when a scene transition is
likely.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SizeMismatch, TooFewFrames
from .color_features import ScoreSeries
from .ingestion import SaliencySequence

TEMPORAL_NORMS = ("iou_complement", "iou_divide", "none")

IOU_DIVIDE_EPS = 1e-6


@dataclass(frozen=True)
class LkParams:
    """Window side length (odd px), AᵀA conditioning threshold, sample spacing."""

    window: int = 21
    min_eigen: float = 1e-4
    grid_stride: int = 4

    def __post_init__(self):
        if self.window < 3 or self.window % 2 == 0:
            raise ValueError(f"window must be odd and >= 3, got {self.window}")
        if self.min_eigen < 0:
            raise ValueError(f"min_eigen must be non-negative, got {self.min_eigen}")
        if self.grid_stride < 1:
            raise ValueError(f"grid_stride must be >= 1, got {self.grid_stride}")


@dataclass
class FlowField:
    """Flow sampled on a regular grid over the map.

    ``u_x``, ``u_y`` and ``valid`` have shape (len(ys), len(xs)); ``ys`` and
    ``xs`` are the sample coordinates in map pixels. Units are pixels per
    frame step.
    """

    u_x: np.ndarray
    u_y: np.ndarray
    valid: np.ndarray
    ys: np.ndarray
    xs: np.ndarray

    @property
    def magnitudes(self) -> np.ndarray:
        return np.hypot(self.u_x, self.u_y)

    def mean_valid_magnitude(self) -> float:
        """Mean motion magnitude over well-conditioned samples (0 if none)."""
        if not self.valid.any():
            return 0.0
        return float(self.magnitudes[self.valid].mean())


def _check_same_shape(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise SizeMismatch(f"map shapes differ: {a.shape} vs {b.shape}")


def gradients(map_t: np.ndarray, map_t1: np.ndarray):
    """Spatial gradients of the first map and the temporal difference.

    V_x and V_y are central differences (one-sided at borders); V_t is the
    pointwise difference map_t1 - map_t.
    """
    map_t = np.asarray(map_t, dtype=np.float64)
    map_t1 = np.asarray(map_t1, dtype=np.float64)
    _check_same_shape(map_t, map_t1)
    v_y, v_x = np.gradient(map_t)
    v_t = map_t1 - map_t
    return v_x, v_y, v_t


def _solve_normal_equations(sxx, sxy, syy, bx, by, min_eigen):
    """Solve the 2x2 normal equations for one window.

    Returns (u_x, u_y, valid). Minimum-norm least squares is used so that a
    rank-deficient but accepted system (only possible when min_eigen == 0)
    still yields the observable velocity component.
    """
    trace = sxx + syy
    disc = np.sqrt((sxx - syy) ** 2 + 4.0 * sxy * sxy)
    lam_min = 0.5 * (trace - disc)
    if lam_min < min_eigen:
        return 0.0, 0.0, False
    det = sxx * syy - sxy * sxy
    if det > 0:
        ux = (syy * bx - sxy * by) / det
        uy = (sxx * by - sxy * bx) / det
        return float(ux), float(uy), True
    m = np.array([[sxx, sxy], [sxy, syy]])
    rhs = np.array([bx, by])
    u = np.linalg.lstsq(m, rhs, rcond=None)[0]
    return float(u[0]), float(u[1]), True


def lk_solve(v_x, v_y, v_t, center: tuple[int, int], params: LkParams):
    """Flow at one sample point from the window around ``center`` (row, col).

    The window is clamped to the grid at borders. Returns (u_x, u_y, valid);
    invalid samples carry u = (0, 0).
    """
    h, w = v_x.shape
    half = params.window // 2
    cy, cx = center
    y0, y1 = max(0, cy - half), min(h - 1, cy + half)
    x0, x1 = max(0, cx - half), min(w - 1, cx + half)
    wx = v_x[y0 : y1 + 1, x0 : x1 + 1]
    wy = v_y[y0 : y1 + 1, x0 : x1 + 1]
    wt = v_t[y0 : y1 + 1, x0 : x1 + 1]
    sxx = float(np.sum(wx * wx))
    sxy = float(np.sum(wx * wy))
    syy = float(np.sum(wy * wy))
    bx = -float(np.sum(wx * wt))
    by = -float(np.sum(wy * wt))
    return _solve_normal_equations(sxx, sxy, syy, bx, by, params.min_eigen)


def _window_sums(arr: np.ndarray, ys: np.ndarray, xs: np.ndarray, half: int) -> np.ndarray:
    """Sums of ``arr`` over clamped windows centered at ys x xs (integral image)."""
    h, w = arr.shape
    integral = np.zeros((h + 1, w + 1))
    integral[1:, 1:] = arr.cumsum(axis=0).cumsum(axis=1)
    y0 = np.clip(ys - half, 0, h - 1)
    y1 = np.clip(ys + half, 0, h - 1)
    x0 = np.clip(xs - half, 0, w - 1)
    x1 = np.clip(xs + half, 0, w - 1)
    iy0, iy1 = y0[:, None], y1[:, None]
    ix0, ix1 = x0[None, :], x1[None, :]
    return (
        integral[iy1 + 1, ix1 + 1]
        - integral[iy0, ix1 + 1]
        - integral[iy1 + 1, ix0]
        + integral[iy0, ix0]
    )


def flow_field(map_t: np.ndarray, map_t1: np.ndarray, params: LkParams = LkParams()) -> FlowField:
    """Lucas-Kanade flow evaluated on a grid with ``grid_stride`` spacing."""
    map_t = np.asarray(map_t, dtype=np.float64)
    map_t1 = np.asarray(map_t1, dtype=np.float64)
    _check_same_shape(map_t, map_t1)
    v_x, v_y, v_t = gradients(map_t, map_t1)
    h, w = map_t.shape
    half = params.window // 2
    ys = np.arange(0, h, params.grid_stride)
    xs = np.arange(0, w, params.grid_stride)

    sxx = _window_sums(v_x * v_x, ys, xs, half)
    sxy = _window_sums(v_x * v_y, ys, xs, half)
    syy = _window_sums(v_y * v_y, ys, xs, half)
    bx = -_window_sums(v_x * v_t, ys, xs, half)
    by = -_window_sums(v_y * v_t, ys, xs, half)

    trace = sxx + syy
    disc = np.sqrt((sxx - syy) ** 2 + 4.0 * sxy * sxy)
    lam_min = 0.5 * (trace - disc)
    valid = lam_min >= params.min_eigen

    det = sxx * syy - sxy * sxy
    solvable = valid & (det > 0)
    safe_det = np.where(solvable, det, 1.0)
    u_x = np.where(solvable, (syy * bx - sxy * by) / safe_det, 0.0)
    u_y = np.where(solvable, (sxx * by - sxy * bx) / safe_det, 0.0)

    # valid but singular windows (min_eigen == 0): minimum-norm solution
    for iy, ix in zip(*np.nonzero(valid & ~solvable)):
        m = np.array([[sxx[iy, ix], sxy[iy, ix]], [sxy[iy, ix], syy[iy, ix]]])
        rhs = np.array([bx[iy, ix], by[iy, ix]])
        u = np.linalg.lstsq(m, rhs, rcond=None)[0]
        u_x[iy, ix], u_y[iy, ix] = u[0], u[1]

    return FlowField(u_x=u_x, u_y=u_y, valid=valid, ys=ys, xs=xs)


def saliency_iou(map_t: np.ndarray, map_t1: np.ndarray) -> float:
    """Overlap of two saliency maps: sum of pointwise minima over maxima.

    1 when the maps are equal (including the all-zero pair), 0 when their
    supports are disjoint.
    """
    map_t = np.asarray(map_t, dtype=np.float64)
    map_t1 = np.asarray(map_t1, dtype=np.float64)
    _check_same_shape(map_t, map_t1)
    union = float(np.maximum(map_t, map_t1).sum())
    if union == 0.0:
        return 1.0
    inter = float(np.minimum(map_t, map_t1).sum())
    return inter / union


def temporal_score(
    sal: SaliencySequence,
    params: LkParams = LkParams(),
    norm: str = "iou_complement",
) -> ScoreSeries:
    """Per-pair normalized motion intensity of the saliency sequence.

    For each consecutive pair, m̄ is the mean flow magnitude over valid
    samples and IoU the maps' overlap. The pair's value is
    m̄ * (1 - IoU) for ``iou_complement`` (default), m̄ / (IoU + 1e-6) for
    ``iou_divide``, or plain m̄ for ``none``.
    """
    if norm not in TEMPORAL_NORMS:
        raise ValueError(f"unknown temporal norm {norm!r}, expected one of {TEMPORAL_NORMS}")
    if len(sal.maps) < 2:
        raise TooFewFrames("temporal score needs at least 2 saliency maps")
    values = []
    pairs = []
    for k in range(len(sal.maps) - 1):
        field = flow_field(sal.maps[k], sal.maps[k + 1], params)
        mean_mag = field.mean_valid_magnitude()
        iou = saliency_iou(sal.maps[k], sal.maps[k + 1])
        if norm == "iou_complement":
            value = mean_mag * (1.0 - iou)
        elif norm == "iou_divide":
            value = mean_mag / (iou + IOU_DIVIDE_EPS)
        else:
            value = mean_mag
        values.append(value)
        pairs.append((sal.indices[k], sal.indices[k + 1]))
    return ScoreSeries(values=np.array(values), pair_indices=pairs, label=f"flow[{norm}]")
