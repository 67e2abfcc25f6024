"""Seven-step I-VT fixation detection.

The chain is: gap fill-in, eye selection, moving-median noise reduction,
velocity calculation, velocity-threshold classification, merging of adjacent
fixations, and discarding of short fixations. Defaults follow the Tobii I-VT
standard parameterization.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .types import Fixation, GazeStream, ScreenGeometry

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IvtConfig:
    max_gap_s: float = 0.075
    median_window: int = 3
    velocity_window_s: float = 0.020
    velocity_threshold_deg_s: float = 30.0
    merge_max_gap_s: float = 0.075
    merge_max_angle_deg: float = 0.5
    min_fixation_s: float = 0.060


class PointTrace:
    """Monocular (cyclopean) gaze trace after eye selection."""

    __slots__ = ("t", "x", "y", "valid")

    def __init__(self, t, x, y, valid):
        self.t = np.asarray(t, dtype=float)
        self.x = np.asarray(x, dtype=float)
        self.y = np.asarray(y, dtype=float)
        self.valid = np.asarray(valid, dtype=bool)

    def __len__(self):
        return len(self.t)


@dataclass(frozen=True)
class VelocitySample:
    t: float
    xy: tuple[float, float]
    speed_deg_s: float
    valid: bool


class VelocityTrace:
    """Gaze trace annotated with angular speed per sample."""

    __slots__ = ("t", "x", "y", "speed_deg_s", "valid")

    def __init__(self, t, x, y, speed_deg_s, valid):
        self.t = np.asarray(t, dtype=float)
        self.x = np.asarray(x, dtype=float)
        self.y = np.asarray(y, dtype=float)
        self.speed_deg_s = np.asarray(speed_deg_s, dtype=float)
        self.valid = np.asarray(valid, dtype=bool)

    def __len__(self):
        return len(self.t)

    def __getitem__(self, i) -> VelocitySample:
        return VelocitySample(
            t=float(self.t[i]),
            xy=(float(self.x[i]), float(self.y[i])),
            speed_deg_s=float(self.speed_deg_s[i]),
            valid=bool(self.valid[i]),
        )


def _nominal_dt(t: np.ndarray) -> float:
    if len(t) < 2:
        return 0.0
    return float(np.median(np.diff(t)))


def _fill_one_eye(t, x, y, valid, max_gap_s, dt):
    """Linearly interpolate invalid runs no longer than max_gap_s (in place)."""
    n = len(t)
    i = 0
    while i < n:
        if valid[i]:
            i += 1
            continue
        j = i
        while j < n and not valid[j]:
            j += 1
        # run of invalid samples is [i, j); needs valid anchors on both sides
        if i > 0 and j < n and (j - i) * dt <= max_gap_s + 1e-12:
            t0, t1 = t[i - 1], t[j]
            span = t1 - t0
            if span > 0:
                w = (t[i:j] - t0) / span
                x[i:j] = x[i - 1] + w * (x[j] - x[i - 1])
                y[i:j] = y[i - 1] + w * (y[j] - y[i - 1])
                valid[i:j] = True
        i = j


def fill_gaps(stream: GazeStream, max_gap_s: float) -> GazeStream:
    """Replace short runs of missing samples by per-eye linear interpolation.

    A run qualifies when its duration (run length times the nominal sample
    period) does not exceed ``max_gap_s`` and valid samples bound it on both
    sides. Longer gaps and gaps touching the stream edges stay invalid.
    """
    out = stream.copy()
    if len(out) == 0:
        return out
    dt = _nominal_dt(out.t)
    if dt <= 0:
        return out
    _fill_one_eye(out.t, out.lx, out.ly, out.left_valid, max_gap_s, dt)
    _fill_one_eye(out.t, out.rx, out.ry, out.right_valid, max_gap_s, dt)
    # carry eye distance through filled spans so downstream users see a value
    ed_valid = np.isfinite(out.eye_distance_mm)
    if ed_valid.any() and not ed_valid.all():
        any_eye = out.left_valid | out.right_valid
        idx = np.nonzero(ed_valid)[0]
        filled = np.interp(out.t, out.t[idx], out.eye_distance_mm[idx])
        out.eye_distance_mm = np.where(~ed_valid & any_eye, filled, out.eye_distance_mm)
    return out


def select_eye(stream: GazeStream) -> PointTrace:
    """Collapse binocular samples into one trace: mean of both eyes when both
    are valid, the single valid eye otherwise, invalid when neither is."""
    both = stream.left_valid & stream.right_valid
    left_only = stream.left_valid & ~stream.right_valid
    right_only = stream.right_valid & ~stream.left_valid
    x = np.full(len(stream), np.nan)
    y = np.full(len(stream), np.nan)
    x[both] = 0.5 * (stream.lx[both] + stream.rx[both])
    y[both] = 0.5 * (stream.ly[both] + stream.ry[both])
    x[left_only] = stream.lx[left_only]
    y[left_only] = stream.ly[left_only]
    x[right_only] = stream.rx[right_only]
    y[right_only] = stream.ry[right_only]
    return PointTrace(stream.t.copy(), x, y, stream.left_valid | stream.right_valid)


def smooth_median(trace: PointTrace, window: int) -> PointTrace:
    """Centered moving median over the valid samples of the trace.

    Windows shrink symmetrically near the edges of the valid subsequence;
    invalid samples pass through untouched and do not contribute.
    """
    if window < 1 or window % 2 == 0:
        raise ValueError(f"median window must be odd and >= 1, got {window}")
    out = PointTrace(trace.t.copy(), trace.x.copy(), trace.y.copy(), trace.valid.copy())
    idx = np.nonzero(trace.valid)[0]
    m = len(idx)
    if m == 0 or window == 1:
        return out
    half = window // 2
    for arr_in, arr_out in ((trace.x, out.x), (trace.y, out.y)):
        vals = arr_in[idx]
        sm = np.empty(m)
        if m >= window:
            windows = np.lib.stride_tricks.sliding_window_view(vals, window)
            sm[half:m - half] = np.median(windows, axis=1)
        for k in range(min(half, m)):
            lo, hi = max(0, k - half), min(m, k + half + 1)
            # symmetric shrink keeps the window centered on sample k
            size = min(k - lo, hi - 1 - k)
            sm[k] = np.median(vals[k - size:k + size + 1])
        for k in range(max(m - half, 0), m):
            lo, hi = max(0, k - half), min(m, k + half + 1)
            size = min(k - lo, hi - 1 - k)
            sm[k] = np.median(vals[k - size:k + size + 1])
        arr_out[idx] = sm
    return out


def compute_velocity(
    trace: PointTrace, geometry: ScreenGeometry, velocity_window_s: float
) -> VelocityTrace:
    """Associate each sample with an angular speed in degrees per second.

    For sample i the speed is the visual angle between the two valid samples
    spanning the centered window [t_i - w/2, t_i + w/2], divided by their time
    difference. Samples without such a spanning pair (or invalid samples)
    carry an invalid velocity.
    """
    if velocity_window_s <= 0:
        raise ValueError("velocity_window_s must be positive")
    n = len(trace)
    speed = np.full(n, np.nan)
    valid_out = np.zeros(n, dtype=bool)
    idx = np.nonzero(trace.valid)[0]
    if len(idx) >= 2:
        tv = trace.t[idx]
        half = velocity_window_s / 2.0
        # a: last valid sample at or before t - w/2; b: first at or after t + w/2
        a = np.searchsorted(tv, trace.t - half, side="right") - 1
        b = np.searchsorted(tv, trace.t + half, side="left")
        ok = trace.valid & (a >= 0) & (b < len(idx))
        ia = idx[np.clip(a, 0, len(idx) - 1)]
        ib = idx[np.clip(b, 0, len(idx) - 1)]
        dt = trace.t[ib] - trace.t[ia]
        ok &= dt > 0
        sel = np.nonzero(ok)[0]
        if len(sel):
            dx_mm = (trace.x[ib[sel]] - trace.x[ia[sel]]) * geometry.width_mm
            dy_mm = (trace.y[ib[sel]] - trace.y[ia[sel]]) * geometry.height_mm
            d_mm = np.hypot(dx_mm, dy_mm)
            theta = np.degrees(2.0 * np.arctan2(d_mm, 2.0 * geometry.viewer_distance_mm))
            speed[sel] = theta / dt[sel]
            valid_out[sel] = True
    return VelocityTrace(trace.t.copy(), trace.x.copy(), trace.y.copy(), speed, valid_out)


def ivt_classify(velocities: VelocityTrace, threshold_deg_s: float) -> list[Fixation]:
    """Group maximal runs of sub-threshold samples into fixations.

    Invalid samples break runs. The centroid is the mean of the run's
    coordinates; the fixation spans the run's first to last timestamp.
    """
    if threshold_deg_s <= 0:
        raise ValueError("velocity threshold must be positive")
    member = velocities.valid & (velocities.speed_deg_s < threshold_deg_s)
    fixations = []
    n = len(velocities)
    i = 0
    while i < n:
        if not member[i]:
            i += 1
            continue
        j = i
        while j < n and member[j]:
            j += 1
        fixations.append(Fixation(
            start_t=float(velocities.t[i]),
            end_t=float(velocities.t[j - 1]),
            centroid_xy=(float(np.mean(velocities.x[i:j])), float(np.mean(velocities.y[i:j]))),
        ))
        i = j
    return fixations


def merge_fixations(
    fixations: list[Fixation],
    max_gap_s: float,
    max_angle_deg: float,
    geometry: ScreenGeometry,
) -> list[Fixation]:
    """Merge consecutive fixations split by noise.

    Two neighbours merge when the gap between them is at most ``max_gap_s``
    and their centroids subtend at most ``max_angle_deg``. Passes repeat until
    no further merge applies, so the result does not depend on split order.
    """
    result = list(fixations)
    changed = True
    while changed:
        changed = False
        merged: list[Fixation] = []
        for fx in result:
            if merged:
                prev = merged[-1]
                gap = fx.start_t - prev.end_t
                angle = geometry.visual_angle_deg(prev.centroid_xy, fx.centroid_xy)
                if gap <= max_gap_s and angle <= max_angle_deg:
                    d_prev = max(prev.duration_s, 1e-9)
                    d_fx = max(fx.duration_s, 1e-9)
                    w = d_prev + d_fx
                    cx = (prev.centroid_xy[0] * d_prev + fx.centroid_xy[0] * d_fx) / w
                    cy = (prev.centroid_xy[1] * d_prev + fx.centroid_xy[1] * d_fx) / w
                    merged[-1] = Fixation(prev.start_t, fx.end_t, (cx, cy))
                    changed = True
                    continue
            merged.append(fx)
        result = merged
    return result


def discard_short(fixations: list[Fixation], min_duration_s: float) -> list[Fixation]:
    """Drop fixations shorter than ``min_duration_s``."""
    return [f for f in fixations if f.duration_s >= min_duration_s]


def detect_fixations(
    stream: GazeStream, geometry: ScreenGeometry, config: IvtConfig | None = None
) -> list[Fixation]:
    """Run the full seven-step I-VT chain over a raw binocular stream."""
    cfg = config or IvtConfig()
    filled = fill_gaps(stream, cfg.max_gap_s)
    trace = select_eye(filled)
    smoothed = smooth_median(trace, cfg.median_window)
    velocities = compute_velocity(smoothed, geometry, cfg.velocity_window_s)
    fixations = ivt_classify(velocities, cfg.velocity_threshold_deg_s)
    fixations = merge_fixations(fixations, cfg.merge_max_gap_s, cfg.merge_max_angle_deg, geometry)
    return discard_short(fixations, cfg.min_fixation_s)


def clip_fixations(fixations, t_start: float, t_end: float) -> list[Fixation]:
    """Fixations intersecting [t_start, t_end), clipped to the window bounds."""
    out = []
    for f in fixations:
        if f.end_t <= t_start or f.start_t >= t_end:
            continue
        out.append(Fixation(
            start_t=max(f.start_t, t_start),
            end_t=min(f.end_t, t_end),
            centroid_xy=f.centroid_xy,
        ))
    return out
