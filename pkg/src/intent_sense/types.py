"""Core domain types: screen geometry, gaze streams, EEG recordings, trials, epochs."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .exceptions import DataError

TARGET_TOOLS = ("Hammer", "Pliers", "Saw", "Screwdriver", "Wrench")

#: Trials whose shared epoch duration falls below this cannot yield a single
#: valid fixation (min fixation 60 ms plus merge windows) and are excluded.
MIN_EPOCH_DURATION_S = 0.2

#: Duration of the scene-presentation phase; enforced on ingested events.
NAV_PHASE_S = 5.0
NAV_PHASE_TOL_S = 0.05


class Intent(str, Enum):
    NAVIGATIONAL = "Navigational"
    INFORMATIONAL = "Informational"


class Modality(str, Enum):
    EEG = "EEG"
    GAZE = "Gaze"
    FUSED = "Fused"


@dataclass(frozen=True)
class ScreenGeometry:
    """Physical display setup used to convert normalized gaze coordinates
    into visual angles.

    Coordinates are normalized with origin at the top-left corner, x growing
    rightward and y downward.
    """

    width_px: int
    height_px: int
    width_mm: float
    height_mm: float
    viewer_distance_mm: float

    def __post_init__(self):
        for name in ("width_px", "height_px", "width_mm", "height_mm", "viewer_distance_mm"):
            if getattr(self, name) <= 0:
                raise ValueError(f"ScreenGeometry.{name} must be strictly positive")

    def to_mm(self, xy):
        """Map normalized (x, y) to millimetres on the screen plane."""
        xy = np.asarray(xy, dtype=float)
        return xy * np.array([self.width_mm, self.height_mm])

    def visual_angle_deg(self, xy_a, xy_b) -> float:
        """Visual angle subtended by two normalized points, in degrees."""
        d_mm = float(np.linalg.norm(self.to_mm(xy_a) - self.to_mm(xy_b)))
        return math.degrees(2.0 * math.atan2(d_mm, 2.0 * self.viewer_distance_mm))


@dataclass(frozen=True)
class GazeSample:
    """One binocular gaze row. Invalid eyes carry NaN coordinates."""

    t: float
    left_xy: tuple[float, float]
    right_xy: tuple[float, float]
    left_valid: bool
    right_valid: bool
    eye_distance_mm: float = float("nan")


class GazeStream:
    """Column-oriented gaze recording (time-sorted).

    Invalid eyes hold NaN in their coordinate columns; those values are never
    consumed downstream.
    """

    __slots__ = ("t", "lx", "ly", "rx", "ry", "left_valid", "right_valid", "eye_distance_mm")

    def __init__(self, t, lx, ly, rx, ry, left_valid, right_valid, eye_distance_mm=None):
        self.t = np.asarray(t, dtype=float)
        n = len(self.t)
        self.lx = np.asarray(lx, dtype=float)
        self.ly = np.asarray(ly, dtype=float)
        self.rx = np.asarray(rx, dtype=float)
        self.ry = np.asarray(ry, dtype=float)
        self.left_valid = np.asarray(left_valid, dtype=bool)
        self.right_valid = np.asarray(right_valid, dtype=bool)
        if eye_distance_mm is None:
            eye_distance_mm = np.full(n, np.nan)
        self.eye_distance_mm = np.asarray(eye_distance_mm, dtype=float)
        for name in self.__slots__:
            if len(getattr(self, name)) != n:
                raise ValueError(f"GazeStream column {name!r} has inconsistent length")
        if n > 1 and np.any(np.diff(self.t) < 0):
            raise DataError("gaze timestamps must be non-decreasing")

    def __len__(self):
        return len(self.t)

    def __getitem__(self, i) -> GazeSample:
        return GazeSample(
            t=float(self.t[i]),
            left_xy=(float(self.lx[i]), float(self.ly[i])),
            right_xy=(float(self.rx[i]), float(self.ry[i])),
            left_valid=bool(self.left_valid[i]),
            right_valid=bool(self.right_valid[i]),
            eye_distance_mm=float(self.eye_distance_mm[i]),
        )

    @classmethod
    def from_samples(cls, samples) -> "GazeStream":
        samples = list(samples)
        return cls(
            t=[s.t for s in samples],
            lx=[s.left_xy[0] for s in samples],
            ly=[s.left_xy[1] for s in samples],
            rx=[s.right_xy[0] for s in samples],
            ry=[s.right_xy[1] for s in samples],
            left_valid=[s.left_valid for s in samples],
            right_valid=[s.right_valid for s in samples],
            eye_distance_mm=[s.eye_distance_mm for s in samples],
        )

    def copy(self) -> "GazeStream":
        return GazeStream(
            self.t.copy(), self.lx.copy(), self.ly.copy(), self.rx.copy(),
            self.ry.copy(), self.left_valid.copy(), self.right_valid.copy(),
            self.eye_distance_mm.copy(),
        )

    @property
    def time_range(self) -> tuple[float, float]:
        if len(self.t) == 0:
            return (math.inf, -math.inf)
        return float(self.t[0]), float(self.t[-1])


@dataclass
class EegRecording:
    """Continuous multichannel EEG, samples in microvolts, shape [channels, time]."""

    channel_names: list[str]
    fs_hz: float
    samples: np.ndarray
    t0: float = 0.0

    def __post_init__(self):
        self.samples = np.asarray(self.samples)
        if self.samples.ndim != 2:
            raise ValueError("EEG samples must be a 2-D [channels, time] matrix")
        if len(self.channel_names) != self.samples.shape[0]:
            raise ValueError(
                f"channel_names has {len(self.channel_names)} entries but samples "
                f"has {self.samples.shape[0]} channels"
            )
        if self.fs_hz <= 0:
            raise ValueError("fs_hz must be positive")

    @property
    def n_channels(self) -> int:
        return self.samples.shape[0]

    @property
    def n_samples(self) -> int:
        return self.samples.shape[1]

    @property
    def time_range(self) -> tuple[float, float]:
        return self.t0, self.t0 + (self.n_samples - 1) / self.fs_hz

    def with_samples(self, samples) -> "EegRecording":
        return EegRecording(list(self.channel_names), self.fs_hz, samples, self.t0)


@dataclass(frozen=True)
class TrialEvents:
    """Time-locked event markers of one trial (all times in seconds)."""

    trial_id: int
    user_id: str
    target_tool: str
    nav_start: float
    nav_end: float
    cue_start: float
    cue_end: float
    search_start: float
    search_found: float

    def validate(self):
        """Raise DataError when the event ordering or phase lengths are inconsistent."""
        if self.target_tool not in TARGET_TOOLS:
            raise DataError(f"trial {self.trial_id}: unknown target tool {self.target_tool!r}")
        seq = (self.nav_start, self.nav_end, self.cue_start, self.cue_end,
               self.search_start, self.search_found)
        if not all(math.isfinite(v) for v in seq):
            raise DataError(f"trial {self.trial_id}: non-finite event time")
        ordered = (self.nav_start < self.nav_end <= self.cue_start < self.cue_end
                   <= self.search_start < self.search_found)
        if not ordered:
            raise DataError(f"trial {self.trial_id}: event times out of order")
        nav_len = self.nav_end - self.nav_start
        if abs(nav_len - NAV_PHASE_S) > NAV_PHASE_TOL_S:
            raise DataError(
                f"trial {self.trial_id}: navigational phase lasts {nav_len:.3f}s, "
                f"expected {NAV_PHASE_S}±{NAV_PHASE_TOL_S}s"
            )

    @property
    def search_duration_s(self) -> float:
        return self.search_found - self.search_start


@dataclass(frozen=True)
class Fixation:
    """A detected fixation event with normalized centroid coordinates."""

    start_t: float
    end_t: float
    centroid_xy: tuple[float, float]

    def __post_init__(self):
        if not self.end_t >= self.start_t:
            raise ValueError("fixation end_t must not precede start_t")

    @property
    def duration_s(self) -> float:
        return self.end_t - self.start_t


@dataclass
class Epoch:
    """One labeled, equal-duration window of synchronized EEG and fixations."""

    user_id: str
    trial_id: int
    intent: Intent
    eeg: np.ndarray
    fs_hz: float
    fixations: list[Fixation]
    duration_s: float
    search_duration_s: float
    start_t: float

    @property
    def epoch_id(self) -> str:
        return f"{self.user_id}:{self.trial_id}:{self.intent.value}"

    @property
    def n_channels(self) -> int:
        return self.eeg.shape[0]


@dataclass
class UserRecording:
    """All raw (or preprocessed) streams of one participant."""

    user_id: str
    gaze: GazeStream
    eeg: EegRecording
    trials: list[TrialEvents]


@dataclass
class LoadReport:
    """Bookkeeping of what ingestion dropped, mirroring the per-user scene filtering."""

    dropped_trials: dict[str, int] = field(default_factory=dict)
    dropped_users: dict[str, str] = field(default_factory=dict)
    skipped_rows: dict[str, int] = field(default_factory=dict)

    def total_dropped_trials(self) -> int:
        return sum(self.dropped_trials.values())


@dataclass
class Dataset:
    """Immutable bundle of per-user recordings plus shared screen geometry."""

    users: dict[str, UserRecording]
    geometry: ScreenGeometry
    report: LoadReport = field(default_factory=LoadReport)

    @property
    def user_ids(self) -> list[str]:
        return sorted(self.users)

    def n_trials(self) -> int:
        return sum(len(u.trials) for u in self.users.values())


@dataclass
class FeatureVector:
    """Named numeric features for one epoch."""

    values: np.ndarray
    names: list[str]
    modality: Modality
    epoch_id: str | None = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1:
            raise ValueError("feature values must be 1-dimensional")
        if len(self.values) != len(self.names):
            raise ValueError("feature values and names differ in length")
        if self.values.size and not np.all(np.isfinite(self.values)):
            bad = [self.names[i] for i in np.nonzero(~np.isfinite(self.values))[0][:5]]
            raise ValueError(f"non-finite feature values: {bad}")

    def __len__(self):
        return len(self.values)
