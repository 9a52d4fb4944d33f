"""Seeded synthetic skin-conductance cohort with a planted class signal.

Each subject's signal is a slowly drifting tonic baseline, superposed
phasic SCR bumps (fast rise, slow exponential decay), and additive noise.
Within a window around each planted use event, SCR rate and amplitude are
scaled up, which is the learnable effect the pipeline is meant to find.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Dataset, RawRecording, Segment, segment_recording, standardize_per_subject
from .rng import derive_rng


@dataclass(frozen=True)
class SynthConfig:
    """Cohort generation parameters. Same seed, same cohort, bit for bit."""

    n_subjects: int = 20
    wear_minutes: int = 490
    sample_rate: int = 4  # samples per minute
    n_events_per_subject: int = 4
    tonic_level: float = 2.0
    tonic_drift_amp: float = 0.25
    scr_rate_per_hour: float = 6.0
    scr_amp_range: tuple[float, float] = (0.1, 0.5)
    scr_rise_minutes: float = 0.05
    scr_decay_minutes: float = 0.7
    effect_window_minutes: float = 15.0
    effect_rate_mult: float = 4.0
    effect_amp_mult: float = 2.5
    subject_variability: float = 0.25  # log-scale spread of per-subject SCR traits
    noise_std: float = 0.05
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_subjects < 0 or self.wear_minutes <= 0 or self.sample_rate <= 0:
            raise ValueError("n_subjects, wear_minutes, sample_rate must be positive")
        if self.n_events_per_subject < 0:
            raise ValueError("n_events_per_subject must be >= 0")
        for name in ("tonic_drift_amp", "scr_rate_per_hour", "noise_std",
                     "subject_variability"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        lo, hi = self.scr_amp_range
        if lo < 0 or hi < lo:
            raise ValueError("scr_amp_range must be 0 <= lo <= hi")
        if self.effect_rate_mult < 1 or self.effect_amp_mult < 1:
            raise ValueError("effect multipliers must be >= 1")
        if self.scr_rise_minutes <= 0 or self.scr_decay_minutes <= self.scr_rise_minutes:
            raise ValueError("require 0 < scr_rise_minutes < scr_decay_minutes")


def subject_id(index: int) -> str:
    return f"S{index:02d}"


def tonic_baseline(cfg: SynthConfig, subject_index: int) -> np.ndarray:
    """Deterministic slow drift for one subject (its own named substream)."""
    rng = derive_rng(cfg.seed, "synth", subject_index, "tonic")
    phases = rng.uniform(0.0, 2.0 * np.pi, size=2)
    t = np.arange(cfg.wear_minutes * cfg.sample_rate) / cfg.sample_rate
    drift = 0.6 * np.sin(2.0 * np.pi * t / cfg.wear_minutes + phases[0])
    drift += 0.4 * np.sin(2.0 * np.pi * t / (cfg.wear_minutes / 3.0) + phases[1])
    return cfg.tonic_level + cfg.tonic_drift_amp * drift


def _scr_kernel(cfg: SynthConfig) -> np.ndarray:
    # Difference of exponentials, peak normalized to 1, truncated at 5 decay times.
    length = int(np.ceil(5.0 * cfg.scr_decay_minutes * cfg.sample_rate)) + 1
    tau = np.arange(length) / cfg.sample_rate
    kernel = np.exp(-tau / cfg.scr_decay_minutes) - np.exp(-tau / cfg.scr_rise_minutes)
    peak = kernel.max()
    return kernel / peak if peak > 0 else kernel


def _draw_event_times(cfg: SynthConfig, rng: np.random.Generator) -> np.ndarray:
    n = cfg.n_events_per_subject
    if n == 0:
        return np.empty(0, dtype=np.float64)
    min_sep = 2.0 * cfg.effect_window_minutes
    span = cfg.wear_minutes - (n - 1) * min_sep
    if span <= 0:
        raise ValueError(
            f"wear_minutes={cfg.wear_minutes} too short to place {n} events "
            f"with minimum separation {min_sep:g} minutes"
        )
    base = np.sort(rng.uniform(0.0, span, size=n))
    times = base + np.arange(n) * min_sep
    # uniform draws land strictly inside [0, span), so times stay < wear_minutes
    return times


def generate_recording(cfg: SynthConfig, subject_index: int) -> RawRecording:
    """Generate one subject's recording.

    All randomness comes from substreams named (cfg.seed, subject_index,
    component), so a subject's signal never depends on how many other
    subjects exist.
    """
    if not 0 <= subject_index < max(cfg.n_subjects, 1):
        raise ValueError(f"subject_index {subject_index} out of range")
    n_samples = cfg.wear_minutes * cfg.sample_rate
    t_minutes = np.arange(n_samples) / cfg.sample_rate

    events = _draw_event_times(cfg, derive_rng(cfg.seed, "synth", subject_index, "events"))

    in_effect = np.zeros(n_samples, dtype=bool)
    for e in events:
        in_effect |= np.abs(t_minutes - e) <= cfg.effect_window_minutes

    traits_rng = derive_rng(cfg.seed, "synth", subject_index, "traits")
    rate_factor, amp_factor = np.exp(
        cfg.subject_variability * traits_rng.standard_normal(2)
    )

    # Per-sample Bernoulli SCR onsets; rate in events per minute.
    p_onset = (cfg.scr_rate_per_hour / 60.0) * rate_factor / cfg.sample_rate
    rates = np.where(in_effect, p_onset * cfg.effect_rate_mult, p_onset)
    rates = np.clip(rates, 0.0, 1.0)
    onsets = derive_rng(cfg.seed, "synth", subject_index, "scr").random(n_samples) < rates

    lo, hi = cfg.scr_amp_range
    amps = derive_rng(cfg.seed, "synth", subject_index, "amps").uniform(lo, hi, n_samples)
    amps *= amp_factor
    amps = np.where(in_effect, amps * cfg.effect_amp_mult, amps)

    phasic = np.convolve(np.where(onsets, amps, 0.0), _scr_kernel(cfg))[:n_samples]
    noise = derive_rng(cfg.seed, "synth", subject_index, "noise").normal(
        0.0, cfg.noise_std, n_samples
    )

    return RawRecording(
        subject_id=subject_id(subject_index),
        sample_rate=cfg.sample_rate,
        samples=tonic_baseline(cfg, subject_index) + phasic + noise,
        event_times=events,
    )


def generate_cohort(cfg: SynthConfig) -> list[RawRecording]:
    """Generate all subjects; deleting one never changes the others."""
    return [generate_recording(cfg, i) for i in range(cfg.n_subjects)]


def synth_dataset(cfg: SynthConfig, window_minutes: int = 60, stride_minutes: int = 10,
                  standardize: bool = True) -> Dataset:
    """Cohort -> windowed, labeled, per-subject standardized dataset."""
    segments: list[Segment] = []
    for rec in generate_cohort(cfg):
        segments.extend(segment_recording(rec, window_minutes, stride_minutes))
    ds = Dataset.from_segments(segments)
    return standardize_per_subject(ds) if standardize else ds
