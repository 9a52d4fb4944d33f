"""View transforms for contrastive training on time-series windows.

Four transforms: left-to-right flip, blockout (zero a contiguous run),
crop-and-resize (crop half the window, linearly interpolate back to full
length), and additive Gaussian noise. All preserve the window length.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

KINDS = ("flip", "blockout", "crop_resize", "gaussian_noise")


@dataclass(frozen=True)
class AugmentSpec:
    """Which transform to apply and its parameters.

    ``crop_fraction`` is fixed at 1/2; it is carried here so configs echo it.
    """

    kind: str = "crop_resize"
    blockout_fraction: float = 0.1  # fraction of entries zeroed
    noise_mean: float = 0.0
    noise_std: float = 0.1
    crop_fraction: float = 0.5

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if not 0.0 <= self.blockout_fraction <= 1.0:
            raise ValueError("blockout_fraction must be in [0, 1]")
        if self.noise_std < 0:
            raise ValueError("noise_std must be >= 0")
        if self.crop_fraction != 0.5:
            raise ValueError("crop_fraction is fixed at 0.5")


def flip(x: np.ndarray) -> np.ndarray:
    """Reverse along time: output[k] = x[T-1-k]."""
    return np.ascontiguousarray(np.flip(x, axis=-1))


def blockout_count(fraction: float, t: int) -> int:
    # round half up, so fraction * T entries are zeroed as stated
    return int(np.floor(fraction * t + 0.5))


def blockout(x: np.ndarray, fraction: float, rng: np.random.Generator,
             start: int | None = None) -> np.ndarray:
    """Zero one contiguous run of round(fraction*T) entries at a random offset."""
    if not 0.0 <= fraction <= 1.0:
        raise ValueError("fraction must be in [0, 1]")
    t = x.shape[-1]
    n_zero = blockout_count(fraction, t)
    out = np.array(x, dtype=np.float64, copy=True)
    if n_zero == 0:
        return out
    if start is None:
        start = int(rng.integers(0, t - n_zero + 1))
    out[..., start:start + n_zero] = 0.0
    return out


def crop_resize(x: np.ndarray, rng: np.random.Generator,
                start: int | None = None) -> np.ndarray:
    """Crop a random half-length chunk and stretch it back to length T.

    Even output positions copy crop values; odd positions average two
    successive crop values. The final odd position would read one past the
    crop, so that index is clamped to the last crop element.
    """
    t = x.shape[-1]
    if t % 2 != 0 or t < 4:
        raise ValueError(f"crop_resize requires even length >= 4, got {t}")
    half = t // 2
    if start is None:
        start = int(rng.integers(0, half))
    crop = np.asarray(x, dtype=np.float64)[start:start + half]
    left = np.repeat(crop, 2)  # index floor(k/2) for every output k
    right_idx = np.minimum(np.arange(t) // 2 + 1, half - 1)
    out = left.copy()
    out[1::2] = (left[1::2] + crop[right_idx[1::2]]) / 2.0
    return out


def gaussian_noise(x: np.ndarray, mean: float, std: float,
                   rng: np.random.Generator) -> np.ndarray:
    """Add iid Normal(mean, std) noise to every entry."""
    if std < 0:
        raise ValueError("std must be >= 0")
    return np.asarray(x, dtype=np.float64) + rng.normal(mean, std, size=x.shape)


def apply_augment(x: np.ndarray, spec: AugmentSpec, rng: np.random.Generator) -> np.ndarray:
    if spec.kind == "flip":
        return flip(x)
    if spec.kind == "blockout":
        return blockout(x, spec.blockout_fraction, rng)
    if spec.kind == "crop_resize":
        return crop_resize(x, rng)
    return gaussian_noise(x, spec.noise_mean, spec.noise_std, rng)


def make_view_pair(x: np.ndarray, spec: AugmentSpec,
                   rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Two views of one window for a positive pair.

    Stochastic transforms are applied twice independently. Flip is
    deterministic, so the pair is (identity, flip); two identical flips
    would make the positive pair degenerate.
    """
    if spec.kind == "flip":
        return np.array(x, dtype=np.float64, copy=True), flip(x)
    return apply_augment(x, spec, rng), apply_augment(x, spec, rng)


def _augment_batch(x: np.ndarray, spec: AugmentSpec, rng: np.random.Generator) -> np.ndarray:
    """One independent random transform per row of x (B, T)."""
    b, t = x.shape
    if spec.kind == "flip":
        return flip(x)
    if spec.kind == "gaussian_noise":
        return x + rng.normal(spec.noise_mean, spec.noise_std, size=x.shape)
    if spec.kind == "blockout":
        n_zero = blockout_count(spec.blockout_fraction, t)
        out = np.array(x, dtype=np.float64, copy=True)
        if n_zero == 0:
            return out
        starts = rng.integers(0, t - n_zero + 1, size=b)
        cols = starts[:, None] + np.arange(n_zero)[None, :]
        out[np.arange(b)[:, None], cols] = 0.0
        return out
    # crop_resize
    if t % 2 != 0 or t < 4:
        raise ValueError(f"crop_resize requires even length >= 4, got {t}")
    half = t // 2
    starts = rng.integers(0, half, size=b)
    rows = np.arange(b)[:, None]
    crop = x[rows, starts[:, None] + np.arange(half)[None, :]]
    left = np.repeat(crop, 2, axis=1)
    right_idx = np.minimum(np.arange(t) // 2 + 1, half - 1)
    out = left.copy()
    out[:, 1::2] = (left[:, 1::2] + crop[:, right_idx[1::2]]) / 2.0
    return out


def make_view_pairs(x: np.ndarray, spec: AugmentSpec,
                    rng: np.random.Generator) -> np.ndarray:
    """Batched view pairs: rows 2t and 2t+1 of the result are segment t's pair."""
    if spec.kind == "flip":
        first, second = np.array(x, dtype=np.float64, copy=True), flip(x)
    else:
        first, second = _augment_batch(x, spec, rng), _augment_batch(x, spec, rng)
    out = np.empty((2 * x.shape[0], x.shape[1]), dtype=np.float64)
    out[0::2] = first
    out[1::2] = second
    return out
