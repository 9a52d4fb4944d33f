"""Adam optimizer with bias correction."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class AdamState:
    """First/second moment tensors per parameter name, plus the step count."""

    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)


class Adam:
    def __init__(self, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.state = AdamState(beta1=beta1, beta2=beta2, eps=eps)

    def step(self, params: list[tuple[str, np.ndarray]],
             grads: list[tuple[str, np.ndarray]], lr: float) -> None:
        """One in-place update. lr=0 leaves parameters unchanged but still
        advances the moments."""
        state = self.state
        state.step += 1
        bc1 = 1.0 - state.beta1 ** state.step
        bc2 = 1.0 - state.beta2 ** state.step
        for (name, p), (gname, g) in zip(params, grads, strict=True):
            if name != gname:
                raise ValueError(f"parameter/gradient mismatch: {name} vs {gname}")
            if not np.all(np.isfinite(g)):
                raise ValueError(f"non-finite gradient for {name}")
            if name not in state.m:
                state.m[name] = np.zeros_like(p)
                state.v[name] = np.zeros_like(p)
            m, v = state.m[name], state.v[name]
            m *= state.beta1
            m += (1.0 - state.beta1) * g
            v *= state.beta2
            v += (1.0 - state.beta2) * (g * g)
            p -= lr * (m / bc1) / (np.sqrt(v / bc2) + state.eps)
