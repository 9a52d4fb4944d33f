"""Finite-difference verification of analytic gradients."""

from __future__ import annotations

from typing import Callable

import numpy as np

from .layers import Network


def grad_check(network: Network, loss_fn: Callable[[Network], float],
               eps: float = 1e-5) -> float:
    """Max relative error between analytic and central-difference gradients.

    ``loss_fn(network)`` must run a forward pass, call ``network.backward``
    with the loss gradient, and return the scalar loss. It is re-evaluated
    under elementwise parameter perturbations, so it must be deterministic
    (fix any random inputs before calling). Intended for networks of up to
    a few thousand parameters.
    """
    network.zero_grads()
    loss_fn(network)
    analytic = {name: g.copy() for name, g in network.grad_items()}
    max_rel = 0.0
    for name, p in network.param_items():
        a = analytic[name]
        for idx in np.ndindex(p.shape):
            orig = p[idx]
            p[idx] = orig + eps
            network.zero_grads()
            loss_plus = loss_fn(network)
            p[idx] = orig - eps
            network.zero_grads()
            loss_minus = loss_fn(network)
            p[idx] = orig
            numeric = (loss_plus - loss_minus) / (2.0 * eps)
            rel = abs(a[idx] - numeric) / max(abs(a[idx]), abs(numeric), 1e-8)
            max_rel = max(max_rel, rel)
    return max_rel
