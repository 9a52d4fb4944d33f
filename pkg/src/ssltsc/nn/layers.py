"""Layers with explicit analytic gradients, and the Network container.

Forward passes cache whatever the backward pass needs; calling backward
before forward is an error. Gradients accumulate into per-layer buffers
until zero_grads().
"""

from __future__ import annotations

import numpy as np


class Layer:
    def forward(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def backward(self, grad: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def params(self) -> list[tuple[str, np.ndarray]]:
        return []

    def grads(self) -> list[tuple[str, np.ndarray]]:
        return []

    def zero_grads(self) -> None:
        for _, g in self.grads():
            g[...] = 0.0

    def spec(self) -> dict:
        raise NotImplementedError


class Dense(Layer):
    def __init__(self, w: np.ndarray, b: np.ndarray):
        self.w = np.asarray(w, dtype=np.float64)
        self.b = np.asarray(b, dtype=np.float64)
        self.gw = np.zeros_like(self.w)
        self.gb = np.zeros_like(self.b)
        self._x: np.ndarray | None = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        self._x = x
        return x @ self.w + self.b

    def backward(self, grad: np.ndarray) -> np.ndarray:
        if self._x is None:
            raise RuntimeError("backward before forward")
        self.gw += self._x.T @ grad
        self.gb += grad.sum(axis=0)
        return grad @ self.w.T

    def params(self):
        return [("w", self.w), ("b", self.b)]

    def grads(self):
        return [("w", self.gw), ("b", self.gb)]

    def spec(self) -> dict:
        return {"type": "dense"}


class ReLU(Layer):
    def __init__(self):
        self._mask: np.ndarray | None = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        self._mask = x > 0  # subgradient at 0 is 0
        return x * self._mask

    def backward(self, grad: np.ndarray) -> np.ndarray:
        if self._mask is None:
            raise RuntimeError("backward before forward")
        return grad * self._mask

    def spec(self) -> dict:
        return {"type": "relu"}


class AsChannels(Layer):
    """(B, T) -> (B, 1, T) so convolutions see a channel axis."""

    def forward(self, x: np.ndarray) -> np.ndarray:
        return x[:, None, :]

    def backward(self, grad: np.ndarray) -> np.ndarray:
        return grad[:, 0, :]

    def spec(self) -> dict:
        return {"type": "as_channels"}


class Conv1d(Layer):
    """Strided valid 1-D convolution: (B, C_in, L) -> (B, C_out, L_out)."""

    def __init__(self, w: np.ndarray, b: np.ndarray, stride: int):
        self.w = np.asarray(w, dtype=np.float64)  # (c_out, c_in, k)
        self.b = np.asarray(b, dtype=np.float64)
        self.stride = int(stride)
        self.gw = np.zeros_like(self.w)
        self.gb = np.zeros_like(self.b)
        self._patches: np.ndarray | None = None
        self._in_shape: tuple[int, ...] | None = None

    @staticmethod
    def out_length(length: int, kernel: int, stride: int) -> int:
        return (length - kernel) // stride + 1

    def forward(self, x: np.ndarray) -> np.ndarray:
        k = self.w.shape[2]
        length = x.shape[2]
        if length < k:
            raise ValueError(f"input length {length} shorter than kernel {k}")
        n_out = self.out_length(length, k, self.stride)
        idx = np.arange(n_out)[:, None] * self.stride + np.arange(k)[None, :]
        patches = x[:, :, idx]  # (B, c_in, L_out, k)
        self._patches = patches
        self._in_shape = x.shape
        out = np.einsum("bclk,ock->bol", patches, self.w, optimize=True)
        return out + self.b[None, :, None]

    def backward(self, grad: np.ndarray) -> np.ndarray:
        if self._patches is None or self._in_shape is None:
            raise RuntimeError("backward before forward")
        self.gw += np.einsum("bclk,bol->ock", self._patches, grad, optimize=True)
        self.gb += grad.sum(axis=(0, 2))
        gpatches = np.einsum("bol,ock->bclk", grad, self.w, optimize=True)
        gx = np.zeros(self._in_shape)
        k = self.w.shape[2]
        offsets = np.arange(grad.shape[2]) * self.stride
        for dk in range(k):  # offsets are unique per dk, so += is safe
            gx[:, :, offsets + dk] += gpatches[:, :, :, dk]
        return gx

    def params(self):
        return [("w", self.w), ("b", self.b)]

    def grads(self):
        return [("w", self.gw), ("b", self.gb)]

    def spec(self) -> dict:
        return {"type": "conv1d", "stride": self.stride}


class GlobalAvgPool(Layer):
    """(B, C, L) -> (B, C), averaging over time."""

    def __init__(self):
        self._length: int | None = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        self._length = x.shape[2]
        return x.mean(axis=2)

    def backward(self, grad: np.ndarray) -> np.ndarray:
        if self._length is None:
            raise RuntimeError("backward before forward")
        return np.repeat(grad[:, :, None], self._length, axis=2) / self._length

    def spec(self) -> dict:
        return {"type": "global_avg_pool"}


class Network:
    """A feed-forward chain of layers with named parameters.

    ``kind`` tags what the network is (mlp/cnn encoder, classifier);
    ``input_width`` and ``output_width`` are the 2-D in/out column counts.
    An empty layer list is the identity network.
    """

    def __init__(self, layers: list[Layer], kind: str, input_width: int, output_width: int):
        self.layers = layers
        self.kind = kind
        self.input_width = input_width
        self.output_width = output_width
        self._forward_ran = False

    def forward(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != self.input_width:
            raise ValueError(
                f"{self.kind} expects (batch, {self.input_width}) input, "
                f"got {x.shape}"
            )
        for layer in self.layers:
            x = layer.forward(x)
        self._forward_ran = True
        return x

    def backward(self, grad: np.ndarray) -> np.ndarray:
        if not self._forward_ran:
            raise RuntimeError("backward before forward")
        for layer in reversed(self.layers):
            grad = layer.backward(grad)
        return grad

    def param_items(self) -> list[tuple[str, np.ndarray]]:
        return [
            (f"layer{i}.{name}", arr)
            for i, layer in enumerate(self.layers)
            for name, arr in layer.params()
        ]

    def grad_items(self) -> list[tuple[str, np.ndarray]]:
        return [
            (f"layer{i}.{name}", arr)
            for i, layer in enumerate(self.layers)
            for name, arr in layer.grads()
        ]

    def zero_grads(self) -> None:
        for layer in self.layers:
            layer.zero_grads()

    @property
    def n_params(self) -> int:
        return sum(arr.size for _, arr in self.param_items())
