"""Minimal neural-network kernel: layers, losses, Adam, gradient checks."""

from .checkpoint import (copy_network, load_network, network_from_dict,
                         network_to_dict, params_hash, save_network)
from .gradcheck import grad_check
from .layers import AsChannels, Conv1d, Dense, GlobalAvgPool, Network, ReLU
from .losses import cross_entropy_with_grads
from .models import (build_classifier, build_cnn_encoder, build_encoder,
                     build_mlp_encoder, classify, encode, predict_labels)
from .optim import Adam, AdamState

__all__ = [
    "Adam", "AdamState", "AsChannels", "Conv1d", "Dense", "GlobalAvgPool",
    "Network", "ReLU", "build_classifier", "build_cnn_encoder", "build_encoder",
    "build_mlp_encoder", "classify", "copy_network", "cross_entropy_with_grads",
    "encode", "grad_check", "load_network", "network_from_dict",
    "network_to_dict", "params_hash", "predict_labels", "save_network",
]
