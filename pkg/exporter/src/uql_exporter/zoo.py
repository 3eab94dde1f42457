"""Tiny classifier zoo with reproducible weights.

Each entry builds the architecture and materializes its checkpoint from a
fixed per-model seed, so "loading" a zoo model yields identical weights on
every machine without shipping weight files.
"""

import torch
from torch import nn


class ModelNotFoundError(KeyError):
    pass


class TinyCNN(nn.Module):
    """Small conv net for 3x8x8 inputs, with a dropout layer for MC passes."""

    def __init__(self, num_classes: int, dropout: float = 0.25):
        super().__init__()
        self.features = nn.Sequential(
            nn.Conv2d(3, 16, 3, padding=1),
            nn.ReLU(),
            nn.MaxPool2d(2),
            nn.Conv2d(16, 32, 3, padding=1),
            nn.ReLU(),
            nn.AdaptiveAvgPool2d(1),
        )
        self.dropout = nn.Dropout(dropout)
        self.head = nn.Linear(32, num_classes)

    def forward(self, x):
        x = self.features(x).flatten(1)
        return self.head(self.dropout(x))


_ZOO = {
    "tinycnn-3": dict(num_classes=3, dropout=0.25, seed=101),
    "tinycnn-3-nodrop": dict(num_classes=3, dropout=0.0, seed=101),
    "tinycnn-10": dict(num_classes=10, dropout=0.25, seed=202),
}


def list_models():
    return sorted(_ZOO)


def num_classes(name: str) -> int:
    if name not in _ZOO:
        raise ModelNotFoundError(f"unknown model {name!r}; have {list_models()}")
    return _ZOO[name]["num_classes"]


def load_model(name: str) -> TinyCNN:
    if name not in _ZOO:
        raise ModelNotFoundError(f"unknown model {name!r}; have {list_models()}")
    cfg = _ZOO[name]
    generator = torch.Generator().manual_seed(cfg["seed"])
    model = TinyCNN(cfg["num_classes"], cfg["dropout"])
    with torch.no_grad():
        for p in model.parameters():
            p.copy_(torch.empty_like(p).normal_(0.0, 0.5, generator=generator))
    model.eval()
    return model
