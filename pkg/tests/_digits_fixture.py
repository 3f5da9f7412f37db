"""28x28 handwritten-digit corpus for the end-to-end retrieval check.

Prefers real MNIST when the IDX files are available locally (directory given
by the MNIST_DIR environment variable, containing train-images-idx3-ubyte and
train-labels-idx1-ubyte, optionally gzipped). This sandbox has no dataset
network access, so the default is a stand-in built from the bundled sklearn
handwritten digits (8x8, 10 classes): each sample is upsampled to 28x28 and
augmented with random shifts and pixel noise to reach the required corpus
size. Both variants give 784-dim raw-pixel vectors with class labels.
"""

from __future__ import annotations

import gzip
import os
import struct
from pathlib import Path

import numpy as np


def _read_idx(path: Path) -> np.ndarray:
    opener = gzip.open if path.suffix == ".gz" else open
    with opener(path, "rb") as fh:
        magic, = struct.unpack(">I", fh.read(4))
        ndim = magic & 0xFF
        shape = struct.unpack(f">{ndim}I", fh.read(4 * ndim))
        return np.frombuffer(fh.read(), dtype=np.uint8).reshape(shape)


def _load_mnist(root: Path, n: int, seed: int):
    def find(stem):
        for name in (stem, stem + ".gz"):
            p = root / name
            if p.exists():
                return p
        raise FileNotFoundError(stem)

    images = _read_idx(find("train-images-idx3-ubyte"))
    labels = _read_idx(find("train-labels-idx1-ubyte"))
    idx = np.random.default_rng(seed).choice(len(images), size=n, replace=False)
    return images[idx].reshape(n, 784).astype(np.float32), labels[idx].astype(int)


def _upsample_28(img8: np.ndarray) -> np.ndarray:
    big = np.kron(img8, np.ones((3, 3)))  # 24x24
    return np.pad(big, 2)


def _load_digits_augmented(n: int, seed: int):
    from sklearn.datasets import load_digits

    base = load_digits()
    rng = np.random.default_rng(seed)
    picks = rng.integers(0, len(base.data), size=n)
    out = np.empty((n, 784), dtype=np.float32)
    labels = base.target[picks].astype(int)
    for i, p in enumerate(picks):
        img = _upsample_28(base.images[p])
        dy, dx = rng.integers(-2, 3, size=2)
        img = np.roll(np.roll(img, dy, axis=0), dx, axis=1)
        img = img + rng.normal(scale=0.5, size=img.shape)
        out[i] = np.clip(img, 0, 16).ravel()
    return out, labels


def load_digit_corpus(n: int, seed: int):
    """(X, labels): n 784-dim raw-pixel digit vectors with 10-class labels."""
    root = os.environ.get("MNIST_DIR")
    if root:
        try:
            return _load_mnist(Path(root), n, seed)
        except FileNotFoundError:
            pass
    return _load_digits_augmented(n, seed)
