"""Reduced-overlap MDCT analysis and WOLA synthesis.

Frames are 256 samples; each analysis window covers two frames (512
samples) but tapers over only 128 samples on each side, with 64 zeros
beyond the taper.  The same window drives analysis, synthesis, and the
pitch path.  The full analysis/synthesis chain reproduces its input
delayed by exactly 384 samples.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

FRAME_SIZE = 256
OVERLAP = 128
ZERO_PAD = 64
WINDOW_SIZE = 2 * FRAME_SIZE
TOTAL_DELAY = 384  # window minus the two zero-pad regions


def _rise(overlap):
    n = np.arange(overlap)
    return np.sin(0.5 * np.pi * np.sin(np.pi * (n + 0.5) / (2 * overlap)) ** 2)


def build_window():
    """Power-complementary window: zeros, rise, flat top, fall, zeros."""
    w = np.zeros(WINDOW_SIZE)
    r = _rise(OVERLAP)
    w[ZERO_PAD : ZERO_PAD + OVERLAP] = r
    w[ZERO_PAD + OVERLAP : WINDOW_SIZE - ZERO_PAD - OVERLAP] = 1.0
    w[WINDOW_SIZE - ZERO_PAD - OVERLAP : WINDOW_SIZE - ZERO_PAD] = r[::-1]
    return w


def _basis():
    n = np.arange(WINDOW_SIZE)[None, :]
    k = np.arange(FRAME_SIZE)[:, None]
    return np.cos(
        np.pi / FRAME_SIZE * (n + 0.5 + FRAME_SIZE / 2) * (k + 0.5)
    )


@dataclass
class WindowConfig:
    """Precomputed window and transform basis shared by all paths."""

    window: np.ndarray = field(default_factory=build_window)
    basis: np.ndarray = field(default_factory=_basis)
    scale: float = float(np.sqrt(2.0 / FRAME_SIZE))


_DEFAULT = None


def default_config():
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = WindowConfig()
    return _DEFAULT


def forward_mdct(region, cfg=None):
    """Transform a raw 512-sample region (window applied here)."""
    cfg = cfg or default_config()
    region = np.asarray(region, dtype=np.float64)
    if region.shape != (WINDOW_SIZE,):
        raise ValueError(f"expected {WINDOW_SIZE} samples, got {region.shape}")
    return cfg.scale * (cfg.basis @ (cfg.window * region))


def inverse_frame(spectrum, cfg=None):
    """One synthesis frame: inverse transform plus synthesis window."""
    cfg = cfg or default_config()
    spectrum = np.asarray(spectrum, dtype=np.float64)
    return cfg.window * (cfg.scale * (cfg.basis.T @ spectrum))


class WolaSynthesizer:
    """Overlap-add state for streaming synthesis.

    Feed one spectrum per frame; get back 256 output samples per call,
    aligned so the whole analysis/synthesis chain is a pure 384-sample
    delay.  ``last_frame`` holds the raw reconstructed frame (without
    the alignment delay) and ``settled_tail`` the leading part of the
    pending overlap that no future frame will alter; together they are
    the decoded history the pitch predictor searches.
    """

    def __init__(self, cfg=None):
        self.cfg = cfg or default_config()
        self.tail = np.zeros(FRAME_SIZE)
        self._align = np.zeros(OVERLAP)
        self.last_frame = np.zeros(FRAME_SIZE)

    def process(self, spectrum):
        v = inverse_frame(spectrum, self.cfg)
        recon = v[:FRAME_SIZE] + self.tail
        self.tail = v[FRAME_SIZE:].copy()
        self.last_frame = recon
        out = np.concatenate([self._align, recon[:FRAME_SIZE - OVERLAP]])
        self._align = recon[FRAME_SIZE - OVERLAP:].copy()
        return out

    @property
    def settled_tail(self):
        """Leading tail samples that no future frame will alter."""
        return self.tail[:ZERO_PAD]
