"""Coarse and fine quantization of the per-band log-energies.

Coarse stage: 6 dB steps on a prediction residual.  The predictor is
two-dimensional: a leaky first-order term across frames (coefficient
alpha) and a leaky differentiator across bands (coefficient beta),
running on quantized values only so encoder and decoder stay in
lockstep.  Residuals are Laplace-coded.  A lost frame leaves a state
error that contracts by alpha with every correctly received frame.

Fine stage: the 6 dB cell is split uniformly into 2**bits equiprobable
levels, with per-band bit counts dictated by the allocator.
"""

from __future__ import annotations

import numpy as np

from .bands import NUM_BANDS

ALPHA = 0.8
BETA = 0.6
COARSE_STEP_DB = 6.0

# Per-band priority weights for distributing fine-energy bits: wider
# bands weigh more (their energy integrates more signal), but only by
# a square root so the narrow tonal bands still refine early.
FINE_PRIORITY_EXP = 0.5
FINE_BITS_CAP = 8


class EnergyPredictorState:
    """Quantized-energy history for one stream direction.

    ``dev`` stores the previous frame's quantized log-energy relative to
    the per-band means; a fresh stream starts at the means themselves.
    """

    def __init__(self, mu_db, alpha=ALPHA, beta=BETA, step_db=COARSE_STEP_DB):
        self.mu = np.asarray(mu_db, dtype=np.float64).copy()
        if self.mu.shape != (NUM_BANDS,):
            raise ValueError(f"need {NUM_BANDS} mean energies")
        self.alpha = float(alpha)
        self.beta = float(beta)
        self.step = float(step_db)
        self.dev = np.zeros(NUM_BANDS)

    def copy(self):
        st = EnergyPredictorState(self.mu, self.alpha, self.beta, self.step)
        st.dev = self.dev.copy()
        return st

    def predictions(self):
        """Per-band predicted log-energy before any residual, plus the
        running inter-band feedback, as consumed band by band."""
        return self.mu + self.alpha * self.dev

    def commit(self, refined_db):
        """Adopt the frame's final quantized energies as history."""
        self.dev = np.asarray(refined_db, dtype=np.float64) - self.mu

    def conceal(self, fade_db=3.0):
        """Advance the state for a lost frame: hold, minus a fade."""
        held = self.mu + self.dev - fade_db
        self.dev = held - self.mu
        return held


def coarse_quantize(e_db, state, quantize=True):
    """Run the coarse predictor over one frame.

    Returns (residuals, coarse_db).  With ``quantize=False`` the
    residuals stay continuous; that exposes the bare prediction filter
    for analysis without touching the bitstream path.
    """
    e_db = np.asarray(e_db, dtype=np.float64)
    residuals = np.zeros(NUM_BANDS)
    coarse = np.zeros(NUM_BANDS)
    d = 0.0
    for b in range(NUM_BANDS):
        pred = state.mu[b] + state.alpha * state.dev[b] + d
        err = e_db[b] - pred
        q = float(np.floor(err / state.step + 0.5)) if quantize else err / state.step
        residuals[b] = q
        coarse[b] = pred + state.step * q
        d += (1.0 - state.beta) * state.step * q
    return residuals, coarse


def coarse_encode(e_db, state, enc, model, budget_frac=None):
    """Quantize, entropy-code, and reconstruct one frame's coarse energies.

    The coded residual may clamp to the Laplace model's range; the
    reconstruction always uses the value that was actually coded.  With
    ``budget_frac`` set (absolute tell limit, 1/8-bit units), residuals
    shrink toward zero rather than overflow the frame: wild input can
    degrade the envelope but never break the bitstream.
    """
    e_db = np.asarray(e_db, dtype=np.float64)
    coarse = np.zeros(NUM_BANDS)
    d = 0.0
    for b in range(NUM_BANDS):
        pred = state.mu[b] + state.alpha * state.dev[b] + d
        err = e_db[b] - pred
        q = int(np.floor(err / state.step + 0.5))
        if budget_frac is not None:
            reserve = (NUM_BANDS - 1 - b) * model.max_zero_cost_frac
            room = budget_frac - enc.tell_frac() - reserve
            while q != 0 and model.cost_frac(q, b) > room:
                q -= 1 if q > 0 else -1
        q = enc.encode_laplace(q, model, b)
        coarse[b] = pred + state.step * q
        d += (1.0 - state.beta) * state.step * q
    return coarse


def coarse_decode(dec, state, model):
    """Mirror of :func:`coarse_encode`; bit-exact reconstruction."""
    coarse = np.zeros(NUM_BANDS)
    d = 0.0
    for b in range(NUM_BANDS):
        q = dec.decode_laplace(model, b)
        pred = state.mu[b] + state.alpha * state.dev[b] + d
        coarse[b] = pred + state.step * q
        d += (1.0 - state.beta) * state.step * q
    return coarse


def fine_encode(e_db, coarse_db, bits, enc, step_db=COARSE_STEP_DB):
    """Refine each band's coarse cell with equiprobable symbols."""
    refined = np.asarray(coarse_db, dtype=np.float64).copy()
    for b in range(NUM_BANDS):
        nb = int(bits[b])
        if nb <= 0:
            continue
        levels = 1 << nb
        err = float(e_db[b] - coarse_db[b])
        idx = int(np.floor((err / step_db + 0.5) * levels))
        idx = max(0, min(levels - 1, idx))
        enc.encode_uniform(idx, levels)
        refined[b] = coarse_db[b] + step_db * ((idx + 0.5) / levels - 0.5)
    return refined


def fine_decode(dec, coarse_db, bits, step_db=COARSE_STEP_DB):
    refined = np.asarray(coarse_db, dtype=np.float64).copy()
    for b in range(NUM_BANDS):
        nb = int(bits[b])
        if nb <= 0:
            continue
        levels = 1 << nb
        idx = dec.decode_uniform(levels)
        refined[b] = coarse_db[b] + step_db * ((idx + 0.5) / levels - 0.5)
    return refined


def fine_priority_order(widths):
    """Static order in which bands receive fine-energy bits.

    Width-weighted round robin: each band's priority score is
    width**FINE_PRIORITY_EXP, and bits are granted one at a time to the
    band with the highest score-to-grant ratio (ties to lower index).
    """
    widths = np.asarray(widths, dtype=np.float64)[:NUM_BANDS]
    scores = widths ** FINE_PRIORITY_EXP
    return scores


def distribute_fine_bits(budget_bits, widths, cap=FINE_BITS_CAP):
    """Deterministically spread whole refinement bits across bands."""
    scores = fine_priority_order(widths)
    bits = np.zeros(NUM_BANDS, dtype=int)
    remaining = int(budget_bits)
    while remaining > 0:
        ratio = scores / (bits + 1.0)
        ratio[bits >= cap] = -1.0
        b = int(np.argmax(ratio))
        if ratio[b] < 0.0:
            break
        bits[b] += 1
        remaining -= 1
    return bits
