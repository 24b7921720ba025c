"""Band partition, energy measurement, and spectrum normalization.

The 256 transform bins split into 20 coded bands that roughly track
critical bands, plus one uncoded tail band that decodes as silence.
The decoder scales each band's unit-norm shape back to the transmitted
energy, so band energies survive any butchering of the fine structure.
"""

from __future__ import annotations

import numpy as np

# (start bin, width) per band; band 20 is never coded.
BAND_TABLE = (
    (0, 3), (3, 3), (6, 3), (9, 3), (12, 3), (15, 3), (18, 3), (21, 3),
    (24, 3), (27, 4), (31, 6), (37, 6), (43, 8), (51, 11), (62, 12),
    (74, 16), (90, 20), (110, 30), (140, 40), (180, 53), (233, 23),
)
NUM_BANDS = 20            # coded bands
NUM_BINS = 256
PITCH_BANDS = 15          # bands predicted from the past; the rest fold
FOLD_START = PITCH_BANDS  # first folded band
ENERGY_FLOOR = 1e-10      # linear floor so silent bands have a finite dB value


class BandLayout:
    """Immutable view of the band partition with convenience slices."""

    def __init__(self, table=BAND_TABLE):
        self.table = tuple((int(s), int(w)) for s, w in table)
        starts = [s for s, _ in self.table]
        widths = [w for _, w in self.table]
        for i in range(1, len(self.table)):
            if starts[i] != starts[i - 1] + widths[i - 1]:
                raise ValueError("bands must be contiguous")
        if starts[-1] + widths[-1] != NUM_BINS:
            raise ValueError("bands must cover all bins")
        self.starts = np.array(starts)
        self.widths = np.array(widths)

    def sl(self, band):
        s, w = self.table[band]
        return slice(s, s + w)

    def width(self, band):
        return self.table[band][1]

    @property
    def coded(self):
        return range(NUM_BANDS)


DEFAULT_LAYOUT = BandLayout()


def band_energies(spectrum, layout=DEFAULT_LAYOUT):
    """Linear energy per coded band: sum of squared bins."""
    spectrum = np.asarray(spectrum, dtype=np.float64)
    return np.array([float(spectrum[layout.sl(b)] @ spectrum[layout.sl(b)])
                     for b in layout.coded])


def energy_to_db(energy):
    return 10.0 * np.log10(np.asarray(energy, dtype=np.float64) + ENERGY_FLOOR)


def db_to_energy(edb):
    return np.power(10.0, np.asarray(edb, dtype=np.float64) / 10.0)


def split_and_normalize(spectrum, layout=DEFAULT_LAYOUT):
    """Per-band energies plus unit-norm band shapes.

    Returns (energies, shapes, degenerate) where shapes is a list of
    per-band vectors and degenerate flags bands with zero energy (their
    shape is the zero vector).
    """
    spectrum = np.asarray(spectrum, dtype=np.float64)
    energies = band_energies(spectrum, layout)
    shapes = []
    degenerate = np.zeros(NUM_BANDS, dtype=bool)
    for b in layout.coded:
        seg = spectrum[layout.sl(b)]
        e = energies[b]
        if e > 0.0:
            shapes.append(seg / np.sqrt(e))
        else:
            shapes.append(np.zeros_like(seg))
            degenerate[b] = True
    return energies, shapes, degenerate


def denormalize(shapes, energies, layout=DEFAULT_LAYOUT):
    """Rebuild a full spectrum from unit shapes and band energies.

    The uncoded tail band is zeroed.
    """
    out = np.zeros(NUM_BINS)
    for b in layout.coded:
        out[layout.sl(b)] = np.sqrt(max(float(energies[b]), 0.0)) * shapes[b]
    return out
