import numpy as np
import pytest

from lapcodec import bands
from lapcodec.bands import (
    BAND_TABLE,
    DEFAULT_LAYOUT,
    NUM_BANDS,
    NUM_BINS,
    BandLayout,
    denormalize,
    energy_to_db,
    split_and_normalize,
)


def test_layout_matches_reference_table():
    expect = [
        (0, 3), (3, 3), (6, 3), (9, 3), (12, 3), (15, 3), (18, 3), (21, 3),
        (24, 3), (27, 4), (31, 6), (37, 6), (43, 8), (51, 11), (62, 12),
        (74, 16), (90, 20), (110, 30), (140, 40), (180, 53), (233, 23),
    ]
    assert list(BAND_TABLE) == expect


def test_layout_contiguous_and_covering():
    layout = DEFAULT_LAYOUT
    covered = np.zeros(NUM_BINS, dtype=int)
    for b in range(len(BAND_TABLE)):
        covered[layout.sl(b)] += 1
    assert np.all(covered == 1)


def test_malformed_layout_rejected():
    with pytest.raises(ValueError):
        BandLayout(((0, 3), (4, 253)))


def test_three_four_five_band():
    spectrum = np.zeros(NUM_BINS)
    spectrum[0:3] = [3.0, 4.0, 0.0]
    energies, shapes, degen = split_and_normalize(spectrum)
    assert energies[0] == pytest.approx(25.0)
    assert shapes[0] == pytest.approx([0.6, 0.8, 0.0])
    assert not degen[0]


def test_zero_band_flagged_degenerate():
    spectrum = np.zeros(NUM_BINS)
    spectrum[50] = 1.0
    energies, shapes, degen = split_and_normalize(spectrum)
    assert degen[0]
    assert not np.any(shapes[0])
    assert energies[0] == 0.0


def test_unit_norm_postcondition():
    rng = np.random.default_rng(0)
    spectrum = rng.standard_normal(NUM_BINS)
    _, shapes, degen = split_and_normalize(spectrum)
    for b in range(NUM_BANDS):
        if not degen[b]:
            assert abs(shapes[b] @ shapes[b] - 1.0) < 1e-9


def test_split_then_denormalize_is_identity():
    rng = np.random.default_rng(1)
    spectrum = rng.standard_normal(NUM_BINS)
    energies, shapes, _ = split_and_normalize(spectrum)
    rebuilt = denormalize(shapes, energies)
    # the uncoded tail band is zeroed by contract
    assert np.max(np.abs(rebuilt[:233] - spectrum[:233])) < 1e-9
    assert not np.any(rebuilt[233:])


def test_denormalize_hits_requested_energy():
    rng = np.random.default_rng(2)
    shapes = []
    for b in range(NUM_BANDS):
        v = rng.standard_normal(DEFAULT_LAYOUT.width(b))
        shapes.append(v / np.linalg.norm(v))
    energies = np.ones(NUM_BANDS)
    out = denormalize(shapes, energies)
    got = bands.band_energies(out)
    assert np.max(np.abs(got - 1.0)) < 1e-9


def test_energy_db_floor():
    assert energy_to_db(np.zeros(3)) == pytest.approx([-100.0] * 3)
