"""Byte-oriented range coder with fractional-bit accounting.

All bitstream symbols go through this coder: uniform integers over
arbitrary alphabet sizes (including non-powers of two, at a cost of
log2(n) bits plus a few hundredths of a bit) and Laplace-distributed
coarse-energy residuals.  Encoder and decoder keep their interval
range on identical trajectories, so ``tell_frac`` agrees on both
sides after every symbol.  That agreement is what makes implicit bit
allocation possible: both ends derive the remaining budget from their
own coder state, with no side information.
"""

from __future__ import annotations

_MASK32 = (1 << 32) - 1
_TOP = 1 << 32          # initial interval width (32-bit window)
_BOT = 1 << 24          # renormalization threshold
_MAX_FT = 1 << 16       # largest alphabet coded in one symbol
_UNI_SHIFT_CHUNK = 16   # raw-bit chunk size for oversized alphabets

# Laplace model constants.  Frequencies are Q15; residuals outside
# [-LAPLACE_RANGE, LAPLACE_RANGE] clamp, and the clamp is what is coded.
_LAPLACE_TOTAL = 1 << 15
LAPLACE_RANGE = 31
_MAX_DECAY = 31500      # keeps the centre symbol strictly cheapest


class RangeCoderError(Exception):
    """Contract violation in coder usage (bad symbol, budget overflow)."""


class FrameOverrunError(RangeCoderError):
    """Encoded symbols no longer fit the fixed frame byte budget."""


class LaplaceModel:
    """Two-sided geometric approximation of a Laplace distribution.

    One decay parameter per band, expressed in Q15 (theta = decay/32768).
    Every residual in the supported range gets a nonzero frequency, so
    any symbol sequence remains decodable.
    """

    def __init__(self, decays_q15):
        self.decays = [min(int(d), _MAX_DECAY) for d in decays_q15]
        if any(d < 0 for d in self.decays):
            raise ValueError("decay parameters must be non-negative")
        self._tables = [self._build(d) for d in self.decays]

    @staticmethod
    def _build(decay):
        # Symbol order: 0, +1, -1, +2, -2, ...  Integer-only construction
        # so the tables are identical on every platform.
        weights = [1 << 15]
        for _ in range(LAPLACE_RANGE):
            weights.append((weights[-1] * decay) >> 15)
        denom = weights[0] + 2 * sum(weights[1:])
        freqs = [max(1, (_LAPLACE_TOTAL * weights[0]) // denom)]
        for k in range(1, LAPLACE_RANGE + 1):
            fk = max(1, (_LAPLACE_TOTAL * weights[k]) // denom)
            freqs.extend((fk, fk))
        freqs[0] += _LAPLACE_TOTAL - sum(freqs)
        if freqs[0] < 1:
            raise ValueError("decay too large for the frequency budget")
        cum = [0]
        for f in freqs:
            cum.append(cum[-1] + f)
        return cum

    def cumulative(self, band):
        return self._tables[band]

    @property
    def nbands(self):
        return len(self._tables)

    def cost_frac(self, residual, band):
        """Upper bound on the coding cost, in 1/8-bit units."""
        sym, _ = self.symbol_of(residual)
        cum = self._tables[band]
        f = cum[sym + 1] - cum[sym]
        num = cum[-1] ** 8
        den = f ** 8
        return ((num + den - 1) // den - 1).bit_length()

    @property
    def max_zero_cost_frac(self):
        """Worst-case cost of the centre symbol across bands, 1/8 bits."""
        return max(self.cost_frac(0, b) for b in range(self.nbands))

    @staticmethod
    def symbol_of(residual):
        r = max(-LAPLACE_RANGE, min(LAPLACE_RANGE, int(residual)))
        if r == 0:
            return 0, 0
        return (2 * r - 1, r) if r > 0 else (-2 * r, r)

    @staticmethod
    def residual_of(symbol):
        if symbol == 0:
            return 0
        return (symbol + 1) // 2 if symbol % 2 else -(symbol // 2)


class _CoderBase:
    """State shared by encoder and decoder: range and bit accounting."""

    def __init__(self):
        self._rng = _TOP
        # 32-bit window plus a one-bit termination reserve; a fresh coder
        # therefore reports tell() == 1 bit.
        self._nbits = 34

    def _tell_q16(self):
        # log2 of the range via 16 rounds of integer squaring: exact on
        # every platform, so encoder and decoder always agree.
        l = self._rng.bit_length()
        r = self._rng >> (l - 16)
        for _ in range(16):
            r = (r * r) >> 15
            b = r >> 16
            l = (l << 1) | b
            r >>= b
        return (self._nbits << 16) - l

    def tell_frac(self):
        """Bits consumed so far, in integer 1/8-bit units.

        Computed with integer arithmetic only, so encoder, decoder and
        every platform agree exactly.  This value feeds the allocator.
        """
        return self._tell_q16() >> 13

    def tell(self):
        """Bits consumed so far, as a float (about 1/65536-bit resolution)."""
        return self._tell_q16() / 65536.0


class RangeEncoder(_CoderBase):
    def __init__(self):
        super().__init__()
        self._low = 0
        self._buf = bytearray()

    def _propagate_carry(self):
        i = len(self._buf) - 1
        while self._buf[i] == 0xFF:
            self._buf[i] = 0
            i -= 1
        self._buf[i] += 1

    def _renorm(self):
        while self._rng <= _BOT:
            self._buf.append((self._low >> 24) & 0xFF)
            self._low = (self._low << 8) & _MASK32
            self._rng <<= 8
            self._nbits += 8

    def _encode(self, fl, fh, ft):
        r = self._rng // ft
        self._low += r * fl
        if self._low > _MASK32:
            self._propagate_carry()
            self._low &= _MASK32
        # The top symbol absorbs the division slack.
        self._rng = self._rng - r * fl if fh == ft else r * (fh - fl)
        self._renorm()

    def encode_uniform(self, value, n):
        """Encode ``value`` uniformly over [0, n); costs ~log2(n) bits."""
        value = int(value)
        n = int(n)
        if n < 1 or not 0 <= value < n:
            raise RangeCoderError(f"uniform symbol {value} out of range [0,{n})")
        if n == 1:
            return
        if n <= _MAX_FT:
            self._encode(value, value + 1, n)
            return
        # Oversized alphabet: range-code the high part, then raw LSBs.
        k = n.bit_length() - _UNI_SHIFT_CHUNK
        nq = ((n - 1) >> k) + 1
        q = value >> k
        self._encode(q, q + 1, nq)
        self._encode_raw(value & ((1 << k) - 1), k)

    def _encode_raw(self, value, nbits):
        while nbits > 0:
            c = min(nbits, _UNI_SHIFT_CHUNK)
            nbits -= c
            chunk = (value >> nbits) & ((1 << c) - 1)
            self._encode(chunk, chunk + 1, 1 << c)

    def encode_laplace(self, residual, model, band):
        """Encode an integer residual; returns the (possibly clamped) value."""
        sym, clamped = model.symbol_of(residual)
        cum = model.cumulative(band)
        self._encode(cum[sym], cum[sym + 1], cum[-1])
        return clamped

    def laplace_cost_frac(self, residual, model, band):
        """Planned cost of a residual in 1/8-bit units (upper bound)."""
        return model.cost_frac(residual, band)

    def finalize(self, nbytes):
        """Terminate and pad the stream to exactly ``nbytes`` bytes."""
        l = 33 - self._rng.bit_length()
        msk = _MASK32 >> l if l < 32 else 0
        end = (self._low + msk) & ~msk
        if (end | msk) >= self._low + self._rng:
            l += 1
            msk >>= 1
            end = (self._low + msk) & ~msk
        if end > _MASK32:
            self._propagate_carry()
            end &= _MASK32
        while l > 0:
            self._buf.append((end >> 24) & 0xFF)
            end = (end << 8) & _MASK32
            l -= 8
        if len(self._buf) > nbytes:
            raise FrameOverrunError(
                f"stream needs {len(self._buf)} bytes, budget is {nbytes}"
            )
        self._buf.extend(b"\x00" * (nbytes - len(self._buf)))
        return bytes(self._buf)


class RangeDecoder(_CoderBase):
    """Mirror of :class:`RangeEncoder`.

    Reads past the end of the input yield zero bytes, so truncated or
    corrupted frames still decode deterministically (to garbage, never
    to an exception).
    """

    def __init__(self, data):
        super().__init__()
        self._data = bytes(data)
        self._pos = 0
        self._low = 0
        code = 0
        for _ in range(4):
            code = (code << 8) | self._read_byte()
        self._code = code

    def _read_byte(self):
        b = self._data[self._pos] if self._pos < len(self._data) else 0
        self._pos += 1
        return b

    @property
    def underrun(self):
        return self._pos > len(self._data)

    def _renorm(self):
        while self._rng <= _BOT:
            self._low = (self._low << 8) & _MASK32
            self._code = ((self._code << 8) | self._read_byte()) & _MASK32
            self._rng <<= 8
            self._nbits += 8

    def _decode_offset(self, ft):
        r = self._rng // ft
        v = ((self._code - self._low) & _MASK32) // r
        return min(v, ft - 1), r

    def _update(self, r, fl, fh, ft):
        self._low = (self._low + r * fl) & _MASK32
        self._rng = self._rng - r * fl if fh == ft else r * (fh - fl)
        self._renorm()

    def decode_uniform(self, n):
        n = int(n)
        if n < 1:
            raise RangeCoderError(f"invalid alphabet size {n}")
        if n == 1:
            return 0
        if n <= _MAX_FT:
            v, r = self._decode_offset(n)
            self._update(r, v, v + 1, n)
            return v
        k = n.bit_length() - _UNI_SHIFT_CHUNK
        nq = ((n - 1) >> k) + 1
        q, r = self._decode_offset(nq)
        self._update(r, q, q + 1, nq)
        value = (q << k) | self._decode_raw(k)
        # Only reachable on corrupted input; clamp keeps the value legal.
        return min(value, n - 1)

    def _decode_raw(self, nbits):
        value = 0
        while nbits > 0:
            c = min(nbits, _UNI_SHIFT_CHUNK)
            nbits -= c
            v, r = self._decode_offset(1 << c)
            self._update(r, v, v + 1, 1 << c)
            value = (value << c) | v
        return value

    def decode_laplace(self, model, band):
        cum = model.cumulative(band)
        v, r = self._decode_offset(cum[-1])
        # Find the symbol whose cumulative interval contains v.
        lo, hi = 0, len(cum) - 1
        while lo + 1 < hi:
            mid = (lo + hi) // 2
            if cum[mid] <= v:
                lo = mid
            else:
                hi = mid
        self._update(r, cum[lo], cum[lo + 1], cum[-1])
        return LaplaceModel.residual_of(lo)
