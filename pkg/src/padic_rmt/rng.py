"""Deterministic, splittable randomness built on keyed BLAKE2b counters.

Every logical random object (a matrix draw, a mixture pick, a rejection
attempt) reads an infinite digit stream addressed by a structured path, so

  * two streams with distinct (master_seed, stream_index) are independent,
  * the same address always yields the same digits, across runs and
    platforms, and
  * re-reading an address at a higher precision extends the earlier digits
    in place (the first N digits never change), which is what makes
    precision escalation replay the very same sample.

Digits in base p come from fixed-width bit chunks with rejection, so they
are exactly uniform.  Matrix draws use a sliced layout: each 512-bit block
is split into one fixed slice per entry, so one hash feeds all entries of
an attempt and the slice geometry never depends on the precision.
"""

from __future__ import annotations

from hashlib import blake2b

_BLOCK_BITS = 512

PathLike = tuple[int | str, ...]


class RngStream:
    """One independent randomness lane, identified by (master_seed, stream_index)."""

    __slots__ = ("master_seed", "stream_index", "_key")

    def __init__(self, master_seed: int, stream_index: int = 0):
        self.master_seed = int(master_seed)
        self.stream_index = int(stream_index)
        self._key = blake2b(
            f"padic-rmt|{self.master_seed}|{self.stream_index}".encode(),
            digest_size=16,
        ).digest()

    def __repr__(self) -> str:
        return f"RngStream(master_seed={self.master_seed}, stream_index={self.stream_index})"

    # -- raw blocks ---------------------------------------------------------

    def lane(self, path: PathLike, attempt: int = 0) -> str:
        return "|".join([str(c) for c in path] + [str(attempt)])

    def lane_block(self, lane: str, index: int) -> int:
        digest = blake2b(
            f"{lane}|{index}".encode(), key=self._key, digest_size=64
        ).digest()
        return int.from_bytes(digest, "little")

    def block_int(self, path: PathLike, attempt: int = 0, index: int = 0) -> int:
        """512 fresh uniform bits for this address, as a little-endian int."""
        return self.lane_block(self.lane(path, attempt), index)

    # -- scalar draws ---------------------------------------------------------

    def digits(
        self, path: PathLike, count: int, p: int, attempt: int = 0
    ) -> list[int]:
        """First `count` base-p digits of the address's digit stream."""
        lane = self.lane(path, attempt)
        if p == 2:
            out: list[int] = []
            index = 0
            while len(out) < count:
                b = self.lane_block(lane, index)
                take = min(_BLOCK_BITS, count - len(out))
                out.extend((b >> i) & 1 for i in range(take))
                index += 1
            return out
        width = (p - 1).bit_length()
        mask = (1 << width) - 1
        per_block = _BLOCK_BITS // width
        out = []
        index = 0
        while len(out) < count:
            b = self.lane_block(lane, index)
            for i in range(per_block):
                c = (b >> (width * i)) & mask
                if c < p:
                    out.append(c)
                    if len(out) == count:
                        break
            index += 1
        return out

    def residue(self, path: PathLike, p: int, precision: int, attempt: int = 0) -> int:
        """Uniform residue in [0, p^precision) read from the address's digits."""
        if p == 2:
            lane = self.lane(path, attempt)
            if precision <= _BLOCK_BITS:
                return self.lane_block(lane, 0) & ((1 << precision) - 1)
            acc = 0
            index = 0
            got = 0
            while got < precision:
                acc |= self.lane_block(lane, index) << got
                got += _BLOCK_BITS
                index += 1
            return acc & ((1 << precision) - 1)
        digits = self.digits(path, precision, p, attempt)
        acc = 0
        for d in reversed(digits):
            acc = acc * p + d
        return acc

    def uniform_int(self, path: PathLike, bound: int) -> int:
        """Uniform integer in [0, bound) via fixed-width rejection."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        if bound == 1:
            return 0
        lane = self.lane(path)
        width = (bound - 1).bit_length()
        mask = (1 << width) - 1
        per_block = _BLOCK_BITS // width
        index = 0
        while True:
            b = self.lane_block(lane, index)
            for i in range(per_block):
                c = (b >> (width * i)) & mask
                if c < bound:
                    return c
            index += 1

    def unit_residue(self, path: PathLike, p: int, precision: int) -> int:
        """Uniform unit (residue coprime to p) in [0, p^precision); the
        accepted attempt depends only on first digits, never on precision."""
        attempt = 0
        while True:
            r = self.residue(path, p, precision, attempt)
            if r % p != 0:
                return r
            attempt += 1

    # -- sliced matrix draws ------------------------------------------------
    #
    # A draw of `count` entries splits every block into `count` equal slices;
    # entry e reads its digits from slice e of blocks 0, 1, 2, ...  The
    # geometry depends only on (count, p), so extending the precision only
    # reads further blocks and never moves earlier digits.

    def _slice_bits(self, count: int, p: int) -> int:
        if p == 2:
            return max(1, _BLOCK_BITS // count)
        width = (p - 1).bit_length()
        chunks = (_BLOCK_BITS // width) // count
        return chunks * width  # 0 means: fall back to per-entry lanes

    def sliced_first_digits(
        self, path: PathLike, count: int, p: int, attempt: int = 0
    ) -> list[int]:
        """The first base-p digit of every entry of a sliced draw."""
        cap = self._slice_bits(count, p)
        if cap == 0:
            return [
                self.digits(path + (e,), 1, p, attempt)[0] for e in range(count)
            ]
        lane = self.lane(path, attempt)
        if p == 2:
            b = self.lane_block(lane, 0)
            return [(b >> (e * cap)) & 1 for e in range(count)]
        width = (p - 1).bit_length()
        mask = (1 << width) - 1
        out = []
        for e in range(count):
            d = None
            index = 0
            b = self.lane_block(lane, 0)
            while d is None:
                lo = e * cap
                for off in range(0, cap, width):
                    c = (b >> (lo + off)) & mask
                    if c < p:
                        d = c
                        break
                else:
                    index += 1
                    b = self.lane_block(lane, index)
                    continue
            out.append(d)
        return out

    def sliced_residues(
        self, path: PathLike, count: int, p: int, precision: int, attempt: int = 0
    ) -> list[int]:
        """All `count` residues of a sliced draw, in [0, p^precision)."""
        cap = self._slice_bits(count, p)
        if cap == 0:
            return [
                self.residue(path + (e,), p, precision, attempt)
                for e in range(count)
            ]
        lane = self.lane(path, attempt)
        if p == 2:
            nblocks = -(-precision // cap)
            blocks = [self.lane_block(lane, i) for i in range(nblocks)]
            mask_full = (1 << precision) - 1
            cap_mask = (1 << cap) - 1
            out = []
            for e in range(count):
                lo = e * cap
                acc = 0
                for i, b in enumerate(blocks):
                    acc |= ((b >> lo) & cap_mask) << (cap * i)
                out.append(acc & mask_full)
            return out
        width = (p - 1).bit_length()
        mask = (1 << width) - 1
        blocks: list[int] = []
        out = []
        for e in range(count):
            lo = e * cap
            digits: list[int] = []
            index = 0
            while len(digits) < precision:
                while index >= len(blocks):
                    blocks.append(self.lane_block(lane, len(blocks)))
                b = blocks[index]
                for off in range(0, cap, width):
                    c = (b >> (lo + off)) & mask
                    if c < p:
                        digits.append(c)
                        if len(digits) == precision:
                            break
                index += 1
            acc = 0
            for d in reversed(digits):
                acc = acc * p + d
            out.append(acc)
        return out
