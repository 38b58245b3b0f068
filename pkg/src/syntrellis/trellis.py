"""Syndrome trellises: levelled graphs whose full paths are exactly the codewords.

The node set at level t is the set of partial syndromes s_t = c_1 h_1 + ... +
c_t h_t reachable from the zero state and able to return to it, where h_i is
the i-th column of the parity-check matrix.  A binary trellis has one edge per
bit value; merging consecutive section pairs yields the quaternary trellis
used by the decoder; marker augmentation splices in constant single-edge
levels that leave the syndrome untouched.

State ids pack the syndrome bit-vector with row 0 as the most significant bit.
Ids are plain Python integers, so matrices with more than 32 rows still build;
the 32-bit figure only enters the storage-cost model of :func:`storage_bits`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codebook import BASE_INDEX, BASES, CodeSpec, ParityCheckMatrix, marker_positions


class NotACodewordError(ValueError):
    """Word left the trellis; ``level`` is the first failing transition."""

    def __init__(self, level: int, symbol):
        self.level = level
        self.symbol = symbol
        super().__init__(f"no trellis edge for symbol {symbol!r} at level {level}")


@dataclass
class SyndromeTrellis:
    """Trimmed levelled trellis with dense per-level transition tables.

    ``states[t]`` lists the syndrome ids at level t in ascending order;
    ``next_idx[t][i, x]`` is the index (into ``states[t+1]``) reached from the
    i-th state of level t on symbol x, or -1 when no such edge exists.
    ``constant_levels`` maps marker levels to their forced (pre-offset) symbol.
    """

    alphabet_size: int
    states: list[list[int]]
    next_idx: list[np.ndarray]
    constant_levels: dict[int, int]

    @property
    def n_levels(self) -> int:
        return len(self.states)

    @property
    def n_sections(self) -> int:
        return len(self.next_idx)

    def index_of(self, level: int, state_id: int) -> int:
        states = self.states[level]
        lo = 0
        hi = len(states)
        while lo < hi:
            mid = (lo + hi) // 2
            if states[mid] < state_id:
                lo = mid + 1
            else:
                hi = mid
        if lo < len(states) and states[lo] == state_id:
            return lo
        return -1

    def max_states(self) -> int:
        return max(len(s) for s in self.states)

    def edges(self, level: int):
        """Yield (from_id, symbol, to_id) for one section."""
        table = self.next_idx[level]
        src = self.states[level]
        dst = self.states[level + 1]
        for i in range(table.shape[0]):
            for x in range(self.alphabet_size):
                j = table[i, x]
                if j >= 0:
                    yield src[i], x, dst[j]


def build_binary_trellis(h: ParityCheckMatrix) -> SyndromeTrellis:
    """Forward construction over {0,1} followed by a backward trim to state 0.

    States whose already-finished parity rows hold a 1 can never return to the
    zero syndrome; dropping them during the forward pass keeps the level sets
    within the banded-structure bound instead of growing with every row that
    has gone out of scope.
    """
    cols = h.column_syndromes()
    n = h.n_cols
    n_rows = h.n_rows

    # finished_mask[t]: bits of rows whose support lies entirely left of column t
    row_end = np.full(n_rows, -1, dtype=np.int64)
    for r in range(n_rows):
        hits = np.nonzero(h.rows[r])[0]
        if hits.size:
            row_end[r] = hits[-1]
    finished_mask = [0] * (n + 1)
    mask = 0
    for t in range(n + 1):
        for r in range(n_rows):
            if row_end[r] == t - 1:
                mask |= 1 << (n_rows - 1 - r)
        finished_mask[t] = mask

    forward: list[set[int]] = [{0}]
    for t in range(n):
        col = cols[t]
        cur = forward[-1]
        dead = finished_mask[t + 1]
        nxt = {s for s in cur if not (s & dead)}
        if col:
            nxt.update(ns for s in cur if not ((ns := s ^ col) & dead))
        forward.append(nxt)

    keep: list[set[int]] = [set() for _ in range(n + 1)]
    keep[n] = {0} if 0 in forward[n] else set()
    for t in range(n - 1, -1, -1):
        col = cols[t]
        nxt = keep[t + 1]
        keep[t] = {s for s in forward[t] if s in nxt or (s ^ col) in nxt}

    states = [sorted(keep[t]) for t in range(n + 1)]
    next_idx: list[np.ndarray] = []
    for t in range(n):
        col = cols[t]
        dst_index = {s: i for i, s in enumerate(states[t + 1])}
        table = np.full((len(states[t]), 2), -1, dtype=np.int32)
        for i, s in enumerate(states[t]):
            j = dst_index.get(s)
            if j is not None:
                table[i, 0] = j
            j = dst_index.get(s ^ col)
            if j is not None and col != 0:
                table[i, 1] = j
            elif col == 0 and s in dst_index:
                table[i, 1] = dst_index[s]
        next_idx.append(table)
    return SyndromeTrellis(2, states, next_idx, {})


def to_quaternary(t: SyndromeTrellis) -> SyndromeTrellis:
    """Merge consecutive binary sections; symbol = 2*first_bit + second_bit."""
    if t.alphabet_size != 2:
        raise ValueError("input must be a binary trellis")
    if t.n_sections % 2 != 0:
        raise ValueError("binary trellis must have an even number of sections")
    states = [t.states[2 * i] for i in range(t.n_sections // 2 + 1)]
    next_idx: list[np.ndarray] = []
    for i in range(t.n_sections // 2):
        first = t.next_idx[2 * i]
        second = t.next_idx[2 * i + 1]
        table = np.full((first.shape[0], 4), -1, dtype=np.int32)
        for b1 in (0, 1):
            mid = first[:, b1]
            ok = mid >= 0
            for b2 in (0, 1):
                out = np.full(first.shape[0], -1, dtype=np.int32)
                out[ok] = second[mid[ok], b2]
                table[:, 2 * b1 + b2] = out
        next_idx.append(table)
    return SyndromeTrellis(4, states, next_idx, {})


def augment_with_markers(
    t: SyndromeTrellis, period: int, marker_symbols: list
) -> SyndromeTrellis:
    """Insert constant forced-symbol levels after every ``period`` payload levels.

    ``marker_symbols`` holds one entry per insertion point: a symbol, or a
    sequence of symbols for multi-symbol markers.  Marker levels leave the
    syndrome unchanged (markers are not parity-checked).
    """
    if t.alphabet_size != 4:
        raise ValueError("marker augmentation expects a quaternary trellis")
    if period <= 0:
        raise ValueError("period must be >= 1")
    cuts = marker_positions(t.n_sections, period)
    if len(marker_symbols) != len(cuts):
        raise ValueError(f"expected {len(cuts)} marker symbols, got {len(marker_symbols)}")

    states: list[list[int]] = [t.states[0]]
    next_idx: list[np.ndarray] = []
    constant: dict[int, int] = {}
    cut_set = dict(zip(cuts, marker_symbols))
    for payload_level in range(t.n_sections):
        next_idx.append(t.next_idx[payload_level])
        states.append(t.states[payload_level + 1])
        after = payload_level + 1
        if after in cut_set:
            entry = cut_set[after]
            symbols = [entry] if isinstance(entry, int) else list(entry)
            n_states = len(t.states[after])
            for sym in symbols:
                table = np.full((n_states, 4), -1, dtype=np.int32)
                table[:, sym] = np.arange(n_states, dtype=np.int32)
                constant[len(next_idx)] = sym
                next_idx.append(table)
                states.append(t.states[after])
    return SyndromeTrellis(4, states, next_idx, constant)


def _symbols_of(t: SyndromeTrellis, word) -> list[int]:
    if isinstance(word, str):
        return [BASE_INDEX[ch] for ch in word]
    return [int(x) for x in word]


def path_for_codeword(t: SyndromeTrellis, word) -> list[int]:
    """State-id path traced by a codeword; raises NotACodewordError otherwise."""
    symbols = _symbols_of(t, word)
    if len(symbols) != t.n_sections:
        raise ValueError(f"word length {len(symbols)} does not match {t.n_sections} sections")
    idx = t.index_of(0, 0)
    path = [0]
    for level, x in enumerate(symbols):
        if x >= t.alphabet_size or x < 0:
            raise NotACodewordError(level, x)
        nxt = int(t.next_idx[level][idx, x])
        if nxt < 0:
            raise NotACodewordError(level, x)
        idx = nxt
        path.append(t.states[level + 1][idx])
    return path


def enumerate_path_labels(t: SyndromeTrellis) -> list[tuple[int, ...]]:
    """All full-path label sequences (exponential; test-scale trellises only)."""
    out: list[tuple[int, ...]] = []

    def walk(level: int, idx: int, prefix: list[int]):
        if level == t.n_sections:
            out.append(tuple(prefix))
            return
        row = t.next_idx[level][idx]
        for x in range(t.alphabet_size):
            j = int(row[x])
            if j >= 0:
                prefix.append(x)
                walk(level + 1, j, prefix)
                prefix.pop()

    if t.states and t.index_of(0, 0) >= 0:
        walk(0, t.index_of(0, 0), [])
    return sorted(out)


def storage_bits(t: SyndromeTrellis, spec: CodeSpec) -> int:
    """Packed size of the periodic section: 32 id bits + 4 adjacency bits per state.

    The section spans one template period (c binary levels, c/2 quaternary
    levels); each residue is charged for its worst level.
    """
    section = spec.c if t.alphabet_size == 2 else max(1, spec.c // 2)
    worst = [0] * section
    for level in range(t.n_sections):
        r = level % section
        worst[r] = max(worst[r], len(t.states[level]))
    return 36 * sum(worst)


def dump_edges(t: SyndromeTrellis) -> str:
    """One line per edge: ``level from_state symbol to_state``."""
    lines = []
    for level in range(t.n_sections):
        for src, x, dst in t.edges(level):
            sym = BASES[x] if t.alphabet_size == 4 else str(x)
            lines.append(f"{level} {src} {sym} {dst}")
    return "\n".join(lines) + "\n"


def trellis_for_code(spec: CodeSpec, h: ParityCheckMatrix | None = None) -> SyndromeTrellis:
    """Marker-augmented quaternary trellis for a code spec (markers optional)."""
    from .codebook import build_parity_check

    binary = build_binary_trellis(h if h is not None else build_parity_check(spec))
    quat = to_quaternary(binary)
    if spec.marker_period <= 0:
        return quat
    cuts = marker_positions(quat.n_sections, spec.marker_period)
    marker = [BASE_INDEX[ch] for ch in spec.marker_symbol]
    return augment_with_markers(quat, spec.marker_period, [marker] * len(cuts))
