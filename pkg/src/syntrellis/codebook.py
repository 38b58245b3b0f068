"""Terminated convolutional codes over GF(2) with marker insertion and offset scrambling.

A code is described by a parity-check template: a small block of bit-rows that
is stamped along the diagonal (one instance every ``c`` columns), plus explicit
head/tail rows that pin down the termination structure at the word boundaries.
Codewords are the null space of the expanded matrix H, mapped onto DNA via the
pair map 00->A, 01->C, 10->G, 11->T.  Two payload-level transforms sit on top:

* periodic single-symbol markers that restore synchronisation after dwell
  mispredictions, and
* a seeded pseudo-random per-position offset (addition mod 4) that breaks
  homopolymer runs in the stored strand.

Both transforms are exactly invertible and are understood by the trellis
decoder, which walks the marker-augmented trellis with offset-relabelled edges.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

BASES = "ACGT"
BASE_INDEX = {ch: i for i, ch in enumerate(BASES)}

# SplitMix64 constants; the offset stream is the top two bits of each output.
_SM64_GAMMA = 0x9E3779B97F4A7C15
_SM64_MIX1 = 0xBF58476D1CE4E5B9
_SM64_MIX2 = 0x94D049BB133111EB
_U64 = (1 << 64) - 1


class ConfigError(ValueError):
    """Raised when a code configuration is inconsistent or malformed."""


@dataclass(frozen=True)
class TemplateRow:
    """One parity-check row: a bitstring placed at a column offset."""

    offset: int
    bits: str

    def __post_init__(self):
        if not self.bits or not re.fullmatch(r"[01]+", self.bits):
            raise ConfigError(f"row bits must be a non-empty 0/1 string, got {self.bits!r}")


@dataclass(frozen=True)
class CodeSpec:
    """A (c, b, nu) terminated convolutional code plus marker/offset parameters.

    ``template_rows`` are stamped at column offsets ``offset + j*c`` for
    j = 0, 1, ... as long as the row fits entirely inside the word;
    ``head_rows`` and ``tail_rows`` are placed verbatim.  ``marker_period`` of
    0 disables markers; ``marker_symbol`` is a pre-offset DNA string (normally
    one symbol) inserted after every ``marker_period`` payload symbols.
    """

    c: int
    b: int
    nu: int
    n_bits: int
    head_rows: tuple[TemplateRow, ...] = ()
    template_rows: tuple[TemplateRow, ...] = ()
    tail_rows: tuple[TemplateRow, ...] = ()
    marker_period: int = 0
    marker_symbol: str = "A"
    scrambler_seed: int = 0
    identifier: str = ""

    def __post_init__(self):
        if not (0 < self.b < self.c):
            raise ConfigError(f"need 0 < b < c, got b={self.b} c={self.c}")
        if self.nu < 0:
            raise ConfigError("nu must be >= 0")
        if self.n_bits <= 0 or self.n_bits % 2 != 0:
            raise ConfigError("n_bits must be positive and even")
        if self.c - self.b + self.nu > 32:
            raise ConfigError("syndrome state exceeds the 32-bit packing budget (c-b+nu > 32)")
        if self.marker_period < 0:
            raise ConfigError("marker_period must be >= 0")
        if self.marker_symbol and not set(self.marker_symbol) <= set(BASES):
            raise ConfigError(f"marker_symbol must be DNA letters, got {self.marker_symbol!r}")

    @property
    def n_symbols(self) -> int:
        """Codeword length in quaternary symbols, before marker insertion."""
        return self.n_bits // 2

    @property
    def state_bound(self) -> int:
        """Per-level syndrome state count bound, 2**(c - b + nu)."""
        return 1 << (self.c - self.b + self.nu)

    def payload_length(self) -> int:
        """Stored payload length in symbols, markers included."""
        return self.n_symbols + len(marker_positions(self.n_symbols, self.marker_period)) * len(
            self.marker_symbol
        )


@dataclass(frozen=True)
class ParityCheckMatrix:
    """Binary parity-check matrix; codewords satisfy word @ H.T == 0 (mod 2)."""

    rows: np.ndarray  # (n_rows, n_cols) uint8

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.uint8)
        if rows.ndim != 2:
            raise ConfigError("parity-check matrix must be 2-dimensional")
        object.__setattr__(self, "rows", rows)
        rows.setflags(write=False)

    @property
    def n_cols(self) -> int:
        return self.rows.shape[1]

    @property
    def n_rows(self) -> int:
        return self.rows.shape[0]

    def column_syndromes(self) -> list[int]:
        """Column i packed as an integer with row 0 as the most significant bit."""
        out = []
        n_rows = self.n_rows
        for j in range(self.n_cols):
            v = 0
            col = self.rows[:, j]
            for r in range(n_rows):
                v = (v << 1) | int(col[r])
            out.append(v)
        return out


def build_parity_check(spec: CodeSpec) -> ParityCheckMatrix:
    """Expand a code spec into its full terminated parity-check matrix."""
    n = spec.n_bits
    rows: list[np.ndarray] = []

    def place(row: TemplateRow, offset: int, clip: bool):
        vec = np.zeros(n, dtype=np.uint8)
        bits = np.frombuffer(row.bits.encode(), dtype=np.uint8) - ord("0")
        lo, hi = offset, offset + len(bits)
        if clip:
            vlo, vhi = max(lo, 0), min(hi, n)
            if vlo >= vhi:
                return None
            vec[vlo:vhi] = bits[vlo - lo : vhi - lo]
        else:
            if lo < 0 or hi > n:
                raise ConfigError(
                    f"row {row.bits!r} at offset {offset} does not fit in {n} columns"
                )
            vec[lo:hi] = bits
        if not vec.any():
            return None
        return vec

    for row in spec.head_rows:
        vec = place(row, row.offset, clip=False)
        if vec is None:
            raise ConfigError("head rows must be non-zero")
        rows.append(vec)
    for j in range(0, n):
        placed_any = False
        for row in spec.template_rows:
            offset = row.offset + j * spec.c
            if offset < 0 or offset + len(row.bits) > n:
                continue
            vec = place(row, offset, clip=False)
            if vec is not None:
                rows.append(vec)
                placed_any = True
        if not placed_any and j * spec.c >= n:
            break
    for row in spec.tail_rows:
        vec = place(row, row.offset, clip=False)
        if vec is None:
            raise ConfigError("tail rows must be non-zero")
        rows.append(vec)

    if not rows:
        rows.append(np.zeros(n, dtype=np.uint8))
    return ParityCheckMatrix(np.array(rows, dtype=np.uint8))


def is_codeword(word, h: ParityCheckMatrix) -> bool:
    """True iff word @ H.T vanishes over GF(2)."""
    w = np.asarray(word, dtype=np.uint8)
    if w.shape != (h.n_cols,):
        raise ValueError(f"word length {w.shape} does not match {h.n_cols} columns")
    return not ((h.rows @ w) % 2).any()


def gf2_row_reduce(mat: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over GF(2) with leftmost-pivot-first order."""
    a = np.array(mat, dtype=np.uint8)
    m, n = a.shape
    pivots: list[int] = []
    r = 0
    for col in range(n):
        if r >= m:
            break
        hits = np.nonzero(a[r:, col])[0]
        if hits.size == 0:
            continue
        p = r + int(hits[0])
        if p != r:
            a[[r, p]] = a[[p, r]]
        others = np.nonzero(a[:, col])[0]
        others = others[others != r]
        if others.size:
            a[others] ^= a[r]
        pivots.append(col)
        r += 1
    return a, pivots


def gf2_rank(mat: np.ndarray) -> int:
    return len(gf2_row_reduce(np.asarray(mat, dtype=np.uint8))[1])


@dataclass(frozen=True)
class GeneratorBasis:
    """Null-space basis of H in systematic-by-free-column form.

    Row i has a 1 in free column ``free_cols[i]`` and 0 in every other free
    column, so the message bits of a codeword can be read back directly from
    the free-column positions.
    """

    rows: np.ndarray  # (k, n) uint8
    free_cols: tuple[int, ...]

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.uint8)
        object.__setattr__(self, "rows", rows)
        rows.setflags(write=False)

    @property
    def k(self) -> int:
        return self.rows.shape[0]

    def __len__(self) -> int:
        return self.k

    def message_from_codeword(self, word) -> np.ndarray:
        w = np.asarray(word, dtype=np.uint8)
        return w[list(self.free_cols)].copy()


def derive_generator(h: ParityCheckMatrix) -> GeneratorBasis:
    """Deterministic kernel basis of H (one row per free column, ascending)."""
    rref, pivots = gf2_row_reduce(h.rows)
    n = h.n_cols
    free = [c for c in range(n) if c not in pivots]
    basis = np.zeros((len(free), n), dtype=np.uint8)
    for i, f in enumerate(free):
        basis[i, f] = 1
        for r, p in enumerate(pivots):
            basis[i, p] = rref[r, f]
    return GeneratorBasis(basis, tuple(free))


def encode(message_bits, g: GeneratorBasis) -> np.ndarray:
    """Encode a message as the matching linear combination of basis rows."""
    m = np.asarray(message_bits, dtype=np.uint8)
    if m.shape != (g.k,):
        raise ValueError(f"message length {m.shape} does not match basis size {g.k}")
    return (m @ g.rows) % 2


def bits_to_bases(word) -> str:
    """Pair map 00->A, 01->C, 10->G, 11->T, first bit most significant."""
    w = np.asarray(word, dtype=np.uint8)
    if w.size % 2 != 0:
        raise ValueError("bit word must have even length")
    pairs = w.reshape(-1, 2)
    return "".join(BASES[2 * int(a) + int(b)] for a, b in pairs)


def bases_to_bits(seq: str) -> np.ndarray:
    out = np.empty(2 * len(seq), dtype=np.uint8)
    for i, ch in enumerate(seq):
        v = BASE_INDEX[ch]
        out[2 * i] = v >> 1
        out[2 * i + 1] = v & 1
    return out


def _splitmix64(state: int) -> tuple[int, int]:
    state = (state + _SM64_GAMMA) & _U64
    z = state
    z = ((z ^ (z >> 30)) * _SM64_MIX1) & _U64
    z = ((z ^ (z >> 27)) * _SM64_MIX2) & _U64
    z = z ^ (z >> 31)
    return state, z


def offset_stream(seed: int, n: int) -> np.ndarray:
    """Deterministic quaternary offset stream: top two bits of SplitMix64 outputs."""
    state = seed & _U64
    out = np.empty(n, dtype=np.uint8)
    for i in range(n):
        state, z = _splitmix64(state)
        out[i] = z >> 62
    return out


def translate(seq: str, offsets, sign: int = 1) -> str:
    """Per-position symbol translation mod 4; sign=-1 undoes sign=+1."""
    off = np.asarray(offsets, dtype=np.int64)
    if off.shape != (len(seq),):
        raise ValueError("offset stream length must match the word")
    return "".join(BASES[(BASE_INDEX[ch] + sign * int(o)) % 4] for ch, o in zip(seq, off))


def apply_offset(word: str, seed: int) -> str:
    return translate(word, offset_stream(seed, len(word)), sign=1)


def remove_offset(word: str, seed: int) -> str:
    return translate(word, offset_stream(seed, len(word)), sign=-1)


def marker_positions(length: int, period: int) -> list[int]:
    """Payload indices after which a marker is inserted (interior only).

    A marker follows every ``period`` payload symbols; none is appended after
    the final symbol, so an exact-multiple payload ends on payload, not marker.
    """
    if period < 0:
        raise ValueError("period must be >= 0")
    if period == 0:
        return []
    return [i for i in range(period, length, period)]


def insert_markers(word: str, period: int, marker: str) -> str:
    if period <= 0:
        raise ValueError("period must be >= 1")
    cuts = marker_positions(len(word), period)
    out = []
    prev = 0
    for cut in cuts:
        out.append(word[prev:cut])
        out.append(marker)
        prev = cut
    out.append(word[prev:])
    return "".join(out)


def strip_markers(word: str, period: int, marker_len: int = 1) -> str:
    """Exact inverse of insert_markers for the given period and marker length."""
    if period <= 0:
        raise ValueError("period must be >= 1")
    out = []
    i = 0
    run = 0
    n = len(word)
    while i < n:
        out.append(word[i])
        i += 1
        run += 1
        if run == period and i < n:
            i += marker_len
            run = 0
    return "".join(out)


def rate(spec: CodeSpec, message_bits: int) -> float:
    """Message bits per stored bit: k / (2 * payload symbols incl. markers)."""
    return message_bits / (2.0 * spec.payload_length())


# -- configuration files -----------------------------------------------------

_ROW_KEY = re.compile(r"^(head_row|template_row|tail_row)\.(\d+)$")


def parse_code_config(text: str) -> CodeSpec:
    """Parse the ``key = value`` code configuration format."""
    scalars: dict[str, str] = {}
    groups: dict[str, dict[int, TemplateRow]] = {"head_row": {}, "template_row": {}, "tail_row": {}}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        m = _ROW_KEY.match(key)
        if m:
            kind, idx = m.group(1), int(m.group(2))
            if ":" not in value:
                raise ConfigError(f"line {lineno}: row value must be '<offset>:<bits>'")
            off_s, bits = (part.strip() for part in value.split(":", 1))
            try:
                row = TemplateRow(int(off_s), bits)
            except ValueError as exc:
                raise ConfigError(f"line {lineno}: {exc}") from exc
            if idx in groups[kind]:
                raise ConfigError(f"line {lineno}: duplicate {key}")
            groups[kind][idx] = row
        else:
            if key in scalars:
                raise ConfigError(f"line {lineno}: duplicate key {key}")
            scalars[key] = value

    def rows_of(kind: str) -> tuple[TemplateRow, ...]:
        entries = groups[kind]
        if sorted(entries) != list(range(len(entries))):
            raise ConfigError(f"{kind} indices must be 0..{len(entries) - 1}")
        return tuple(entries[i] for i in range(len(entries)))

    try:
        spec = CodeSpec(
            c=int(scalars["c"]),
            b=int(scalars["b"]),
            nu=int(scalars["nu"]),
            n_bits=int(scalars["n_bits"]),
            head_rows=rows_of("head_row"),
            template_rows=rows_of("template_row"),
            tail_rows=rows_of("tail_row"),
            marker_period=int(scalars.get("marker_period", "0")),
            marker_symbol=scalars.get("marker_symbol", "A"),
            scrambler_seed=int(scalars.get("scrambler_seed", "0"), 0),
            identifier=scalars.get("identifier", ""),
        )
    except KeyError as exc:
        raise ConfigError(f"missing config key {exc.args[0]!r}") from exc
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    build_parity_check(spec)  # fail fast on inconsistent templates
    return spec


def format_code_config(spec: CodeSpec) -> str:
    lines = [
        f"identifier = {spec.identifier}",
        f"c = {spec.c}",
        f"b = {spec.b}",
        f"nu = {spec.nu}",
        f"n_bits = {spec.n_bits}",
        f"marker_period = {spec.marker_period}",
        f"marker_symbol = {spec.marker_symbol}",
        f"scrambler_seed = {spec.scrambler_seed}",
    ]
    for kind, rows in (
        ("head_row", spec.head_rows),
        ("template_row", spec.template_rows),
        ("tail_row", spec.tail_rows),
    ):
        for i, row in enumerate(rows):
            lines.append(f"{kind}.{i} = {row.offset}:{row.bits}")
    return "\n".join(lines) + "\n"


def load_code_config(path) -> CodeSpec:
    return parse_code_config(Path(path).read_text(encoding="utf-8"))


def builtin_code_names() -> list[str]:
    pkg = resources.files("syntrellis") / "configs"
    return sorted(p.name[: -len(".cfg")] for p in pkg.iterdir() if p.name.endswith(".cfg"))


def load_builtin_code(name: str) -> CodeSpec:
    pkg = resources.files("syntrellis") / "configs"
    candidate = pkg / f"{name}.cfg"
    try:
        text = candidate.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ConfigError(f"no built-in code named {name!r}") from None
    return parse_code_config(text)
