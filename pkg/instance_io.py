"""Text instance files.

Grammar (blank lines are ignored anywhere)::

    triform/1
    [complex]
    dim N
    T
    <N rows of N reals>
    A
    <N rows>
    B
    <N rows>

In a ``complex`` file every row holds 2N reals, real and imaginary parts
interleaved. Values are written with ``repr``, the shortest decimal that
reads back to the same double.
"""

import io
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Optional, TextIO, Union

import numpy as np

from errors import BadDimension, BadMagic, BadMatrixBlock, InstanceFormatError
from forms import (
    FORM_NAMES,
    HermitianInstance,
    Instance,
    realify,
    validate_hermitian,
    validate_instance,
)

logger = logging.getLogger(__name__)

MAGIC = "triform/1"
COMPLEX_FLAG = "complex"

PathLike = Union[str, Path]


@dataclass(frozen=True, eq=False)
class InstanceFile:
    """Parsed file contents; matrices are complex arrays when ``is_complex``."""

    dim: int
    T: np.ndarray
    A: np.ndarray
    B: np.ndarray
    is_complex: bool = False

    def matrices(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.T, self.A, self.B

    def hermitian(self) -> HermitianInstance:
        return validate_hermitian(self.T, self.A, self.B)

    def to_instance(self) -> Instance:
        """Validated real Instance; complex files are realified to dimension 2N."""
        if self.is_complex:
            return realify(self.hermitian())
        return validate_instance(self.T, self.A, self.B)

    @classmethod
    def from_instance(cls, inst: Instance) -> "InstanceFile":
        return cls(inst.dim, inst.T.array(), inst.A.array(), inst.B.array())

    @classmethod
    def from_hermitian(cls, h: HermitianInstance) -> "InstanceFile":
        return cls(h.dim, h.T.copy(), h.A.copy(), h.B.copy(), is_complex=True)


# ============================================================================
# PARSING
# ============================================================================

def _content_lines(text: str) -> Iterator[tuple[int, str]]:
    for number, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if line:
            yield number, line


def _next_line(lines: Iterator[tuple[int, str]], last: int, expected: str) -> tuple[int, str]:
    try:
        return next(lines)
    except StopIteration:
        raise BadMatrixBlock(f"unexpected end of file, expected {expected}", last + 1) from None


def _parse_row(line: str, number: int, width: int) -> list[float]:
    tokens = line.split()
    if len(tokens) != width:
        raise BadMatrixBlock(f"row has {len(tokens)} values, expected {width}", number)
    try:
        return [float(tok) for tok in tokens]
    except ValueError as exc:
        raise BadMatrixBlock(f"not a real number: {exc}", number) from None


def parse_text(text: str) -> InstanceFile:
    """Parse instance-file text; errors name the offending line.

    Raises:
        BadMagic, BadDimension, BadMatrixBlock
    """
    lines = _content_lines(text)
    try:
        number, line = next(lines)
    except StopIteration:
        raise BadMagic(f"empty input, expected '{MAGIC}'", 1) from None
    if line != MAGIC:
        raise BadMagic(f"expected '{MAGIC}', got {line!r}", number)

    number, line = _next_line(lines, number, "'dim N'")
    is_complex = line == COMPLEX_FLAG
    if is_complex:
        number, line = _next_line(lines, number, "'dim N'")

    parts = line.split()
    if len(parts) != 2 or parts[0] != "dim":
        raise BadDimension(f"expected 'dim N', got {line!r}", number)
    try:
        dim = int(parts[1])
    except ValueError:
        raise BadDimension(f"dimension is not an integer: {parts[1]!r}", number) from None
    if dim < 1:
        raise BadDimension(f"dimension must be >= 1, got {dim}", number)

    width = 2 * dim if is_complex else dim
    blocks = {}
    for label in FORM_NAMES:
        number, line = _next_line(lines, number, f"block label '{label}'")
        if line != label:
            raise BadMatrixBlock(f"expected block label '{label}', got {line!r}", number)
        rows = []
        for _ in range(dim):
            number, line = _next_line(lines, number, f"a row of block '{label}'")
            rows.append(_parse_row(line, number, width))
        data = np.array(rows, dtype=float)
        if is_complex:
            data = data[:, 0::2] + 1j * data[:, 1::2]
        blocks[label] = data

    extra = next(lines, None)
    if extra is not None:
        raise BadMatrixBlock(f"unexpected content after block 'B': {extra[1]!r}", extra[0])

    logger.debug("Parsed %s instance of dim %d", "complex" if is_complex else "real", dim)
    return InstanceFile(dim, blocks["T"], blocks["A"], blocks["B"], is_complex)


def read_text(path: PathLike, stdin: Optional[TextIO] = None) -> str:
    """File contents, or standard input for the path '-'.

    Raises:
        InstanceFormatError: the bytes are not UTF-8 (with the line for files).
        OSError
    """
    if str(path) == "-":
        try:
            return (stdin or sys.stdin).read()
        except UnicodeDecodeError as exc:
            raise InstanceFormatError(f"standard input is not UTF-8 text ({exc.reason})") from None
    data = Path(path).read_bytes()
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        line = data[: exc.start].count(b"\n") + 1
        raise InstanceFormatError(f"not UTF-8 text (byte 0x{data[exc.start]:02x})", line) from None


def load(path: PathLike) -> InstanceFile:
    return parse_text(read_text(path))


def parse_instance(path: PathLike) -> Instance:
    """Read, parse and validate an instance file ('-' for standard input).

    Raises:
        InstanceFormatError subclasses, ValidationError subclasses, OSError
    """
    return load(path).to_instance()


def read_matrix(path: PathLike) -> np.ndarray:
    """Whitespace-separated rows of reals, e.g. an L matrix for the HS check."""
    rows = []
    width = None
    for number, line in _content_lines(read_text(path)):
        if width is None:
            width = len(line.split())
        rows.append(_parse_row(line, number, width))
    if not rows:
        raise BadMatrixBlock("matrix file is empty", 1)
    return np.array(rows, dtype=float)


# ============================================================================
# SERIALIZATION
# ============================================================================

def _render_row(row: np.ndarray, is_complex: bool) -> str:
    if is_complex:
        values = []
        for z in row:
            values.extend((repr(float(z.real)), repr(float(z.imag))))
        return " ".join(values)
    return " ".join(repr(float(v)) for v in row)


def serialize(doc: InstanceFile) -> str:
    out = io.StringIO()
    out.write(MAGIC + "\n")
    if doc.is_complex:
        out.write(COMPLEX_FLAG + "\n")
    out.write(f"dim {doc.dim}\n")
    for label, matrix in zip(FORM_NAMES, doc.matrices()):
        out.write(label + "\n")
        for row in np.asarray(matrix):
            out.write(_render_row(row, doc.is_complex) + "\n")
    return out.getvalue()


def write(doc: InstanceFile, path: PathLike) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(serialize(doc), encoding="utf-8")
    logger.info("Wrote instance file: %s", target)
    return target
