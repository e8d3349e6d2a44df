"""Sequence file format registry.

Manages format handlers. To add a new format, create a module in this
package with a class that inherits from SequenceFormat and list it in
g_lClsFormat.
"""

from pathlib import Path

from ..symbols import SymbolSequence
from .base import SequenceFormat
from .sym import FormatSym
from .txt import FormatTxt

# All known format handlers, checked in order.

g_lClsFormat: list[type[SequenceFormat]] = [
    FormatSym,
    FormatTxt,
]


def lStrSupportedExtension() -> list[str]:
    """Return all file extensions supported across all formats."""

    lStr: list[str] = []
    for clsFormat in g_lClsFormat:
        lStr.extend(clsFormat.lStrExtension())
    return lStr


def formatForPath(path: Path) -> SequenceFormat | None:
    """Return the handler able to read the given file, or None."""

    for clsFormat in g_lClsFormat:
        if clsFormat.fCanHandle(path):
            return clsFormat()
    return None


def _formatForExtension(path: Path) -> SequenceFormat:
    for clsFormat in g_lClsFormat:
        if path.suffix.lower() in clsFormat.lStrExtension():
            return clsFormat()

    raise ValueError(
        f"Unsupported sequence format: {path.suffix!r}. "
        f"Supported extensions: {', '.join(lStrSupportedExtension())}"
    )


def readSequence(path: Path) -> SymbolSequence:
    """Read a sequence from any supported format.

    Raises FileNotFoundError for a missing file and ValueError if the
    format is not recognized or the content is invalid.
    """

    if not path.is_file():
        raise FileNotFoundError(f"Sequence file not found: {path}")

    fmt = formatForPath(path)
    if fmt is None:
        _formatForExtension(path)
        raise ValueError(f"{path}: not a sequence file (missing header).")

    return fmt.readSequence(path)


def writeSequence(seq: SymbolSequence, path: Path) -> None:
    """Write a sequence, choosing the format by file extension."""

    _formatForExtension(path).writeSequence(seq, path)


__all__ = [
    "SequenceFormat",
    "FormatSym",
    "FormatTxt",
    "formatForPath",
    "lStrSupportedExtension",
    "readSequence",
    "writeSequence",
]
