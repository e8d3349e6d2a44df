"""Base class for symbol sequence file format handlers."""

from abc import ABC, abstractmethod
from pathlib import Path

from ..symbols import SymbolSequence

# Every sequence file starts with a one-line header naming the alphabet size.

STR_HEADER_PREFIX = "alphabet="


def strHeader(seq: SymbolSequence) -> str:
    return f"{STR_HEADER_PREFIX}{seq.alphabet.nSize}\n"


def nAlphabetFromHeader(strLine: str, path: Path) -> int:
    """Parse 'alphabet=<l>'. Raises ValueError naming the file if malformed."""

    strLine = strLine.strip()
    if not strLine.startswith(STR_HEADER_PREFIX):
        raise ValueError(f"{path}: missing '{STR_HEADER_PREFIX}<l>' header line.")

    try:
        return int(strLine[len(STR_HEADER_PREFIX) :])
    except ValueError:
        raise ValueError(f"{path}: malformed header {strLine!r}.") from None


class SequenceFormat(ABC):
    """Base class for sequence file format handlers."""

    @staticmethod
    @abstractmethod
    def lStrExtension() -> list[str]:
        """Return list of file extensions this format handles (e.g. ['.sym'])."""
        ...

    @staticmethod
    @abstractmethod
    def fCanHandle(path: Path) -> bool:
        """Return True if this handler can read the given file."""
        ...

    @staticmethod
    @abstractmethod
    def readSequence(path: Path) -> SymbolSequence:
        """Read a sequence from the given file."""
        ...

    @staticmethod
    @abstractmethod
    def writeSequence(seq: SymbolSequence, path: Path) -> None:
        """Write a sequence to the given file."""
        ...
