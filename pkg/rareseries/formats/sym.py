"""Raw byte sequence format (.sym).

The header line 'alphabet=<l>\\n' is followed by one byte per symbol.
This is the compact format used for long generated sequences.
"""

from pathlib import Path

import numpy as np

from ..symbols import Alphabet, SymbolSequence
from .base import SequenceFormat, nAlphabetFromHeader, strHeader


class FormatSym(SequenceFormat):
    """Handler for raw byte .sym files."""

    @staticmethod
    def lStrExtension() -> list[str]:
        return [".sym"]

    @staticmethod
    def fCanHandle(path: Path) -> bool:
        return path.suffix.lower() in FormatSym.lStrExtension()

    @staticmethod
    def readSequence(path: Path) -> SymbolSequence:
        abData = path.read_bytes()

        iNewline = abData.find(b"\n")
        if iNewline < 0:
            raise ValueError(f"{path}: missing header line.")

        nAlphabet = nAlphabetFromHeader(abData[:iNewline].decode("ascii", "replace"), path)
        arySym = np.frombuffer(abData, dtype=np.uint8, offset=iNewline + 1)

        return SymbolSequence(Alphabet(nAlphabet), arySym)

    @staticmethod
    def writeSequence(seq: SymbolSequence, path: Path) -> None:
        with path.open("wb") as file:
            file.write(strHeader(seq).encode("ascii"))
            file.write(seq.arySymbol.tobytes())
