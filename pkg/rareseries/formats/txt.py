"""Text sequence format (.txt).

After the 'alphabet=<l>' header, symbols are either ASCII digits with
no separators (alphabets up to 10 symbols) or whitespace-separated
integers. Line breaks inside the digit form are ignored.
"""

from pathlib import Path

import numpy as np

from ..symbols import Alphabet, SymbolSequence
from .base import STR_HEADER_PREFIX, SequenceFormat, nAlphabetFromHeader, strHeader

# Digit-form files are wrapped at this many symbols per line.

N_DIGIT_PER_LINE = 100


class FormatTxt(SequenceFormat):
    """Handler for text .txt sequence files."""

    @staticmethod
    def lStrExtension() -> list[str]:
        return [".txt"]

    @staticmethod
    def fCanHandle(path: Path) -> bool:
        if path.suffix.lower() not in FormatTxt.lStrExtension():
            return False

        # Verify the header so stray text files are not mistaken for sequences.

        try:
            with path.open("r", encoding="ascii", errors="replace") as file:
                return file.readline().strip().startswith(STR_HEADER_PREFIX)
        except OSError:
            return False

    @staticmethod
    def readSequence(path: Path) -> SymbolSequence:
        strHead, _, strBody = path.read_text(encoding="ascii").partition("\n")
        nAlphabet = nAlphabetFromHeader(strHead, path)

        # With at most 10 symbols every symbol is one digit, whether or not
        # the file separates them, so digits are read one character each.

        lStrToken = strBody.split()
        fDigits = nAlphabet <= 10

        try:
            if fDigits:
                arySym = np.frombuffer("".join(lStrToken).encode("ascii"), dtype=np.uint8)
                if np.any((arySym < ord("0")) | (arySym > ord("9"))):
                    raise ValueError
                arySym = arySym.astype(np.int64) - ord("0")
            else:
                arySym = np.array([int(strToken) for strToken in lStrToken], dtype=np.int64)
        except ValueError:
            raise ValueError(f"{path}: symbols must be digits or integers.") from None

        return SymbolSequence(Alphabet(nAlphabet), arySym)

    @staticmethod
    def writeSequence(seq: SymbolSequence, path: Path) -> None:
        with path.open("w", encoding="ascii") as file:
            file.write(strHeader(seq))

            if seq.alphabet.nSize <= 10:
                strDigit = seq.strSymbols()
                for iStart in range(0, len(strDigit), N_DIGIT_PER_LINE):
                    file.write(strDigit[iStart : iStart + N_DIGIT_PER_LINE] + "\n")
            else:
                file.write(" ".join(str(int(sym)) for sym in seq.arySymbol) + "\n")
