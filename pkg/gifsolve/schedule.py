# Tolerance schedules for outer loops

import math
from dataclasses import dataclass

from gifsolve.errors import InvalidInputError


@dataclass(frozen=True)
class Schedule:
    """
    Positive sequence indexed from k = 1.

    Attributes
    ----------
    kind : str
        One of "harmonic" (c/k), "geometric" (c * r**k) or "constant" (c).
    ratio : float
        Ratio r of a geometric schedule (ignored otherwise).
    scale : float
        Leading constant c.
    """

    kind: str
    ratio: float = 1.0
    scale: float = 1.0

    @classmethod
    def parse(cls, text: str) -> "Schedule":
        """
        Parse a schedule flag value.

        Accepted forms are "1/k", "c/k", "geometric:r", "geometric:r:c" and
        "const:c".

        Parameters
        ----------
        text : str
            Flag value.

        Returns
        -------
        schedule : Schedule
            Parsed schedule.

        Raises
        ------
        InvalidInputError
            If the text is not a valid schedule.
        """
        text = text.strip()
        try:
            if text.endswith("/k"):
                return cls("harmonic", scale=float(text[:-2]))
            name, _, rest = text.partition(":")
            if name == "geometric":
                ratio_text, _, scale_text = rest.partition(":")
                scale = float(scale_text) if scale_text else 1.0
                return cls("geometric", ratio=float(ratio_text), scale=scale)
            if name == "const":
                return cls("constant", scale=float(rest))
        except ValueError as e:
            raise InvalidInputError(f"Can't parse schedule '{text}'.") from e
        raise InvalidInputError(f"Unknown schedule '{text}'.")

    def __post_init__(self) -> None:
        if not (math.isfinite(self.scale) and self.scale > 0.0):
            raise InvalidInputError(
                f"Schedule values must be positive and finite, got {self.scale!r}."
            )
        if self.kind == "geometric" and not 0.0 < self.ratio < 1.0:
            raise InvalidInputError(
                f"Geometric ratio must be in (0, 1), got {self.ratio!r}."
            )

    def __call__(self, k: int) -> float:
        if k < 1:
            raise InvalidInputError("Schedules are indexed from 1.")
        if self.kind == "harmonic":
            return self.scale / k
        if self.kind == "geometric":
            return float(self.scale * self.ratio**k)
        return self.scale

    def __str__(self) -> str:
        if self.kind == "harmonic":
            return f"{_short(self.scale)}/k"
        if self.kind == "geometric":
            if self.scale == 1.0:
                return f"geometric:{_short(self.ratio)}"
            return f"geometric:{_short(self.ratio)}:{_short(self.scale)}"
        return f"const:{_short(self.scale)}"


def _short(value: float) -> str:
    # repr round-trips; integral values drop the trailing ".0".
    text = repr(value)
    return text[:-2] if text.endswith(".0") else text


HARMONIC = Schedule("harmonic")
