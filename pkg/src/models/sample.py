"""
Labeled training and evaluation strings.
"""

from dataclasses import dataclass

from core.exceptions import InvalidInputError


@dataclass(frozen=True)
class LabeledSample:
    """
    A string with one membership label per prefix.

    ``y[i]`` is True iff the prefix ``x[:i]`` belongs to the language, so
    ``y[0]`` encodes membership of the empty string.
    """

    x: str
    y: tuple[bool, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "y", tuple(bool(label) for label in self.y))
        if len(self.y) != len(self.x) + 1:
            raise InvalidInputError(
                "A sample needs exactly len(x) + 1 prefix labels",
                details={"x": self.x, "labels": len(self.y)},
            )

    @property
    def label(self) -> bool:
        """Membership of the full string."""
        return self.y[-1]

    def __len__(self) -> int:
        return len(self.x)


@dataclass(frozen=True)
class Dataset:
    """
    A named collection of labeled strings.

    Attributes:
        language: Tomita language the labels come from
        seed: Seed the strings were drawn with
        length: Length description, e.g. ``"10"`` or ``"0..50"``
        samples: The labeled strings, in draw order
    """

    language: int
    seed: int
    length: str
    samples: tuple[LabeledSample, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "samples", tuple(self.samples))

    @property
    def words(self) -> list[str]:
        return [sample.x for sample in self.samples]

    def __len__(self) -> int:
        return len(self.samples)
