"""Named coupling-constant vectors."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence

import numpy as np


@dataclass(frozen=True)
class ParameterVector:
    """Ordered, named coupling constants.

    Values may be complex (shifted parameters of the discrete families
    at intermediate ``s``); ``is_complex`` flags that case.
    """

    names: tuple[str, ...]
    values: tuple

    def __post_init__(self):
        if len(self.names) != len(self.values):
            raise ValueError("names and values differ in length")

    @classmethod
    def from_mapping(cls, names: Sequence[str], mapping: Mapping[str, complex]) -> "ParameterVector":
        missing = [n for n in names if n not in mapping]
        if missing:
            raise KeyError(f"missing parameters: {missing}")
        return cls(tuple(names), tuple(mapping[n] for n in names))

    def __getitem__(self, key):
        if isinstance(key, str):
            return self.values[self.names.index(key)]
        return self.values[key]

    def __iter__(self) -> Iterator:
        return iter(self.values)

    def __len__(self) -> int:
        return len(self.values)

    @property
    def is_complex(self) -> bool:
        return any(isinstance(v, complex) and v.imag != 0 for v in self.values)

    def as_dict(self) -> dict:
        return dict(zip(self.names, self.values))

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values)

    def replace(self, **changes) -> "ParameterVector":
        d = self.as_dict()
        for k, v in changes.items():
            if k not in d:
                raise KeyError(k)
            d[k] = v
        return ParameterVector(self.names, tuple(d[n] for n in self.names))

    def shifted(self, delta: Sequence[float]) -> "ParameterVector":
        return ParameterVector(self.names, tuple(v + d for v, d in zip(self.values, delta)))

    def scaled(self, factor: float) -> "ParameterVector":
        return ParameterVector(self.names, tuple(v * factor for v in self.values))

    def __str__(self) -> str:
        parts = []
        for n, v in zip(self.names, self.values):
            if isinstance(v, complex):
                parts.append(f"{n}={v.real:.12g}{v.imag:+.12g}j")
            else:
                parts.append(f"{n}={v:.12g}")
        return "(" + ", ".join(parts) + ")"
