"""Signed-versor input matrices.

Every admissible input column injects a nonnegative signal into exactly one
node with a fixed sign, so a column is fully described by ``(node, sign)``.
Nodes are labelled ``1..n`` throughout the public API.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

Column = tuple[int, int]

_TOKEN = re.compile(r"^\s*([+-]?)\s*e\s*(\d+)\s*$", re.IGNORECASE)


def format_column(col: Column) -> str:
    node, sign = col
    return f"{'+' if sign > 0 else '-'}e{node}"


def parse_column(token: str) -> Column:
    """Parse ``"+e3"``, ``"e3"`` or ``"-e3"`` into ``(3, +1)`` / ``(3, -1)``."""
    match = _TOKEN.match(token)
    if match is None:
        raise ValueError(f"cannot parse input column {token!r}; expected e.g. '+e3' or '-e3'")
    sign = -1 if match.group(1) == "-" else 1
    node = int(match.group(2))
    if node < 1:
        raise ValueError(f"node labels start at 1, got {token!r}")
    return node, sign


@dataclass(frozen=True)
class InputMatrix:
    """Ordered list of signed-versor columns."""

    columns: tuple[Column, ...] = field(default_factory=tuple)

    def __post_init__(self):
        cols = []
        for col in self.columns:
            node, sign = col
            if int(node) != node or int(node) < 1:
                raise ValueError(f"invalid node label {node!r}")
            if sign not in (1, -1):
                raise ValueError(f"column sign must be +1 or -1, got {sign!r}")
            cols.append((int(node), int(sign)))
        object.__setattr__(self, "columns", tuple(cols))

    @classmethod
    def parse(cls, text: str) -> "InputMatrix":
        tokens = [t for t in re.split(r"[,\s;]+", text.strip()) if t]
        return cls(tuple(parse_column(t) for t in tokens))

    @classmethod
    def from_pairs(cls, pairs: Iterable) -> "InputMatrix":
        cols = []
        for item in pairs:
            if isinstance(item, str):
                cols.append(parse_column(item))
            elif isinstance(item, dict):
                cols.append((item["node"], item["sign"]))
            else:
                node, sign = item
                cols.append((node, sign))
        return cls(tuple(cols))

    @classmethod
    def from_array(cls, B, atol: float = 0.0) -> "InputMatrix":
        """Read columns off a dense matrix; each must be a signed versor."""
        arr = np.asarray(B, dtype=float)
        if arr.ndim != 2:
            raise ValueError("input matrix must be 2-D")
        cols = []
        for j in range(arr.shape[1]):
            col = arr[:, j]
            nz = np.flatnonzero(np.abs(col) > atol)
            if len(nz) != 1 or abs(abs(col[nz[0]]) - 1.0) > atol:
                raise ValueError(f"column {j + 1} is not a signed versor")
            cols.append((int(nz[0]) + 1, 1 if col[nz[0]] > 0 else -1))
        return cls(tuple(cols))

    def check_nodes(self, n: int) -> None:
        for node, _ in self.columns:
            if node > n:
                raise ValueError(f"input column on node {node} but the network has {n} nodes")

    def to_array(self, n: int) -> np.ndarray:
        B = np.zeros((n, len(self.columns)))
        for j, (node, sign) in enumerate(self.columns):
            B[node - 1, j] = sign
        return B

    def append(self, *cols: Column) -> "InputMatrix":
        return InputMatrix(self.columns + tuple(cols))

    @property
    def m(self) -> int:
        return len(self.columns)

    @property
    def driver_nodes(self) -> tuple[int, ...]:
        return tuple(sorted({node for node, _ in self.columns}))

    def __len__(self) -> int:
        return len(self.columns)

    def __iter__(self) -> Iterator[Column]:
        return iter(self.columns)

    def __str__(self) -> str:
        return ",".join(format_column(c) for c in self.columns)

    def to_json(self) -> list[dict]:
        return [{"node": node, "sign": sign} for node, sign in self.columns]


def candidate_columns(n: int) -> list[Column]:
    """All signed versors in tie-break order: node ascending, positive first."""
    return [(i, s) for i in range(1, n + 1) for s in (1, -1)]
