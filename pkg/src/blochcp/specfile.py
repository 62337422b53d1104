"""Reading and writing channel description files.

Files are JSON objects with exactly the keys ``version``, ``kind``, ``n`` and
``payload``::

    {"version": 1, "kind": "diagonal", "n": 1, "payload": [1, -1, 1]}

    {"version": 1, "kind": "bloch_matrix_3x3", "n": 1,
     "payload": [[0.9, 0, 0], [0, 0.9, 0], [0, 0, 0.9]]}

    {"version": 1, "kind": "operator_sum", "n": 1,
     "payload": [{"weight": 1, "element": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]}]}

Matrices are row-major; complex entries are ``[re, im]`` pairs.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Union

import numpy as np

from .channels import SignedOperatorSum
from .diagonal_af import DiagonalSpec, kraus_from_spec
from .errors import InputError
from .pauli_basis import MAX_QUBITS
from .svd_reduction import decompose_unital

FORMAT_VERSION = 1
KINDS = ("diagonal", "bloch_matrix_3x3", "operator_sum")
_TOP_KEYS = {"version", "kind", "n", "payload"}
_TERM_KEYS = {"weight", "element"}


class SpecFileError(InputError):
    """A malformed channel file; ``line`` is 1-based (0 when unknown)."""

    def __init__(self, message: str, line: int = 0, path: str = "<input>"):
        super().__init__(message)
        self.message = message
        self.line = line
        self.path = path

    def __str__(self):
        return f"{self.path}:{self.line}: {self.message}"


@dataclass(frozen=True)
class ChannelSpecFile:
    version: int
    kind: str
    n: int
    payload: Any

    def diagonal(self) -> DiagonalSpec:
        return DiagonalSpec(self.n, self.payload)

    def matrix(self) -> np.ndarray:
        return np.asarray(self.payload, dtype=float)

    def channel(self) -> SignedOperatorSum:
        """The operator-sum form of the described map."""
        if self.kind == "diagonal":
            return kraus_from_spec(self.diagonal())
        if self.kind == "bloch_matrix_3x3":
            return decompose_unital(self.matrix())
        weights = [t["weight"] for t in self.payload]
        elements = [decode_matrix(t["element"]) for t in self.payload]
        return SignedOperatorSum.from_terms(zip(weights, elements), n=self.n)


def encode_matrix(m: np.ndarray) -> list:
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def decode_matrix(grid) -> np.ndarray:
    a = np.asarray(grid, dtype=float)
    if a.ndim != 3 or a.shape[2] != 2:
        raise ValueError("complex matrix must be a row-major grid of [re, im] pairs")
    return a[..., 0] + 1j * a[..., 1]


def _line_of(text: str, needle: str) -> int:
    m = re.search(re.escape(needle), text)
    if m is None:
        return 1
    return text.count("\n", 0, m.start()) + 1


def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool) and np.isfinite(x)


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def parse_spec(text: str, path: str = "<input>") -> ChannelSpecFile:
    """Parse and validate the text of a channel file."""
    def fail(message, key=None, line=None):
        if line is None:
            line = _line_of(text, f'"{key}"') if key else 1
        raise SpecFileError(message, line, path)

    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        fail(f"invalid JSON: {e.msg}", line=e.lineno)
    if not isinstance(data, dict):
        fail("top level must be an object")
    unknown = sorted(set(data) - _TOP_KEYS)
    if unknown:
        fail(f"unknown field {unknown[0]!r}", unknown[0])
    missing = sorted(_TOP_KEYS - set(data))
    if missing:
        fail(f"missing field {missing[0]!r}")

    version, kind, n, payload = data["version"], data["kind"], data["n"], data["payload"]
    if version != FORMAT_VERSION or not _is_int(version):
        fail(f"unsupported version {version!r} (expected {FORMAT_VERSION})", "version")
    if kind not in KINDS:
        fail(f"kind must be one of {', '.join(KINDS)}; got {kind!r}", "kind")
    if not _is_int(n) or not 1 <= n <= MAX_QUBITS:
        fail(f"n must be an integer in [1, {MAX_QUBITS}], got {n!r}", "n")

    if kind == "diagonal":
        size = 4 ** n - 1
        if not isinstance(payload, list) or len(payload) != size:
            fail(f"diagonal payload for n={n} must be a list of {size} numbers", "payload")
        if not all(_is_number(x) for x in payload):
            fail("diagonal payload entries must be finite numbers", "payload")
    elif kind == "bloch_matrix_3x3":
        if n != 1:
            fail("kind 'bloch_matrix_3x3' requires n = 1", "n")
        if (not isinstance(payload, list) or len(payload) != 3
                or not all(isinstance(r, list) and len(r) == 3 for r in payload)):
            fail("bloch_matrix_3x3 payload must be a 3x3 row-major list of lists", "payload")
        if not all(_is_number(x) for r in payload for x in r):
            fail("matrix entries must be finite numbers", "payload")
    else:
        dim = 2 ** n
        if not isinstance(payload, list) or not payload:
            fail("operator_sum payload must be a non-empty list of terms", "payload")
        for i, term in enumerate(payload):
            if not isinstance(term, dict):
                fail(f"term {i} must be an object", "payload")
            extra = sorted(set(term) - _TERM_KEYS)
            if extra:
                fail(f"term {i}: unknown field {extra[0]!r}", extra[0])
            if set(term) != _TERM_KEYS:
                fail(f"term {i} needs 'weight' and 'element'", "payload")
            if not _is_number(term["weight"]):
                fail(f"term {i}: weight must be a finite real number", "weight")
            try:
                m = decode_matrix(term["element"])
            except (ValueError, TypeError) as e:
                fail(f"term {i}: {e}", "element")
            if m.shape != (dim, dim):
                fail(f"term {i}: element must be {dim}x{dim} for n={n}, got {m.shape[0]}x{m.shape[1]}",
                     "element")
            if not np.all(np.isfinite(m)):
                fail(f"term {i}: element entries must be finite", "element")
    return ChannelSpecFile(version=version, kind=kind, n=n, payload=payload)


def load_spec(path: Union[str, Path]) -> ChannelSpecFile:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise SpecFileError(f"cannot read file: {e.strerror or e}", 0, str(path)) from e
    return parse_spec(text, str(path))


def dump_spec(spec: ChannelSpecFile) -> str:
    return json.dumps({"version": spec.version, "kind": spec.kind, "n": spec.n,
                       "payload": spec.payload}, indent=2)


def operator_sum_spec(channel: SignedOperatorSum) -> ChannelSpecFile:
    """File form of an operator-sum channel."""
    payload = [{"weight": float(w), "element": encode_matrix(a)} for w, a in channel.terms]
    return ChannelSpecFile(FORMAT_VERSION, "operator_sum", channel.n, payload)
