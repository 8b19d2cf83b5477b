"""JSON encoding of channels.

Matrices are lists of rows whose entries are ``[re, im]`` pairs (a bare
number is read as a real entry). A channel document is either::

    {"dim": d, "kraus": [M, ...], "ideal_unitary": M}
    {"dim": d, "chi": M, "basis": "gellmann", "ideal_unitary": M}

``ideal_unitary`` is optional and defaults to the identity.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .bases import hermitian_basis
from .channels import ChiMatrix, KrausChannel, chi_to_kraus

__all__ = [
    "ChannelFormatError",
    "InvalidChannelError",
    "encode_matrix",
    "decode_matrix",
    "channel_to_json",
    "channel_from_json",
    "load_channel",
    "load_unitary",
]


class ChannelFormatError(ValueError):
    """The document does not follow the channel schema."""


class InvalidChannelError(ValueError):
    """The document is well formed but describes a non-CP map."""


def encode_matrix(m) -> list:
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def _entry(x) -> complex:
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return complex(x)
    if isinstance(x, (list, tuple)) and len(x) == 2 and all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in x
    ):
        return complex(x[0], x[1])
    raise ChannelFormatError(f"matrix entry {x!r} is not a number or [re, im] pair")


def decode_matrix(data, dim: int | None = None) -> np.ndarray:
    if not isinstance(data, list) or not data or not all(isinstance(r, list) for r in data):
        raise ChannelFormatError("matrix must be a nonempty list of rows")
    if any(len(r) != len(data) for r in data):
        raise ChannelFormatError("matrix must be square")
    m = np.array([[_entry(x) for x in row] for row in data], dtype=complex)
    if dim is not None and m.shape[0] != dim:
        raise ChannelFormatError(f"matrix has side {m.shape[0]}, expected {dim}")
    return m


def channel_to_json(channel: KrausChannel, ideal=None) -> dict:
    doc = {"dim": channel.d, "kraus": [encode_matrix(k) for k in channel.kraus]}
    if ideal is not None:
        doc["ideal_unitary"] = encode_matrix(ideal)
    return doc


def channel_from_json(doc) -> tuple[KrausChannel, np.ndarray]:
    """Parse a channel document into ``(channel, ideal_unitary)``."""
    if not isinstance(doc, dict):
        raise ChannelFormatError("channel document must be a JSON object")
    dim = doc.get("dim")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 2:
        raise ChannelFormatError("'dim' must be an integer >= 2")
    if "kraus" in doc:
        ops = doc["kraus"]
        if not isinstance(ops, list) or not ops:
            raise ChannelFormatError("'kraus' must be a nonempty list of matrices")
        channel = KrausChannel.from_ops([decode_matrix(k, dim) for k in ops])
    elif "chi" in doc:
        basis_name = doc.get("basis", "gellmann")
        if basis_name != "gellmann":
            raise ChannelFormatError(f"unsupported basis {basis_name!r}")
        chi = decode_matrix(doc["chi"], dim * dim)
        try:
            channel = chi_to_kraus(ChiMatrix(dim, hermitian_basis(dim), chi))
        except ValueError as exc:
            raise InvalidChannelError(str(exc)) from exc
    else:
        raise ChannelFormatError("channel document needs 'kraus' or 'chi'")
    ideal = doc.get("ideal_unitary")
    u = np.eye(dim, dtype=complex) if ideal is None else decode_matrix(ideal, dim)
    return channel, u


def _read_json(path) -> object:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ChannelFormatError(f"cannot read {path}: {exc}") from exc


def load_channel(path) -> tuple[KrausChannel, np.ndarray]:
    return channel_from_json(_read_json(path))


def load_unitary(path, dim: int | None = None) -> np.ndarray:
    """Read a unitary from a bare matrix or an object with ``ideal_unitary``."""
    doc = _read_json(path)
    if isinstance(doc, dict):
        doc = doc.get("ideal_unitary", doc.get("matrix"))
    return decode_matrix(doc, dim)
