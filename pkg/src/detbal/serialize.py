"""Channel spec files: a small JSON format with complex entries as [re, im].

Two formats are recognized: ``detbal-channel/1`` (Kraus operators plus
optional state, weight matrix, intertwiner, dilation and analysis
options) and ``detbal-classical/1`` (a column-stochastic transition
matrix with optional stationary vector).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .channel import KrausSet
from .errors import SpecFileError
from .matcore import RANK_TOL, RESIDUAL_TOL

CHANNEL_FORMAT = "detbal-channel/1"
CLASSICAL_FORMAT = "detbal-classical/1"

DEFAULT_OPTIONS = {
    "max_level": 2,
    "residual_tol": RESIDUAL_TOL,
    "rank_tol": RANK_TOL,
}


def encode_matrix(A: np.ndarray) -> list:
    A = np.asarray(A, dtype=complex)
    return [[[float(x.real), float(x.imag)] for x in row] for row in A]


def decode_matrix(obj) -> np.ndarray:
    try:
        A = np.asarray(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise SpecFileError(f"malformed matrix payload: {exc}") from None
    if A.ndim != 3 or A.shape[2] != 2:
        raise SpecFileError("matrix entries must be [re, im] pairs")
    return A[..., 0] + 1j * A[..., 1]


def encode_real_matrix(A: np.ndarray) -> list:
    return [[float(x) for x in row] for row in np.asarray(A, dtype=float)]


@dataclass
class ChannelSpec:
    kraus: KrausSet
    rho0: np.ndarray | None = None
    Q: np.ndarray | None = None
    Q_normalization: str | None = None
    F: np.ndarray | None = None
    dilation: np.ndarray | None = None
    options: dict = field(default_factory=lambda: dict(DEFAULT_OPTIONS))

    @property
    def d(self):
        return self.kraus.d


def channel_spec_dict(kraus, rho0=None, Q=None, Q_normalization=None, F=None,
                      dilation=None, options=None) -> dict:
    """Assemble a JSON-ready channel spec dictionary."""
    out = {
        "format": CHANNEL_FORMAT,
        "d": int(kraus[0].shape[0]),
        "kraus": [encode_matrix(K) for K in kraus],
    }
    if rho0 is not None:
        out["rho0"] = encode_matrix(rho0)
    if Q is not None:
        out["Q"] = {
            "matrix": encode_matrix(Q),
            "normalization": Q_normalization or "raw",
        }
    if F is not None:
        out["F"] = encode_matrix(F)
    if dilation is not None:
        out["dilation"] = encode_matrix(dilation)
    merged = dict(DEFAULT_OPTIONS)
    if options:
        merged.update(options)
    out["options"] = merged
    return out


def parse_channel_spec(payload: dict) -> ChannelSpec:
    if not isinstance(payload, dict):
        raise SpecFileError("spec payload must be an object")
    fmt = payload.get("format")
    if fmt != CHANNEL_FORMAT:
        raise SpecFileError(f"unrecognized format {fmt!r}")
    if "kraus" not in payload or not payload["kraus"]:
        raise SpecFileError("spec carries no Kraus operators")
    try:
        kraus = KrausSet([decode_matrix(K) for K in payload["kraus"]])
    except ValueError as exc:
        raise SpecFileError(str(exc)) from None
    d = payload.get("d")
    if d is not None and int(d) != kraus.d:
        raise SpecFileError(f"declared dimension {d} does not match operators")
    spec = ChannelSpec(kraus=kraus)
    if "rho0" in payload:
        spec.rho0 = decode_matrix(payload["rho0"])
        if spec.rho0.shape != (kraus.d, kraus.d):
            raise SpecFileError("rho0 dimension mismatch")
    if "Q" in payload:
        qobj = payload["Q"]
        if not isinstance(qobj, dict) or "matrix" not in qobj:
            raise SpecFileError("Q must carry a matrix and a normalization")
        spec.Q = decode_matrix(qobj["matrix"])
        spec.Q_normalization = qobj.get("normalization", "raw")
        if spec.Q.shape != (kraus.n, kraus.n):
            raise SpecFileError("Q dimension mismatch")
    if "F" in payload:
        spec.F = decode_matrix(payload["F"])
    if "dilation" in payload:
        spec.dilation = decode_matrix(payload["dilation"])
        dn = kraus.d * kraus.n
        if spec.dilation.shape != (dn, dn):
            raise SpecFileError("dilation dimension mismatch")
    opts = dict(DEFAULT_OPTIONS)
    opts.update(payload.get("options", {}))
    spec.options = opts
    return spec


def classical_spec_dict(M, pi=None) -> dict:
    out = {"format": CLASSICAL_FORMAT, "transition": encode_real_matrix(M)}
    if pi is not None:
        out["pi"] = [float(x) for x in np.asarray(pi, dtype=float)]
    return out


def parse_classical_spec(payload: dict):
    """Returns (M, pi-or-None) from a classical spec payload."""
    if not isinstance(payload, dict) or payload.get("format") != CLASSICAL_FORMAT:
        raise SpecFileError("not a classical chain spec")
    if "transition" not in payload:
        raise SpecFileError("classical spec carries no transition matrix")
    try:
        M = np.asarray(payload["transition"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise SpecFileError(f"malformed transition matrix: {exc}") from None
    pi = None
    if "pi" in payload:
        pi = np.asarray(payload["pi"], dtype=float)
    return M, pi


def load_payload(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise SpecFileError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise SpecFileError(f"invalid JSON in {path}: {exc}") from None


def dump_payload(payload: dict, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")
