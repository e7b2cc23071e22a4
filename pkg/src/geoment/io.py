"""JSON file formats shared by the library and the CLI.

Complex numbers are always written as ``[re, im]`` pairs.

* tensor:    ``{"n", "k", "coeffs": [[re, im], ...]}`` in row-major order
* net:       ``{"n", "epsilon", "seed", "centers": [[[re, im], ...], ...]}``
* grouping:  ``{"n", "p", "h": [[digit, ...], ...]}`` with 0-based digits
* symmetric: ``{"n", "m", "coords": [[re, im], ...], "normalization"}`` where
  normalization is ``"isometric"`` (default) or ``"monomial"``
* pure:      ``{"n", "k", "factors": [[[re, im], ...], ...]}``
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .constructions import GroupingMap
from .nets import EpsilonNet
from .symmetric import SymmetricTensor
from .tensor import DenseTensor, PureTensor


def encode_complex(values) -> list[list[float]]:
    arr = np.asarray(values, dtype=np.complex128).reshape(-1)
    return [[float(z.real), float(z.imag)] for z in arr]


def decode_complex(pairs) -> np.ndarray:
    arr = np.asarray(pairs, dtype=float)
    if arr.size == 0:
        return np.zeros(0, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("complex values must be given as [re, im] pairs")
    return arr[:, 0] + 1j * arr[:, 1]


def tensor_to_dict(T: DenseTensor) -> dict:
    return {"n": T.n, "k": T.k, "coeffs": encode_complex(T.coeffs)}


def tensor_from_dict(d: dict) -> DenseTensor:
    return DenseTensor.from_coeffs(decode_complex(d["coeffs"]), int(d["n"]), int(d["k"]))


def pure_to_dict(P: PureTensor) -> dict:
    return {"n": P.n, "k": P.k, "factors": [encode_complex(f) for f in P.factors]}


def pure_from_dict(d: dict) -> PureTensor:
    return PureTensor([decode_complex(f) for f in d["factors"]])


def net_to_dict(net: EpsilonNet) -> dict:
    return {
        "n": net.n,
        "epsilon": net.epsilon,
        "seed": net.construction_seed,
        "stop_streak": net.stop_streak,
        "centers": [encode_complex(c) for c in net.centers],
    }


def net_from_dict(d: dict) -> EpsilonNet:
    centers = np.array([decode_complex(c) for c in d["centers"]])
    return EpsilonNet(int(d["n"]), float(d["epsilon"]), centers, d.get("seed"), d.get("stop_streak"))


def grouping_to_dict(g: GroupingMap) -> dict:
    return {"n": g.n, "p": g.p, "h": [list(t) for t in g.h]}


def grouping_from_dict(d: dict) -> GroupingMap:
    return GroupingMap(int(d["n"]), int(d["p"]), tuple(tuple(t) for t in d["h"]))


def symmetric_to_dict(S: SymmetricTensor) -> dict:
    return {"n": S.n, "m": S.m, "coords": encode_complex(S.coords), "normalization": "isometric"}


def symmetric_from_dict(d: dict) -> SymmetricTensor:
    n, m = int(d["n"]), int(d["m"])
    coords = decode_complex(d["coords"])
    kind = d.get("normalization", "isometric")
    if kind == "isometric":
        return SymmetricTensor(n, m, coords)
    if kind == "monomial":
        return SymmetricTensor.from_monomial(n, m, coords)
    raise ValueError(f"unknown normalization {kind!r}")


def read_json(path) -> dict:
    return json.loads(Path(path).read_text())


def write_json(obj, path) -> None:
    Path(path).write_text(json.dumps(obj, indent=2) + "\n")
