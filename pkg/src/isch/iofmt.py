"""Binary file formats for vectors, models, codes, labels and rankings.

All integers are little-endian. Formats:

* vectors  -- magic ``ISCHVEC1``, u32 n, u32 d, then n*d float32 row-major.
  ``read_vectors`` also accepts the common raw per-row format where each row
  is a little-endian int32 dimension followed by that many float32 values
  (.fvecs), detected by the missing magic.
* codes    -- magic ``ISCHCOD1``, u32 n, u32 m, then n * ceil(m/64) u64 words.
* model    -- magic ``ISCHMOD1``, version u8, method u8 (0 isch, 1 lsh,
  2 itq), u32 d, m, Q, l, f64 tau, sigma_sq, eta, mean (d f64), projection
  (m*d f64 row-major), then provenance: i64 seed, u32 dictionary size,
  u32 k1. Dictionary atoms are not stored; they are not needed at encode
  time.
* labels   -- one decimal integer per line, line i labels item i.
* rankings -- tab-separated ``query_id  rank  db_id  distance``, rank
  starting at 1.
"""

from __future__ import annotations

import struct
from pathlib import Path
from typing import Sequence

import numpy as np

from .codes import BinaryCodeSet, words_per_code
from .encoder import METHOD_ISCH, METHOD_ITQ, METHOD_LSH, HashModel
from .params import ModelParams
from .search import RetrievalResult

MAGIC_VEC = b"ISCHVEC1"
MAGIC_COD = b"ISCHCOD1"
MAGIC_MOD = b"ISCHMOD1"
MODEL_VERSION = 1

_METHOD_CODES = {METHOD_ISCH: 0, METHOD_LSH: 1, METHOD_ITQ: 2}
_METHOD_NAMES = {v: k for k, v in _METHOD_CODES.items()}


class DataError(Exception):
    """Malformed or inconsistent input file."""


def write_vectors(path, X: np.ndarray) -> None:
    X = np.ascontiguousarray(X, dtype=np.float32)
    if X.ndim != 2:
        raise ValueError("expected an (n, d) matrix")
    with open(path, "wb") as fh:
        fh.write(MAGIC_VEC)
        fh.write(struct.pack("<II", X.shape[0], X.shape[1]))
        fh.write(X.tobytes())


def _read_fvecs(raw: bytes, path) -> np.ndarray:
    if len(raw) < 4:
        raise DataError(f"{path}: too short to be a vector file")
    d = struct.unpack_from("<i", raw)[0]
    row_bytes = 4 + 4 * d
    if d <= 0 or len(raw) % row_bytes != 0:
        raise DataError(f"{path}: not a recognized vector format")
    arr = np.frombuffer(raw, dtype="<i4").reshape(-1, row_bytes // 4)
    if not (arr[:, 0] == d).all():
        raise DataError(f"{path}: inconsistent per-row dimensions")
    return arr[:, 1:].view("<f4").astype(np.float32)


def read_vectors(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if raw[:8] == MAGIC_VEC:
        n, d = struct.unpack_from("<II", raw, 8)
        body = np.frombuffer(raw, dtype="<f4", offset=16)
        if body.size != n * d:
            raise DataError(f"{path}: truncated vector file")
        return body.reshape(n, d).astype(np.float32)
    return _read_fvecs(raw, path)


def write_codes(path, codes: BinaryCodeSet) -> None:
    with open(path, "wb") as fh:
        fh.write(MAGIC_COD)
        fh.write(struct.pack("<II", codes.n, codes.m))
        fh.write(np.ascontiguousarray(codes.words, dtype="<u8").tobytes())


def read_codes(path) -> BinaryCodeSet:
    raw = Path(path).read_bytes()
    if raw[:8] != MAGIC_COD:
        raise DataError(f"{path}: not a code file")
    n, m = struct.unpack_from("<II", raw, 8)
    W = words_per_code(m)
    body = np.frombuffer(raw, dtype="<u8", offset=16)
    if body.size != n * W:
        raise DataError(f"{path}: truncated code file")
    return BinaryCodeSet(m=m, words=body.reshape(n, W).copy())


def write_model(path, model: HashModel) -> None:
    if model.params is not None:
        tau, s2, eta = model.params.tau, model.params.sigma_sq, model.params.eta
        Q, ell = model.params.blocks_q, model.params.block_len
    else:
        tau = s2 = eta = 0.0
        Q, ell = 1, model.bits_m
    meta = model.dict_meta
    with open(path, "wb") as fh:
        fh.write(MAGIC_MOD)
        fh.write(struct.pack("<BB", MODEL_VERSION, _METHOD_CODES[model.method]))
        fh.write(struct.pack("<IIII", model.dim, model.bits_m, Q, ell))
        fh.write(struct.pack("<ddd", tau, s2, eta))
        fh.write(model.mean.astype("<f8").tobytes())
        fh.write(model.projection.astype("<f8").tobytes())
        fh.write(
            struct.pack("<qII", int(meta.get("seed", 0)), int(meta.get("k", 0)),
                        int(meta.get("k1", 0)))
        )


def read_model(path) -> HashModel:
    raw = Path(path).read_bytes()
    if raw[:8] != MAGIC_MOD:
        raise DataError(f"{path}: not a model file")
    version, method_code = struct.unpack_from("<BB", raw, 8)
    if version != MODEL_VERSION:
        raise DataError(f"{path}: unsupported model version {version}")
    if method_code not in _METHOD_NAMES:
        raise DataError(f"{path}: unknown method code {method_code}")
    d, m, Q, ell = struct.unpack_from("<IIII", raw, 10)
    tau, s2, eta = struct.unpack_from("<ddd", raw, 26)
    off = 50
    mean = np.frombuffer(raw, dtype="<f8", count=d, offset=off).copy()
    off += 8 * d
    proj = np.frombuffer(raw, dtype="<f8", count=m * d, offset=off).reshape(m, d).copy()
    off += 8 * m * d
    seed, dict_k, k1 = struct.unpack_from("<qII", raw, off)
    method = _METHOD_NAMES[method_code]
    params = None
    if method == METHOD_ISCH:
        params = ModelParams(tau=tau, eta=eta, bits_m=m, blocks_q=Q)
    return HashModel(
        method=method,
        projection=proj,
        mean=mean,
        params=params,
        dict_meta={"seed": seed, "k": dict_k, "k1": k1},
    )


def read_labels(path) -> np.ndarray:
    labels = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                labels.append(int(line))
            except ValueError:
                raise DataError(f"{path}:{lineno}: not an integer label: {line!r}")
    if not labels:
        raise DataError(f"{path}: empty label file")
    return np.array(labels, dtype=np.int64)


def write_results(path, results: Sequence[RetrievalResult]) -> None:
    with open(path, "w") as fh:
        for res in results:
            for rank, (db_id, dist) in enumerate(
                zip(res.ranked_ids, res.distances), start=1
            ):
                fh.write(f"{res.query_id}\t{rank}\t{int(db_id)}\t{int(dist)}\n")


def read_results(path) -> list[RetrievalResult]:
    per_query: dict[int, list[tuple[int, int, int]]] = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 4:
                raise DataError(f"{path}:{lineno}: expected 4 tab-separated fields")
            try:
                qid, rank, db_id, dist = (int(p) for p in parts)
            except ValueError:
                raise DataError(f"{path}:{lineno}: non-integer field")
            per_query.setdefault(qid, []).append((rank, db_id, dist))
    out = []
    for qid in sorted(per_query):
        rows = sorted(per_query[qid])
        out.append(
            RetrievalResult(
                query_id=qid,
                ranked_ids=np.array([r[1] for r in rows], dtype=np.int64),
                distances=np.array([r[2] for r in rows], dtype=np.int64),
            )
        )
    return out
