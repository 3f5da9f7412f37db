"""Command-line front end: train / encode / search / eval / inspect.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import iofmt
from .encoder import (
    METHOD_ISCH,
    METHOD_ITQ,
    METHOD_LSH,
    encode_batch,
    train_isch,
    train_itq,
    train_lsh,
)
from .params import DictConfig, ModelParams
from .search import average_precision, precision_at_k, top_k

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="isch", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    t = sub.add_parser("train", help="train a hash model")
    t.add_argument("--method", choices=[METHOD_ISCH, METHOD_LSH, METHOD_ITQ],
                   default=METHOD_ISCH)
    t.add_argument("--input", required=True, help="training vector file")
    t.add_argument("--out", required=True, help="output model file")
    t.add_argument("--bits", type=int, required=True, help="code length m")
    t.add_argument("--blocks", type=int, default=1, help="rotation block count Q")
    t.add_argument("--tau", type=float, default=0.12)
    t.add_argument("--eta", type=float, default=0.05)
    t.add_argument("--k1", type=int, default=128, help="level-1 cluster count")
    t.add_argument("--levels", type=int, default=2, help="hierarchy depth (1 or 2)")
    t.add_argument("--proxy-dim", type=int, default=None)
    t.add_argument("--min-split", type=int, default=None)
    t.add_argument("--kmeans-iters", type=int, default=25)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--threads", type=int, default=1)

    e = sub.add_parser("encode", help="encode vectors to codes")
    e.add_argument("--model", required=True)
    e.add_argument("--input", required=True, help="vector file")
    e.add_argument("--out", required=True, help="output code file")

    s = sub.add_parser("search",
                       help="exhaustive Hamming retrieval")
    s.add_argument("--db", required=True, help="database code file")
    s.add_argument("--queries", required=True, help="query code file")
    s.add_argument("--k", type=int, required=True, help="results per query")
    s.add_argument("--out", required=True, help="output ranking TSV")
    s.add_argument("--threads", type=int, default=1)

    v = sub.add_parser("eval", help="score a ranking file")
    v.add_argument("--results", required=True, help="ranking TSV from search")
    v.add_argument("--db-labels", required=True)
    v.add_argument("--query-labels", required=True)
    v.add_argument("--precision-at", type=int, action="append", default=[],
                   metavar="K")
    v.add_argument("--map", action="store_true", dest="mean_ap",
                   help="mean average precision (expects full rankings)")

    i = sub.add_parser("inspect",
                       help="print file header info")
    i.add_argument("path")
    return p


def _cmd_train(args) -> int:
    X = iofmt.read_vectors(args.input)
    if args.method == METHOD_ISCH:
        if args.bits % args.blocks != 0:
            raise UsageError(
                f"--bits {args.bits} not divisible by --blocks {args.blocks}"
            )
        params = ModelParams(tau=args.tau, eta=args.eta, bits_m=args.bits,
                             blocks_q=args.blocks)
        dict_cfg = DictConfig(
            k1=args.k1,
            levels_h=args.levels,
            proxy_dim=args.proxy_dim,
            min_split=args.min_split,
            rng_seed=args.seed,
            kmeans_iters=args.kmeans_iters,
        )
        model = train_isch(X, params, dict_cfg, seed=args.seed,
                           threads=args.threads)
        meta = model.dict_meta
        print(f"method: isch")
        print(f"k: {meta['k']}")
        print(f"m: {args.bits}  Q: {args.blocks}  l: {args.bits // args.blocks}")
        errs = " ".join(f"{e:.6g}" for e in meta["block_final_error"])
        print(f"block quantization error: {errs}")
        sv = np.array(meta["singular_values"])
        print(f"singular values: max {sv.max():.6g} min {sv.min():.6g}")
        print(f"max cross-block overlap: {meta['max_cross_block_overlap']:.6g}")
    elif args.method == METHOD_LSH:
        model = train_lsh(X, args.bits, args.seed)
        print(f"method: lsh\nm: {args.bits}")
    else:
        model = train_itq(X, args.bits, args.seed)
        print(f"method: itq\nm: {args.bits}")
    iofmt.write_model(args.out, model)
    print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_encode(args) -> int:
    model = iofmt.read_model(args.model)
    X = iofmt.read_vectors(args.input)
    if X.shape[1] != model.dim:
        raise iofmt.DataError(
            f"dimension mismatch: model d={model.dim}, vectors d={X.shape[1]}"
        )
    codes = encode_batch(model, X)
    iofmt.write_codes(args.out, codes)
    print(f"encoded {codes.n} vectors to {codes.m}-bit codes: {args.out}")
    return EXIT_OK


def _cmd_search(args) -> int:
    db = iofmt.read_codes(args.db)
    queries = iofmt.read_codes(args.queries)
    if db.m != queries.m:
        raise iofmt.DataError(
            f"code length mismatch: db m={db.m}, queries m={queries.m}"
        )
    if args.k > db.n:
        raise UsageError(f"--k {args.k} exceeds database size {db.n}")

    def run(qid: int):
        return top_k(db, queries.words[qid], args.k, query_id=qid)

    if args.threads > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            results = list(pool.map(run, range(queries.n)))
    else:
        results = [run(qid) for qid in range(queries.n)]
    iofmt.write_results(args.out, results)
    print(f"searched {queries.n} queries over {db.n} codes: {args.out}")
    return EXIT_OK


def _cmd_eval(args) -> int:
    if not args.precision_at and not args.mean_ap:
        raise UsageError("nothing to compute: pass --precision-at and/or --map")
    results = iofmt.read_results(args.results)
    db_labels = iofmt.read_labels(args.db_labels)
    query_labels = iofmt.read_labels(args.query_labels)
    for res in results:
        if res.query_id >= len(query_labels):
            raise iofmt.DataError(
                f"missing label for query {res.query_id}"
            )
        if res.ranked_ids.max(initial=-1) >= len(db_labels):
            raise iofmt.DataError("ranking references unlabeled database items")
    for k in args.precision_at:
        vals = [
            precision_at_k(res, db_labels, int(query_labels[res.query_id]), k)
            for res in results
        ]
        print(f"precision@{k}: {np.mean(vals):.6f}")
    if args.mean_ap:
        aps = []
        for res in results:
            relevant = np.flatnonzero(db_labels == query_labels[res.query_id])
            if relevant.size == 0:
                raise iofmt.DataError(
                    f"undefined AP: query {res.query_id} has no relevant items"
                )
            aps.append(average_precision(res, relevant.tolist()))
        print(f"mAP: {np.mean(aps):.6f}")
    return EXIT_OK


def _cmd_inspect(args) -> int:
    raw = open(args.path, "rb").read(8)
    if raw == iofmt.MAGIC_VEC:
        X = iofmt.read_vectors(args.path)
        print(f"vector file: n={X.shape[0]} d={X.shape[1]}")
    elif raw == iofmt.MAGIC_COD:
        codes = iofmt.read_codes(args.path)
        print(f"code file: n={codes.n} m={codes.m}")
    elif raw == iofmt.MAGIC_MOD:
        model = iofmt.read_model(args.path)
        print(f"model file: method={model.method} d={model.dim} m={model.bits_m}")
        if model.params is not None:
            p = model.params
            print(f"tau={p.tau} eta={p.eta} Q={p.blocks_q} l={p.block_len}")
        meta = model.dict_meta
        print(f"seed={meta['seed']} dictionary k={meta['k']} k1={meta['k1']}")
    else:
        raise iofmt.DataError(f"{args.path}: unrecognized file type")
    return EXIT_OK


_COMMANDS = {
    "train": _cmd_train,
    "encode": _cmd_encode,
    "search": _cmd_search,
    "eval": _cmd_eval,
    "inspect": _cmd_inspect,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"isch: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (iofmt.DataError, FileNotFoundError, ValueError) as exc:
        print(f"isch: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
