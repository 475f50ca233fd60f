"""Command-line front end: ``grasslearn <subcommand> [flags]``.

Reports are JSON, matrices are CSV. Every report carries the seed, the
resolved configuration, library versions and wall time.

Exit codes: 0 success, 1 usage error, 2 bad input data, 3 numerical
failure, 4 ``verify`` self-test failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import platform
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from importlib import metadata
from pathlib import Path

import numpy as np

from . import adapt, clustering, completion, datasets, gda, grnet, kernels
from .errors import DataError, NumericalError
from .manifold import GrassmannPoint, Metric, all_distances, from_matrix, load_point, principal_angles
from .numerics import read_matrix_csv, write_matrix_csv
from .optim import OptimConfig

log = logging.getLogger("grasslearn")

EXIT_USAGE, EXIT_DATA, EXIT_NUMERICAL, EXIT_VERIFY = 1, 2, 3, 4
SIGMA_SWEEP = (0.1, 1.0, 1.6, 3.0, 5.0)
SGF_GRID = (0.2, 0.4, 0.6, 0.8)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# --- helpers -----------------------------------------------------------------


def _threads() -> int:
    raw = os.environ.get("GRASSLEARN_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"GRASSLEARN_THREADS must be an integer, got {raw!r}") from None
    return max(1, n)


def _pmap(fn, items):
    items = list(items)
    n = _threads()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def _versions() -> dict:
    out = {"python": platform.python_version()}
    for pkg in ("grasslearn", "numpy", "scipy", "scikit-learn"):
        try:
            out[pkg] = metadata.version(pkg)
        except metadata.PackageNotFoundError:
            out[pkg] = None
    return out


def _config_of(args) -> dict:
    skip = {"func", "config", "out"}
    return {k: v for k, v in vars(args).items() if k not in skip}


def _outdir(args) -> Path | None:
    if args.out is None:
        return None
    p = Path(args.out)
    p.mkdir(parents=True, exist_ok=True)
    return p


def _emit(args, report: dict, t0: float) -> dict:
    full = {
        "command": args.command,
        "seed": args.seed,
        "config": _config_of(args),
        "versions": _versions(),
        "wall_time_s": time.perf_counter() - t0,
        **report,
    }
    text = json.dumps(full, indent=2, default=_json_default)
    out = _outdir(args)
    if out is not None:
        (out / "report.json").write_text(text + "\n")
    print(text)
    return full


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, Path):
        return str(o)
    raise TypeError(f"cannot serialize {type(o).__name__}")


def _read_labels(path) -> np.ndarray:
    arr = read_matrix_csv(path).ravel()
    if np.any(arr != np.round(arr)) or np.any(arr < 0):
        raise DataError(f"{path}: labels must be nonnegative integers")
    return arr.astype(int)


def _read_points(path, n: int | None) -> list[GrassmannPoint]:
    """Points stored as a vertical stack of n x k generators."""
    A = read_matrix_csv(path)
    if n is None:
        raise UsageError("--n (rows per point) is required with --points")
    if A.shape[0] % n:
        raise DataError(f"{path}: {A.shape[0]} rows is not a multiple of n={n}")
    return [from_matrix(A[i : i + n]) for i in range(0, A.shape[0], n)]


def _stack_points(points) -> np.ndarray:
    return np.vstack([p.basis for p in points])


def _rng(seed: int, stream: int = 0) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed).spawn(stream + 1)[stream])


# --- dist --------------------------------------------------------------------


def cmd_dist(args) -> int:
    t0 = time.perf_counter()
    X, Y = load_point(args.a), load_point(args.b)
    pa = principal_angles(X, Y)
    report = {"angles": pa.angles, "cosines": pa.cosines, "distances": all_distances(X, Y)}
    if args.metric:
        m = Metric.parse(args.metric)
        report["metric"] = m.value
        report["distance"] = report["distances"][m.value]
    _emit(args, report, t0)
    return 0


# --- cluster -----------------------------------------------------------------


def _cluster_vectors(args, sigma: float, X, y, out):
    t = time.perf_counter()
    L = clustering.laplacian(clustering.affinity(X, sigma), args.laplacian)
    if args.method == "spectral":
        U = GrassmannPoint(clustering.spectral_embed(L, args.k))
    else:
        cfg = clustering.SscConfig(k=args.k, beta=args.beta, mu=args.mu, sigma=sigma, optim=OptimConfig(max_iters=args.max_iters))
        U = clustering.sparse_spectral(L, cfg)
    pred = clustering.cluster_rows(U, args.k, not args.no_normalize, _rng(args.seed, 1))
    entry = {"sigma": sigma, "seconds": time.perf_counter() - t}
    if y is not None:
        entry["accuracy"] = clustering.clustering_accuracy(y, pred)
    if out is not None:
        tag = f"sigma{sigma:g}"
        write_matrix_csv(out / f"labels_{tag}.csv", pred[:, None])
        write_matrix_csv(out / f"uut_{tag}.csv", U.projector)
        write_matrix_csv(out / f"embedding_{tag}.csv", U.basis)
    return entry


def cmd_cluster(args) -> int:
    t0 = time.perf_counter()
    out = _outdir(args)
    if args.method == "grkmeans":
        if args.points:
            points = _read_points(args.points, args.n)
            y = _read_labels(args.labels) if args.labels else None
        else:
            points, y, _ = datasets.constellation(
                args.n or 4, args.subspace_dim, args.k, args.per, args.noise_angle, args.seed
            )
        res = clustering.grassmann_kmeans(points, args.k, args.iters, _rng(args.seed, 1))
        report = {"method": "grkmeans", "objective_trace": res.objective}
        if y is not None:
            from sklearn.metrics import adjusted_rand_score

            report["ari"] = adjusted_rand_score(y, res.labels)
            report["accuracy"] = clustering.clustering_accuracy(y, res.labels)
        if out is not None:
            write_matrix_csv(out / "labels.csv", res.labels[:, None])
            write_matrix_csv(out / "centers.csv", _stack_points(res.centers))
        _emit(args, report, t0)
        return 0

    if args.data:
        X = read_matrix_csv(args.data)
        y = _read_labels(args.labels) if args.labels else None
        if y is not None and len(y) != len(X):
            raise DataError(f"{len(y)} labels for {len(X)} points")
    else:
        X, y = datasets.three_rings(args.n_points, tuple(args.radii), args.noise, args.seed)
    sigmas = SIGMA_SWEEP if args.sweep else tuple(args.sigma)
    results = _pmap(lambda s: _cluster_vectors(args, s, X, y, out), sigmas)
    report = {"method": args.method, "results": results}
    if len(results) == 1 and "accuracy" in results[0]:
        report["accuracy"] = results[0]["accuracy"]
    _emit(args, report, t0)
    return 0


# --- complete ----------------------------------------------------------------


def cmd_complete(args) -> int:
    t0 = time.perf_counter()
    truth = None
    if args.matrix:
        if not args.mask:
            raise UsageError("--mask is required with --matrix")
        M = completion.mask_apply(read_matrix_csv(args.matrix), read_matrix_csv(args.mask) != 0)
        if args.truth:
            truth = read_matrix_csv(args.truth)
    else:
        M, truth = datasets.low_rank_masked(args.rows, args.cols, args.rank, args.obs_frac, args.seed)
    cfg = OptimConfig(max_iters=args.max_iters)
    res = completion.complete(M, args.rank, args.objective, cfg, args.restarts, _rng(args.seed, 1))
    report = {
        "objective": res.objective_kind.value,
        "objective_value": res.residual,
        "status": res.status.value,
        "restart_values": [r.value for r in res.runs],
    }
    if truth is not None:
        report["relative_error"] = completion.relative_error(res.X_hat, truth)
    out = _outdir(args)
    if out is not None:
        write_matrix_csv(out / "X_hat.csv", res.X_hat)
        write_matrix_csv(out / "U.csv", res.U.basis)
    _emit(args, report, t0)
    return 0


# --- adapt -------------------------------------------------------------------


def _load_pair(args) -> adapt.DomainPair:
    if args.source:
        if not (args.source_labels and args.target):
            raise UsageError("--source needs --source-labels and --target")
        tl = _read_labels(args.target_labels) if args.target_labels else None
        return adapt.DomainPair.from_features(
            read_matrix_csv(args.source), _read_labels(args.source_labels), read_matrix_csv(args.target), args.dim, tl
        )
    return datasets.two_domain_shift(
        n_per_class=args.per_class, C=args.classes, dim=args.features, rotation_deg=args.rotation,
        seed=args.seed, sub_dim=args.dim,
    )


def cmd_adapt(args) -> int:
    t0 = time.perf_counter()
    pair = _load_pair(args)
    report = {"method": args.method}
    if args.method == "none":
        method = adapt.NoAdapt()
    elif args.method == "gfk":
        method = adapt.Gfk(args.nodes)
    else:
        t = args.t
        if t is None:
            t = adapt.select_sgf_t(pair, SGF_GRID, _rng(args.seed, 1))
            report["t_selected_by_cv"] = True
        method = adapt.Sgf(t)
        report["t"] = t
    pred, acc = adapt.adapt_classify(pair, method)
    report["accuracy"] = acc
    if acc is not None:
        report["per_class_accuracy"] = adapt.per_class_accuracy(pred, pair.target_labels)
    out = _outdir(args)
    if out is not None:
        write_matrix_csv(out / "predictions.csv", pred[:, None])
        if isinstance(method, adapt.Gfk):
            write_matrix_csv(out / "gfk.csv", adapt.gfk_matrix(pair, method.nodes).G)
    _emit(args, report, t0)
    return 0


# --- gda ---------------------------------------------------------------------


def _kernel_spec(args) -> kernels.KernelSpec:
    if args.kernel == "projection":
        return kernels.KernelSpec.projection()
    if args.kernel == "binet-cauchy":
        return kernels.KernelSpec.binet_cauchy()
    return kernels.KernelSpec.gaussian(args.kernel_sigma, Metric.parse(args.kernel_base))


def cmd_gda(args) -> int:
    t0 = time.perf_counter()
    spec = _kernel_spec(args)
    if args.points:
        data = gda.LabeledGrassmannSet(tuple(_read_points(args.points, args.n)), _read_labels(args.labels))
        rng = _rng(args.seed, 1)
        perm = rng.permutation(data.N)
        cut = int(round(data.N * args.train_frac))
        train, test = data.subset(np.sort(perm[:cut])), data.subset(np.sort(perm[cut:]))
    else:
        per = args.per_class
        full = datasets.labeled_subspaces(args.classes, 2 * per, args.n or 10, args.subspace_dim, args.within_angle, args.seed)
        idx = np.arange(full.N)
        train_idx = idx[(idx % (2 * per)) < per]
        train, test = full.subset(train_idx), full.subset(np.setdiff1d(idx, train_idx))
    model = gda.gda_fit(train, spec, args.epsilon, args.m)
    pred = gda.gda_classify(model, gda.query_rows(spec, test.points, train.points))
    report = {
        "kernel": spec.to_dict(),
        "n_train": train.N,
        "n_test": test.N,
        "quotients": model.quotients,
        "test_accuracy": float(np.mean(pred == test.labels)),
    }
    out = _outdir(args)
    if out is not None:
        (out / "model.json").write_text(model.to_json())
        write_matrix_csv(out / "predictions.csv", pred[:, None])
    _emit(args, report, t0)
    return 0


# --- grnet -------------------------------------------------------------------


def _grnet_data(args, seed_offset: int = 0):
    if args.points:
        points = _read_points(args.points, args.n)
        labels = _read_labels(args.labels)
        return points, labels
    data = datasets.labeled_subspaces(args.classes, args.per_class, args.n or 10, args.k_in, args.within_angle, args.seed + seed_offset)
    return list(data.points), data.labels


def cmd_grnet_train(args) -> int:
    t0 = time.perf_counter()
    points, labels = _grnet_data(args)
    dims = grnet.GrNetDims(points[0].n, points[0].k, args.m, args.d, int(labels.max()) + 1)
    params = grnet.grnet_init(dims, args.filters, _rng(args.seed, 1))
    res = grnet.grnet_train(params, points, labels, args.epochs, args.step, args.fd_step)
    acc = float(np.mean(grnet.grnet_predict(res.params, points) == labels))
    out = _outdir(args)
    if out is not None:
        (out / "params.json").write_text(res.params.to_json())
    _emit(args, {"loss_trace": res.trace, "train_accuracy": acc}, t0)
    return 0


def cmd_grnet_eval(args) -> int:
    t0 = time.perf_counter()
    params = grnet.GrNetParams.from_json(Path(args.params).read_text())
    points, labels = _grnet_data(args, seed_offset=args.eval_seed_offset)
    pred = grnet.grnet_predict(params, points)
    report = {"accuracy": float(np.mean(pred == labels)), "loss": grnet.grnet_loss(params, points, labels)}
    out = _outdir(args)
    if out is not None:
        write_matrix_csv(out / "predictions.csv", pred[:, None])
    _emit(args, report, t0)
    return 0


# --- gen ---------------------------------------------------------------------


def cmd_gen(args) -> int:
    t0 = time.perf_counter()
    if args.out is None:
        raise UsageError("gen needs --out")
    out = _outdir(args)
    files = []

    def put(name, A):
        write_matrix_csv(out / name, A)
        files.append(name)

    if args.kind == "rings":
        X, y = datasets.three_rings(args.n_points, tuple(args.radii), args.noise, args.seed)
        put("points.csv", X)
        put("labels.csv", y[:, None])
    elif args.kind == "lowrank":
        M, X = datasets.low_rank_masked(args.rows, args.cols, args.rank, args.obs_frac, args.seed)
        put("observed.csv", M.X_omega)
        put("mask.csv", M.omega.astype(int))
        put("truth.csv", X)
    elif args.kind == "subspaces":
        data = datasets.labeled_subspaces(args.classes, args.per_class, args.n, args.subspace_dim, args.within_angle, args.seed)
        put("points.csv", _stack_points(data.points))
        put("labels.csv", data.labels[:, None])
    elif args.kind == "constellation":
        points, labels, book = datasets.constellation(args.n, args.subspace_dim, args.codewords, args.per, args.noise_angle, args.seed)
        put("points.csv", _stack_points(points))
        put("labels.csv", labels[:, None])
        put("codebook.csv", _stack_points(book))
    else:
        pair = datasets.two_domain_shift(args.per_class, args.classes, args.features, args.rotation, args.seed)
        put("source.csv", pair.source_features)
        put("source_labels.csv", pair.source_labels[:, None])
        put("target.csv", pair.target_features)
        put("target_labels.csv", pair.target_labels[:, None])
    meta = {"kind": args.kind, "seed": args.seed, "config": _config_of(args), "files": files}
    (out / "meta.json").write_text(json.dumps(meta, indent=2, default=_json_default) + "\n")
    _emit(args, {"kind": args.kind, "files": files}, t0)
    return 0


# --- verify ------------------------------------------------------------------

_EX1 = (np.array([[1.0], [0.0]]), np.array([[0.5], [np.sqrt(3) / 2]]))
_EX2 = (
    np.array([[-np.sqrt(2) / 2, -np.sqrt(2) / 4], [np.sqrt(2) / 2, -np.sqrt(2) / 4], [0.0, np.sqrt(3) / 2]]),
    np.array([[0.0, np.sqrt(2) / 2], [1.0, 0.0], [0.0, np.sqrt(2) / 2]]),
)


def verify_checks(pairs: int = 1000, seed: int = 0) -> list[tuple[str, bool, str]]:
    from .manifold import distance, random_point

    checks = []
    X, Y = (GrassmannPoint(a) for a in _EX1)
    d = all_distances(X, Y)
    ok = (
        abs(d["arc-length"] - np.pi / 3) <= 1e-12
        and abs(d["chordal"] - 1.0) <= 1e-12
        and abs(d["projection"] - np.sqrt(3) / 2) <= 1e-12
    )
    checks.append(("worked example G(2,1)", ok, f"d={d['arc-length']:.12f} d_C={d['chordal']:.12f} d_P={d['projection']:.12f}"))

    X, Y = (GrassmannPoint(a) for a in _EX2)
    d = all_distances(X, Y)
    cos = principal_angles(X, Y).cosines
    want = {"arc-length": 1.491253, "fubini-study": 1.491253, "chordal": 1.356864, "projection": 0.996838, "binet-cauchy": 0.996838}
    ok = np.allclose(cos, [1.0, 0.07945931], atol=5e-6) and all(abs(d[k] - v) <= 5e-6 for k, v in want.items())
    checks.append(("worked example G(3,2)", ok, " ".join(f"{k}={d[k]:.6f}" for k in want)))

    rng = np.random.default_rng(seed)
    worst = 0.0
    for n, k in ((4, 2), (8, 3), (20, 5)):
        for _ in range(pairs):
            A, B = random_point(n, k, rng), random_point(n, k, rng)
            d = all_distances(A, B)
            worst = max(
                worst,
                d["chordal"] - d["arc-length"],
                d["projection"] - 1e-12 - d["chordal"],
                d["fubini-study"] - 1e-12 - d["arc-length"],
            )
    checks.append(("distance inequalities", worst <= 0.0, f"max violation {worst:.3g} over {3 * pairs} pairs"))
    return checks


def cmd_verify(args) -> int:
    failed = 0
    for name, ok, detail in verify_checks(args.pairs, args.seed):
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
        failed += not ok
    return EXIT_VERIFY if failed else 0


# --- parser ------------------------------------------------------------------


def _common(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config", help="JSON file of flag defaults; explicit flags win")
    p.add_argument("--out", help="output directory for CSV files and report.json")


def _grnet_flags(p):
    p.add_argument("--points", help="stacked n x k generators CSV")
    p.add_argument("--labels")
    p.add_argument("--n", type=int)
    p.add_argument("--k-in", type=int, default=3)
    p.add_argument("--classes", type=int, default=2)
    p.add_argument("--per-class", type=int, default=20)
    p.add_argument("--within-angle", type=float, default=0.2)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="grasslearn", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("dist", help="principal angles and all distances between two subspaces")
    _common(p)
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--metric", choices=[m.value for m in Metric])
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("cluster", help="spectral / sparse spectral / Grassmann k-means clustering")
    _common(p)
    p.add_argument("--method", choices=("spectral", "ssc", "grkmeans"), default="ssc")
    p.add_argument("--data", help="N x d points CSV (default: generated three rings)")
    p.add_argument("--points", help="grkmeans: stacked n x k generators CSV")
    p.add_argument("--labels", help="ground-truth labels CSV for scoring")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--sigma", type=float, nargs="+", default=[1.6])
    p.add_argument("--sweep", action="store_true", help="run sigma in {0.1, 1, 1.6, 3, 5}")
    p.add_argument("--beta", type=float, default=0.01)
    p.add_argument("--mu", type=float, default=1e-3)
    p.add_argument("--laplacian", choices=("unnormalized", "normalized"), default="unnormalized")
    p.add_argument("--no-normalize", action="store_true", help="skip row normalization before k-means")
    p.add_argument("--max-iters", type=int, default=500)
    p.add_argument("--n-points", type=int, default=600)
    p.add_argument("--radii", type=float, nargs="+", default=[1.0, 2.0, 3.0])
    p.add_argument("--noise", type=float, default=0.05)
    p.add_argument("--n", type=int, help="ambient dimension (grkmeans)")
    p.add_argument("--subspace-dim", type=int, default=2)
    p.add_argument("--per", type=int, default=50)
    p.add_argument("--noise-angle", type=float, default=0.0)
    p.add_argument("--iters", type=int, default=100)
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("complete", help="low-rank matrix completion")
    _common(p)
    p.add_argument("--matrix", help="observed entries CSV (unobserved stored as 0)")
    p.add_argument("--mask", help="0/1 mask CSV")
    p.add_argument("--truth", help="ground truth CSV for scoring")
    p.add_argument("--rows", type=int, default=20)
    p.add_argument("--cols", type=int, default=15)
    p.add_argument("--rank", type=int, default=3)
    p.add_argument("--obs-frac", type=float, default=0.6)
    p.add_argument("--objective", choices=("frobenius", "projection"), default="frobenius")
    p.add_argument("--restarts", type=int, default=5)
    p.add_argument("--max-iters", type=int, default=500)
    p.set_defaults(func=cmd_complete)

    p = sub.add_parser("adapt", help="geodesic-flow domain adaptation")
    _common(p)
    p.add_argument("--method", choices=("gfk", "sgf", "none"), default="gfk")
    p.add_argument("--t", type=float, help="SGF time (default: 2-fold CV on source)")
    p.add_argument("--nodes", type=int, default=20)
    p.add_argument("--dim", type=int, default=3, help="PCA subspace dimension")
    p.add_argument("--source")
    p.add_argument("--source-labels")
    p.add_argument("--target")
    p.add_argument("--target-labels")
    p.add_argument("--per-class", type=int, default=40)
    p.add_argument("--classes", type=int, default=3)
    p.add_argument("--features", type=int, default=20)
    p.add_argument("--rotation", type=float, default=60.0)
    p.set_defaults(func=cmd_adapt)

    p = sub.add_parser("gda", help="Grassmann discriminant analysis")
    _common(p)
    p.add_argument("--points")
    p.add_argument("--labels")
    p.add_argument("--n", type=int)
    p.add_argument("--train-frac", type=float, default=0.5)
    p.add_argument("--classes", type=int, default=3)
    p.add_argument("--per-class", type=int, default=20, help="train samples per class (same again for test)")
    p.add_argument("--subspace-dim", type=int, default=3)
    p.add_argument("--within-angle", type=float, default=0.3)
    p.add_argument("--kernel", choices=("projection", "binet-cauchy", "gaussian"), default="projection")
    p.add_argument("--kernel-sigma", type=float, default=1.0)
    p.add_argument("--kernel-base", choices=("projection", "binet-cauchy"), default="projection")
    p.add_argument("--epsilon", type=float)
    p.add_argument("--m", type=int)
    p.set_defaults(func=cmd_gda)

    def grnet_train_parser(p):
        _common(p)
        _grnet_flags(p)
        p.add_argument("--m", type=int, default=4)
        p.add_argument("--d", type=int, default=2)
        p.add_argument("--filters", type=int, default=2)
        p.add_argument("--epochs", type=int, default=30)
        p.add_argument("--step", type=float, default=2.0)
        p.add_argument("--fd-step", type=float, default=1e-5)
        p.set_defaults(func=cmd_grnet_train)

    def grnet_eval_parser(p):
        _common(p)
        _grnet_flags(p)
        p.add_argument("--params", required=True)
        p.add_argument("--eval-seed-offset", type=int, default=0, help="shift the generator seed to draw fresh data")
        p.set_defaults(func=cmd_grnet_eval)

    p = sub.add_parser("grnet", help="Grassmann network (train / eval)")
    gsub = p.add_subparsers(dest="grnet_command", required=True, parser_class=_Parser)
    grnet_train_parser(gsub.add_parser("train"))
    grnet_eval_parser(gsub.add_parser("eval"))
    grnet_train_parser(sub.add_parser("grnet-train", help="alias of 'grnet train'"))
    grnet_eval_parser(sub.add_parser("grnet-eval", help="alias of 'grnet eval'"))

    p = sub.add_parser("gen", help="write a synthetic dataset")
    _common(p)
    p.add_argument("kind", choices=("rings", "lowrank", "subspaces", "constellation", "domains"))
    p.add_argument("--n-points", type=int, default=600)
    p.add_argument("--radii", type=float, nargs="+", default=[1.0, 2.0, 3.0])
    p.add_argument("--noise", type=float, default=0.05)
    p.add_argument("--rows", type=int, default=20)
    p.add_argument("--cols", type=int, default=15)
    p.add_argument("--rank", type=int, default=3)
    p.add_argument("--obs-frac", type=float, default=0.6)
    p.add_argument("--classes", type=int, default=3)
    p.add_argument("--per-class", type=int, default=20)
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--subspace-dim", type=int, default=3)
    p.add_argument("--within-angle", type=float, default=0.3)
    p.add_argument("--codewords", type=int, default=8)
    p.add_argument("--per", type=int, default=50)
    p.add_argument("--noise-angle", type=float, default=0.0)
    p.add_argument("--features", type=int, default=20)
    p.add_argument("--rotation", type=float, default=60.0)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("verify", help="self-test on the worked examples and the distance inequalities")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--pairs", type=int, default=1000)
    p.set_defaults(func=cmd_verify)
    return parser


def parse_args(argv) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        try:
            overrides = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise DataError(f"{args.config}: cannot read config ({exc})") from None
        if not isinstance(overrides, dict):
            raise DataError(f"{args.config}: config must be a JSON object")
        known = set(vars(args))
        unknown = {k.replace("-", "_") for k in overrides} - known
        if unknown:
            raise UsageError(f"{args.config}: unknown settings {sorted(unknown)}")
        # config values become defaults; re-parsing lets explicit flags win
        defaults = {k.replace("-", "_"): v for k, v in overrides.items()}
        for action in parser._subparsers._group_actions:
            for name, sp in action.choices.items():
                if name == args.command:
                    target = sp
                    if getattr(args, "grnet_command", None):
                        target = sp._subparsers._group_actions[0].choices[args.grnet_command]
                    target.set_defaults(**defaults)
        args = parser.parse_args(argv)
    return args


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parse_args(argv)
        logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
