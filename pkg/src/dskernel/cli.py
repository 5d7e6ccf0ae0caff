"""Command-line entry point.

Subcommands: simulate, scale, density, denoise, laplacian, scrna, bench.
Parameter errors exit with status 1 and a one-line "error: ..." message on
stderr; usage errors exit with argparse's status 2.
"""

import argparse
import csv
import sys

import numpy as np

from . import counts as counts_mod
from . import density as density_mod
from . import geometry, harness, inference, laplacian
from .errors import ConvergenceError, ParameterError, ParseError
from .kernel import gaussian_kernel, pairwise_sq_dists
from .scaling import assemble_W, sinkhorn_symmetric


def _fmt(value):
    """Full-precision decimal text for CSV fields (plain float repr)."""
    return repr(float(value))


def _parse_s(text):
    if text == "limit":
        return density_mod.S_LIMIT
    return float(text)


def _add_simulate(sub):
    p = sub.add_parser("simulate", help="generate a synthetic circle dataset")
    p.add_argument("--n", type=int, default=2000)
    p.add_argument("--m", type=int, default=2000)
    p.add_argument("--noise", default="none", choices=geometry.NOISE_MODELS)
    p.add_argument("--two-circles", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="points CSV path")
    p.add_argument("--sidecar", required=True, help="ground-truth sidecar CSV path")


def _add_scale(sub):
    p = sub.add_parser("scale", help="solve the doubly stochastic scaling")
    p.add_argument("--input", required=True, help="points CSV")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--max-iter", type=int, default=100_000)
    p.add_argument("--out", required=True, help="log_d CSV path")
    p.add_argument("--residuals-out", help="residual history CSV path")


def _add_density(sub):
    p = sub.add_parser("density", help="doubly stochastic kernel density estimate")
    p.add_argument("--input", required=True, help="points CSV")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--s", type=_parse_s, default=2.0, help='exponent or "limit"')
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--max-iter", type=int, default=100_000)
    p.add_argument("--sidecar", help="sidecar CSV with true densities")
    p.add_argument("--out", required=True)


def _add_denoise(sub):
    p = sub.add_parser("denoise", help="noise/signal magnitudes and corrected distances")
    p.add_argument("--input", required=True, help="points CSV")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--s", type=_parse_s, default=2.0)
    p.add_argument("--dim", type=int)
    p.add_argument("--debias", action="store_true")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--max-iter", type=int, default=100_000)
    p.add_argument("--sidecar", help="sidecar CSV with true noise magnitudes")
    p.add_argument("--out", required=True)
    p.add_argument("--dists-out", help="optional full corrected-distance matrix CSV")


def _add_laplacian(sub):
    p = sub.add_parser("laplacian", help="operator error of robust vs traditional Laplacians")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--epsilon", type=float, action="append", required=True,
                   help="repeatable for a sweep")
    p.add_argument("--family", choices=["robust", "traditional", "both"], default="both")
    p.add_argument("--test-function", choices=["paper-circle"], default="paper-circle")
    p.add_argument("--n", type=int, default=2000)
    p.add_argument("--noise", default="none", choices=geometry.NOISE_MODELS)
    p.add_argument("--s", type=_parse_s, default=2.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)


def _add_scrna(sub):
    p = sub.add_parser("scrna", help="count-matrix pipeline (matrix-market or CSV)")
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=["matrix-market", "csv"], default="matrix-market")
    p.add_argument("--labels", help="CSV with one label per row")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--s", type=_parse_s, default=2.0)
    p.add_argument("--subsample", type=int, default=500, help="cells per class")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--max-iter", type=int, default=10_000)
    p.add_argument("--out", required=True)
    p.add_argument("--transitions-out", help="transition-error table CSV")


def _add_bench(sub):
    p = sub.add_parser("bench", help="reproduce a benchmark figure's data as CSV")
    p.add_argument("figure", choices=harness.EXPERIMENTS)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repeats", type=int, default=10)
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--s", type=_parse_s, default=2.0)
    p.add_argument("--noise", choices=geometry.NOISE_MODELS)
    p.add_argument("--sweep", type=float, nargs="+")
    p.add_argument("--sweep-param", choices=["n", "epsilon"])


def build_parser():
    parser = argparse.ArgumentParser(
        prog="dskernel",
        description="doubly stochastic Gaussian-kernel normalization toolkit")
    sub = parser.add_subparsers(dest="command", required=True)
    for add in (_add_simulate, _add_scale, _add_density, _add_denoise,
                _add_laplacian, _add_scrna, _add_bench):
        add(sub)
    return parser


def _load_points(path):
    return geometry.load_points_csv(path)


def _scale_points(points, epsilon, tol, max_iter):
    affinity = gaussian_kernel(pairwise_sq_dists(points), epsilon)
    solution = sinkhorn_symmetric(affinity, tol=tol, max_iter=max_iter)
    if not solution.converged:
        raise ConvergenceError(
            f"scaling stopped at residual {solution.residual:.3e} after "
            f"{solution.iterations} iterations")
    return affinity, solution


def _read_sidecar_column(path, column):
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        return np.array([float(row[column]) for row in reader])


def _cmd_simulate(args):
    seq = np.random.SeedSequence(args.seed)
    s_sample, s_embed, s_noise = seq.spawn(3)
    if args.two_circles:
        sample = geometry.sample_two_circles(n_per_circle=args.n // 2, seed=s_sample)
    else:
        sample = geometry.sample_circle(args.n, 0.16 * np.pi**2, seed=s_sample)
    sample = geometry.embed_orthogonal(sample, args.m, seed=s_embed)
    noise = geometry.apply_noise(sample, args.noise, seed=s_noise)
    geometry.save_dataset_csv(args.out, args.sidecar, sample, noise)


def _cmd_scale(args):
    points = _load_points(args.input)
    _, solution = _scale_points(points, args.epsilon, args.tol, args.max_iter)
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "log_d", "residual", "iterations"])
        for i, v in enumerate(solution.log_d):
            writer.writerow([i, _fmt(v), _fmt(solution.residual), solution.iterations])
    if args.residuals_out:
        with open(args.residuals_out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["iteration", "residual"])
            for i, r in enumerate(solution.residual_history, start=1):
                writer.writerow([i, _fmt(r)])


def _cmd_density(args):
    points = _load_points(args.input)
    affinity, solution = _scale_points(points, args.epsilon, args.tol, args.max_iter)
    scaled = assemble_W(affinity, solution)
    if args.s == density_mod.S_LIMIT:
        est = density_mod.ds_kde_entropy(scaled, dim=args.dim)
    else:
        est = density_mod.ds_kde(scaled, args.s, dim=args.dim)
    truth = None
    if args.sidecar:
        truth = _read_sidecar_column(args.sidecar, "true_density")
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "raw", "normalized", "true_density_if_known", "abs_error"])
        for i in range(len(est.raw)):
            t = "" if truth is None else _fmt(truth[i])
            err = "" if truth is None else _fmt(abs(est.normalized[i] - truth[i]))
            writer.writerow([i, _fmt(est.raw[i]), _fmt(est.normalized[i]), t, err])


def _cmd_denoise(args):
    points = _load_points(args.input)
    affinity, solution = _scale_points(points, args.epsilon, args.tol, args.max_iter)
    scaled = assemble_W(affinity, solution)
    if args.s == density_mod.S_LIMIT:
        qhat = density_mod.ds_kde_entropy(scaled)
    else:
        qhat = density_mod.ds_kde(scaled, args.s)
    nhat = inference.noise_magnitude(solution, qhat, args.epsilon,
                                     debias=args.debias, dim=args.dim)
    table = inference.signal_magnitude_and_distances(
        points, nhat, args.epsilon, args.s, args.dim, scaled=scaled, qhat=qhat)
    truth = None
    if args.sidecar:
        truth = _read_sidecar_column(args.sidecar, "true_noise_sq")
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "noise_sq_hat", "signal_sq_hat", "true_noise_sq_if_known"])
        for i in range(len(nhat)):
            t = "" if truth is None else _fmt(truth[i])
            writer.writerow([i, _fmt(nhat[i]), _fmt(table.signal_sq_hat[i]), t])
    if args.dists_out:
        np.savetxt(args.dists_out, table.corrected_dists, delimiter=",")
        negatives = int((table.corrected_dists < 0).sum())
        if negatives:
            print(f"note: {negatives} corrected distances are negative "
                  "(expected after bias subtraction; ranking is unaffected)",
                  file=sys.stderr)


def _cmd_laplacian(args):
    rows = []
    for eps in args.epsilon:
        errs = harness.laplacian_errors(args.n, eps, args.noise, args.seed,
                                        s=args.s, alpha=args.alpha)
        for fam in ("robust", "traditional"):
            if args.family in (fam, "both"):
                rows.append([eps, fam, args.alpha, _fmt(errs[fam])])
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epsilon", "family", "alpha", "max_error"])
        writer.writerows(rows)


def _subsample_per_class(labels, per_class, seed):
    rng = np.random.default_rng(seed)
    keep = []
    for c in np.unique(labels):
        idx = np.nonzero(labels == c)[0]
        if len(idx) > per_class:
            idx = rng.choice(idx, size=per_class, replace=False)
        keep.extend(idx.tolist())
    return np.sort(np.array(keep, dtype=int))


def _cmd_scrna(args):
    labels = None
    if args.labels:
        labels = np.loadtxt(args.labels, delimiter=",", dtype=str, ndmin=1)
    cm = counts_mod.ingest_counts(args.input, fmt=args.format, labels=labels)
    if cm.rejected_rows:
        print(f"rejected zero-total rows: {list(cm.rejected_rows)}", file=sys.stderr)
    if cm.labels is not None and args.subsample:
        keep = _subsample_per_class(cm.labels, args.subsample, args.seed)
        cm = counts_mod.CountMatrix(entries=cm.entries[keep], totals=cm.totals[keep],
                                    labels=cm.labels[keep],
                                    rejected_rows=cm.rejected_rows)
    y, _ = counts_mod.normalize_counts(cm)
    affinity, solution = _scale_points(y, args.epsilon, args.tol, args.max_iter)
    scaled = assemble_W(affinity, solution)
    if args.s == density_mod.S_LIMIT:
        qhat = density_mod.ds_kde_entropy(scaled)
    else:
        qhat = density_mod.ds_kde(scaled, args.s)
    nhat = inference.noise_magnitude(solution, qhat, args.epsilon)
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "label", "total_count", "inv_count", "noise_sq_hat"])
        for i in range(len(nhat)):
            label = "" if cm.labels is None else cm.labels[i]
            writer.writerow([i, label, int(cm.totals[i]),
                             _fmt(1.0 / cm.totals[i]), _fmt(nhat[i])])
    if args.transitions_out:
        if cm.labels is None:
            raise ParameterError("--transitions-out requires --labels")
        rows = harness.transition_error_table(y, cm.labels, [args.epsilon],
                                              tol=args.tol, max_iter=args.max_iter)
        with open(args.transitions_out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["epsilon", "alpha", "family", "mean_error",
                             "worst_class_error"])
            for row in rows:
                writer.writerow([row["epsilon"], row["alpha"], row["family"],
                                 _fmt(row["mean_error"]), _fmt(row["worst_class_error"])])


def _cmd_bench(args):
    config = harness.ExperimentConfig(
        experiment=args.figure, sweep=args.sweep, sweep_param=args.sweep_param,
        repeats=args.repeats, seed=args.seed, epsilon=args.epsilon, s=args.s,
        noise=args.noise, out=args.out)
    harness.run_experiment(config)


_COMMANDS = {
    "simulate": _cmd_simulate,
    "scale": _cmd_scale,
    "density": _cmd_density,
    "denoise": _cmd_denoise,
    "laplacian": _cmd_laplacian,
    "scrna": _cmd_scrna,
    "bench": _cmd_bench,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _COMMANDS[args.command](args)
    except (ParameterError, ParseError, ConvergenceError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
