"""Command-line interface.

Subcommands mirror the library: exact sorting, the three PDE solves,
density building, stream detection, the convergence studies, ROC
evaluation, and the detector timing comparison. Every emitted CSV starts
with a '# key=value' metadata block echoing the command, config, and seed.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .anomaly import write_verdicts_csv
from .density import StreamingDensity
from .experiments import (
    ExperimentConfig,
    compare_pde_exact_timing,
    roc_curve,
    run_convergence_hje,
    run_convergence_vn_wn,
    run_labeled_stream,
    run_stream_experiment,
    step_time_flatness,
    write_stream_outputs,
)
from .fileio import Table, load_config, read_table, standard_meta, write_table
from .grid import GridField
from .hje import solve_hje
from .pareto import (
    read_points_csv,
    read_points_json,
    sort_bruteforce,
    sort_fast2d,
    within_front_indices,
    write_sort_csv,
)
from .streams import GENERATORS, read_stream_jsonl, write_stream_jsonl
from .transport import solve_v, solve_w


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x]


def cmd_sort(args) -> int:
    if str(args.input).endswith(".json"):
        ps = read_points_json(args.input)
    else:
        ps = read_points_csv(args.input)
    if args.bruteforce or ps.dim != 2:
        result = sort_bruteforce(ps)
    else:
        result = sort_fast2d(ps)
    if ps.dim == 2 and ps.n:
        result = within_front_indices(ps, result)
    write_sort_csv(args.output, result)
    print(f"sorted {ps.n} points in {ps.dim}-d: "
          f"{result.n_fronts} fronts -> {args.output}")
    return 0


def cmd_solve_hje(args) -> int:
    f = GridField.load(args.f)
    sol = solve_hje(f)
    sol.u.save(args.output)
    print(f"solved HJE on K={f.resolution} grid -> {args.output}")
    return 0


def cmd_solve_v(args) -> int:
    from .hje import HjeSolution

    u = GridField.load(args.u)
    f = GridField.load(args.f)
    v = solve_v(HjeSolution(u=u, f_used=f), f)
    v.save(args.output)
    print(f"solved within-front transport v on K={f.resolution} grid "
          f"-> {args.output}")
    return 0


def cmd_solve_w(args) -> int:
    from .hje import HjeSolution

    u = GridField.load(args.u)
    v = GridField.load(args.v)
    f = GridField.load(args.f)
    w = solve_w(HjeSolution(u=u, f_used=f), v, f)
    w.save(args.output)
    print(f"solved normalized-index transport w on K={f.resolution} grid "
          f"-> {args.output}")
    return 0


def cmd_density(args) -> int:
    dyads = read_points_csv(args.dyads).points
    dens = StreamingDensity.build(dyads, args.resolution, window_T=args.T)
    dens.save(args.output)
    print(f"binned {dens.total} dyads on K={args.resolution} -> {args.output} "
          f"(+ {args.output}.json)")
    if args.preconditioned:
        dens.preconditioned().save(args.preconditioned)
        print(f"preconditioned field -> {args.preconditioned}")
    return 0


def _experiment_config(args) -> ExperimentConfig:
    base = {}
    if args.config:
        base = load_config(args.config)
    overrides = dict(
        experiment=getattr(args, "generator", None),
        steps=args.steps,
        T=args.T,
        K=args.resolution,
        k_counts=tuple(args.k) if args.k else None,
        anomaly_prob=args.anomaly_prob,
        change_step=args.change_step,
        trials=args.trials,
        seed=args.seed,
        rho=args.rho,
        refresh=args.refresh,
        eval_window=args.eval_window,
        run_exact=args.exact or None,
    )
    for key, value in overrides.items():
        if value is not None:
            base[key] = value
    if "k_counts" in base:
        base["k_counts"] = tuple(base["k_counts"])
    return ExperimentConfig(**base)


def cmd_stream(args) -> int:
    cfg = _experiment_config(args)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if args.input:
        stream = read_stream_jsonl(args.input, kind=args.kind)
        result = run_labeled_stream(stream, cfg)
    else:
        result = run_stream_experiment(cfg)
    meta = standard_meta("stream", cfg.to_dict(), seed=cfg.seed)
    tr = result.trials[0]
    write_verdicts_csv(out / "verdicts.csv", tr.verdicts_pde, meta_lines=meta)
    if tr.verdicts_exact:
        write_verdicts_csv(out / "verdicts_exact.csv", tr.verdicts_exact,
                           meta_lines=meta)
    if args.evaluate:
        write_stream_outputs(result, out)
        print(f"pre-change AUC {result.pre_change_auc:.4f}, "
              f"dip {result.dip_auc:.4f} at t={result.dip_t}, "
              f"recovery {result.recovery_auc:.4f}")
        if result.score_correlation is not None:
            print(f"PDE/exact score correlation {result.score_correlation:.4f}, "
                  f"AUC gap "
                  f"{abs(result.auc_overall_pde - result.auc_overall_exact):.4f}")
        cs = result.class_stats
        print(f"classification accuracy c1 {cs['acc_c1']:.3f} (n={cs['n_c1']}), "
              f"c2 {cs['acc_c2']:.3f} (n={cs['n_c2']})")
    print(f"outputs -> {out}")
    return 0


def cmd_gen(args) -> int:
    gen = GENERATORS[args.generator]
    stream = gen(steps=args.steps, anomaly_prob=args.anomaly_prob,
                 change_step=args.change_step, seed=args.seed)
    write_stream_jsonl(args.output, stream)
    n_anom = sum(s.is_anomaly for s in stream.samples)
    print(f"{args.generator} stream: {args.steps} steps, {n_anom} anomalies "
          f"-> {args.output}")
    return 0


def cmd_converge_vn(args) -> int:
    res = run_convergence_vn_wn(n_values=tuple(args.n_values),
                                trials=args.trials, seed=args.seed)
    res.table.meta = standard_meta("converge-vn", {
        "n_values": list(args.n_values), "trials": args.trials,
    }, seed=args.seed)
    write_table(args.output, res.table)
    print(f"alpha(l1, V)={res.alpha_l1_v:.4f} alpha(linf, V)={res.alpha_linf_v:.4f}")
    print(f"alpha(l1, W)={res.alpha_l1_w:.4f} alpha(linf, W)={res.alpha_linf_w:.4f}")
    print(f"table -> {args.output}")
    return 0


def cmd_converge_hje(args) -> int:
    res = run_convergence_hje(n=args.n, K_values=tuple(args.K_values),
                              seed=args.seed)
    res.table.meta = standard_meta("converge-hje", {
        "n": args.n, "K_values": list(args.K_values),
    }, seed=args.seed)
    write_table(args.output, res.table)
    print(f"fitted err ~ {res.fit_c:.4f} sqrt(h); per-K relative deviation "
          + ", ".join(f"{d:.3f}" for d in res.rel_deviation))
    print(f"table -> {args.output}")
    return 0


def cmd_roc(args) -> int:
    table = read_table(args.scores)
    scores = np.asarray([float(x) for x in table.column(args.score_col)])
    labels = np.asarray([x in ("1", "True") for x in table.column(args.label_col)])
    curve = roc_curve(scores, labels)
    out = Table(header=["fpr", "tpr"],
                meta=standard_meta("roc", {"scores": str(args.scores),
                                           "score_col": args.score_col,
                                           "label_col": args.label_col})
                + [f"auc={curve.auc!r}"])
    for fp, tp in zip(curve.fpr, curve.tpr):
        out.append(float(fp), float(tp))
    write_table(args.output, out)
    print(f"AUC = {curve.auc:.4f} over {labels.size} scores -> {args.output}")
    return 0


def cmd_timing(args) -> int:
    rows, table = compare_pde_exact_timing(T_values=tuple(args.T_values),
                                           K=args.resolution,
                                           measured_steps=args.steps,
                                           seed=args.seed)
    table.meta = standard_meta("timing", {"T_values": list(args.T_values),
                                          "K": args.resolution}, seed=args.seed)
    write_table(args.output, table)
    for r in rows:
        print(f"T={r.T:5d}  pde {r.pde_step_s * 1e3:8.3f} ms/step   "
              f"exact {r.exact_step_s * 1e3:8.3f} ms/step")
    if args.flatness:
        first, last = step_time_flatness(seed=args.seed)
        print(f"flatness (T=200, K=50, 10k steps): first block "
              f"{first * 1e3:.3f} ms, last block {last * 1e3:.3f} ms")
    print(f"table -> {args.output}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pdakit",
                                description="Pareto depth analysis toolkit")
    p.add_argument("--version", action="version", version=f"pdakit {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sort", help="exact nondominated sorting of a point file")
    s.add_argument("--input", required=True, help="points, CSV rows or JSON array")
    s.add_argument("--output", required=True, help="result CSV")
    s.add_argument("--bruteforce", action="store_true",
                   help="force the O(n^2) peeling oracle")
    s.set_defaults(func=cmd_sort)

    s = sub.add_parser("solve-hje", help="solve the depth-surface PDE")
    s.add_argument("--f", required=True, help="right-hand-side GridField file")
    s.add_argument("--output", required=True)
    s.set_defaults(func=cmd_solve_hje)

    s = sub.add_parser("solve-v", help="solve the within-front index transport")
    s.add_argument("--u", required=True)
    s.add_argument("--f", required=True)
    s.add_argument("--output", required=True)
    s.set_defaults(func=cmd_solve_v)

    s = sub.add_parser("solve-w", help="solve the normalized-index transport")
    s.add_argument("--u", required=True)
    s.add_argument("--v", required=True)
    s.add_argument("--f", required=True)
    s.add_argument("--output", required=True)
    s.set_defaults(func=cmd_solve_w)

    s = sub.add_parser("density", help="histogram a dyad file")
    s.add_argument("--dyads", required=True, help="CSV of 2-d dyads")
    s.add_argument("-K", "--resolution", type=int, default=100)
    s.add_argument("-T", "--T", type=int, default=0,
                   help="window length for the sidecar")
    s.add_argument("--output", required=True)
    s.add_argument("--preconditioned", help="also write the f + h^2 node field")
    s.set_defaults(func=cmd_density)

    s = sub.add_parser("stream", help="run the streaming detector")
    s.add_argument("--generator", choices=sorted(GENERATORS))
    s.add_argument("--input", help="JSONL stream file instead of a generator")
    s.add_argument("--kind", default="uniform",
                   help="measure family for --input streams")
    s.add_argument("--config", help="JSON/TOML config file")
    s.add_argument("--steps", type=int)
    s.add_argument("-T", "--T", type=int)
    s.add_argument("-K", "--resolution", type=int)
    s.add_argument("--k", type=_int_list, help="per-criterion k, e.g. 6,7")
    s.add_argument("--anomaly-prob", type=float)
    s.add_argument("--change-step", type=int)
    s.add_argument("--trials", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--rho", type=float)
    s.add_argument("--refresh", type=int)
    s.add_argument("--eval-window", type=int)
    s.add_argument("--exact", action="store_true",
                   help="also run the exact-sorting detector")
    s.add_argument("--evaluate", action="store_true",
                   help="emit AUC-over-time and ROC tables")
    s.add_argument("--out-dir", required=True)
    s.set_defaults(func=cmd_stream)

    s = sub.add_parser("gen", help="write a labeled synthetic stream as JSONL")
    s.add_argument("--generator", choices=sorted(GENERATORS), required=True)
    s.add_argument("--steps", type=int, default=1500)
    s.add_argument("--anomaly-prob", type=float, default=0.05)
    s.add_argument("--change-step", type=int)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--output", required=True)
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("converge-vn", help="within-front convergence rates")
    s.add_argument("--n-values", type=_int_list,
                   default=[100, 1_000, 10_000, 100_000, 1_000_000])
    s.add_argument("--trials", type=int, default=3)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--output", required=True)
    s.set_defaults(func=cmd_converge_vn)

    s = sub.add_parser("converge-hje", help="estimated-density solve convergence")
    s.add_argument("--n", type=int, default=1_000_000)
    s.add_argument("--K-values", type=_int_list, default=[25, 50, 100])
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--output", required=True)
    s.set_defaults(func=cmd_converge_hje)

    s = sub.add_parser("roc", help="ROC/AUC from a scores table")
    s.add_argument("--scores", required=True)
    s.add_argument("--score-col", default="nu_pde")
    s.add_argument("--label-col", default="is_anomaly_truth")
    s.add_argument("--output", required=True)
    s.set_defaults(func=cmd_roc)

    s = sub.add_parser("timing", help="per-step cost of PDE vs exact detectors")
    s.add_argument("--T-values", type=_int_list, default=[100, 200, 400, 800])
    s.add_argument("-K", "--resolution", type=int, default=100)
    s.add_argument("--steps", type=int, default=30, help="measured steps per T")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--flatness", action="store_true",
                   help="also measure per-step time drift over a long run")
    s.add_argument("--output", required=True)
    s.set_defaults(func=cmd_timing)

    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
