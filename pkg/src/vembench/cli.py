"""Benchmark pipeline driver.

Five subcommands chain into a file-based pipeline rooted at one output
directory:

    generate -> manifest.json + meshes/*.poly, *-L<k>.off, *-L<k>.tags
    measure  -> metrics.csv        (quality aggregates per mesh per level)
    solve    -> solver.csv + convergence.csv
    analyze  -> analysis/*.csv + analysis/*.json (correlation matrices)
    report   -> report.json        (everything above in one bundle)

Every stage reads only the manifest and the files earlier stages wrote, so
stages can be rerun independently and a rerun with the same seed produces
byte-identical output.  Floats are written with 17 significant digits;
that round-trips IEEE doubles exactly.

Per-mesh failures in measure and solve are logged to a per-stage failures
CSV and the run continues; the process exit code is 0 only when no row
failed.  Generation errors abort instead, annotated with the offending
mesh spec.
"""

from __future__ import annotations

import argparse
import csv
import json
import multiprocessing
import os
import sys
from typing import NamedTuple

from .correlation import (
    ObservationTable,
    build_table,
    correlation_matrix,
    join_tables,
    matrix_to_csv,
    matrix_to_json,
)
from .exceptions import InvalidParameter, MissingJoin, VembenchError
from .families import (
    PARAMETRIC_FAMILIES,
    FamilyId,
    PolygonSpec,
    make_polygon,
    make_random_polygon,
    random_vertex_count,
)
from .geometry import format_polygon
from .meshing import build_canvas_mesh, build_hierarchy, read_mesh, write_mesh
from .performance import fit_convergence, solver_report
from .quality import (
    METRIC_NAMES,
    SCALE_INVARIANT,
    aggregate_mesh_metrics,
    worst_metric_values,
)
from .vem import PROBLEMS, assemble, solve

MANIFEST_NAME = "manifest.json"
METRICS_CSV = "metrics.csv"
SOLVER_CSV = "solver.csv"
CONVERGENCE_CSV = "convergence.csv"
ANALYSIS_DIR = "analysis"
REPORT_NAME = "report.json"

SOLVER_COLUMNS = ("eps_inf", "eps_2", "eps_S", "kappa1")


class BenchmarkConfig(NamedTuple):
    """Dataset description consumed by ``cmd_generate``.

    ``t_samples`` points are placed at t_i = i / (t_samples - 1), endpoints
    included.  ``seed`` offsets the per-mesh seeds of the random family.
    ``canvas`` toggles meshing: when false only the bare polygons and the
    manifest are emitted.
    """

    families: tuple[FamilyId, ...]
    output_dir: str
    t_samples: int = 20
    random_count: int = 100
    levels: int = 5
    seed: int = 0
    problem: str = "sinsin"
    jobs: int = 1
    canvas: bool = True


class MeshSpec(NamedTuple):
    """One dataset entry: a parametric (family, t) point or a seeded random."""

    mesh_id: str
    family: str
    t: float | None
    seed: int | None


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def validate_config(config: BenchmarkConfig) -> None:
    if config.t_samples < 2:
        raise InvalidParameter(f"t_samples must be >= 2, got {config.t_samples}")
    if config.levels < 1:
        raise InvalidParameter(f"levels must be >= 1, got {config.levels}")
    if config.random_count < 0:
        raise InvalidParameter(f"random_count must be >= 0, got {config.random_count}")
    if config.jobs < 1:
        raise InvalidParameter(f"jobs must be >= 1, got {config.jobs}")
    if not config.families and config.random_count == 0:
        raise InvalidParameter("no families selected and random_count is 0")
    for family in config.families:
        if family not in PARAMETRIC_FAMILIES:
            raise InvalidParameter(
                f"{family.value!r} is not a parametric family; "
                "use --random-count for random polygons"
            )


def mesh_specs(config: BenchmarkConfig) -> list[MeshSpec]:
    """Expand a config into the full ordered list of dataset entries."""
    specs = []
    for family in config.families:
        for i in range(config.t_samples):
            t = i / (config.t_samples - 1)
            specs.append(MeshSpec(f"{family.value}-t{i:02d}", family.value, t, None))
    for r in range(config.random_count):
        seed = config.seed + r
        specs.append(MeshSpec(f"random-s{seed:04d}", "random", None, seed))
    return specs


def _spec_polygon(spec: MeshSpec):
    if spec.seed is None:
        return make_polygon(PolygonSpec(FamilyId(spec.family), spec.t))
    return make_random_polygon(random_vertex_count(spec.seed), spec.seed)


def _generate_one(task) -> dict:
    """Build and write one mesh entry; returns its manifest record.

    Runs in worker processes: all file paths it writes are unique to the
    entry, so concurrent workers never touch the same file.
    """
    spec, levels, canvas, out_dir = task
    try:
        polygon = _spec_polygon(spec)
        poly_rel = os.path.join("meshes", f"{spec.mesh_id}.poly")
        with open(os.path.join(out_dir, poly_rel), "w", encoding="ascii") as fh:
            fh.write(format_polygon(polygon))
        level_entries = []
        if canvas:
            hierarchy = build_hierarchy(build_canvas_mesh(polygon), levels)
            for k, mesh in enumerate(hierarchy.levels):
                off_rel = os.path.join("meshes", f"{spec.mesh_id}-L{k}.off")
                write_mesh(mesh, os.path.join(out_dir, off_rel))
                level_entries.append(
                    {
                        "level": k,
                        "off": off_rel,
                        "tags": off_rel[:-4] + ".tags",
                        "h": _fmt(hierarchy.level_sizes[k]),
                        "cells": len(mesh.cells),
                        "vertices": len(mesh.vertices),
                    }
                )
    except VembenchError as err:
        raise type(err)(f"mesh {spec.mesh_id} ({_spec_desc(spec)}): {err}") from err
    return {
        "mesh_id": spec.mesh_id,
        "family": spec.family,
        "t": "" if spec.t is None else _fmt(spec.t),
        "seed": spec.seed,
        "polygon": poly_rel,
        "levels": level_entries,
    }


def _spec_desc(spec: MeshSpec) -> str:
    if spec.seed is None:
        return f"family={spec.family}, t={_fmt(spec.t)}"
    return f"family=random, seed={spec.seed}"


def _map_tasks(worker, tasks, jobs: int) -> list:
    if jobs <= 1 or len(tasks) <= 1:
        return [worker(task) for task in tasks]
    with multiprocessing.Pool(processes=min(jobs, len(tasks))) as pool:
        return pool.map(worker, tasks)


def cmd_generate(config: BenchmarkConfig) -> int:
    """Write the dataset described by ``config``; returns 0 or aborts."""
    validate_config(config)
    out_dir = config.output_dir
    os.makedirs(os.path.join(out_dir, "meshes"), exist_ok=True)
    specs = mesh_specs(config)
    tasks = [(spec, config.levels, config.canvas, out_dir) for spec in specs]
    entries = _map_tasks(_generate_one, tasks, config.jobs)
    manifest = {
        "config": {
            "families": [f.value for f in config.families],
            "t_samples": config.t_samples,
            "random_count": config.random_count,
            "levels": config.levels,
            "seed": config.seed,
            "problem": config.problem,
            "canvas": config.canvas,
        },
        "meshes": entries,
    }
    with open(os.path.join(out_dir, MANIFEST_NAME), "w", encoding="ascii") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return 0


def load_manifest(dataset_dir: str) -> dict:
    path = os.path.join(dataset_dir, MANIFEST_NAME)
    if not os.path.exists(path):
        raise InvalidParameter(f"no manifest at {path}; run generate first")
    with open(path, encoding="ascii") as fh:
        return json.load(fh)


def _mesh_artifacts(manifest: dict) -> list[tuple[dict, dict]]:
    """Flat (mesh entry, level entry) pairs in manifest order."""
    return [
        (entry, level) for entry in manifest["meshes"] for level in entry["levels"]
    ]


def _write_csv(path: str, header: list[str], rows: list[list[str]]) -> None:
    with open(path, "w", encoding="ascii", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _write_failures(dataset_dir: str, stage: str, failures: list) -> None:
    _write_csv(
        os.path.join(dataset_dir, f"{stage}_failures.csv"),
        ["mesh_id", "level", "reason"],
        [[m, str(lv), reason] for m, lv, reason in failures],
    )
    for m, lv, reason in failures:
        print(f"[{stage}] {m} L{lv}: {reason}", file=sys.stderr)


METRICS_HEADER = (
    ["mesh_id", "family", "t", "level"]
    + [f"{m}_{s}" for m in METRIC_NAMES for s in ("min", "avg", "max")]
    + [f"{m}_worst" for m in METRIC_NAMES]
    + [f"{m}_poly" for m in METRIC_NAMES]
)


def _measure_one(task):
    entry, level, dataset_dir = task
    try:
        mesh = read_mesh(os.path.join(dataset_dir, level["off"]))
        cache: dict = {}
        aggregates = aggregate_mesh_metrics(mesh, "all", cache)
        worst = worst_metric_values(mesh, cache)
        central = aggregate_mesh_metrics(mesh, "polygon", cache)
    except (VembenchError, ValueError) as err:
        return ("failed", entry["mesh_id"], level["level"], str(err))
    row = [entry["mesh_id"], entry["family"], entry["t"], str(level["level"])]
    for m in METRIC_NAMES:
        row.extend(_fmt(v) for v in aggregates[m])
    row.extend(_fmt(worst[m]) for m in METRIC_NAMES)
    row.extend(_fmt(central[m][0]) for m in METRIC_NAMES)
    return ("ok", row)


def cmd_measure(dataset_dir: str, jobs: int = 1) -> int:
    """Metrics CSV over every mesh at every level; returns the failure count."""
    manifest = load_manifest(dataset_dir)
    tasks = [
        (entry, level, dataset_dir) for entry, level in _mesh_artifacts(manifest)
    ]
    results = _map_tasks(_measure_one, tasks, jobs)
    rows = [r[1] for r in results if r[0] == "ok"]
    failures = [r[1:] for r in results if r[0] == "failed"]
    _write_csv(os.path.join(dataset_dir, METRICS_CSV), METRICS_HEADER, rows)
    _write_failures(dataset_dir, "measure", failures)
    return len(failures)


SOLVER_HEADER = [
    "mesh_id", "family", "t", "level", "h", "n_dofs",
    "eps_inf", "eps_2", "eps_S", "kappa1", "status", "reason",
]


def _solve_one(task):
    entry, level, dataset_dir, problem_name = task
    problem = PROBLEMS[problem_name]()
    prefix = [entry["mesh_id"], entry["family"], entry["t"], str(level["level"])]
    try:
        mesh = read_mesh(os.path.join(dataset_dir, level["off"]))
        system = assemble(mesh, problem)
        u_h = solve(system)
        report = solver_report(mesh, system, u_h, problem)
    except VembenchError as err:
        return (
            "failed",
            prefix + [level["h"], "", "", "", "", "", "failed", str(err)],
            entry["mesh_id"],
            level["level"],
            str(err),
        )
    row = prefix + [
        _fmt(report.h),
        str(report.n_dofs),
        _fmt(report.eps_inf),
        _fmt(report.eps_2),
        _fmt(report.eps_S),
        _fmt(report.kappa1),
        "ok",
        "",
    ]
    return ("ok", row)


def cmd_solve(dataset_dir: str, problem: str = "sinsin", jobs: int = 1) -> int:
    """Solver and convergence CSVs; returns the failure count.

    A convergence row is fitted per mesh instance from its hierarchy levels
    whenever every level solved and at least two levels exist.  Failed
    solves keep their CSV row, flagged in the status column.
    """
    if problem not in PROBLEMS:
        raise InvalidParameter(
            f"unknown problem {problem!r}; available: {sorted(PROBLEMS)}"
        )
    manifest = load_manifest(dataset_dir)
    tasks = [
        (entry, level, dataset_dir, problem)
        for entry, level in _mesh_artifacts(manifest)
    ]
    results = _map_tasks(_solve_one, tasks, jobs)

    rows = [r[1] for r in results]
    failures = [r[2:] for r in results if r[0] == "failed"]
    ok_eps2: dict[str, dict[int, tuple[float, float]]] = {}
    for r in results:
        if r[0] == "ok":
            row = r[1]
            ok_eps2.setdefault(row[0], {})[int(row[3])] = (
                float(row[4]),
                float(row[7]),
            )

    fit_rows = []
    for entry in manifest["meshes"]:
        n_levels = len(entry["levels"])
        solved = ok_eps2.get(entry["mesh_id"], {})
        if n_levels < 2 or len(solved) != n_levels:
            continue
        samples = [solved[k] for k in sorted(solved)]
        try:
            fit = fit_convergence(samples)
        except VembenchError as err:
            failures.append((entry["mesh_id"], "fit", str(err)))
            continue
        fit_rows.append(
            [
                entry["mesh_id"],
                entry["family"],
                entry["t"],
                _fmt(fit.C),
                _fmt(fit.p),
                _fmt(fit.residual),
            ]
        )

    _write_csv(os.path.join(dataset_dir, SOLVER_CSV), SOLVER_HEADER, rows)
    _write_csv(
        os.path.join(dataset_dir, CONVERGENCE_CSV),
        ["mesh_id", "family", "t", "C", "p", "residual"],
        fit_rows,
    )
    _write_failures(dataset_dir, "solve", failures)
    return len(failures)


def _read_csv(path: str) -> list[dict]:
    if not os.path.exists(path):
        raise InvalidParameter(f"missing {path}; run the earlier stages first")
    with open(path, encoding="ascii", newline="") as fh:
        return list(csv.DictReader(fh))


def _artifact_id(row: dict) -> str:
    return f"{row['mesh_id']}:L{row['level']}"


def _table_from_rows(
    rows: list[dict], columns: dict[str, str], order: list[str] | None = None
) -> ObservationTable:
    """Observation table with ``columns`` mapping label -> CSV column.

    ``order`` restricts and reorders rows by artifact id; the default keeps
    every row in file order.
    """
    by_id = {_artifact_id(row): row for row in rows}
    ids = list(by_id) if order is None else order
    data: dict[str, list[float]] = {label: [] for label in columns}
    for aid in ids:
        row = by_id[aid]
        for label, column in columns.items():
            data[label].append(float(row[column]))
    return build_table(ids, data)


def cmd_analyze(dataset_dir: str) -> int:
    """Correlation matrices from the measure and solve CSVs.

    Three matrices are written as CSV and JSON: geometry against geometry
    (scale-invariant metrics of the central polygon), solver against
    solver, and the joint geometry-solver matrix pairing worst-element
    geometry with solver behaviour.  Failed solver rows are excluded; a
    mesh present in one table but not the other raises MissingJoin.
    """
    metrics_rows = _read_csv(os.path.join(dataset_dir, METRICS_CSV))
    solver_rows = _read_csv(os.path.join(dataset_dir, SOLVER_CSV))
    ok_rows = [row for row in solver_rows if row["status"] == "ok"]

    geometry = _table_from_rows(
        metrics_rows, {m: f"{m}_poly" for m in SCALE_INVARIANT}
    )
    solver = _table_from_rows(
        ok_rows, {c: c for c in SOLVER_COLUMNS}
    )
    ok_ids = list(solver.mesh_ids)
    metric_ids = {_artifact_id(row) for row in metrics_rows}
    missing = [aid for aid in ok_ids if aid not in metric_ids]
    if missing:
        raise MissingJoin(
            f"{len(missing)} solver rows have no metrics row, e.g. {missing[0]}"
        )
    worst = _table_from_rows(
        metrics_rows,
        {f"{m}_worst": f"{m}_worst" for m in SCALE_INVARIANT},
        order=ok_ids,
    )
    joint = join_tables(worst, solver)

    out_dir = os.path.join(dataset_dir, ANALYSIS_DIR)
    os.makedirs(out_dir, exist_ok=True)
    summary_lines = []
    for name, table, columns in (
        ("geometry_geometry", geometry, list(SCALE_INVARIANT)),
        ("solver_solver", solver, list(SOLVER_COLUMNS)),
        (
            "geometry_solver",
            joint,
            [f"{m}_worst" for m in SCALE_INVARIANT] + list(SOLVER_COLUMNS),
        ),
    ):
        matrix = correlation_matrix(table, columns)
        with open(
            os.path.join(out_dir, f"{name}.csv"), "w", encoding="ascii", newline=""
        ) as fh:
            fh.write(matrix_to_csv(matrix))
        with open(os.path.join(out_dir, f"{name}.json"), "w", encoding="ascii") as fh:
            fh.write(matrix_to_json(matrix))
        summary_lines.extend(_summarize_matrix(name, len(table.mesh_ids), matrix))
    with open(os.path.join(out_dir, "summary.txt"), "w", encoding="ascii") as fh:
        fh.write("\n".join(summary_lines) + "\n")
    return 0


def _summarize_matrix(name: str, observations: int, matrix) -> list[str]:
    """Human-oriented digest: pair tallies plus the strong pairs themselves."""
    tally = {"strong": 0, "weak": 0, "none": 0}
    strong_pairs = []
    n = len(matrix.labels)
    for i in range(n):
        for j in range(i + 1, n):
            label = matrix.classes[i][j]
            key = "strong" if label.startswith("strong") else (
                "weak" if label.startswith("weak") else "none"
            )
            tally[key] += 1
            if key == "strong":
                strong_pairs.append(
                    f"  {matrix.labels[i]} ~ {matrix.labels[j]}"
                    f" ({matrix.rho[i][j]:+.3f})"
                )
    head = (
        f"[{name}] observations={observations} dropped={matrix.dropped}"
        f" strong={tally['strong']} weak={tally['weak']} none={tally['none']}"
    )
    return [head] + strong_pairs


def cmd_report(dataset_dir: str) -> int:
    """Bundle the manifest, CSV tables, and matrices into report.json."""
    manifest = load_manifest(dataset_dir)
    bundle: dict = {"config": manifest["config"], "meshes": manifest["meshes"]}
    for key, name in (
        ("metrics", METRICS_CSV),
        ("solver", SOLVER_CSV),
        ("convergence", CONVERGENCE_CSV),
        ("measure_failures", "measure_failures.csv"),
        ("solve_failures", "solve_failures.csv"),
    ):
        path = os.path.join(dataset_dir, name)
        if os.path.exists(path):
            with open(path, encoding="ascii", newline="") as fh:
                reader = csv.reader(fh)
                table = list(reader)
            bundle[key] = {"columns": table[0], "rows": table[1:]}
    matrices = {}
    for name in ("geometry_geometry", "solver_solver", "geometry_solver"):
        path = os.path.join(dataset_dir, ANALYSIS_DIR, f"{name}.json")
        if os.path.exists(path):
            with open(path, encoding="ascii") as fh:
                matrices[name] = json.load(fh)
    if matrices:
        bundle["matrices"] = matrices
    with open(os.path.join(dataset_dir, REPORT_NAME), "w", encoding="ascii") as fh:
        json.dump(bundle, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return 0


def _parse_families(text: str) -> tuple[FamilyId, ...]:
    if text == "all":
        return PARAMETRIC_FAMILIES
    out = []
    for name in text.split(","):
        name = name.strip().lower()
        if not name:
            continue
        try:
            out.append(FamilyId(name))
        except ValueError:
            valid = ", ".join(f.value for f in PARAMETRIC_FAMILIES)
            raise InvalidParameter(f"unknown family {name!r}; valid: {valid}") from None
    return tuple(out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vembench",
        description="Polygon-mesh quality and solver benchmark pipeline.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="build the mesh dataset")
    gen.add_argument("--families", default="all",
                     help="comma-separated parametric families, or 'all'")
    gen.add_argument("--t-samples", type=int, default=20)
    gen.add_argument("--random-count", type=int, default=100)
    gen.add_argument("--levels", type=int, default=5)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--no-canvas", action="store_true",
                     help="emit bare polygons without meshing")

    mea = sub.add_parser("measure", help="quality metrics CSV")
    sol = sub.add_parser("solve", help="solver and convergence CSVs")
    sol.add_argument("--problem", default="sinsin")
    ana = sub.add_parser("analyze", help="correlation matrices")
    rep = sub.add_parser("report", help="single JSON bundle")

    for p in (gen, mea, sol, ana, rep):
        p.add_argument("--out", default="dataset", help="dataset directory")
    for p in (gen, mea, sol):
        p.add_argument("--jobs", type=int, default=1)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "generate":
            config = BenchmarkConfig(
                families=_parse_families(args.families),
                output_dir=args.out,
                t_samples=args.t_samples,
                random_count=args.random_count,
                levels=args.levels,
                seed=args.seed,
                jobs=args.jobs,
                canvas=not args.no_canvas,
            )
            failed = cmd_generate(config)
        elif args.command == "measure":
            failed = cmd_measure(args.out, jobs=args.jobs)
        elif args.command == "solve":
            failed = cmd_solve(args.out, problem=args.problem, jobs=args.jobs)
        elif args.command == "analyze":
            failed = cmd_analyze(args.out)
        else:
            failed = cmd_report(args.out)
    except VembenchError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    return 0 if failed == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
