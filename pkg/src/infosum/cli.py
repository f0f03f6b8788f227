"""Command-line entry point: ``infosum {verify,clt-sweep,anova-demo,pack-optimize,score-check}``.

Exit status: 0 when every evaluated check holds, 2 when any check is
violated, 1 on configuration, parse or evaluation errors. Skipped checks do
not count as failures.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .anova import (
    CAdditiveFunction,
    ProductSpace,
    VarianceDropViolation,
    anova_decompose,
    variance_drop_bound,
)
from .clt import iid_info_sequence, monotone_on_average, projection_gap
from .corpus import random_product_space, random_table
from .density import build_density
from .errors import ConfigurationError, InfosumError
from .functionals import score_convolution_check
from .specs import Gaussian, GaussianMixture, GridConfig, Uniform, spec_from_dict
from .subsets import (
    FractionalPacking,
    SubsetCollection,
    WeightVector,
    classify,
    natural_packing,
    optimize_packing_lp,
    validate_packing,
)
from .verifiers import TOL_NATS, TOL_REL, SumSystem, verify_all

EXIT_OK, EXIT_ERROR, EXIT_VIOLATION = 0, 1, 2
COMMANDS = ("verify", "clt-sweep", "anova-demo", "pack-optimize", "score-check")
REPORT_COLUMNS = ("name", "lhs", "rhs", "gap", "satisfied", "tolerance")
SWEEP_COLUMNS = ("n", "entropy", "fisher", "entropy_power", "rel_entropy_gaussian", "gap_prev")
SCORE_CHECK_THRESHOLD = 5e-3


@dataclass
class RunConfig:
    command: str
    input: Path | None = None
    output: Path | None = None
    format: str = "json"
    grid: GridConfig = field(default_factory=GridConfig)
    tol_rel: float = TOL_REL
    tol_nats: float = TOL_NATS
    seed: int = 0
    n_max: int | None = None
    presmooth: float | None = None


@dataclass
class Artifact:
    payload: dict
    rows: list[dict]
    columns: tuple[str, ...]
    status: int


# -- serialization ------------------------------------------------------------


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def render_json(payload: dict) -> str:
    return json.dumps(_jsonable(payload), sort_keys=True, indent=2) + "\n"


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, tuple)):
        return " ".join(str(x) for x in v)
    return str(v)


def render_csv(rows: list[dict], columns: tuple[str, ...], seed: int) -> str:
    buf = io.StringIO()
    buf.write(f"# seed: {seed}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_csv_cell(row.get(c)) for c in columns])
    return buf.getvalue()


# -- input parsing ------------------------------------------------------------


def load_input(path: Path | None) -> dict:
    if path is None:
        return {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(obj, dict):
        raise ConfigurationError("$: expected a JSON object at the top level")
    return obj


def _require(obj: dict, key: str, path: str):
    if key not in obj:
        raise ConfigurationError(f"{path}: missing required key {key!r}")
    return obj[key]


def _number_list(value, path: str) -> list[float]:
    if not isinstance(value, list) or not all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
    ):
        raise ConfigurationError(f"{path}: expected a list of numbers")
    return [float(v) for v in value]


def _collection_name(entry: dict, index: int) -> str:
    if isinstance(entry.get("name"), str):
        return entry["name"]
    kind = entry.get("kind")
    if kind == "all_m_subsets":
        return f"all_{entry.get('m')}_subsets"
    if kind == "sliding_window":
        return f"sliding_window_{entry.get('k')}"
    if isinstance(kind, str):
        return kind
    return f"C{index}"


def _parse_system(obj: dict) -> list:
    specs = _require(obj, "system", "$")
    if not isinstance(specs, list) or not specs:
        raise ConfigurationError("$.system: expected a non-empty list of distributions")
    return [spec_from_dict(s, f"$.system[{k}]") for k, s in enumerate(specs)]


def _parse_collections(obj: dict, n: int):
    entries = _require(obj, "collections", "$")
    if not isinstance(entries, list) or not entries:
        raise ConfigurationError("$.collections: expected a non-empty list")
    top_w = obj.get("weights", {})
    top_b = obj.get("packings", {})
    for key, val in (("weights", top_w), ("packings", top_b)):
        if not isinstance(val, dict):
            raise ConfigurationError(f"$.{key}: expected an object keyed by collection name")
    out = []
    for k, entry in enumerate(entries):
        path = f"$.collections[{k}]"
        if not isinstance(entry, dict):
            raise ConfigurationError(f"{path}: expected an object")
        body = dict(entry)
        if "kind" in body and "n" not in body:
            body["n"] = n
        C = SubsetCollection.from_dict(body, path)
        if C.n != n:
            raise ConfigurationError(f"{path}: collection is over 1..{C.n} but the system has {n} summands")
        name = _collection_name(entry, k)
        w_raw = entry.get("weights", top_w.get(name))
        b_raw = entry.get("packing", top_b.get(name))
        w = None
        if w_raw is not None:
            vals = _number_list(w_raw, f"{path}.weights")
            if len(vals) != len(C):
                raise ConfigurationError(f"{path}.weights: {len(vals)} entries for {len(C)} sets")
            w = WeightVector(tuple(vals))
        beta = None
        if b_raw is not None:
            vals = _number_list(b_raw, f"{path}.packing")
            if len(vals) != len(C):
                raise ConfigurationError(f"{path}.packing: {len(vals)} entries for {len(C)} sets")
            beta = FractionalPacking(C, tuple(vals))
            if not validate_packing(C, beta):
                raise ConfigurationError(f"{path}.packing: not a fractional packing")
        out.append((name, C, w, beta))
    names = [name for name, *_ in out]
    if len(set(names)) != len(names):
        raise ConfigurationError("$.collections: collection names must be unique")
    return out


def _status(reports: list[dict]) -> int:
    return EXIT_VIOLATION if any(r["status"] == "evaluated" and not r["satisfied"] for r in reports) else EXIT_OK


def _grid_dict(cfg: GridConfig) -> dict:
    return {"points": cfg.points, "half_width_sigmas": cfg.half_width_sigmas}


# -- commands -----------------------------------------------------------------


def cmd_verify(cfg: RunConfig, obj: dict) -> Artifact:
    specs = _parse_system(obj)
    collections = _parse_collections(obj, len(specs))
    system = SumSystem(specs, cfg.grid).build([C for _, C, _, _ in collections])
    reports, diagnostics = [], []
    for name, C, w, beta in collections:
        for rep in verify_all(system, C, w, beta, cfg.tol_rel, cfg.tol_nats):
            rep.name = f"{rep.name}[{name}]"
            reports.append(rep.to_dict())
        if obj.get("monotone_on_average") and classify(C).balanced:
            for rep in monotone_on_average(system, C, cfg.tol_rel, cfg.tol_nats):
                rep.name = f"{rep.name}[{name}]"
                reports.append(rep.to_dict())
        if obj.get("projection_gap"):
            pg = projection_gap(system, C, w, seed=cfg.seed)
            diagnostics.append({"name": f"projection_gap[{name}]", **pg.to_dict()})
    reports.sort(key=lambda r: r["name"])
    payload = {
        "command": "verify",
        "seed": cfg.seed,
        "grid": _grid_dict(cfg.grid),
        "tolerances": {"rel": cfg.tol_rel, "nats": cfg.tol_nats},
        "system": [s.to_dict() for s in specs],
        "reports": reports,
    }
    if diagnostics:
        payload["diagnostics"] = sorted(diagnostics, key=lambda d: d["name"])
    rows = [
        {**r, "satisfied": "skipped" if r["status"] == "skipped" else r["satisfied"]} for r in reports
    ]
    return Artifact(payload, rows, REPORT_COLUMNS, _status(reports))


def cmd_clt_sweep(cfg: RunConfig, obj: dict) -> Artifact:
    spec = spec_from_dict(_require(obj, "spec", "$"), "$.spec") if obj else Uniform(0.0, 1.0)
    n_max = cfg.n_max if cfg.n_max is not None else obj.get("n_max", 6)
    presmooth = cfg.presmooth if cfg.presmooth is not None else obj.get("presmooth", 0.0)
    if not isinstance(n_max, int) or isinstance(n_max, bool):
        raise ConfigurationError("$.n_max: expected an integer")
    if not isinstance(presmooth, (int, float)) or isinstance(presmooth, bool):
        raise ConfigurationError("$.presmooth: expected a number")
    sweep = iid_info_sequence(spec, n_max, cfg.grid, float(presmooth))
    checks = []
    for row, fgap, prev in zip(sweep.rows[1:], sweep.fisher_gaps(), sweep.rows):
        checks.append({"n": row.n, "functional": "entropy", "gap": row.gap_prev, "tolerance": cfg.tol_nats,
                       "satisfied": row.gap_prev >= -cfg.tol_nats})
        if fgap is None:
            checks.append({"n": row.n, "functional": "fisher", "gap": None, "tolerance": None, "satisfied": None})
        else:
            tol = cfg.tol_rel * prev.fisher
            checks.append({"n": row.n, "functional": "fisher", "gap": fgap, "tolerance": tol,
                           "satisfied": fgap >= -tol})
    violated = any(c["satisfied"] is False for c in checks)
    payload = {
        "command": "clt-sweep",
        "seed": cfg.seed,
        "grid": _grid_dict(cfg.grid),
        "tolerances": {"rel": cfg.tol_rel, "nats": cfg.tol_nats},
        "sweep": sweep.to_dict(),
        "monotonicity": checks,
    }
    rows = [row.to_dict() for row in sweep.rows]
    return Artifact(payload, rows, SWEEP_COLUMNS, EXIT_VIOLATION if violated else EXIT_OK)


def _parse_space(obj, path: str) -> ProductSpace:
    if not isinstance(obj, dict):
        raise ConfigurationError(f"{path}: expected an object")
    sup = _require(obj, "supports", path)
    pr = _require(obj, "probs", path)
    if not isinstance(sup, list) or not isinstance(pr, list):
        raise ConfigurationError(f"{path}: supports and probs must be lists")
    supports = tuple(np.array(_number_list(s, f"{path}.supports[{k}]")) for k, s in enumerate(sup))
    probs = tuple(np.array(_number_list(p, f"{path}.probs[{k}]")) for k, p in enumerate(pr))
    try:
        return ProductSpace(supports, probs)
    except InfosumError as exc:
        raise ConfigurationError(f"{path}: {exc}") from exc


def _subset_label(t) -> str:
    return "{" + ",".join(str(i) for i in t) + "}"


def cmd_anova_demo(cfg: RunConfig, obj: dict) -> Artifact:
    if obj:
        space = _parse_space(_require(obj, "space", "$"), "$.space")
        try:
            table = np.asarray(_require(obj, "table", "$"), dtype=float)
        except (TypeError, ValueError) as exc:
            raise ConfigurationError("$.table: expected a nested list of numbers") from exc
        if table.shape != space.shape:
            raise ConfigurationError(f"$.table: shape {table.shape} does not match space {space.shape}")
    else:
        rng = np.random.default_rng(cfg.seed)
        space = random_product_space(rng, 3, max_size=3)
        table = random_table(rng, space)
    dec = anova_decompose(table, space)
    var = dec.variances()
    total = math.fsum(var.values())
    anova_rows = [
        {"subset": _subset_label(t), "order": len(t), "variance": v, "fraction": v / total if total > 0 else 0.0}
        for t, v in sorted(var.items(), key=lambda kv: (len(kv[0]), kv[0]))
    ]
    payload = {
        "command": "anova-demo",
        "seed": cfg.seed,
        "shape": list(space.shape),
        "mean": float(dec.components[()].flat[0]),
        "total_variance": total,
        "anova": anova_rows,
    }
    status = EXIT_OK
    if "c_additive" in obj:
        ca = obj["c_additive"]
        if not isinstance(ca, dict):
            raise ConfigurationError("$.c_additive: expected an object")
        C = SubsetCollection.from_dict({"n": space.n, **_require(ca, "collection", "$.c_additive")},
                                       "$.c_additive.collection")
        comps = _require(ca, "components", "$.c_additive")
        if not isinstance(comps, list):
            raise ConfigurationError("$.c_additive.components: expected a list")
        U = CAdditiveFunction(C, tuple(np.asarray(c, dtype=float) for c in comps))
        drops = []
        for mode, beta in (("uniform_r", None), ("natural_packing", natural_packing(C))):
            try:
                lhs, rhs = variance_drop_bound(U, space, beta)
                drops.append({"mode": mode, "lhs": lhs, "rhs": rhs, "satisfied": True})
            except VarianceDropViolation as exc:
                drops.append({"mode": mode, "satisfied": False, "reason": str(exc)})
                status = EXIT_VIOLATION
        payload["variance_drop"] = drops
    return Artifact(payload, anova_rows, ("subset", "order", "variance", "fraction"), status)


def cmd_pack_optimize(cfg: RunConfig, obj: dict) -> Artifact:
    body = _require(obj, "collection", "$")
    C = SubsetCollection.from_dict(body, "$.collection")
    c = _number_list(obj["objective"], "$.objective") if "objective" in obj else [1.0] * len(C)
    if len(c) != len(C):
        raise ConfigurationError(f"$.objective: {len(c)} entries for {len(C)} sets")
    best = optimize_packing_lp(C, c)
    nat = natural_packing(C)
    rows = [
        {"set": list(s), "objective": cs, "beta": b, "natural": nb}
        for s, cs, b, nb in zip(C.sets, c, best.beta, nat.beta)
    ]
    payload = {
        "command": "pack-optimize",
        "seed": cfg.seed,
        "collection": C.to_dict(),
        "r": C.r,
        "classification": classify(C)._asdict(),
        "packing": list(best.beta),
        "value": best.value(c),
        "natural_value": nat.value(c),
        "sets": rows,
    }
    return Artifact(payload, rows, ("set", "objective", "beta", "natural"), EXIT_OK)


DEFAULT_SCORE_PAIRS = (
    (Gaussian(0.0, 1.0), Gaussian(0.0, 1.0)),
    (GaussianMixture(((0.5, -1.0, 0.25), (0.5, 1.0, 0.25))), Gaussian(0.0, 1.0)),
    (Gaussian(0.0, 1.0), Uniform(0.0, 1.0)),
)


def cmd_score_check(cfg: RunConfig, obj: dict) -> Artifact:
    threshold = obj.get("threshold", SCORE_CHECK_THRESHOLD)
    if not isinstance(threshold, (int, float)) or isinstance(threshold, bool) or threshold <= 0:
        raise ConfigurationError("$.threshold: expected a positive number")
    if "pairs" in obj:
        raw = obj["pairs"]
        if not isinstance(raw, list):
            raise ConfigurationError("$.pairs: expected a list of [spec, spec] pairs")
        pairs = []
        for k, p in enumerate(raw):
            if not isinstance(p, list) or len(p) != 2:
                raise ConfigurationError(f"$.pairs[{k}]: expected a two-element list")
            pairs.append(tuple(spec_from_dict(s, f"$.pairs[{k}][{j}]") for j, s in enumerate(p)))
    else:
        pairs = list(DEFAULT_SCORE_PAIRS)
    rows = []
    for a, b in pairs:
        dev = score_convolution_check(build_density(a, cfg.grid), build_density(b, cfg.grid))
        rows.append({
            "first": a.family,
            "second": b.family,
            "deviation": dev,
            "threshold": float(threshold),
            "satisfied": dev < threshold,
            "specs": [a.to_dict(), b.to_dict()],
        })
    payload = {"command": "score-check", "seed": cfg.seed, "grid": _grid_dict(cfg.grid), "checks": rows}
    status = EXIT_OK if all(r["satisfied"] for r in rows) else EXIT_VIOLATION
    return Artifact(payload, rows, ("first", "second", "deviation", "threshold", "satisfied"), status)


HANDLERS = {
    "verify": cmd_verify,
    "clt-sweep": cmd_clt_sweep,
    "anova-demo": cmd_anova_demo,
    "pack-optimize": cmd_pack_optimize,
    "score-check": cmd_score_check,
}
NEEDS_INPUT = {"verify", "pack-optimize"}


def run(cfg: RunConfig, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        if cfg.command not in HANDLERS:
            raise ConfigurationError(f"unknown command {cfg.command!r}")
        if cfg.command in NEEDS_INPUT and cfg.input is None:
            raise ConfigurationError(f"{cfg.command} needs --input")
        if cfg.format not in ("json", "csv"):
            raise ConfigurationError(f"unknown format {cfg.format!r}")
        artifact = HANDLERS[cfg.command](cfg, load_input(cfg.input))
    except (InfosumError, ValueError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_ERROR
    text = render_json(artifact.payload) if cfg.format == "json" else render_csv(
        artifact.rows, artifact.columns, cfg.seed
    )
    if cfg.output is None:
        stdout.write(text)
    else:
        Path(cfg.output).write_text(text)
    return artifact.status


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with 1; status 2 is reserved for violated inequalities."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="infosum", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--input", type=Path, help="JSON input file")
        p.add_argument("--output", type=Path, help="write the artifact here instead of stdout")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--grid-points", type=int, default=GridConfig.points)
        p.add_argument("--grid-sigmas", type=float, default=GridConfig.half_width_sigmas)
        p.add_argument("--tol", type=float, default=TOL_REL, help="relative tolerance (entropy power, 1/I)")
        p.add_argument("--tol-nats", type=float, default=TOL_NATS, help="absolute tolerance for entropies")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--n-max", type=int, default=None, help="clt-sweep: largest n")
        p.add_argument("--presmooth", type=float, default=None, help="clt-sweep: Gaussian variance added first")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        grid = GridConfig(half_width_sigmas=args.grid_sigmas, points=args.grid_points)
    except InfosumError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    cfg = RunConfig(
        command=args.command,
        input=args.input,
        output=args.output,
        format=args.format,
        grid=grid,
        tol_rel=args.tol,
        tol_nats=args.tol_nats,
        seed=args.seed,
        n_max=args.n_max,
        presmooth=args.presmooth,
    )
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
