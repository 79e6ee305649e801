"""File formats, the random-system generator, and the command-line surface.

JSON documents are the canonical interchange format (the sink is stored
explicitly as the last row/column so files are self-contained); CSV is a
convenience importer for a bare liability matrix plus a one-column asset
sidecar. All reports are emitted as JSON with a fixed key order and floats
rendered to 17 significant digits, so identical invocations produce
byte-identical output.
"""
from __future__ import annotations

import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numpy.typing import NDArray

from .clearing import (
    ClearingSolution,
    fictitious_default_sequence,
    picard_clearing_oracle,
    systemic_loss,
)
from .equivalence import (
    default_tolerance,
    verify_full_shock_equivalence,
    verify_relaxed_equivalence,
)
from .errors import (
    ClearnetError,
    DimensionMismatch,
    InvalidInterpolation,
    NegativeEntry,
    NonzeroDiagonal,
    NonzeroSinkRow,
    ParseError,
    PreconditionViolated,
    ValidationError,
)
from .net_model import (
    ClearingParams,
    FinancialSystem,
    build_system,
    relative_claims,
    total_liabilities,
)
from .centrality import beta_vector, generalized_katz
from .shocks import full_default_shock, relaxed_shock_search, shocked_system
from .spectral import check_invertibility

__all__ = [
    "SystemDocument",
    "dumps_canonical",
    "load_system",
    "load_document",
    "save_document",
    "generate_random_system",
    "cli_main",
    "main",
]

SINK_LABEL = "SINK"


# --------------------------------------------------------------------------
# canonical JSON
# --------------------------------------------------------------------------

def _fmt_float(x: float) -> str:
    if not np.isfinite(x):
        raise ValueError(f"cannot serialize non-finite value {x}")
    return format(float(x), ".17g")


def _emit(value, out: list) -> None:
    if isinstance(value, dict):
        out.append("{")
        for i, (k, v) in enumerate(value.items()):
            if i:
                out.append(", ")
            out.append(json.dumps(str(k)))
            out.append(": ")
            _emit(v, out)
        out.append("}")
    elif isinstance(value, (list, tuple, np.ndarray)):
        out.append("[")
        for i, v in enumerate(np.asarray(value).tolist() if isinstance(value, np.ndarray) else value):
            if i:
                out.append(", ")
            _emit(v, out)
        out.append("]")
    elif isinstance(value, (bool, np.bool_)):
        out.append("true" if value else "false")
    elif isinstance(value, (int, np.integer)):
        out.append(str(int(value)))
    elif isinstance(value, (float, np.floating)):
        out.append(_fmt_float(float(value)))
    elif isinstance(value, str):
        out.append(json.dumps(value))
    elif value is None:
        out.append("null")
    else:
        raise TypeError(f"cannot serialize {type(value).__name__}")


def dumps_canonical(value) -> str:
    """Deterministic JSON: fixed key order, 17-significant-digit floats."""
    out: list = []
    _emit(value, out)
    return "".join(out)


# --------------------------------------------------------------------------
# documents
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SystemDocument:
    """On-disk representation of a financial system.

    ``liabilities`` is row-major with the sink last; ``names`` labels all
    nodes and always ends with ``"SINK"``. Documents round-trip losslessly
    through JSON (floats keep 17 significant digits).
    """

    liabilities: tuple
    pre_shock_assets: tuple
    external_assets: tuple | None = None
    names: tuple | None = None

    @classmethod
    def from_system(
        cls, system: FinancialSystem, names=None
    ) -> "SystemDocument":
        if names is None:
            names = tuple(f"B{i + 1}" for i in range(system.n_banks)) + (SINK_LABEL,)
        else:
            names = tuple(str(n) for n in names)
        doc = cls(
            liabilities=tuple(tuple(float(x) for x in row) for row in system.liabilities),
            pre_shock_assets=tuple(float(x) for x in system.pre_shock_assets),
            external_assets=tuple(float(x) for x in system.external_assets),
            names=names,
        )
        doc.validate()
        return doc

    def validate(self) -> None:
        n = len(self.liabilities)
        if self.names is not None:
            if len(self.names) != n:
                raise ValidationError(
                    f"names has {len(self.names)} entries for {n} nodes"
                )
            if self.names[-1] != SINK_LABEL:
                raise ValidationError(
                    f'last label must be "{SINK_LABEL}", got "{self.names[-1]}"'
                )

    def to_system(self) -> FinancialSystem:
        return build_system(
            np.asarray(self.liabilities, dtype=float),
            np.asarray(self.pre_shock_assets, dtype=float),
            None
            if self.external_assets is None
            else np.asarray(self.external_assets, dtype=float),
        )

    def to_dict(self) -> dict:
        d: dict = {}
        if self.names is not None:
            d["names"] = list(self.names)
        d["liabilities"] = [list(row) for row in self.liabilities]
        d["pre_shock_assets"] = list(self.pre_shock_assets)
        if self.external_assets is not None:
            d["external_assets"] = list(self.external_assets)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "SystemDocument":
        if not isinstance(data, dict):
            raise ValidationError("document root must be a JSON object")
        if "liabilities" not in data:
            raise ValidationError("liabilities required")
        if "pre_shock_assets" not in data:
            raise ValidationError("pre_shock_assets required")
        try:
            liabilities = tuple(
                tuple(float(x) for x in row) for row in data["liabilities"]
            )
            assets = tuple(float(x) for x in data["pre_shock_assets"])
            external = data.get("external_assets")
            if external is not None:
                external = tuple(float(x) for x in external)
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"non-numeric entry in document: {exc}") from exc
        names = data.get("names")
        doc = cls(
            liabilities=liabilities,
            pre_shock_assets=assets,
            external_assets=external,
            names=None if names is None else tuple(str(x) for x in names),
        )
        doc.validate()
        return doc


def parse_document(text: str) -> SystemDocument:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}",
            line=exc.lineno,
            column=exc.colno,
        ) from exc
    return SystemDocument.from_dict(data)


def serialize_document(doc: SystemDocument) -> str:
    return dumps_canonical(doc.to_dict())


def load_document(path) -> SystemDocument:
    return parse_document(Path(path).read_text())


def save_document(doc: SystemDocument, path) -> None:
    Path(path).write_text(serialize_document(doc) + "\n")


# --------------------------------------------------------------------------
# CSV import
# --------------------------------------------------------------------------

def _csv_rows(path) -> list[tuple[int, list[str]]]:
    rows = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        if line.strip() == "":
            continue
        rows.append((lineno, [cell.strip() for cell in line.split(",")]))
    if not rows:
        raise ParseError(f"{path}: file is empty")
    return rows


def _parse_cell(cell: str, lineno: int, column: int, path) -> float:
    try:
        return float(cell)
    except ValueError:
        raise ParseError(
            f"{path}: line {lineno}, column {column}: {cell!r} is not a number",
            line=lineno,
            column=column,
        ) from None


def _load_csv_matrix(path):
    rows = _csv_rows(path)
    names = None
    first = rows[0][1]
    try:
        [float(c) for c in first]
    except ValueError:
        names = tuple(first)
        rows = rows[1:]
        if not rows:
            raise ParseError(f"{path}: header but no data rows")
    width = len(rows[0][1])
    matrix = []
    for lineno, cells in rows:
        if len(cells) != width:
            raise ParseError(
                f"{path}: line {lineno} has {len(cells)} fields, expected {width}",
                line=lineno,
            )
        matrix.append(
            [_parse_cell(c, lineno, j + 1, path) for j, c in enumerate(cells)]
        )
    return np.asarray(matrix, dtype=float), names


def _load_csv_assets(path) -> NDArray:
    rows = _csv_rows(path)
    try:
        float(rows[0][1][0])
    except ValueError:
        rows = rows[1:]   # header cell
        if not rows:
            raise ParseError(f"{path}: header but no data rows")
    values = []
    for lineno, cells in rows:
        if len(cells) != 1:
            raise ParseError(
                f"{path}: line {lineno} has {len(cells)} fields, expected 1 "
                "(one asset value per line)",
                line=lineno,
            )
        values.append(_parse_cell(cells[0], lineno, 1, path))
    return np.asarray(values, dtype=float)


def load_system(path, format: str | None = None, assets_path=None) -> FinancialSystem:
    """Load a :class:`FinancialSystem` from a JSON document or CSV matrix.

    CSV requires the asset sidecar (one value per line); JSON documents are
    self-contained. ``format`` is inferred from the file suffix when not
    given. Parse failures raise :class:`ParseError` with the offending
    location; semantic failures raise :class:`ValidationError` or the
    model-validation errors from :func:`build_system`.
    """
    fmt = format or ("csv" if str(path).lower().endswith(".csv") else "json")
    if fmt == "json":
        return load_document(path).to_system()
    if fmt == "csv":
        matrix, _names = _load_csv_matrix(path)
        if assets_path is None:
            raise ValidationError(
                "pre_shock_assets required: CSV input needs an asset sidecar "
                "(--assets FILE)"
            )
        assets = _load_csv_assets(assets_path)
        return build_system(matrix, assets)
    raise ValidationError(f"unknown format {fmt!r} (expected 'csv' or 'json')")


# --------------------------------------------------------------------------
# random systems
# --------------------------------------------------------------------------

def generate_random_system(
    seed: int, n_banks: int, density: float, weight_scale: float = 1.0
) -> FinancialSystem:
    """Seeded random obligation network satisfying every model invariant.

    The bank block is a directed Erdos-Renyi graph with log-normal weights.
    Each bank's liability to the sink is set to its total in-system claims
    plus ``u * (1 + interbank liabilities)`` with ``u ~ U(0.1, 1)``, which
    keeps every bank's claims strictly below its liabilities (the
    precondition of the full-default shock). Pre-shock assets are drawn so
    every bank starts solvent; the sink holds one unit.
    """
    if n_banks < 1:
        raise ValueError(f"n_banks must be at least 1, got {n_banks}")
    if not 0.0 < density <= 1.0:
        raise ValueError(f"density must lie in (0, 1], got {density}")
    rng = np.random.default_rng(seed)
    n = n_banks
    N = n + 1

    L = np.zeros((N, N))
    edges = rng.random((n, n)) < density
    np.fill_diagonal(edges, False)
    weights = weight_scale * rng.lognormal(mean=0.0, sigma=1.0, size=(n, n))
    L[:n, :n] = np.where(edges, weights, 0.0)

    claims = L[:n, :n].sum(axis=0)
    interbank = L[:n, :n].sum(axis=1)
    u = rng.uniform(0.1, 1.0, size=n)
    L[:n, N - 1] = claims + u * (1.0 + interbank)

    l = L.sum(axis=1)
    o = np.empty(N)
    o[:n] = (l[:n] - claims) + rng.uniform(0.0, 1.0, size=n) * l[:n]
    o[N - 1] = 1.0
    return build_system(L, o)


# --------------------------------------------------------------------------
# reports
# --------------------------------------------------------------------------

def _input_echo(path, system: FinancialSystem, names=None) -> dict:
    doc = SystemDocument.from_system(system, names=names)
    echo = {"path": None if path is None else str(path)}
    echo.update(doc.to_dict())
    return echo


def _params_dict(params: ClearingParams, **extra) -> dict:
    d = {
        "r": params.r if np.isscalar(params.r) else np.asarray(params.r),
        "r_a": params.r_a,
    }
    d.update(extra)
    return d


def _clearing_dict(
    system: FinancialSystem, params: ClearingParams, solution: ClearingSolution
) -> dict:
    oracle = picard_clearing_oracle(system, params)
    banks = system.banks
    oracle_gap = float(np.abs(oracle - solution.payments)[banks].max(initial=0.0))
    return {
        "payments": solution.payments,
        "defaults": [bool(f) for f in solution.defaults.flags],
        "iterations": solution.iterations,
        "residual": solution.residual,
        "oracle_gap": oracle_gap,
        "uniqueness_ok": solution.uniqueness_ok,
    }


def _scenario_dict(scenario) -> dict:
    return {
        "kind": scenario.kind.value,
        "interpolation": scenario.interpolation,
        "shock": scenario.shock,
        "post_shock_assets": scenario.post_shock_assets,
        "search_steps": scenario.search_steps,
        "max_steps": scenario.max_steps,
    }


def _spectral_dict(system: FinancialSystem, r: float | None) -> dict:
    C = relative_claims(system).matrix
    ok, report = check_invertibility(C, 1.0 if r is None else r, has_sink=True)
    return {
        "radius_estimate": report.radius_estimate,
        "collatz_wielandt_lower": report.collatz_wielandt_lower,
        "invertible_for_r": report.invertible_for_r,
        "checked_r": r,
        "invertible_at_checked_r": None if r is None else ok,
    }


# --------------------------------------------------------------------------
# pretty tables
# --------------------------------------------------------------------------

def _table(headers: list[str], rows: list[list[str]]) -> str:
    widths = [
        max(len(h), *(len(r[i]) for r in rows)) if rows else len(h)
        for i, h in enumerate(headers)
    ]
    def render(cells):
        return "  ".join(c.rjust(w) for c, w in zip(cells, widths))
    lines = [render(headers), render(["-" * w for w in widths])]
    lines.extend(render(r) for r in rows)
    return "\n".join(lines)


def _num(x: float) -> str:
    return f"{x:.6g}"


def _pretty_clearing(report: dict) -> str:
    names = report["input"].get("names") or []
    clearing = report["clearing"]
    l = np.asarray(report["total_liabilities"], dtype=float)
    rows = []
    for i, name in enumerate(names):
        rows.append(
            [
                name,
                _num(l[i]),
                _num(float(report["input"]["external_assets"][i])),
                _num(float(clearing["payments"][i])),
                "yes" if clearing["defaults"][i] else "no",
                _num(float(report["systemic_loss"][i])),
            ]
        )
    head = _table(["node", "owes", "assets", "pays", "default", "loss"], rows)
    tail = (
        f"iterations={clearing['iterations']}  residual={clearing['residual']:.3e}  "
        f"oracle_gap={clearing['oracle_gap']:.3e}"
    )
    return head + "\n" + tail


def _pretty_kv(pairs: list[tuple[str, str]]) -> str:
    width = max(len(k) for k, _ in pairs)
    return "\n".join(f"{k.ljust(width)}  {v}" for k, v in pairs)


# --------------------------------------------------------------------------
# CLI commands
# --------------------------------------------------------------------------

def _cmd_clear(args) -> int:
    system = load_system(args.input, args.format, args.assets)
    params = ClearingParams(r=args.r, r_a=args.ra)
    solution = fictitious_default_sequence(system, params)
    r_scalar = float(np.max(params.recovery_vector(system.node_count)))
    report = {
        "command": "clear",
        "input": _input_echo(args.input, system),
        "parameters": _params_dict(params),
        "total_liabilities": total_liabilities(system),
        "clearing": _clearing_dict(system, params, solution),
        "systemic_loss": systemic_loss(solution, total_liabilities(system)),
        "spectral": _spectral_dict(system, r_scalar),
    }
    print(_pretty_clearing(report) if args.pretty else dumps_canonical(report))
    return 0


def _cmd_shock(args) -> int:
    system = load_system(args.input, args.format, args.assets)
    params = ClearingParams(r=args.r, r_a=args.ra)
    if args.kind == "full":
        if args.m is None:
            raise ValidationError("--m is required for --kind full")
        scenario = full_default_shock(system, args.m)
    else:
        scenario = relaxed_shock_search(system, params, max_steps=args.max_steps)
    shocked = shocked_system(system, scenario)
    solution = fictitious_default_sequence(shocked, params)
    report = {
        "command": "shock",
        "input": _input_echo(args.input, system),
        "parameters": _params_dict(params, m=args.m, kind=scenario.kind.value),
        "scenario": _scenario_dict(scenario),
        "total_liabilities": total_liabilities(system),
        "clearing": _clearing_dict(shocked, params, solution),
        "systemic_loss": systemic_loss(solution, total_liabilities(system)),
    }
    if args.pretty:
        report["input"]["external_assets"] = list(scenario.post_shock_assets)
        print(_pretty_clearing(report))
    else:
        print(dumps_canonical(report))
    return 0


def _cmd_katz(args) -> int:
    system = load_system(args.input, args.format, args.assets)
    beta = beta_vector(system, args.r, args.m)
    result = generalized_katz(relative_claims(system).matrix, args.r, beta, m=args.m)
    report = {
        "command": "katz",
        "input": _input_echo(args.input, system),
        "parameters": {"r": args.r, "m": args.m},
        "beta": beta,
        "sigma": result.sigma,
        "residual": result.residual,
    }
    if args.pretty:
        names = report["input"].get("names") or []
        rows = [
            [names[i], _num(float(beta[i])), _num(float(result.sigma[i]))]
            for i in range(len(names))
        ]
        print(_table(["node", "beta", "sigma"], rows))
    else:
        print(dumps_canonical(report))
    return 0


def _cmd_verify(args) -> int:
    system = load_system(args.input, args.format, args.assets)
    params = ClearingParams(r=args.r)
    tol = args.tol if args.tol is not None else default_tolerance(system)
    full = verify_full_shock_equivalence(system, params, args.m, tol=tol)

    relaxed_dict: dict
    try:
        relaxed = verify_relaxed_equivalence(system, params, args.m)
        relaxed_dict = {
            "max_abs_gap": relaxed.max_abs_gap,
            "printed_form_gap": relaxed.printed_form_gap,
            "all_defaulted": relaxed.all_defaulted,
            "passed": relaxed.passed,
        }
        if relaxed.printed_form_gap is not None and relaxed.printed_form_gap > tol:
            print(
                "warning: alternative relaxed closed form differs from the "
                f"certified solution by {relaxed.printed_form_gap:.6g} "
                "(informational)",
                file=sys.stderr,
            )
    except ClearnetError as exc:
        relaxed_dict = {"error": f"{type(exc).__name__}: {exc}"}

    report = {
        "command": "verify",
        "input": _input_echo(args.input, system),
        "parameters": {"r": args.r, "m": args.m, "tol": tol},
        "full_shock": {
            "max_abs_gap": full.max_abs_gap,
            "one_step": full.one_step,
            "all_defaulted": full.all_defaulted,
            "details": full.details,
            "passed": full.passed,
        },
        "relaxed": relaxed_dict,
        "passed": full.passed,
    }
    if args.pretty:
        pairs = [
            ("full-shock max gap", _num(full.max_abs_gap)),
            ("one-step convergence", str(full.one_step)),
            ("all nodes defaulted", str(full.all_defaulted)),
            ("tolerance", _num(tol)),
            ("passed", str(full.passed)),
        ]
        if "max_abs_gap" in relaxed_dict:
            pairs.append(("relaxed candidate gap", _num(relaxed_dict["max_abs_gap"])))
            pairs.append(
                ("relaxed printed-form gap", _num(relaxed_dict["printed_form_gap"]))
            )
        else:
            pairs.append(("relaxed", relaxed_dict["error"]))
        print(_pretty_kv(pairs))
    else:
        print(dumps_canonical(report))
    return 0 if full.passed else 2


def _cmd_gen(args) -> int:
    system = generate_random_system(
        args.seed, args.n, args.density, weight_scale=args.weight_scale
    )
    doc = SystemDocument.from_system(system)
    save_document(doc, args.out)
    report = {
        "command": "gen",
        "out": str(args.out),
        "seed": args.seed,
        "n_banks": args.n,
        "density": args.density,
        "weight_scale": args.weight_scale,
        "node_count": system.node_count,
    }
    print(dumps_canonical(report))
    return 0


def _cmd_spectral(args) -> int:
    system = load_system(args.input, args.format, args.assets)
    report = {
        "command": "spectral",
        "input": _input_echo(args.input, system),
        "spectral": _spectral_dict(system, args.r),
    }
    if args.pretty:
        section = report["spectral"]
        pairs = [
            ("radius estimate", _num(section["radius_estimate"])),
            ("certified lower bound", _num(section["collatz_wielandt_lower"])),
            ("invertible for r in", section["invertible_for_r"]),
        ]
        if args.r is not None:
            pairs.append(
                (f"invertible at r={args.r}", str(section["invertible_at_checked_r"]))
            )
        print(_pretty_kv(pairs))
    else:
        print(dumps_canonical(report))
    return 0


def _add_io_args(sub) -> None:
    sub.add_argument("--input", required=True, help="system file (JSON or CSV)")
    sub.add_argument("--format", choices=["csv", "json"], default=None)
    sub.add_argument("--assets", default=None, help="asset sidecar CSV (one value per line)")
    sub.add_argument("--pretty", action="store_true", help="human-readable table output")


def _build_parser():
    import argparse

    parser = argparse.ArgumentParser(
        prog="clearnet",
        description="Clearing payment vectors and Katz-type centrality for "
        "financial obligation networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("clear", help="solve the clearing model")
    _add_io_args(p)
    p.add_argument("--r", type=float, default=1.0, help="interbank recovery rate")
    p.add_argument("--ra", type=float, default=1.0, help="external-asset recovery rate")
    p.set_defaults(func=_cmd_clear)

    p = sub.add_parser("shock", help="build a shock scenario and clear under it")
    _add_io_args(p)
    p.add_argument("--kind", choices=["full", "relaxed"], required=True)
    p.add_argument("--m", type=float, default=None, help="interpolation coefficient")
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--ra", type=float, default=1.0)
    p.add_argument("--max-steps", type=int, default=1000, dest="max_steps")
    p.set_defaults(func=_cmd_shock)

    p = sub.add_parser("katz", help="generalized Katz centrality")
    _add_io_args(p)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--m", type=float, required=True)
    p.set_defaults(func=_cmd_katz)

    p = sub.add_parser("verify", help="clearing-vs-centrality equivalence check")
    _add_io_args(p)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--m", type=float, required=True)
    p.add_argument("--tol", type=float, default=None)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("gen", help="generate a seeded random system")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--n", type=int, required=True, help="number of banks")
    p.add_argument("--density", type=float, required=True)
    p.add_argument("--weight-scale", type=float, default=1.0, dest="weight_scale")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("spectral", help="radius and invertibility report")
    _add_io_args(p)
    p.add_argument("--r", type=float, default=None)
    p.set_defaults(func=_cmd_spectral)

    return parser


def cli_main(argv=None) -> int:
    """Run the CLI; returns the process exit code.

    0 success / equivalence passed; 1 I/O, parse, or validation problems;
    2 equivalence failure or a numerical failure (singular system, search
    exhausted); 3 violated shock preconditions.
    """
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except (PreconditionViolated, InvalidInterpolation) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (
        ParseError,
        ValidationError,
        OSError,
        NegativeEntry,
        DimensionMismatch,
        NonzeroSinkRow,
        NonzeroDiagonal,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ClearnetError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_main())
