"""``selfsim`` command line: catalog, validate, tile, verify, density.

Exit codes: 0 success, 1 semantic failure, 2 usage or parse failure.
Reports are tab-separated; figures are written with matplotlib.
"""

from __future__ import annotations

import argparse
import configparser
import json
import os
import sys
from collections import Counter
from dataclasses import dataclass, replace
from pathlib import Path

from . import __version__
from .addresses import (
    DEFAULT_FRONTIER_CAP,
    LevelTooLarge,
    PrefixExhausted,
    StreamSpecError,
    frontier_size,
    parse_address,
    weight,
)
from .catalog import DEFAULT_PARAMS, NON_EXAMPLES, catalog, entries, parse_name, raw_configuration
from .density import TooFewTiles, build_matrix, empirical_densities, limit_densities
from .geometry import GeometryError, Polygon, Similitude, Tolerance
from .pairs import (
    BadParams,
    ExponentFailure,
    GeneratingPair,
    PairError,
    SubdivisionFailure,
    UnknownName,
    dumps_pair,
    validate_pair,
)
from .render import RenderStyle, density_figure, svg_document, tiling_figure
from .tiling import (
    DEFAULT_MAX_K,
    DEFAULT_TILE_CAP,
    Disk,
    TilingError,
    auto_window,
    check_nested,
    check_self_similar,
    dumps_tiling,
    generate_window,
    partition_report,
    patch,
    prototiles,
    quasiperiodicity_probe,
    stream_for,
)


class UsageError(Exception):
    """Bad input: exit code 2."""


class Failure(Exception):
    """Semantic failure: exit code 1."""


@dataclass(frozen=True)
class Settings:
    tol: Tolerance = Tolerance()
    max_k: int = DEFAULT_MAX_K
    tile_cap: int = DEFAULT_TILE_CAP
    frontier_cap: int = DEFAULT_FRONTIER_CAP
    threads: int | None = None
    style: RenderStyle = RenderStyle()


_CONFIG_KEYS = {"eps_len", "eps_area", "max_k", "tile_cap", "frontier_cap", "threads", "palette", "stroke_width", "background"}


def load_settings(path: str | None) -> Settings:
    """Read an optional ``key = value`` file; unknown keys are a usage error."""
    settings = Settings()
    if path is None:
        return settings
    parser = configparser.ConfigParser()
    try:
        parser.read_string("[selfsim]\n" + Path(path).read_text())
    except (OSError, configparser.Error) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    raw = dict(parser["selfsim"])
    unknown = set(raw) - _CONFIG_KEYS
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    try:
        tol = Tolerance(
            float(raw.get("eps_len", settings.tol.eps_len)), float(raw.get("eps_area", settings.tol.eps_area))
        )
        style = settings.style
        if "palette" in raw:
            style = replace(style, palette=tuple(c.strip() for c in raw["palette"].split(",") if c.strip()))
        if "stroke_width" in raw:
            style = replace(style, stroke_width=float(raw["stroke_width"]))
        if "background" in raw:
            style = replace(style, background=raw["background"])
        return Settings(
            tol=tol,
            max_k=int(raw.get("max_k", settings.max_k)),
            tile_cap=int(raw.get("tile_cap", settings.tile_cap)),
            frontier_cap=int(raw.get("frontier_cap", settings.frontier_cap)),
            threads=int(raw["threads"]) if "threads" in raw else None,
            style=style,
        )
    except ValueError as exc:
        raise UsageError(f"bad config value: {exc}") from exc


def worker_count(settings: Settings) -> int:
    """Config threads (default: CPU count), capped by SELFSIM_THREADS when it is set."""
    wanted = settings.threads or os.cpu_count() or 1
    env = os.environ.get("SELFSIM_THREADS")
    if env is None:
        return max(1, wanted)
    try:
        cap = int(env)
    except ValueError as exc:
        raise UsageError(f"SELFSIM_THREADS must be an integer, got {env!r}") from exc
    return max(1, min(wanted, cap))


def _read_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _is_file(target: str) -> bool:
    return target.endswith(".json") or os.path.sep in target or os.path.exists(target)


def _configuration(target: str, settings: Settings):
    """Polygon, maps and label from a catalog name or a pair JSON file (not yet certified)."""
    if _is_file(target):
        data = _read_json(target)
        try:
            poly = Polygon(data["vertices"], tol=settings.tol)
            maps = [Similitude(m["a"], m["b"], m["c"], m["d"], m["tx"], m["ty"]) for m in data["maps"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"malformed pair file {target}: {exc}") from exc
        return poly, maps, str(data.get("name", Path(target).stem))
    try:
        name, params = parse_name(target)
        if name in DEFAULT_PARAMS and not params:
            params = DEFAULT_PARAMS[name]
        poly, maps = raw_configuration(name, params)
    except (UnknownName, BadParams) as exc:
        raise UsageError(str(exc)) from exc
    label = f"{name}({','.join(map(str, params))})" if params else name
    return poly, maps, label


def load_pair(target: str, settings: Settings) -> GeneratingPair:
    if not _is_file(target):
        try:
            name, _ = parse_name(target)
            if name in NON_EXAMPLES:
                raise Failure(f"{name} is not a generating pair")
            return catalog(target, tol=settings.tol)
        except (UnknownName, BadParams) as exc:
            raise UsageError(str(exc)) from exc
        except PairError as exc:
            raise Failure(str(exc)) from exc
    poly, maps, label = _configuration(target, settings)
    try:
        pair, _ = validate_pair(poly, maps, settings.tol, name=label)
    except PairError as exc:
        raise Failure(f"{target}: {type(exc).__name__}: {exc}") from exc
    return pair


def _stream(pair: GeneratingPair, spec: str):
    try:
        return stream_for(pair, spec)
    except StreamSpecError as exc:
        raise UsageError(str(exc)) from exc


def _floats(text: str, count: int, what: str) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"{what} must be {count} comma-separated numbers") from exc
    if len(vals) != count:
        raise UsageError(f"{what} must be {count} comma-separated numbers")
    return vals


def _window(args, pair, theta, settings) -> Disk | None:
    if getattr(args, "window", None):
        cx, cy, R = _floats(args.window, 3, "--window")
        if R <= 0:
            raise UsageError("window radius must be positive")
        return Disk.of(cx, cy, R)
    if getattr(args, "radius", None) is not None:
        if args.radius <= 0:
            raise UsageError("radius must be positive")
        return auto_window(pair, theta, args.radius, args.max_k or settings.max_k)
    return None


def _patch_cap(settings: Settings) -> int:
    return min(settings.frontier_cap, settings.tile_cap)


def _auto_level(pair, theta, budget: int, extra: int = 0) -> int:
    """Deepest level ``k`` whose patch at ``k + extra`` has at most ``budget`` tiles (at least 1)."""
    limit = theta.max_length()
    k = 1
    while limit is None or k + 1 + extra <= limit:
        n = weight(theta.prefix(k + 1 + extra), pair)[0]
        if frontier_size(pair.exponents, n) > budget:
            break
        k += 1
    return k


def _emit(line: str) -> None:
    print(line)


# ---------------------------------------------------------------------------
# commands


def cmd_catalog(args, settings: Settings) -> int:
    if args.export:
        poly, maps, label = _configuration(args.export, settings)
        try:
            pair, _ = validate_pair(poly, maps, settings.tol, name=label)
            text = dumps_pair(pair)
        except ExponentFailure:
            # non-examples are written without exponents so `validate` can reject them
            data = {
                "name": label,
                "vertices": [[x, y] for x, y in poly.vertices],
                "maps": [dict(zip("abcd", f.as_tuple()[:4]), tx=f.tx, ty=f.ty) for f in maps],
            }
            text = json.dumps(data, indent=2)
        if args.out:
            Path(args.out).write_text(text + "\n")
        else:
            _emit(text)
        return 0
    _emit("name\tN\texponents\ts\treconstructed\tparameters")
    notes = {"right-triangle": "a>b>=1", "trapezoid": "a>b>=1, a and b of the same parity"}
    for label in entries():
        pair = catalog(label, tol=settings.tol)
        name, _ = parse_name(label)
        exps = ",".join(map(str, pair.exponents))
        _emit(f"{label}\t{pair.N}\t{exps}\t{pair.scale:.10f}\t{str(pair.reconstructed).lower()}\t{notes.get(name, '-')}")
    return 0


def cmd_validate(args, settings: Settings) -> int:
    poly, maps, label = _configuration(args.target, settings)
    _emit(f"pair\t{label}")
    try:
        pair, report = validate_pair(poly, maps, settings.tol, name=label)
    except ExponentFailure as exc:
        _emit("passed\tfalse")
        _emit(f"reason\t{type(exc).__name__}: {exc}")
        return 1
    except SubdivisionFailure as exc:
        for line in exc.report.lines():
            _emit(line.replace("\tFalse", "\tfalse").replace("\tTrue", "\ttrue"))
        return 1
    _emit(f"exponents\t{','.join(map(str, pair.exponents))}")
    _emit(f"s\t{pair.scale:.15g}")
    for line in report.lines():
        _emit(line.replace("\tFalse", "\tfalse").replace("\tTrue", "\ttrue"))
    return 0


def _write_outputs(pair, tiling, outs, style):
    for out in outs:
        suffix = Path(out).suffix.lower()
        if suffix == ".svg":
            Path(out).write_text(svg_document(tiling.tiles, style))
        elif suffix == ".json":
            Path(out).write_text(dumps_tiling(pair, tiling) + "\n")
        else:
            raise UsageError(f"--out must end in .svg or .json, got {out}")


def cmd_tile(args, settings: Settings) -> int:
    pair = load_pair(args.pair, settings)
    theta = _stream(pair, args.theta)
    style = settings.style
    if not style.covers(pair.order):
        raise UsageError(f"palette has {len(style.palette)} colours, need {pair.order}")
    for out in args.out:
        if Path(out).suffix.lower() not in (".svg", ".json"):
            raise UsageError(f"--out must end in .svg or .json, got {out}")
    window = _window(args, pair, theta, settings)
    workers = worker_count(settings)
    if window is None:
        tiling = patch(pair, theta, args.level or 1, cap=_patch_cap(settings), workers=workers)
        _emit(f"level\t{tiling.level}")
    else:
        tiling = generate_window(
            pair, theta, window, args.max_k or settings.max_k, settings.tile_cap, workers, settings.tol
        )
        _emit(f"window\t{window.center.x:.9g},{window.center.y:.9g},{window.radius:.9g}")
        _emit(f"level\t{tiling.level}")
        _emit(f"covered\t{str(tiling.covered).lower()}")
    _emit(f"tiles\t{len(tiling.tiles)}")
    counts = Counter(t.size_class for t in tiling.tiles)
    for c in range(pair.order):
        _emit(f"class_{c}\t{counts.get(c, 0)}")
    if tiling.tiles:
        _write_outputs(pair, tiling, args.out, style)
        if args.figure:
            tiling_figure(tiling.tiles, args.figure, style, f"{pair.name}  {theta.spec()}")
    if window is not None and args.require_covered and not tiling.covered:
        print("error: window not covered", file=sys.stderr)
        return 1
    return 0


def _check_line(name: str, ok: bool, detail: str) -> str:
    return f"{name}\t{'pass' if ok else 'fail'}\t{detail}"


def cmd_verify(args, settings: Settings) -> int:
    pair = load_pair(args.pair, settings)
    theta = _stream(pair, args.theta)
    results: list[bool] = []
    tol = settings.tol

    if args.suite == "partition":
        k = args.level or _auto_level(pair, theta, 5_000)
        p = patch(pair, theta, k, cap=_patch_cap(settings), workers=worker_count(settings))
        rep = partition_report(p.tiles, p.support.area)
        ok = rep.passed()
        results.append(ok)
        _emit(_check_line(f"partition_level_{k}", ok, f"tiles={rep.tiles} area_defect={rep.area_defect:.3e} max_overlap={rep.max_overlap:.3e}"))
    elif args.suite == "nesting":
        for k in range(1, (args.level or min(6, _auto_level(pair, theta, 20_000, extra=1))) + 1):
            ok = check_nested(pair, theta, k, tol)
            results.append(ok)
            _emit(_check_line(f"nested_{k}_in_{k + 1}", ok, ""))
    elif args.suite == "selfsim":
        if args.alpha:
            alpha = parse_address(args.alpha)
        elif theta.kind == "periodic":
            alpha = theta.word
        else:
            raise UsageError("selfsim needs a periodic stream or --alpha")
        depth = args.level or min(len(alpha) + 4, _auto_level(pair, theta, 20_000, extra=len(alpha)))
        ok = check_self_similar(pair, alpha, depth, theta, tol)
        results.append(ok)
        _emit(_check_line("self_similar", ok, f"alpha={''.join(map(str, alpha))} depth={depth}"))
    elif args.suite == "order":
        k = args.level or _auto_level(pair, theta, 2_000)
        p = patch(pair, theta, k, cap=_patch_cap(settings), workers=worker_count(settings))
        proto = prototiles(p, tol)
        ok = proto.order == pair.order
        results.append(ok)
        _emit(_check_line("order", ok, f"classes={proto.order} expected={pair.order} level={k} tiles={len(p)}"))
        for i, (rep, count) in enumerate(zip(proto.representatives, proto.counts)):
            _emit(f"prototile_{i}\tarea={rep.area:.9g}\tcount={count}")
    elif args.suite == "quasi":
        k = args.level or 2
        disk = _window(args, pair, theta, settings) or auto_window(pair, theta, 6.0, args.max_k or settings.max_k)
        motions = quasiperiodicity_probe(
            pair, theta, k, disk.radius, disk.center, args.max_k or settings.max_k, tol
        )
        ok = len(motions) >= 2
        results.append(ok)
        _emit(_check_line("quasiperiodic", ok, f"motions={len(motions)} level={k} radius={disk.radius:g}"))
    return 0 if all(results) else 1


def cmd_density(args, settings: Settings) -> int:
    pair = load_pair(args.pair, settings)
    sm = build_matrix(pair)
    limit = limit_densities(sm)
    empirical = None
    if args.theta:
        theta = _stream(pair, args.theta)
        window = _window(args, pair, theta, settings)
        if window is None:
            raise UsageError("an empirical count needs --window or --radius")
        tiling = generate_window(
            pair, theta, window, args.max_k or settings.max_k, settings.tile_cap, worker_count(settings), settings.tol
        )
        if not tiling.covered:
            raise Failure("the window is not covered; raise --max-k or move the window")
        try:
            empirical = empirical_densities(tiling, pair.order)
        except TooFewTiles as exc:
            raise Failure(str(exc)) from exc
    _emit("class\tlimit" + ("\tempirical" if empirical else ""))
    for i, d in enumerate(limit):
        _emit(f"{i}\t{d:.10f}" + (f"\t{empirical[i]:.10f}" if empirical else ""))
    if empirical:
        _emit(f"max_gap\t{max(abs(a - b) for a, b in zip(limit, empirical)):.3e}")
    if args.figure:
        density_figure(limit, args.figure, empirical, pair.name)
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="selfsim", description="Self-similar polygonal tilings from generating pairs.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", help="key=value settings file (tolerances, caps, palette)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("catalog", help="list the named generating pairs")
    p.add_argument("--export", metavar="NAME", help="write the pair JSON of one entry")
    p.add_argument("-o", "--out", help="file for --export (default stdout)")

    p = sub.add_parser("validate", help="certify a pair file or catalog name")
    p.add_argument("target")

    def tiling_args(p, level_help):
        p.add_argument("pair", help="catalog name, e.g. trapezoid(3,1), or a pair JSON file")
        p.add_argument("theta", help="stream: periodic:12, evp:2|11, champernowne, random:seed=7,p=0.5, explicit:121")
        p.add_argument("--level", type=int, help=level_help)
        p.add_argument("--max-k", type=int, help="deepest blow-up level tried for windows")

    p = sub.add_parser("tile", help="generate a patch or window tiling")
    tiling_args(p, "patch level k")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--window", metavar="CX,CY,R", help="disk window")
    group.add_argument("--radius", type=float, help="disk window centred automatically inside the support")
    p.add_argument("--out", action="append", default=[], help="output .svg or .json (repeatable)")
    p.add_argument("--figure", help="matplotlib rendering (.svg, .pdf, .png)")
    p.add_argument("--require-covered", action="store_true", help="exit 1 if the window is not covered")

    p = sub.add_parser("verify", help="run a verification suite")
    tiling_args(p, "level or depth used by the suite")
    p.add_argument("--suite", required=True, choices=["partition", "nesting", "selfsim", "order", "quasi"])
    p.add_argument("--alpha", help="blow-up word for the selfsim suite")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--window", metavar="CX,CY,R", help="search disk for the quasi suite")
    group.add_argument("--radius", type=float, help="search radius for the quasi suite")

    p = sub.add_parser("density", help="limit and empirical class frequencies")
    p.add_argument("pair")
    p.add_argument("--theta", help="stream for an empirical count")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--window", metavar="CX,CY,R")
    group.add_argument("--radius", type=float)
    p.add_argument("--max-k", type=int)
    p.add_argument("--figure", help="bar chart of the frequencies")
    return parser


COMMANDS = {
    "catalog": cmd_catalog,
    "validate": cmd_validate,
    "tile": cmd_tile,
    "verify": cmd_verify,
    "density": cmd_density,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        settings = load_settings(args.config)
        return COMMANDS[args.command](args, settings)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (Failure, TilingError, LevelTooLarge, PrefixExhausted, GeometryError, PairError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
