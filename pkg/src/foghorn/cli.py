"""Batch command-line pipeline.

Subcommands: generate, corpus, evaluate, validate, render-frames.
Exit codes: 0 success, 1 validation findings, 2 input errors, 3 alignment
errors. All outputs go under --out; logs go to stderr only.

Configuration precedence: built-in defaults < TOML config file (--config)
< environment variables (FF_ENDPOINT_URL, FF_TIMEOUT_S, FF_MAX_RETRIES)
< command-line flags.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:          # Python < 3.11
    import tomli as tomllib

import numpy as np

from . import evaluate as ev
from . import frames as fr
from . import gateway as gw
from . import generator as gen
from . import grammar as gr
from . import grid as gd
from .errors import (
    AlignmentError,
    ClauseSyntaxError,
    EmptyMask,
    EmptySynopsis,
    FoghornError,
    UnknownArea,
)
from .scales import load_weather_codes, scale_for

FIELD_ATTRIBUTES = ("wind_speed", "wind_direction", "wave_height",
                    "visibility", "weather_code", "pressure")

EXIT_OK = 0
EXIT_FINDINGS = 1
EXIT_INPUT = 2
EXIT_ALIGNMENT = 3


def log(msg: str) -> None:
    print(msg, file=sys.stderr)


# --- config -------------------------------------------------------------------

def load_config(args: argparse.Namespace) -> dict:
    cfg = {
        "bundles": None,
        "areas": None,
        "scales": None,
        "weather_codes": None,
        "out": "out",
        "mode": "categorical",
        "seed": None,
        "backend": "local",
        "percentile": {},            # per-attribute overrides
        "default_percentile": 50.0,
        "size": "1000x600",
    }
    if getattr(args, "config", None):
        path = Path(args.config)
        if not path.is_file():
            raise FileNotFoundError(f"config file not found: {path}")
        doc = tomllib.loads(path.read_text(encoding="utf-8"))
        for key, value in doc.items():
            cfg[key] = value
    for key in ("bundles", "out", "mode", "seed", "backend", "size"):
        value = getattr(args, key.replace("-", "_"), None)
        if value is not None:
            cfg[key] = value
    if getattr(args, "percentile", None) is not None:
        cfg["default_percentile"] = float(args.percentile)
    return cfg


def _parse_size(text: str) -> tuple[int, int]:
    w, h = text.lower().split("x")
    return int(w), int(h)


# --- shared pipeline steps ------------------------------------------------------

def _load_fields(bundles_dir: Path, cfg: dict,
                 attributes=FIELD_ATTRIBUTES) -> dict[str, gd.GridField]:
    fields = {}
    for attribute in attributes:
        path = bundles_dir / attribute
        if not path.is_dir():
            raise FileNotFoundError(f"missing grid bundle for attribute "
                                    f"{attribute!r} under {bundles_dir}")
        fld = gd.load_grid_bundle(path)
        if isinstance(fld, gd.EnsembleField):
            p = float(cfg["percentile"].get(attribute, cfg["default_percentile"]))
            fld = gd.reduce_percentile(fld, p)
        fields[attribute] = gd.crop_domain(fld, gd.DOMAIN_BBOX)
    return fields


def _area_series_set(fields: dict, area: gd.SeaArea) -> dict[str, gd.AreaSeries]:
    return {name: gd.area_series(fields[name], area, reducer)
            for name, reducer in gw.SERIES_REDUCERS.items()}


def _generate_all(fields: dict, registry, code_map):
    bulletins = []
    for area in registry.values():
        try:
            series = _area_series_set(fields, area)
        except EmptyMask:
            log(f"skipping {area.name}: outside the gridded domain")
            continue
        bulletins.append(gen.generate_area_bulletin(series, area, code_map))
    return gen.consolidate(bulletins, registry)


def _forecast_text(fields: dict, consolidated, registry) -> str:
    try:
        synopsis = gen.generate_synopsis(fields["pressure"])
        synopsis_text = gr.render_synopsis(synopsis)
    except EmptySynopsis:
        synopsis_text = "Nothing significant."
    blocks = [synopsis_text]
    blocks += [gr.render_bulletin(b, registry) for b in consolidated]
    return "\n\n".join(blocks) + "\n"


# --- subcommands -----------------------------------------------------------------

def cmd_generate(args) -> int:
    cfg = load_config(args)
    if not cfg["bundles"]:
        log("generate: --bundles (or config 'bundles') is required")
        return EXIT_INPUT
    out = Path(cfg["out"])
    registry = gd.load_area_registry(cfg["areas"])
    code_map = load_weather_codes(cfg["weather_codes"])
    try:
        fields = _load_fields(Path(cfg["bundles"]), cfg)
        consolidated = _generate_all(fields, registry, code_map)
        text = _forecast_text(fields, consolidated, registry)
    except (FileNotFoundError, FoghornError) as exc:
        log(f"generate: {exc}")
        return EXIT_INPUT
    out.mkdir(parents=True, exist_ok=True)
    (out / "forecast.txt").write_text(text, encoding="utf-8")
    with (out / "bulletins.jsonl").open("w", encoding="utf-8") as f:
        for b in consolidated:
            f.write(gr.bulletin_to_json(b) + "\n")
    log(f"generate: wrote {len(consolidated)} area groups to {out}")
    return EXIT_OK


def cmd_corpus(args) -> int:
    cfg = load_config(args)
    if not cfg["bundles"] or not args.bulletins:
        log("corpus: --bundles and --bulletins are required")
        return EXIT_INPUT
    if cfg["seed"] is None:
        log("corpus: --seed is required for reproducible splits")
        return EXIT_INPUT
    root = Path(cfg["bundles"])
    issues = sorted(p.name for p in root.iterdir() if p.is_dir()) if root.is_dir() else []
    if not issues:
        log(f"corpus: no issue-time directories under {root}")
        return EXIT_INPUT
    registry = gd.load_area_registry(cfg["areas"])
    size = _parse_size(cfg["size"])
    mode = cfg["mode"]
    out = Path(cfg["out"])

    records = [json.loads(line) for line in
               Path(args.bulletins).read_text(encoding="utf-8").splitlines()
               if line.strip()]
    entries, orphans = [], []
    fields_cache: dict[str, dict] = {}
    pressure_done: set[str] = set()
    for rec in records:
        issue, area_name = rec["issue_time"], rec["area"]
        if issue not in issues or area_name not in registry:
            orphans.append({"issue_time": issue, "area": area_name})
            continue
        if issue not in fields_cache:
            fields_cache[issue] = _load_fields(root / issue, cfg)
        fields = fields_cache[issue]
        area = registry[area_name]
        entry_dir = out / "framesets" / issue / area_name.replace(" ", "_")
        refs = {}
        for attribute in ("wave_height", "visibility", "weather_code"):
            fs = fr.encode_attribute_video(fields[attribute],
                                           scale_for(attribute, mode),
                                           area=area, size=size)
            refs[attribute] = str(fs.save(entry_dir / attribute))
        fs = fr.encode_wind_video(fields["wind_direction"], fields["wind_speed"],
                                  scale_for("wind_direction", mode),
                                  scale_for("wind_speed", mode),
                                  area=area, size=size)
        refs["wind_combined"] = str(fs.save(entry_dir / "wind_combined"))
        if issue not in pressure_done:
            ps = fr.render_pressure_frames(fields["pressure"],
                                           scale_for("pressure", mode),
                                           size=size)
            ps.save(out / "framesets" / issue / "pressure")
            pressure_done.add(issue)
        refs["pressure"] = str(out / "framesets" / issue / "pressure" / "frameset.json")
        entries.append({"id": f"{issue}_{area_name}", "issue_time": issue,
                        "area": area_name, "frame_sets": refs,
                        "bulletin": rec["text"]})
    if not entries:
        log("corpus: no pairable entries")
        return EXIT_INPUT
    manifest = fr.build_corpus(entries, seed=int(cfg["seed"]))
    manifest["orphans"] = orphans
    out.mkdir(parents=True, exist_ok=True)
    (out / "corpus.json").write_text(json.dumps(manifest, indent=2),
                                     encoding="utf-8")
    counts = manifest["counts"]
    log(f"corpus: {len(entries)} entries "
        f"({counts['train']}/{counts['validation']}/{counts['test']}), "
        f"{len(orphans)} orphans")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    cfg = load_config(args)
    if not cfg["bundles"] or not args.expected:
        log("evaluate: --bundles and --expected are required")
        return EXIT_INPUT
    registry = gd.load_area_registry(cfg["areas"])
    systems = [s.strip() for s in args.systems.split(",")]
    out = Path(cfg["out"])

    try:
        fields = _load_fields(Path(cfg["bundles"]), cfg)
    except (FileNotFoundError, FoghornError) as exc:
        log(f"evaluate: {exc}")
        return EXIT_INPUT

    expected_records = []
    request_specs = []          # aligned (key, GenerationRequest)
    series_cache: dict[str, str] = {}
    for path_str in args.expected:
        path = Path(path_str)
        issue = path.stem
        try:
            fragments = gr.segment_forecast(path.read_text(encoding="utf-8"),
                                            registry)
        except (FoghornError, OSError) as exc:
            log(f"evaluate: {path}: {exc}")
            return EXIT_INPUT
        for frag in fragments:
            if frag.kind != "attribute":
                continue
            if frag.excluded:
                expected_records.append({"key": {"area": "+".join(frag.areas),
                                                 "attribute": frag.attribute,
                                                 "issue_time": issue},
                                         "text": frag.text, "excluded": True})
                continue
            area_name = frag.areas[0]
            if area_name not in series_cache:
                series = _area_series_set(fields, registry[area_name])
                series_cache[area_name] = gw.series_to_text_input(area_name, series)
            key = {"area": area_name, "attribute": frag.attribute,
                   "issue_time": issue}
            expected_records.append({"key": key, "text": frag.text})
            request_specs.append((key, gw.GenerationRequest(
                attribute=frag.attribute, area=area_name,
                text_input=series_cache[area_name])))

    outputs: dict[str, list[dict]] = {}
    for system in systems:
        backend = gw.make_backend(system)
        items = gw.batch_generate(backend, [r for _, r in request_specs],
                                  parallelism=args.parallelism)
        records = []
        for (key, _), item in zip(request_specs, items):
            if not item.ok:
                log(f"evaluate: {system} failed on {key}: {item.error}")
            records.append({"key": key,
                            "text": item.response.text if item.ok else ""})
        outputs[system] = records

    try:
        report = ev.evaluate_systems(expected_records, outputs)
    except AlignmentError as exc:
        log(f"evaluate: {exc}")
        return EXIT_ALIGNMENT
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.txt").write_text(ev.render_report_text(report),
                                    encoding="utf-8")
    (out / "report.json").write_text(ev.report_to_json(report),
                                     encoding="utf-8")
    log(f"evaluate: scored {len(systems)} system(s), "
        f"{report.excluded_count} fragments excluded")
    return EXIT_OK


def cmd_validate(args) -> int:
    cfg = load_config(args)
    registry = gd.load_area_registry(cfg["areas"])
    path = Path(args.bulletin_file)
    if not path.is_file():
        log(f"validate: no such file {path}")
        return EXIT_INPUT
    text = path.read_text(encoding="utf-8")

    bulletins = []
    try:
        if path.suffix in (".json", ".jsonl"):
            for line in text.splitlines():
                if line.strip():
                    bulletins.append(gr.bulletin_from_json(line))
        else:
            for block in text.split("\n\n"):
                if block.strip():
                    bulletins.append(gr.parse_bulletin(" ".join(block.split()),
                                                       registry))
    except ClauseSyntaxError as exc:
        log(f"validate: parse failure in {exc.attribute}: {exc.span!r}")
        return EXIT_INPUT
    except (UnknownArea, FoghornError, json.JSONDecodeError, KeyError) as exc:
        log(f"validate: cannot parse input: {exc}")
        return EXIT_INPUT

    findings = 0
    for i, bulletin in enumerate(bulletins):
        for violation in gr.validate(bulletin, registry):
            print(f"bulletin {i} ({', '.join(bulletin.areas)}): {violation}")
            findings += 1
    return EXIT_FINDINGS if findings else EXIT_OK


def cmd_render_frames(args) -> int:
    cfg = load_config(args)
    if not cfg["bundles"]:
        log("render-frames: --bundles is required")
        return EXIT_INPUT
    registry = gd.load_area_registry(cfg["areas"])
    size = _parse_size(cfg["size"])
    mode = cfg["mode"]
    out = Path(cfg["out"])
    try:
        if args.attribute == "pressure":
            fields = _load_fields(Path(cfg["bundles"]), cfg, ("pressure",))
            fs = fr.render_pressure_frames(fields["pressure"],
                                           scale_for("pressure", mode), size=size)
        elif args.attribute == "wind_combined":
            fields = _load_fields(Path(cfg["bundles"]), cfg,
                                  ("wind_direction", "wind_speed"))
            area = registry[args.area] if args.area else None
            fs = fr.encode_wind_video(fields["wind_direction"],
                                      fields["wind_speed"],
                                      scale_for("wind_direction", mode),
                                      scale_for("wind_speed", mode),
                                      area=area, size=size)
        else:
            fields = _load_fields(Path(cfg["bundles"]), cfg, (args.attribute,))
            area = registry[args.area] if args.area else None
            fs = fr.encode_attribute_video(fields[args.attribute],
                                           scale_for(args.attribute, mode),
                                           area=area, size=size)
    except (FileNotFoundError, KeyError, FoghornError) as exc:
        log(f"render-frames: {exc}")
        return EXIT_INPUT
    manifest = fs.save(out)
    log(f"render-frames: wrote {len(fs.frames)} frames, manifest {manifest}")
    return EXIT_OK


# --- argument parsing ---------------------------------------------------------------

def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="TOML config file")
    parser.add_argument("--out", help="output directory (default: out)")
    parser.add_argument("--bundles", help="grid bundle directory")
    parser.add_argument("--seed", type=int, help="deterministic seed")
    parser.add_argument("--mode", choices=["categorical", "continuous"],
                        help="color-scale mode")
    parser.add_argument("--percentile", type=float,
                        help="default ensemble percentile (0-100)")
    parser.add_argument("--backend", help="backend id (local | remote)")
    parser.add_argument("--size", help="frame size WxH, ratio-locked 10:6")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="foghorn",
        description="Shipping-Forecast-style bulletin pipeline")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="gridded bundles -> forecast text")
    _add_common(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("corpus", help="build the video-bulletin training corpus")
    _add_common(p)
    p.add_argument("--bulletins", help="archived bulletins JSONL "
                                       "({issue_time, area, text} per line)")
    p.set_defaults(func=cmd_corpus)

    p = sub.add_parser("evaluate", help="score systems against expected forecasts")
    _add_common(p)
    p.add_argument("--expected", nargs="+", help="expected forecast text file(s)")
    p.add_argument("--systems", default="local",
                   help="comma-separated backend ids")
    p.add_argument("--parallelism", type=int, default=1)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("validate", help="check a bulletin file against the rules")
    _add_common(p)
    p.add_argument("bulletin_file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("render-frames", help="render one attribute's frame set")
    _add_common(p)
    p.add_argument("--attribute", required=True,
                   help="attribute id, wind_combined, or pressure")
    p.add_argument("--area", help="sea-area name (omit for full domain)")
    p.set_defaults(func=cmd_render_frames)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        log(str(exc))
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
