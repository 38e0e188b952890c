"""Command-line runner: ``usf-lab <experiment> [options]``.

Exit status is 0 when every check passes and 1 otherwise.  Status 2 means
the requested experiment cannot be built from the given parameters.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .estimators import CSV_COLUMNS, reports_to_csv
from .experiments import CRITERIA, EXPERIMENTS, config_for
from .graphs import InvalidFamily
from .rng import thread_count

EXIT_OK, EXIT_FAIL, EXIT_INVALID = 0, 1, 2


class SpecError(ValueError):
    pass


@dataclass
class ExperimentSpec:
    """Everything needed to reproduce a run."""

    experiment: str
    params: dict = field(default_factory=dict)
    seed: int = 7
    threads: int | None = None
    out: str | None = None

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentSpec":
        d = json.loads(text)
        return cls(d["experiment"], d.get("params", {}), d.get("seed", 7), d.get("threads"), d.get("out"))


# flag name -> config key; a flag is only accepted by experiments that use the key
FLAGS = {
    "family": "family", "b": "b", "q": "q", "r": "r", "base": "base", "n": "n", "samples": "samples",
    "lam": "lam", "R": "R", "M": "M", "p": "p", "horizon": "horizon", "kind": "kind", "k_max": "k_max",
    "radius": "radius", "runs": "runs", "process": "process", "generations": "generations",
    "alpha": "alpha", "k": "k", "vertices": "vertices", "triples": "triples",
}


def parse_value(text: str):
    """JSON scalars, comma lists (``2,3``) and inclusive ranges (``0..5``)."""
    text = text.strip()
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        pass
    if ".." in text and "," not in text:
        lo, hi = text.split("..")
        return list(range(int(lo), int(hi) + 1))
    if "," in text:
        return [parse_value(t) for t in text.split(",") if t]
    return text


def _coerce(name: str, key: str, value, defaults: dict):
    if key not in defaults:
        return value
    want = defaults[key]
    if isinstance(want, list) and not isinstance(value, list):
        return [value]
    if not isinstance(want, list) and isinstance(value, list) and key not in ("b",):
        raise SpecError(f"{name}: parameter {key!r} takes a single value")
    return value


def build_spec(args) -> ExperimentSpec:
    spec = ExperimentSpec(args.command)
    if args.config:
        try:
            raw = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise SpecError(f"cannot read config {args.config}: {exc}") from None
        if "params" in raw or "experiment" in raw:
            if raw.get("experiment", args.command) != args.command:
                raise SpecError(f"config is for {raw['experiment']!r}, not {args.command!r}")
            spec.params.update(raw.get("params", {}))
            spec.seed = raw.get("seed", spec.seed)
            spec.threads = raw.get("threads", spec.threads)
            spec.out = raw.get("out", spec.out)
        else:
            raw = dict(raw)
            spec.seed = raw.pop("seed", spec.seed)
            spec.threads = raw.pop("threads", spec.threads)
            spec.params.update(raw)
    if args.seed is not None:
        spec.seed = args.seed
    if args.threads is not None:
        spec.threads = args.threads
    if args.out is not None:
        spec.out = args.out
    spec.threads = thread_count(spec.threads)
    if args.command == "all":
        if spec.params:
            raise SpecError("'all' runs the acceptance settings and takes no parameters")
        return spec
    defaults = EXPERIMENTS[args.command].defaults
    for flag, key in FLAGS.items():
        val = getattr(args, flag, None)
        if val is None:
            continue
        if key not in defaults and key not in ("family", "b", "q", "r", "base"):
            raise SpecError(f"{args.command} does not use --{flag.replace('_', '-')}")
        spec.params[key] = _coerce(args.command, key, parse_value(val), defaults)
    for item in args.set or []:
        if "=" not in item:
            raise SpecError(f"--set expects key=value, got {item!r}")
        key, val = item.split("=", 1)
        spec.params[key] = _coerce(args.command, key, parse_value(val), defaults)
    return spec


# -- output --------------------------------------------------------------------


def _fmt(x) -> str:
    if x is None:
        return "-"
    if isinstance(x, float) and (math.isinf(x) or math.isnan(x)):
        return str(x)
    return f"{x:.6g}"


def summary(outcome, header: str | None = None) -> str:
    lines = [f"== {header or outcome.name}"]
    lines += [f"  {n}" for n in outcome.notes]
    if outcome.reports:
        w = max(len(r.statistic) for r in outcome.reports)
        w = min(max(w, 9), 60)
        lines.append(f"  {'statistic':<{w}}  {'estimate':>12}  {'se':>10}  {'reference':>12}  {'z':>7}")
        for r in outcome.reports:
            z = r.z() if r.reference is not None else None
            lines.append(f"  {r.statistic[:w]:<{w}}  {_fmt(r.estimate):>12}  {_fmt(r.se):>10}  "
                         f"{_fmt(r.reference):>12}  {_fmt(z):>7}")
    for c in outcome.checks:
        lines.append(f"  {'PASS' if c.passed else 'FAIL'}  {c.name}" + (f"  [{c.detail}]" if c.detail else ""))
    lines.append(f"  => {'PASS' if outcome.passed else 'FAIL'}")
    return "\n".join(lines)


def write_artifacts(outcome, spec: ExperimentSpec, stem: str, timestamp: bool) -> list:
    out = Path(spec.out)
    out.mkdir(parents=True, exist_ok=True)
    config = {"experiment": outcome.name, "params": outcome.config, "seed": spec.seed}
    stamp = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds") if timestamp else None
    payload = {
        "config": config,
        "passed": outcome.passed,
        "checks": [asdict(c) for c in outcome.checks],
        "notes": outcome.notes,
        "reports": [r.to_dict() for r in outcome.reports],
    }
    if stamp:
        payload["timestamp"] = stamp
    jpath = out / f"{stem}.json"
    jpath.write_text(json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n")
    head = f"# config: {json.dumps(config, sort_keys=True)}\n"
    if stamp:
        head += f"# timestamp: {stamp}\n"
    cpath = out / f"{stem}.csv"
    cpath.write_text(head + reports_to_csv(outcome.reports))
    return [jpath, cpath]


# -- parser ----------------------------------------------------------------------


def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="experiment seed (default 7)")
    common.add_argument("--threads", type=int, help="replica threads (fallback: USF_LAB_THREADS, then 1)")
    common.add_argument("--config", help="JSON config file; flags override its values")
    common.add_argument("--out", help="directory for CSV and JSON artifacts")
    common.add_argument("--no-timestamp", action="store_true", help="omit timestamps from artifacts")
    common.add_argument("--quiet", action="store_true", help="print only the verdict lines")

    p = argparse.ArgumentParser(prog="usf-lab", description="Spanning-forest simulation and verification runner.")
    sub = p.add_subparsers(dest="command", required=True)
    for name, exp in EXPERIMENTS.items():
        tag = f" (acceptance criterion {exp.criterion})" if exp.criterion else ""
        sp = sub.add_parser(name, parents=[common], help=exp.help + tag, description=exp.help + tag)
        for flag in FLAGS:
            sp.add_argument(f"--{flag.replace('_', '-')}", dest=flag, metavar="V")
        sp.add_argument("--set", action="append", metavar="KEY=VALUE", help="set any config key")
    sub.add_parser("all", parents=[common], help="run every acceptance criterion")
    return p


def _run_one(name, params, spec, args, stem=None, header=None):
    cfg = config_for(name, params)
    outcome = EXPERIMENTS[name].run(cfg, spec.seed, spec.threads)
    text = summary(outcome, header)
    if args.quiet:
        text = "\n".join(line for line in text.splitlines() if line.lstrip().startswith(("FAIL", "=>", "==")))
    print(text, flush=True)
    if spec.out:
        write_artifacts(outcome, spec, stem or name, not args.no_timestamp)
    return outcome


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        spec = build_spec(args)
        if args.command != "all":
            config_for(args.command, spec.params)
    except (SpecError, KeyError, InvalidFamily) as exc:
        print(f"usf-lab: invalid experiment spec: {exc}", file=sys.stderr)
        return EXIT_INVALID
    try:
        if args.command == "all":
            passed = True
            for number, (name, params) in CRITERIA.items():
                params = dict(params, **spec.params)
                o = _run_one(name, params, spec, args, stem=f"criterion{number:02d}-{name}",
                             header=f"criterion {number}: {name}")
                passed &= o.passed
        else:
            passed = _run_one(args.command, spec.params, spec, args).passed
    except (InvalidFamily, SpecError, KeyError, ValueError) as exc:
        print(f"usf-lab: invalid experiment spec: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK if passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())


__all__ = ["main", "ExperimentSpec", "make_parser", "parse_value", "CSV_COLUMNS"]
