"""Command-line front end: ``tangentgeom run | parse | report``.

Config files are JSON::

    {
      "dimension": 2,
      "christoffel": {"0,0,1": "1"},          # or nested [l][i][j] lists, or one string
      "maps": {"f": {"expr": "x0+x1; x0*x1", "in": 2, "out": 2}},
      "checks": [{"name": "ftf"}, {"name": "morphism", "map": "f"}],
      "samples": 50, "seed": 0, "tolerance": 1e-9,
      "jubin": [["1", "2"], ["5/3", "-1"]]
    }

Exit status: 0 when every non-skipped check passes, 1 when one does not,
2 for a malformed config or expression.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Optional

from .connections import (
    ChristoffelField,
    GeometricSpace,
    connection_from_christoffel,
    ftf_equivalence,
    verify_compatibility,
    verify_lift_lemma,
    verify_vertical_connection,
)
from .dsl import parse_map
from .errors import ConfigError, TangentGeomError
from .geometry import check_self_morphism, is_geometric_morphism, is_horizontal_preserving
from .jubin import build_instance, verify_bimonad
from .laws import PASS, SKIPPED, LawReport
from .structure import verify_tangent_axioms

CHECKS = ("axioms", "connection", "ftf", "morphism", "jubin", "self-morphism", "horizontal")
SAMPLES_ENV = "TANGENTGEOM_SAMPLES"


def _christoffel(n: int, spec) -> ChristoffelField:
    if spec is None:
        spec = "0"
    if isinstance(spec, (str, int, float)):
        return ChristoffelField.parse(n, str(spec))
    if isinstance(spec, dict):
        nonzero = {}
        for key, src in spec.items():
            try:
                idx = tuple(int(k) for k in key.split(","))
            except ValueError as exc:
                raise ConfigError(f"bad Christoffel index {key!r}; expected 'l,i,j'") from exc
            if len(idx) != 3:
                raise ConfigError(f"bad Christoffel index {key!r}; expected 'l,i,j'")
            nonzero[idx] = str(src)
        return ChristoffelField.sparse(n, nonzero)
    if isinstance(spec, list):
        return ChristoffelField.parse(n, [[[str(e) for e in row] for row in plane] for plane in spec])
    raise ConfigError("christoffel must be a string, a nested list or an index dict")


class Suite:
    """A validated config, ready to run."""

    def __init__(self, cfg: dict, default_samples: int = 50):
        if not isinstance(cfg, dict):
            raise ConfigError("config must be a JSON object")
        try:
            self.n = int(cfg.get("dimension", 1))
            self.samples = int(cfg.get("samples", default_samples))
            self.seed = int(cfg.get("seed", 0))
            self.tol = float(cfg.get("tolerance", 1e-9))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad numeric field: {exc}") from exc
        if self.n < 1 or self.samples < 1:
            raise ConfigError("dimension and samples must be positive")
        self.christoffel_spec = cfg.get("christoffel")
        self.maps = {}
        for name, m in (cfg.get("maps") or {}).items():
            if not isinstance(m, dict) or "expr" not in m:
                raise ConfigError(f"map {name!r} needs an 'expr' field")
            self.maps[name] = parse_map(m["expr"], int(m.get("in", self.n)), int(m.get("out", self.n)))
        self.jubin = []
        for pair in cfg.get("jubin") or []:
            if not isinstance(pair, (list, tuple)) or len(pair) != 2:
                raise ConfigError(f"jubin entries are [a, b] pairs, got {pair!r}")
            try:
                self.jubin.append(build_instance(str(pair[0]), str(pair[1]), int(cfg.get("jubin_dimension", self.n))))
            except (ValueError, ZeroDivisionError) as exc:
                raise ConfigError(f"bad jubin parameter {pair!r}") from exc
        checks = cfg.get("checks")
        if not isinstance(checks, list) or not checks:
            raise ConfigError("'checks' must be a non-empty list")
        self.checks = []
        for c in checks:
            c = {"name": c} if isinstance(c, str) else dict(c)
            if c.get("name") not in CHECKS:
                raise ConfigError(f"unknown check {c.get('name')!r}; expected one of {', '.join(CHECKS)}")
            for key in ("map",):
                if key in c and c[key] not in self.maps:
                    raise ConfigError(f"check {c['name']!r} refers to undefined map {c[key]!r}")
            self.checks.append(c)
        self.space = GeometricSpace(self.n, connection_from_christoffel(_christoffel(self.n, self.christoffel_spec), "config"), "config")

    def _space(self, spec, n: int, default: Optional[GeometricSpace] = None) -> GeometricSpace:
        if spec is None and default is not None and default.n == n:
            return default
        return GeometricSpace(n, connection_from_christoffel(_christoffel(n, spec)), "")

    def _map(self, c: dict):
        if "map" not in c:
            raise ConfigError(f"check {c['name']!r} needs a 'map'")
        return self.maps[c["map"]]

    def run_check(self, c: dict) -> LawReport:
        name = c["name"]
        kw = dict(samples=int(c.get("samples", self.samples)), tol=float(c.get("tolerance", self.tol)), seed=self.seed)
        C = self.space.connection
        if name == "axioms":
            names = c.get("maps", [k for k, m in self.maps.items() if m.in_dim == self.n])
            return verify_tangent_axioms(self.n, [self.maps[k] for k in names], **kw)
        if name == "connection":
            return LawReport.suite("connection", [
                verify_vertical_connection(C, **kw),
                verify_compatibility(C.with_horizontal(), **kw),
                verify_lift_lemma(C, **kw),
            ])
        if name == "ftf":
            return ftf_equivalence(C, **kw)
        if name in ("morphism", "horizontal"):
            f = self._map(c)
            src = self._space(c.get("source"), f.in_dim, self.space)
            dst = self._space(c.get("target"), f.out_dim, self.space)
            if name == "morphism":
                return is_geometric_morphism(f, src, dst, **kw)
            src = GeometricSpace(src.n, src.connection.with_horizontal())
            dst = GeometricSpace(dst.n, dst.connection.with_horizontal())
            return is_horizontal_preserving(f, src, dst, **kw)
        if name == "self-morphism":
            f = self.maps[c["map"]] if "map" in c else None
            return check_self_morphism(self.space, f=f, **kw)
        if name == "jubin":
            if not self.jubin:
                return LawReport.skipped("jubin", "no jubin parameters configured")
            return LawReport.suite("jubin", [verify_bimonad(inst) for inst in self.jubin])
        raise ConfigError(f"unknown check {name!r}")

    def run(self) -> dict:
        results = {}
        for c in self.checks:
            label = c.get("label", c["name"])
            key, k = label, 2
            while key in results:
                key, k = f"{label}#{k}", k + 1
            report = self.run_check(c)
            report.name = key
            results[key] = report
        ordered = [results[k] for k in sorted(results)]
        ok = all(r.status in (PASS, SKIPPED) for r in ordered)
        return {
            "dimension": self.n,
            "samples": self.samples,
            "seed": self.seed,
            "tolerance": self.tol,
            "status": "pass" if ok else "fail",
            "checks": [r.to_dict() for r in ordered],
        }


def _default_samples() -> int:
    try:
        return int(os.environ.get(SAMPLES_ENV, "50"))
    except ValueError:
        return 50


def load_suite(path) -> Suite:
    try:
        cfg = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc
    return Suite(cfg, _default_samples())


def dump_report(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def run_suite(config_path, out_path=None) -> tuple[int, dict]:
    """Run a config; returns (exit code, report) and writes the report file."""
    suite = load_suite(config_path)
    report = suite.run()
    out = Path(out_path) if out_path else Path(config_path).with_suffix(".report.json")
    out.write_text(dump_report(report))
    return (0 if report["status"] == "pass" else 1), report


def _pretty(report: dict) -> str:
    lines = [f"dimension={report.get('dimension')} seed={report.get('seed')} samples={report.get('samples')} "
             f"tolerance={report.get('tolerance')} -> {str(report.get('status', '?')).upper()}"]
    for c in report.get("checks", []):
        lines.extend(LawReport.from_dict(c).summary_lines())
    return "\n".join(lines)


def _cmd_run(args) -> int:
    code, report = run_suite(args.config, args.output)
    print(_pretty(report))
    return code


def _cmd_parse(args) -> int:
    f = parse_map(args.expr, args.in_dim, args.out_dim)
    print(f.to_source())
    print(f"dims ({f.in_dim},{f.out_dim})")
    return 0


def _cmd_report(args) -> int:
    try:
        report = json.loads(Path(args.report).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot load report {args.report}: {exc}") from exc
    print(_pretty(report) if args.pretty else dump_report(report), end="\n" if args.pretty else "")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tangentgeom", description="Check tangent-category identities on R^n.")
    sub = ap.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a check-suite config")
    run.add_argument("config")
    run.add_argument("-o", "--output", help="report path (default: <config>.report.json)")
    run.set_defaults(func=_cmd_run)
    parse = sub.add_parser("parse", help="parse an expression and print its canonical form")
    parse.add_argument("expr")
    parse.add_argument("--in", dest="in_dim", type=int, required=True)
    parse.add_argument("--out", dest="out_dim", type=int, required=True)
    parse.set_defaults(func=_cmd_parse)
    rep = sub.add_parser("report", help="print a saved report")
    rep.add_argument("--pretty", action="store_true")
    rep.add_argument("report")
    rep.set_defaults(func=_cmd_report)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except TangentGeomError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
