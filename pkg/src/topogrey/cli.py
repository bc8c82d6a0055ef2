"""Command-line front end.

Every command builds a :class:`PipelineConfig`, runs it through
:func:`run_pipeline` and writes a JSON report.  Exit status: 0 when every
check passes, 1 when some check fails, 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

from . import laws
from .errors import TopogreyError
from .finmetric import FinMetricSpace, find_isometry
from .greycore import GreySet
from .greygroupoid.filtration import synthesize_norm
from .greygroupoid.metric import close_under_sum, metric_yoneda_check
from .greygroupoid.norms import check_norm, norm_from_json, norm_to_json, unit_zero_set
from .groupoid.core import FinGroupoid, is_subgroupoid
from .groupoid.cosets import coset_space
from .groupoid.structures import DiscreteStructureFamily, uniformize, verify_uniformization
from .groupoid.yoneda import verify_eta_iso
from .katetov import extension_property_check, urysohn_approx

COMMANDS = ("represent-discrete", "represent-metric", "urysohn", "isometry", "uniformize", "check-laws")
MODES = {"plain": "plain", "io": "injective_on_objects", "injective_on_objects": "injective_on_objects"}


class InputError(Exception):
    """Unreadable or malformed input; maps to exit status 2."""


@dataclass(frozen=True)
class PipelineConfig:
    command: str
    inputs: tuple = ()
    groupoid: str | None = None
    subgroupoids: str | None = None
    norms: str | None = None
    seed_file: str | None = None
    q: int = 1
    depth: int = 1
    budget: int | None = None
    max_support: int | None = None
    synthesize_depth: int | None = None
    mode: str = "plain"
    suite: str = "all"
    count: int = 100
    mutation: str | None = None
    seed: int = 0
    output: str | None = None

    def echo(self) -> dict:
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in dataclasses.asdict(self).items()}


@dataclass
class Report:
    command: dict
    checks: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)
    wall_time: float = 0.0

    def add(self, name: str, ok: bool, witness: Any = None, **extra) -> None:
        entry = {"name": name, "verdict": "pass" if ok else "fail", **extra}
        if not ok:
            entry["witness"] = laws._jsonable(witness if witness is not None else "no witness recorded")
        self.checks.append(entry)

    @property
    def verdict(self) -> str:
        return "pass" if all(c["verdict"] == "pass" for c in self.checks) else "fail"

    def to_json(self, timing: bool = True) -> dict:
        out = {"command": self.command, "verdict": self.verdict, "checks": self.checks, "stats": self.stats}
        if timing:
            out["wall_time"] = round(self.wall_time, 6)
        return out


def dumps(report: Report, timing: bool = True) -> str:
    return json.dumps(report.to_json(timing), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


# -- input -------------------------------------------------------------------------------------


def load_json(path: str) -> Any:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: cannot read: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from None


def _load(path: str, what: str, parse):
    data = load_json(path)
    try:
        return parse(data)
    except TopogreyError as exc:
        raise InputError(f"{path}: invalid {what}: {exc}") from None
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise InputError(f"{path}: invalid {what}: {type(exc).__name__}: {exc}") from None


def _need(value: str | None, flag: str) -> str:
    if value is None:
        raise InputError(f"missing required {flag}")
    return value


def _groupoid(config: PipelineConfig) -> FinGroupoid:
    path = config.groupoid or (config.inputs[0] if config.inputs else None)
    return _load(_need(path, "--groupoid"), "groupoid", FinGroupoid.from_json)


def _ids(G: FinGroupoid, names) -> frozenset:
    return frozenset(G.id_of(n) for n in names)


# -- commands ----------------------------------------------------------------------------------


def _represent_discrete(config: PipelineConfig, rep: Report) -> None:
    G = _groupoid(config)
    if config.subgroupoids:
        def parse(data):
            Us = [_ids(G, U) for U in data["subgroupoids"]]
            Ss = data.get("sections")
            return Us, None if Ss is None else [[_ids(G, S) for S in secs] for secs in Ss]

        Us, Ss = _load(config.subgroupoids, "subgroupoid file", parse)
    else:
        Us = [frozenset([x]) for x in G.objects]
        Ss = [[frozenset([g]) for g in G.morphisms if G.src[g] == x] for x in G.objects]
    for i, U in enumerate(Us):
        v = is_subgroupoid(G, U)
        rep.add(f"subgroupoid {i}", bool(v), {"reason": v.reason, "witness": v.witness})
    if rep.verdict == "fail":
        return
    if Ss is None:
        # default: U itself and every coset of U
        Ss = [[U] + [c for c in coset_space(G, U).classes if c != U] for U in Us]
    try:
        eta = verify_eta_iso(G, Us, Ss)
    except TopogreyError as exc:
        rep.add("eta is an isomorphism", False, {"reason": str(exc), "witness": exc.witness})
        return
    rep.add("eta is an isomorphism", eta.ok, eta.failures)
    body = eta.to_json()
    rep.stats.update(
        morphisms=len(G),
        objects=len(G.objects),
        subgroupoids=len(Us),
        groupoid_counts=body["groupoid_counts"],
        iso_counts=body["iso_counts"],
        hom_counts=body["hom_counts"],
        limit_counts=body["limit_counts"],
    )


def _represent_metric(config: PipelineConfig, rep: Report) -> None:
    G = _groupoid(config)

    def parse(data):
        entries = data["norms"] if isinstance(data, dict) else data
        secs = data.get("sections") if isinstance(data, dict) else None
        return [norm_from_json(G, e) for e in entries], (None if secs is None else [_ids(G, S) for S in secs])

    given, sections = _load(_need(config.norms, "--norms"), "norm file", parse)
    norms: list[GreySet] = []
    if config.synthesize_depth is not None:
        certs = []
        for i, U in enumerate(given):
            units = unit_zero_set(G, U)
            try:
                syn = synthesize_norm(G, U, units, config.synthesize_depth)
            except TopogreyError as exc:
                rep.add(f"synthesis {i}", False, {"reason": str(exc), "witness": exc.witness})
                continue
            c = syn.certificate
            rep.add(f"synthesis {i}: norm axioms", bool(c.norm_ok), {"reason": c.norm_ok.reason, "witness": c.norm_ok.witness})
            rep.add(f"synthesis {i}: dominated by target", syn.dominated, "synthesized norm lies below the target somewhere")
            rep.add(f"synthesis {i}: unit set", syn.units_ok and c.units_ok, sorted(G.names[x] for x in units))
            rep.add(f"synthesis {i}: half bound", c.half_bound_ok, c.witnesses.get("half_bound"))
            rep.add(f"synthesis {i}: chaining bound", c.chaining_ok, c.witnesses.get("chaining"))
            certs.append({
                "target": i,
                "levels": [sorted(str(G.names[g]) for g in L) for L in syn.filtration.levels],
                "norm": norm_to_json(G, syn.norm)["values"],
                "factorizations_checked": c.chaining_checked,
            })
            norms.append(syn.norm)
        rep.stats["synthesis"] = certs
    else:
        for i, U in enumerate(given):
            v = check_norm(G, U)
            rep.add(f"norm {i}", bool(v), {"reason": v.reason, "witness": v.witness})
            if v:
                norms.append(U)
    if rep.verdict == "fail" or not norms:
        if not norms:
            rep.add("non-empty norm family", False, "no usable norms")
        return
    closed = close_under_sum(norms)
    rep.stats["family"] = {"given": len(norms), "added_by_sum_closure": len(closed) - len(norms)}
    try:
        res = metric_yoneda_check(G, closed, sections, budget=config.budget or 20000)
    except TopogreyError as exc:
        rep.add("metric representation", False, {"reason": str(exc), "witness": exc.witness})
        return
    body = res.to_json()
    rep.add("metric representation", res.ok, res.failures)
    rep.stats.update(
        morphisms=len(G),
        counts=body["counts"],
        separation_failures=laws._jsonable(body["separation_failures"]),
        completion=body["completion"],
    )


DEFAULT_SEED = {"points": ["o"], "dist": [["0/1"]]}


def _urysohn(config: PipelineConfig, rep: Report) -> None:
    seed = (
        _load(config.seed_file, "metric space", FinMetricSpace.from_json)
        if config.seed_file
        else FinMetricSpace.from_json(DEFAULT_SEED)
    )
    if config.q < 1 or config.depth < 0:
        raise InputError("--q must be positive and --depth non-negative")
    try:
        tower = urysohn_approx(seed, config.q, config.depth, config.budget, config.max_support)
    except TopogreyError as exc:
        rep.add("tower", False, {"reason": str(exc), "witness": exc.witness})
        return
    complete = len(tower.levels) - 1 - (1 if tower.exhausted else 0)
    for n in range(complete):
        v = extension_property_check(tower, n)
        rep.add(f"extension property at level {n}", bool(v), {"reason": v.reason, "witness": v.witness})
    rep.stats.update(
        level_sizes=[len(L) for L in tower.levels],
        exhausted=tower.exhausted,
        tower=tower.to_json(),
    )


def _isometry(config: PipelineConfig, rep: Report) -> None:
    if len(config.inputs) != 2:
        raise InputError("isometry needs exactly two --input files")
    X, Y = (_load(p, "metric space", FinMetricSpace.from_json) for p in config.inputs)
    f = find_isometry(X, Y)
    profile = lambda M: sorted(str(v) for row in M.dist for v in row)  # noqa: E731
    rep.add(
        "isometric",
        f is not None,
        {"reason": "exhaustive search found no isometry", "sizes": [len(X), len(Y)],
         "same_distance_multiset": profile(X) == profile(Y)},
    )
    rep.stats.update(sizes=[len(X), len(Y)])
    if f is not None:
        rep.stats["isometry"] = {str(p): str(q) for p, q in f.items()}


def _uniformize(config: PipelineConfig, rep: Report) -> None:
    if config.mode not in MODES:
        raise InputError(f"unknown mode {config.mode!r}; expected one of {sorted(MODES)}")
    mode = MODES[config.mode]
    path = _need(config.inputs[0] if config.inputs else None, "--input")
    M = _load(path, "structure family", DiscreteStructureFamily.from_json)
    try:
        U = uniformize(M, mode)
        res = verify_uniformization(U)
    except TopogreyError as exc:
        rep.add("uniformization", False, {"reason": str(exc), "witness": exc.witness})
        return
    rep.add("full", res.full, "some hom-set of the logic action is missed")
    rep.add("faithful", res.faithful, "two isomorphisms collapse")
    rep.add("orbit reduction injective", res.orbit_reduction_injective, "two orbits merge")
    if mode == "injective_on_objects":
        rep.add("injective on objects", res.injective_on_objects, dict(U.object_map))
        rep.add("decode round trip", bool(res.decode_round_trip), "marker positions do not decode")
    rep.stats.update(
        universe_size=U.N,
        base_size=len(M.base),
        images=len(U.images),
        object_map={str(x): i for x, i in U.object_map.items()},
        iso_counts=laws._jsonable(res.iso_counts),
        image_family=U.image_family.to_json(),
    )


def _check_laws(config: PipelineConfig, rep: Report) -> None:
    names = sorted(laws.SUITES) if config.suite == "all" else [config.suite]
    for name in names:
        if name not in laws.SUITES:
            raise InputError(f"unknown suite {name!r}; known: {', '.join(sorted(laws.SUITES))}")
    if config.count < 0:
        raise InputError("--count must be non-negative")
    for name in names:
        try:
            res = laws.check_laws(name, config.seed, config.count, config.mutation)
        except KeyError as exc:
            raise InputError(exc.args[0]) from None
        witness = [{k: f[k] for k in ("instance", "law", "witness")} for f in res["failures"]]
        rep.add(name, res["verdict"] == "pass", witness, passed=res["passed"], failed=res["failed"])
        rep.stats[name] = [r["stats"] for r in res["instances"]]


DISPATCH = {
    "represent-discrete": _represent_discrete,
    "represent-metric": _represent_metric,
    "urysohn": _urysohn,
    "isometry": _isometry,
    "uniformize": _uniformize,
    "check-laws": _check_laws,
}


def run_pipeline(config: PipelineConfig) -> Report:
    """Run one command; raises :class:`InputError` for unusable input."""
    if config.command not in DISPATCH:
        raise InputError(f"unknown command {config.command!r}")
    rep = Report(config.echo())
    start = time.perf_counter()
    DISPATCH[config.command](config, rep)
    rep.wall_time = time.perf_counter() - start
    return rep


# -- argument parsing --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", action="append", default=[], help="input file (repeatable)")
    common.add_argument("--output", help="write the JSON report here instead of stdout")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--summary", action="store_true", help="print a one-line-per-check summary to stderr")

    p = argparse.ArgumentParser(prog="topogrey", description="Exact finite-scale grey metric and groupoid checks.")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("represent-discrete", parents=[common], help="coset representation of a finite groupoid")
    d.add_argument("--groupoid")
    d.add_argument("--subgroupoids")

    m = sub.add_parser("represent-metric", parents=[common], help="metric representation from grey norms")
    m.add_argument("--groupoid")
    m.add_argument("--norms")
    m.add_argument("--synthesize-filtration", type=int, metavar="DEPTH", dest="synthesize_depth")
    m.add_argument("--budget", type=int)

    u = sub.add_parser("urysohn", parents=[common], help="finite Urysohn approximation towers")
    u.add_argument("action", choices=["build"])
    u.add_argument("--q", type=int, default=1)
    u.add_argument("--depth", type=int, default=1)
    u.add_argument("--budget", type=int)
    u.add_argument("--max-support", type=int)
    u.add_argument("--seed-file")

    sub.add_parser("isometry", parents=[common], help="find an isometry between two metric spaces")

    f = sub.add_parser("uniformize", parents=[common], help="push a structure family onto one universe")
    f.add_argument("--mode", default="plain", choices=sorted(MODES))

    c = sub.add_parser("check-laws", parents=[common], help="run seeded property suites")
    c.add_argument("--suite", default="all")
    c.add_argument("--count", type=int, default=100)
    c.add_argument("--plant-mutation", dest="mutation", help="harness self-test: swap in a broken operation")
    return p


def config_from_args(ns: argparse.Namespace) -> PipelineConfig:
    fields = {f.name for f in dataclasses.fields(PipelineConfig)}
    kw = {k: v for k, v in vars(ns).items() if k in fields and v is not None}
    kw["inputs"] = tuple(ns.input)
    return PipelineConfig(**kw)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    config = config_from_args(ns)
    try:
        rep = run_pipeline(config)
    except InputError as exc:
        print(f"topogrey: error: {exc}", file=sys.stderr)
        return 2
    text = dumps(rep)
    if config.output:
        Path(config.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if ns.summary or config.output:
        for c in rep.checks:
            print(f"{c['verdict'].upper():4}  {c['name']}", file=sys.stderr)
        print(f"{rep.verdict.upper()}  ({len(rep.checks)} checks)", file=sys.stderr)
    return 0 if rep.verdict == "pass" else 1


if __name__ == "__main__":
    sys.exit(main())
