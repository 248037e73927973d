"""Command-line front end: ``quadneb {lt,lo,compare,verify} ...``.

Exit codes: 0 success, 1 computational mismatch or bound violation, 2 usage
error, 3 failure of the external data service.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Any, Sequence

from .characters import LocalNebentypus, count_fiber_orbits
from .local_types import enumerate_orbits, lt_closed_form, primitive_orbits_closed_form, KINDS
from .lmfdb_client import FIXTURE_SPACES, LMFDBClient, LMFDBError, compare
from .pseudo_eigenvalues import lo_closed_form, lo_count, select_reading, steinberg_lambda
from .residue_groups import QuadExt

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_EXTERNAL = 0, 1, 2, 3

GRID_P = (3, 5, 7, 11, 13)
GRID_N = (1, 2, 3, 4, 5, 6)


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    p: int | None = None
    n: int | None = None
    N: tuple[int, ...] = ()
    k: tuple[int, ...] = ()
    ramified: bool = True
    value_at_p: int | None = None
    policy: str = "computed"
    s_asym: int | None = None
    fmt: str = "table"
    cache_dir: str | None = None
    offline: bool = False
    fixtures: bool = False
    strict: bool = True
    jobs: int = 1

    @property
    def psi(self) -> LocalNebentypus:
        return LocalNebentypus(self.ramified, 1 if self.value_at_p is None else self.value_at_p)

    def validate(self) -> "RunConfig":
        if self.command in ("lt", "lo"):
            if self.p is None or self.n is None:
                raise UsageError("-p and -n are required")
            if self.p == 2:
                raise UsageError("p = 2 is not supported")
            if self.p < 3 or any(self.p % q == 0 for q in range(2, int(self.p**0.5) + 1)):
                raise UsageError(f"p = {self.p} is not an odd prime")
            if self.n < 1:
                raise UsageError("n must be at least 1")
        if self.value_at_p is not None and self.value_at_p not in (1, -1):
            raise UsageError("--value-at-p must be 1 or -1")
        if self.command == "lo" and not self.ramified and self.n == 1 and self.value_at_p is None:
            raise UsageError("the Steinberg count at n = 1 needs --value-at-p for an unramified nebentypus")
        if self.command == "compare":
            if not self.fixtures and not self.N:
                raise UsageError("give -N/-k or --fixtures")
            if len(self.N) != len(self.k):
                raise UsageError("-N and -k must be given the same number of times")
        return self


# -------------------------------------------------------------------- output


def emit(rows: list[dict], fmt: str, out=None) -> None:
    out = out or sys.stdout
    if fmt == "json":
        out.write(json.dumps(rows, indent=2, sort_keys=True) + "\n")
        return
    if not rows:
        return
    cols = list(rows[0])
    cells = [[_cell(r.get(c)) for c in cols] for r in rows]
    if fmt == "tsv":
        out.write("\t".join(cols) + "\n")
        for line in cells:
            out.write("\t".join(line) + "\n")
        return
    widths = [max(len(c), *(len(line[i]) for line in cells)) for i, c in enumerate(cols)]
    out.write("  ".join(c.ljust(w) for c, w in zip(cols, widths)).rstrip() + "\n")
    for line in cells:
        out.write("  ".join(x.ljust(w) for x, w in zip(line, widths)).rstrip() + "\n")


def _cell(v: Any) -> str:
    if v is None:
        return "-"
    if isinstance(v, (list, tuple)):
        return ",".join(map(str, v))
    if isinstance(v, dict):
        return json.dumps(v, sort_keys=True)
    return str(v)


# ----------------------------------------------------------------- commands


def lt_row(p: int, n: int, psi: LocalNebentypus) -> dict:
    closed = lt_closed_form(p, n, psi).as_dict()
    brute = enumerate_orbits(p, n, psi)[1].as_dict()
    row: dict[str, Any] = {"p": p, "n": n, "psi": psi.label()}
    for kind in (*KINDS, "total"):
        row[kind] = closed[kind]
        row[f"{kind}_enumerated"] = brute[kind]
    row["match"] = closed == brute
    return row


def lo_row(p: int, n: int, psi: LocalNebentypus, policy: str, s_asym: int | None) -> dict:
    c = lo_count(p, n, psi, policy=policy, s_asym=s_asym)
    d = c.as_dict()
    d["psi"] = psi.label()
    if policy == "computed":
        d["reading_check"] = select_reading().as_dict()["matches"]
    return d


def cmd_lt(cfg: RunConfig) -> int:
    row = lt_row(cfg.p, cfg.n, cfg.psi)
    emit([row], cfg.fmt)
    return EXIT_OK if row["match"] else EXIT_MISMATCH


def cmd_lo(cfg: RunConfig) -> int:
    emit([lo_row(cfg.p, cfg.n, cfg.psi, cfg.policy, cfg.s_asym)], cfg.fmt)
    return EXIT_OK


def cmd_compare(cfg: RunConfig) -> int:
    spaces = list(FIXTURE_SPACES) if cfg.fixtures and not cfg.N else list(zip(cfg.N, cfg.k))
    client = LMFDBClient(cfg.cache_dir, offline=cfg.offline or cfg.fixtures, use_fixtures=cfg.fixtures or cfg.offline)
    try:
        rows = compare(spaces, client, strict=cfg.strict)
    except LMFDBError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EXTERNAL
    emit([r.as_dict() for r in rows], cfg.fmt)
    bad = [r for r in rows if r.verdict == "VIOLATION"]
    for r in bad:
        print(f"VIOLATION: LO = {r.lo} exceeds NCM = {r.ncm} at N = {r.N}, k = {r.k}", file=sys.stderr)
    return EXIT_MISMATCH if bad else EXIT_OK


# ------------------------------------------------------------------ verify


def _verify_cell(task: tuple) -> list[dict]:
    kind, p, n, ramified, value = task
    psi = LocalNebentypus(ramified, value)
    if kind == "characters":
        rows = []
        for ext in QuadExt.all_for(p):
            expected = primitive_orbits_closed_form(p, n, ext, psi)
            got = count_fiber_orbits(p, n, ext, psi).orbits
            rows.append(
                {"check": "characters", "p": p, "n": n, "psi": psi.label(), "extension": ext.kind,
                 "expected": expected, "got": got, "match": expected == got}
            )
        return rows
    if kind == "lt":
        row = lt_row(p, n, psi)
        return [{"check": "lt", "p": p, "n": n, "psi": psi.label(), "expected": row["total"],
                 "got": row["total_enumerated"], "match": row["match"]}]
    c = lo_count(p, n, psi)
    base, symbolic = lo_closed_form(p, n, psi)
    expected = f"{base} + |S_asym|" if symbolic else base
    match = (c.lt_total == base) if symbolic else (c.lo_total == base)
    return [{"check": "lo", "p": p, "n": n, "psi": psi.label(), "expected": expected, "got": c.lo_total,
             "s_asym": c.s_asym, "pairs": list(c.pairs), "match": match}]


def verify_tasks(grid_p: Sequence[int] = GRID_P, grid_n: Sequence[int] = GRID_N) -> list[tuple]:
    tasks = []
    for p in grid_p:
        for n in grid_n:
            for ramified, value in ((True, 1), (False, 1)):
                tasks.append(("characters", p, n, ramified, value))
            for ramified, value in ((True, 1), (True, -1), (False, 1), (False, -1)):
                tasks.append(("lt", p, n, ramified, value))
                tasks.append(("lo", p, n, ramified, value))
    return tasks


def anchor_rows() -> list[dict]:
    rows = []
    for value, expected_sym in ((1, False), (-1, True)):
        pair = steinberg_lambda(LocalNebentypus.unramified(value))
        rows.append({"check": "steinberg", "p": 3, "n": 1, "psi": LocalNebentypus.unramified(value).label(),
                     "expected": "symmetric" if expected_sym else "asymmetric",
                     "got": "symmetric" if pair.symmetric else "asymmetric", "match": pair.symmetric == expected_sym})
    for p in (3, 5, 7):
        c = lo_count(p, 3, LocalNebentypus.tame())
        rows.append({"check": "lo-anchor", "p": p, "n": 3, "psi": "tame(Psi(p)=+1)", "expected": 2,
                     "got": c.lo_total, "match": c.lo_total == 2})
    rep = select_reading()
    rows.append({"check": "reading", "p": 3, "n": 3, "psi": "tame(Psi(p)=+1)", "expected": "unique match",
                 "got": rep.chosen.value, "match": sum(rep.matches.values()) == 1})
    return rows


def run_verify(jobs: int = 1, grid_p: Sequence[int] = GRID_P, grid_n: Sequence[int] = GRID_N) -> list[dict]:
    tasks = verify_tasks(grid_p, grid_n)
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            results = list(pool.map(_verify_cell, tasks))
    else:
        results = [_verify_cell(t) for t in tasks]
    return [row for chunk in results for row in chunk] + anchor_rows()


def cmd_verify(cfg: RunConfig) -> int:
    rows = run_verify(cfg.jobs)
    bad = [r for r in rows if not r["match"]]
    summary = {"cells": len(rows), "mismatches": len(bad)}
    if cfg.fmt == "json":
        sys.stdout.write(json.dumps({"summary": summary, "rows": rows}, indent=2, sort_keys=True) + "\n")
    else:
        emit(bad or [summary], cfg.fmt)
        if not bad:
            print(f"all {len(rows)} checks match", file=sys.stderr)
    return EXIT_MISMATCH if bad else EXIT_OK


# -------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quadneb", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("table", "json", "tsv"), default="table", dest="fmt")
    local = argparse.ArgumentParser(add_help=False)
    local.add_argument("-p", type=int, required=True)
    local.add_argument("-n", type=int, required=True)
    g = local.add_mutually_exclusive_group()
    g.add_argument("--tame", dest="ramified", action="store_true", default=True)
    g.add_argument("--unramified", dest="ramified", action="store_false")
    local.add_argument("--value-at-p", type=int, choices=(1, -1))

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("lt", parents=[common, local], help="local type orbit counts")
    lo = sub.add_parser("lo", parents=[common, local], help="local type and pseudo-eigenvalue class counts")
    pol = lo.add_mutually_exclusive_group()
    pol.add_argument("--computed", dest="policy", action="store_const", const="computed", default="computed")
    pol.add_argument("--table", dest="policy", action="store_const", const="table")
    pol.add_argument("--param-asym", type=int, metavar="V")

    cmp_ = sub.add_parser("compare", parents=[common], help="LO against non-CM orbit counts")
    cmp_.add_argument("-N", type=int, action="append", default=[])
    cmp_.add_argument("-k", type=int, action="append", default=[])
    cmp_.add_argument("--fixtures", action="store_true", help="use the shipped fixture spaces and data")
    cmp_.add_argument("--offline", action="store_true", help="never touch the network")
    cmp_.add_argument("--cache-dir")
    st = cmp_.add_mutually_exclusive_group()
    st.add_argument("--strict", dest="strict", action="store_true", default=True)
    st.add_argument("--relaxed", dest="strict", action="store_false")

    ver = sub.add_parser("verify", parents=[common], help="sweep every table cell")
    ver.add_argument("--all", action="store_true", required=True)
    ver.add_argument("--jobs", type=int, default=1)
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    policy = getattr(ns, "policy", "computed")
    s_asym = getattr(ns, "param_asym", None)
    if s_asym is not None:
        policy = "parameter"
    return RunConfig(
        command=ns.command,
        p=getattr(ns, "p", None),
        n=getattr(ns, "n", None),
        N=tuple(getattr(ns, "N", ())),
        k=tuple(getattr(ns, "k", ())),
        ramified=getattr(ns, "ramified", True),
        value_at_p=getattr(ns, "value_at_p", None),
        policy=policy,
        s_asym=s_asym,
        fmt=ns.fmt,
        cache_dir=getattr(ns, "cache_dir", None),
        offline=getattr(ns, "offline", False),
        fixtures=getattr(ns, "fixtures", False),
        strict=getattr(ns, "strict", True),
        jobs=getattr(ns, "jobs", 1),
    ).validate()


COMMANDS = {"lt": cmd_lt, "lo": cmd_lo, "compare": cmd_compare, "verify": cmd_verify}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        cfg = config_from_args(ns)
        return COMMANDS[cfg.command](cfg)
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
