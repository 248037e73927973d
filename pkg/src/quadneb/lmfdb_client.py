"""Newform orbit data from the LMFDB, with an on-disk cache and shipped fixtures.

Lookup order for a query is: shipped fixtures (when enabled), the cache, then
the network (unless offline).  Every network response is stored in the cache
under a content-addressed file name derived from the query and the interface
schema version, so bumping the schema invalidates old entries.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
import time
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Iterable, Literal, Mapping

from .arith import factorize, legendre
from .characters import LocalNebentypus
from .pseudo_eigenvalues import Policy, ReadingChoice, bound_hypothesis_holds, lo_count

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
CACHE_ENV = "QUADNEB_CACHE_DIR"
FIXTURE_SPACES: tuple[tuple[int, int], ...] = ((27, 35), (125, 10), (125, 12), (343, 3), (343, 5), (243, 7))


class LMFDBError(RuntimeError):
    pass


class LMFDBUnavailable(LMFDBError):
    """No network route and nothing cached for the query."""


class LMFDBSchemaError(LMFDBError):
    def __init__(self, message: str, payload: Any = None):
        super().__init__(message)
        self.payload = payload


class CacheConflict(LMFDBError):
    """A cache entry exists with different content; it is never overwritten silently."""


def _data_dir() -> Path:
    return Path(str(resources.files("quadneb") / "data" / "lmfdb" / f"v{SCHEMA_VERSION}"))


def load_descriptor() -> dict:
    with open(_data_dir() / "interface.json") as f:
        desc = json.load(f)
    if desc.get("schema_version") != SCHEMA_VERSION:
        raise LMFDBSchemaError("interface descriptor does not match the client schema version", desc)
    return desc


@dataclass(frozen=True)
class NewformRecord:
    label: str
    level: int
    weight: int
    char_orbit_label: str
    char_order: int
    is_cm: bool
    dim: int | None = None
    pseudo_eigenvalues: tuple[tuple[int, str], ...] = ()

    def __post_init__(self) -> None:
        parts = self.label.split(".")
        if len(parts) != 4:
            raise LMFDBSchemaError(f"label {self.label!r} is not level.weight.charorbit.isogeny")
        level, weight, orbit, _ = parts
        if (int(level), int(weight), orbit) != (self.level, self.weight, self.char_orbit_label):
            raise LMFDBSchemaError(f"label {self.label!r} disagrees with its fields")

    def as_dict(self) -> dict:
        d = asdict(self)
        d["pseudo_eigenvalues"] = [list(x) for x in self.pseudo_eigenvalues]
        return d


def parse_records(payload: Any, desc: Mapping | None = None) -> list[NewformRecord]:
    desc = desc or load_descriptor()
    if not isinstance(payload, dict) or not isinstance(payload.get(desc["data_key"]), list):
        raise LMFDBSchemaError("response has no data list", payload)
    fields = desc["record_fields"]
    out = []
    for raw in payload[desc["data_key"]]:
        if not isinstance(raw, dict):
            raise LMFDBSchemaError("record is not an object", payload)
        missing = [k for k in desc["required"] if fields[k] not in raw]
        if missing:
            raise LMFDBSchemaError(f"record lacks fields {missing}", payload)
        label = raw[fields["label"]]
        try:
            out.append(
                NewformRecord(
                    label=label,
                    level=int(raw[fields["level"]]),
                    weight=int(raw[fields["weight"]]),
                    char_orbit_label=str(raw.get(fields["char_orbit_label"]) or label.split(".")[2]),
                    char_order=int(raw[fields["char_order"]]),
                    is_cm=bool(raw[fields["is_cm"]]),
                    dim=None if raw.get(fields["dim"]) is None else int(raw[fields["dim"]]),
                )
            )
        except (TypeError, ValueError, IndexError, AttributeError) as exc:
            raise LMFDBSchemaError(f"malformed record {raw!r}: {exc}", payload) from exc
    return sorted(out, key=lambda r: r.label)


def strip_volatile(payload: Any, volatile: Iterable[str]) -> Any:
    vol = set(volatile)
    if isinstance(payload, dict):
        return {k: strip_volatile(v, vol) for k, v in payload.items() if k not in vol}
    if isinstance(payload, list):
        return [strip_volatile(v, vol) for v in payload]
    return payload


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


# ----------------------------------------------------------------------- cache


class Cache:
    """One JSON document per query key; writes go through a temp file and ``os.replace``."""

    def __init__(self, root: str | os.PathLike | None = None):
        root = root or os.environ.get(CACHE_ENV) or Path.home() / ".cache" / "quadneb"
        self.root = Path(root)

    @staticmethod
    def key(query: Mapping[str, Any]) -> str:
        return hashlib.sha256(canonical_json({"query": dict(query), "schema": SCHEMA_VERSION}).encode()).hexdigest()

    def path(self, query: Mapping[str, Any]) -> Path:
        return self.root / f"{self.key(query)}.json"

    def get(self, query: Mapping[str, Any]) -> Any | None:
        path = self.path(query)
        if not path.exists():
            return None
        with open(path) as f:
            doc = json.load(f)
        if doc.get("schema") != SCHEMA_VERSION or doc.get("query") != dict(query):
            return None
        return doc["payload"]

    def put(self, query: Mapping[str, Any], payload: Any) -> Path:
        path = self.path(query)
        doc = {"schema": SCHEMA_VERSION, "query": dict(query), "payload": payload}
        existing = self.get(query)
        if existing is not None:
            if canonical_json(existing) != canonical_json(payload):
                raise CacheConflict(f"cache entry {path.name} exists with different content")
            return path
        self.root.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=self.root, suffix=".tmp")
        try:
            with os.fdopen(fd, "w") as f:
                json.dump(doc, f, sort_keys=True, indent=1)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        return path


# ---------------------------------------------------------------------- client


def fixture_path(level: int, weight: int, char_order: int) -> Path:
    return _data_dir() / f"mf_newforms_N{level}_k{weight}_o{char_order}.json"


def load_pseudo_eigenvalues() -> dict[str, tuple[int, str]]:
    with open(_data_dir() / "pseudo_eigenvalues.json") as f:
        doc = json.load(f)
    return {label: (v["p"], v["lambda"]) for label, v in doc["records"].items()}


@dataclass
class LMFDBClient:
    cache_dir: str | os.PathLike | None = None
    offline: bool = False
    use_fixtures: bool = False
    min_interval: float = 1.0
    max_retries: int = 4
    backoff: float = 1.0
    timeout: float = 30.0
    session: Any = None
    _last_request: float = field(default=0.0, repr=False)

    def __post_init__(self) -> None:
        self.desc = load_descriptor()
        self.cache = Cache(self.cache_dir)

    def query(self, level: int, weight: int, char_order: int) -> dict:
        return {"collection": self.desc["collection"], "level": level, "weight": weight, "char_order": char_order}

    def url_params(self, level: int, weight: int, char_order: int) -> dict[str, str]:
        pre, q = self.desc["int_prefix"], self.desc["query_fields"]
        params = {q["level"]: f"{pre}{level}", q["weight"]: f"{pre}{weight}", q["char_order"]: f"{pre}{char_order}"}
        params.update(self.desc["format_param"])
        return params

    def fetch_newforms(self, level: int, weight: int, char_order: int = 2) -> list[NewformRecord]:
        query = self.query(level, weight, char_order)
        payload = None
        if self.use_fixtures:
            fx = fixture_path(level, weight, char_order)
            if fx.exists():
                with open(fx) as f:
                    payload = strip_volatile(json.load(f), ["_provenance"])
        if payload is None:
            payload = self.cache.get(query)
        if payload is None:
            if self.offline:
                raise LMFDBUnavailable(f"no cached or shipped data for {query} and network use is disabled")
            payload = self._download(level, weight, char_order)
            self.cache.put(query, payload)
        records = parse_records(payload, self.desc)
        lams = load_pseudo_eigenvalues()
        return [
            NewformRecord(**{**asdict(r), "pseudo_eigenvalues": (lams[r.label],)}) if r.label in lams else r
            for r in records
        ]

    # network

    def _download(self, level: int, weight: int, char_order: int) -> dict:
        url = self.desc["base_url"] + self.desc["collection"] + "/"
        params: dict | None = self.url_params(level, weight, char_order)
        rows: list = []
        while url:
            page = self._get(url, params)
            if not isinstance(page, dict) or not isinstance(page.get(self.desc["data_key"]), list):
                raise LMFDBSchemaError("response has no data list", page)
            rows.extend(page[self.desc["data_key"]])
            url, params = page.get(self.desc["next_key"]) or None, None
            if url and url.startswith("/"):
                url = "https://www.lmfdb.org" + url
        payload = {self.desc["data_key"]: rows, self.desc["next_key"]: None}
        return strip_volatile(payload, self.desc["volatile_fields"])

    def _get(self, url: str, params: Mapping | None) -> Any:
        import requests

        session = self.session or requests.Session()
        last_exc: Exception | None = None
        for attempt in range(self.max_retries + 1):
            wait = self._last_request + self.min_interval - time.monotonic()
            if wait > 0:
                time.sleep(wait)
            self._last_request = time.monotonic()
            try:
                resp = session.get(url, params=params, timeout=self.timeout)
            except requests.RequestException as exc:
                last_exc = exc
            else:
                if resp.status_code == 429 or resp.status_code >= 500:
                    last_exc = LMFDBUnavailable(f"HTTP {resp.status_code} from {url}")
                elif resp.status_code != 200:
                    raise LMFDBUnavailable(f"HTTP {resp.status_code} from {url}")
                else:
                    try:
                        return resp.json()
                    except ValueError as exc:
                        raise LMFDBSchemaError("response is not JSON", resp.text) from exc
            log.info("LMFDB request failed (%s), retry %d", last_exc, attempt + 1)
            time.sleep(self.backoff * 2**attempt)
        raise LMFDBUnavailable(f"giving up on {url}: {last_exc}")


# ----------------------------------------------------------- counts and rows


def quadratic_psi(N: int, ramified_primes: Iterable[int] | None = None) -> dict[int, LocalNebentypus]:
    """Local components of the quadratic character ``prod_{q in R} (./q)`` at the primes of N.

    At p in R the component is tame with ``Psi_p(p) = prod_{q in R, q != p} (p/q)``;
    elsewhere it is unramified with ``Psi_p(p) = prod_{q in R} (p/q)``.
    """
    primes = [p for p, _ in factorize(N)]
    R = set(primes if ramified_primes is None else ramified_primes)
    if not R <= set(primes):
        raise ValueError("the nebentypus may only ramify at primes dividing N")
    out = {}
    for p in primes:
        value = 1
        for q in R - {p}:
            value *= legendre(p, q)
        out[p] = LocalNebentypus(p in R, value)
    return out


def ncm_count(
    records: Iterable[NewformRecord], char_orbit_label: str | None = None, char_order: int = 2
) -> int:
    recs = [r for r in records if r.char_order == char_order]
    orbits = {r.char_orbit_label for r in recs}
    if char_orbit_label is None and len(orbits) > 1:
        raise ValueError(f"several character orbits {sorted(orbits)}; name the one to count")
    return sum(1 for r in recs if not r.is_cm and (char_orbit_label is None or r.char_orbit_label == char_orbit_label))


Verdict = Literal["bound-holds-equal", "bound-holds-strict", "VIOLATION"]


def verdict(lo: int, ncm: int) -> Verdict:
    if lo == ncm:
        return "bound-holds-equal"
    return "bound-holds-strict" if lo < ncm else "VIOLATION"


@dataclass(frozen=True)
class ComparisonRow:
    N: int
    k: int
    psi: str
    lo: int
    ncm: int
    verdict: Verdict
    s_sym: int
    s_asym: int
    orbits: int
    lambdas: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if verdict(self.lo, self.ncm) != self.verdict:
            raise ValueError("verdict inconsistent with lo and ncm")

    def as_dict(self) -> dict:
        d = asdict(self)
        d["lambdas"] = list(self.lambdas)
        return d


def compare(
    spaces: Iterable[tuple[int, int]],
    client: LMFDBClient,
    ramified_primes: Iterable[int] | None = None,
    char_orbit_label: str | None = None,
    strict: bool = True,
    policy: Policy = "computed",
    reading: ReadingChoice = "auto",
) -> list[ComparisonRow]:
    rows = []
    for N, k in spaces:
        if strict and not bound_hypothesis_holds(N):
            raise ValueError(f"N = {N} is outside the range where the lower bound is proven")
        psis = quadratic_psi(N, ramified_primes)
        lo, s_sym, s_asym = 1, 0, 0
        for p, e in factorize(N):
            c = lo_count(p, e, psis[p], policy=policy, reading=reading)
            if c.lo_total is None:
                raise ValueError(f"LO({p}^{e}) is symbolic under policy {policy!r}")
            lo *= c.lo_total
            s_sym += c.s_sym or 0
            s_asym += c.s_asym or 0
        records = client.fetch_newforms(N, k, 2)
        ncm = ncm_count(records, char_orbit_label)
        lambdas = tuple(f"{r.label}:{r.pseudo_eigenvalues[0][1]}" for r in records if r.pseudo_eigenvalues)
        psi_label = ",".join(f"{p}:{psis[p].label()}" for p in sorted(psis))
        rows.append(ComparisonRow(N, k, psi_label, lo, ncm, verdict(lo, ncm), s_sym, s_asym, len(records), lambdas))
    return rows
