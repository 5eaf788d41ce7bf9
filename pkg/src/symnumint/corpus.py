"""Golden corpora: JSON-lines entries, per-entry runs and aggregate reports."""

from __future__ import annotations

import json
import signal
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from importlib import resources
from pathlib import Path

import numpy as np

from .expr import differentiate, evaluate_many, sub, to_str
from .integrator import IntegratorConfig, integrate, verification_points, verify
from .parser import parse, variable_of

TIMING_FIELDS = ("wall_time",)


class CorpusError(Exception):
    pass


class EntryTimeout(Exception):
    pass


@dataclass(frozen=True)
class CorpusEntry:
    id: str
    integrand: str
    expected: str | None = None
    tags: tuple[str, ...] = ()


@dataclass
class EntryResult:
    id: str
    integrand: str
    tags: list[str]
    outcome: str  # solved | unsolved | error
    antiderivative: str | None = None
    residual: float | None = None
    generator_index: int | None = None
    source: str | None = None
    expected_ok: bool | None = None
    message: str = ""
    wall_time: float = 0.0


@dataclass
class RunReport:
    entries: list[EntryResult] = field(default_factory=list)

    @property
    def aggregates(self) -> dict[str, dict[str, int]]:
        agg: dict[str, dict[str, int]] = {}
        for e in self.entries:
            for tag in ("all", *e.tags):
                a = agg.setdefault(tag, {"success": 0, "failure": 0, "error": 0, "total": 0})
                key = {"solved": "success", "unsolved": "failure"}.get(e.outcome, "error")
                a[key] += 1
                a["total"] += 1
        return dict(sorted(agg.items()))

    def to_dict(self, timing: bool = True) -> dict:
        entries = []
        for e in self.entries:
            d = asdict(e)
            if not timing:
                for k in TIMING_FIELDS:
                    d.pop(k)
            entries.append(d)
        return {"entries": entries, "aggregates": self.aggregates}

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.to_dict(timing), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        data = json.loads(text)
        return cls([EntryResult(**e) for e in data["entries"]])

    def table(self) -> str:
        rows = [f"{'group':<16}{'success':>9}{'failure':>9}{'error':>7}{'total':>7}"]
        for tag, a in self.aggregates.items():
            rows.append(f"{tag:<16}{a['success']:>9}{a['failure']:>9}{a['error']:>7}{a['total']:>7}")
        return "\n".join(rows)


def parse_entry(line: str, lineno: int = 0) -> CorpusEntry:
    try:
        d = json.loads(line)
        return CorpusEntry(str(d["id"]), str(d["integrand"]), d.get("expected"),
                           tuple(d.get("tags", ())))
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise CorpusError(f"line {lineno}: {exc}") from exc


def load_corpus(path) -> list[CorpusEntry]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CorpusError(str(exc)) from exc
    return [parse_entry(line, i + 1) for i, line in enumerate(text.splitlines()) if line.strip()]


def goldens_path() -> Path:
    return Path(str(resources.files("symnumint").joinpath("data/goldens.jsonl")))


def entry_seed(seed: int, entry_id: str) -> int:
    return zlib.crc32(f"{seed}:{entry_id}".encode())


def expected_matches(y, expected, cfg: IntegratorConfig, f) -> bool:
    """d/dx (y - expected) vanishes at 5 points."""
    var = variable_of(f)
    rng = np.random.default_rng([cfg.seed, 3000])
    z = verification_points(f, replace(cfg, verify_points=5), rng, var)
    with np.errstate(all="ignore"):
        d = evaluate_many(differentiate(sub(y, expected), var), z, var)
        scale = 1 + np.abs(evaluate_many(f, z, var))
    return bool(np.all(np.isfinite(d)) and np.max(np.abs(d) / scale) < 10 * cfg.verify_tol)


def _raise_timeout(signum, frame):
    raise EntryTimeout()


def run_entry(entry: CorpusEntry, cfg: IntegratorConfig, timeout: float = 10.0) -> EntryResult:
    cfg = replace(cfg, sampler=replace(cfg.sampler, rng_seed=entry_seed(cfg.seed, entry.id)))
    res = EntryResult(entry.id, entry.integrand, list(entry.tags), "error")
    t0 = time.perf_counter()
    use_alarm = timeout and timeout > 0 and hasattr(signal, "setitimer")
    if use_alarm:
        old = signal.signal(signal.SIGALRM, _raise_timeout)
        signal.setitimer(signal.ITIMER_REAL, timeout)
    try:
        f = parse(entry.integrand)
        expected = parse(entry.expected) if entry.expected else None
        out = integrate(f, cfg)
        if out.solved:
            res.outcome = "solved"
            res.antiderivative = to_str(out.antiderivative)
            res.residual = float(out.residual)
            res.generator_index = out.generator_index
            res.source = out.source
            if expected is not None:
                res.expected_ok = expected_matches(out.antiderivative, expected, cfg, f)
        else:
            res.outcome = "unsolved"
            res.message = out.reason
        if expected is not None and not verify(expected, f, cfg):
            res.message = (res.message + "; " if res.message else "") + "expected does not verify"
    except EntryTimeout:
        res.outcome = "unsolved"
        res.message = f"timeout after {timeout:g} s"
    except Exception as exc:  # noqa: BLE001 - an entry error must not stop the run
        res.outcome = "error"
        res.message = f"{type(exc).__name__}: {exc}"
    finally:
        if use_alarm:
            signal.setitimer(signal.ITIMER_REAL, 0)
            signal.signal(signal.SIGALRM, old)
    res.wall_time = time.perf_counter() - t0
    return res


def _run_star(args):
    return run_entry(*args)


def run_corpus(entries, cfg: IntegratorConfig | None = None, timeout: float = 10.0,
               jobs: int = 1) -> RunReport:
    cfg = cfg or IntegratorConfig()
    work = [(e, cfg, timeout) for e in entries]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return RunReport(list(pool.map(_run_star, work)))
    return RunReport([_run_star(w) for w in work])
