"""Seeded instance generation and the method-comparison experiment."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import NamedTuple, Optional

import numpy as np

from .actions import ActionParams, TimeParams
from .geometry import Disc2, Point2
from .planner import Method, Params, PlannerParams, Termination, count_actions, run_sorter
from .push_physics import SimParams
from .world import GoalRegion, ObjectKind, RobotModel, SceneObject, Table, WorldState, validate

log = logging.getLogger(__name__)

MAX_GENERATION_ATTEMPTS = 10_000
PUBLISHED_SPEEDUP_PCT = 27.9


class GenerationFailure(RuntimeError):
    pass


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class BenchConfig:
    n_values: tuple[int, ...] = tuple(range(3, 11))
    runs_per_n: int = 2
    base_seed: int = 0
    table: Table = Table(Point2(0.25, -0.5), Point2(0.85, 0.5))
    robot: RobotModel = RobotModel()
    goal_radius: float = 0.12
    object_radius: float = 0.03
    sim: SimParams = SimParams()
    action: ActionParams = ActionParams()
    time: TimeParams = TimeParams()
    planner: PlannerParams = PlannerParams()

    def __post_init__(self) -> None:
        if self.runs_per_n < 1:
            raise ConfigError("runs_per_n must be >= 1")
        if not self.n_values:
            raise ConfigError("n_values must be non-empty")

    @property
    def params(self) -> Params:
        return Params(self.sim, self.action, self.time, self.planner)


class ResultRow(NamedTuple):
    n: int
    seed: int
    method: Method
    total_time: float
    steps: int
    pushes: int
    picks: int
    terminated: Termination


@dataclass
class Summary:
    # (n, mean pick&place time, mean mixed time)
    per_n: list[tuple[int, float, float]]
    speedup_pct: float
    pairs: int
    excluded: int = 0
    slower_n: list[int] = field(default_factory=list)


def instance_seed(base_seed: int, n: int, run: int) -> int:
    """64-bit seed for one (n, run) cell; stable when n_values change."""
    digest = hashlib.blake2b(f"{base_seed}:{n}:{run}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def generate_instance(n: int, seed: int, cfg: BenchConfig = BenchConfig()) -> WorldState:
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    t = cfg.table
    R, r = cfg.goal_radius, cfg.object_radius
    attempts = 0

    def draw(margin: float) -> Point2:
        nonlocal attempts
        attempts += 1
        if attempts > MAX_GENERATION_ATTEMPTS:
            raise GenerationFailure(f"could not place {n} objects in {MAX_GENERATION_ATTEMPTS} attempts")
        x, y = rng.uniform((t.min.x + margin, t.min.y + margin), (t.max.x - margin, t.max.y - margin))
        return Point2(float(x), float(y))

    red = draw(R)
    while True:
        blue = draw(R)
        if red.dist(blue) >= 2.0 * (R - r):
            break
    goals = (GoalRegion(ObjectKind.RED, red, R), GoalRegion(ObjectKind.BLUE, blue, R))

    objects: list[SceneObject] = []
    for i in range(n):
        kind = ObjectKind.RED if i % 2 == 0 else ObjectKind.BLUE
        while True:
            c = draw(r)
            if any(c.dist(g.center) < R + r for g in goals):
                continue
            if any(c.dist(o.center) < 2.0 * r for o in objects):
                continue
            break
        objects.append(SceneObject(i, kind, Disc2(c, r)))
    w = WorldState(t, cfg.robot, tuple(objects), goals)
    assert not validate(w), validate(w)
    return w


def run_cell(n: int, run: int, cfg: BenchConfig) -> list[ResultRow]:
    seed = instance_seed(cfg.base_seed, n, run)
    w = generate_instance(n, seed, cfg)
    rows = []
    for method in (Method.PICK_PLACE_ONLY, Method.PUSH_PLUS_PICK_PLACE):
        tr = run_sorter(w, seed, method, cfg.params)
        pushes, picks = count_actions(tr)
        rows.append(ResultRow(n, seed, method, tr.total_time, len(tr.steps), pushes, picks, tr.terminated))
    return rows


def run_experiment(
    cfg: BenchConfig, failures: Optional[list] = None, progress=None
) -> list[ResultRow]:
    """Both methods on the same instance for every (n, run) cell.

    Cells whose instance cannot be generated are skipped; their
    ``GenerationFailure`` is appended to ``failures`` when given.
    """
    if cfg.runs_per_n < 10:
        log.warning("runs_per_n=%d gives noisy means; 20 or more is recommended", cfg.runs_per_n)
    rows: list[ResultRow] = []
    for n in sorted(cfg.n_values):
        for run in range(cfg.runs_per_n):
            try:
                rows.extend(run_cell(n, run, cfg))
            except GenerationFailure as e:
                log.error("n=%d run=%d: %s", n, run, e)
                if failures is not None:
                    failures.append((n, run, e))
            if progress is not None:
                progress(n, run)
    return rows


def summarize(rows: list[ResultRow]) -> Summary:
    """Per-n mean times and the mean per-instance relative saving.

    Only instances where both methods solved the task enter the means.
    """
    by_seed: dict[tuple[int, int], dict[Method, ResultRow]] = {}
    for row in rows:
        by_seed.setdefault((row.n, row.seed), {})[row.method] = row
    per_n: dict[int, tuple[list[float], list[float]]] = {}
    savings = []
    excluded = 0
    for (n, _), pair in sorted(by_seed.items()):
        base = pair.get(Method.PICK_PLACE_ONLY)
        mixed = pair.get(Method.PUSH_PLUS_PICK_PLACE)
        if (
            base is None
            or mixed is None
            or base.terminated != Termination.SOLVED
            or mixed.terminated != Termination.SOLVED
        ):
            excluded += 1
            continue
        b, m = per_n.setdefault(n, ([], []))
        b.append(base.total_time)
        m.append(mixed.total_time)
        if base.total_time > 0:
            savings.append((base.total_time - mixed.total_time) / base.total_time)
    table = [(n, float(np.mean(b)), float(np.mean(m))) for n, (b, m) in sorted(per_n.items())]
    return Summary(
        per_n=table,
        speedup_pct=100.0 * float(np.mean(savings)) if savings else 0.0,
        pairs=len(savings),
        excluded=excluded,
        slower_n=[n for n, b, m in table if not m < b],
    )


def results_csv(rows: list[ResultRow]) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["n", "seed", "method", "total_time_s", "steps", "pushes", "picks", "terminated"])
    for r in rows:
        wr.writerow([r.n, r.seed, r.method.value, f"{r.total_time:.6f}", r.steps, r.pushes, r.picks, r.terminated.value])
    return buf.getvalue()


def summary_csv(s: Summary) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["n", "mean_time_pickplace_s", "mean_time_mixed_s"])
    for n, b, m in s.per_n:
        wr.writerow([n, f"{b:.6f}", f"{m:.6f}"])
    wr.writerow(["overall_speedup_pct", f"{s.speedup_pct:.3f}"])
    return buf.getvalue()


def baseline_r2(summary: Summary) -> float:
    """R^2 of a least-squares line through (n, mean pick&place time)."""
    x = np.array([row[0] for row in summary.per_n], dtype=float)
    y = np.array([row[1] for row in summary.per_n], dtype=float)
    slope, icept = np.polyfit(x, y, 1)
    resid = y - (slope * x + icept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    return 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0


# --- config files ----------------------------------------------------------


def _sub(cls, d, where: str):
    if not isinstance(d, dict):
        raise ConfigError(f"{where}: expected an object")
    names = {f.name for f in fields(cls)}
    extra = set(d) - names
    if extra:
        raise ConfigError(f"{where}: unknown keys {sorted(extra)}")
    try:
        return cls(**d)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{where}: {e}") from None


def config_from_dict(d: dict) -> BenchConfig:
    if not isinstance(d, dict):
        raise ConfigError("config: expected an object")
    allowed = {f.name for f in fields(BenchConfig)}
    extra = set(d) - allowed
    if extra:
        raise ConfigError(f"config: unknown keys {sorted(extra)}")
    kw = {}
    if "n_values" in d:
        kw["n_values"] = tuple(int(v) for v in d["n_values"])
    for key in ("runs_per_n", "base_seed"):
        if key in d:
            kw[key] = int(d[key])
    for key in ("goal_radius", "object_radius"):
        if key in d:
            kw[key] = float(d[key])
    if "table" in d:
        td = d["table"]
        if not isinstance(td, dict) or set(td) != {"min", "max"}:
            raise ConfigError("table: expected keys min, max")
        kw["table"] = Table(Point2(*map(float, td["min"])), Point2(*map(float, td["max"])))
    if "robot" in d:
        rd = dict(d["robot"])
        for key in ("base", "home"):
            if key in rd:
                rd[key] = Point2(*map(float, rd[key]))
        kw["robot"] = _sub(RobotModel, rd, "robot")
    for key, cls in (("sim", SimParams), ("action", ActionParams), ("time", TimeParams), ("planner", PlannerParams)):
        if key in d:
            kw[key] = _sub(cls, d[key], key)
    return BenchConfig(**kw)


def load_config(path: str | Path) -> BenchConfig:
    try:
        d = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: {e}") from None
    return config_from_dict(d)


def with_runs(cfg: BenchConfig, runs: int) -> BenchConfig:
    return replace(cfg, runs_per_n=runs)

