"""One-step-lookahead greedy sorter, the pick&place-only baseline, and episode traces."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Optional, Union

import numpy as np

from .actions import (
    Action,
    ActionParams,
    Candidate,
    Infeasible,
    PickPlace,
    Push,
    Rejection,
    TimeParams,
    apply_pick_place,
    enumerate_actions,
    estimate_time,
    object_rng,
    sample_place_pose,
)
from .push_physics import SimParams
from .world import WorldState, all_sorted, heuristic, is_sorted, round_point, validate

TRACE_SCHEMA_VERSION = 1


class Method(str, enum.Enum):
    PICK_PLACE_ONLY = "PickPlaceOnly"
    PUSH_PLUS_PICK_PLACE = "PushPlusPickPlace"


class Termination(str, enum.Enum):
    SOLVED = "Solved"
    STEP_LIMIT = "StepLimit"
    STUCK = "Stuck"


@dataclass(frozen=True)
class PlannerParams:
    improvement_eps: float = 1e-4
    max_steps: Optional[int] = None  # None means 4 * n

    def __post_init__(self) -> None:
        if not self.improvement_eps > 0:
            raise ValueError("improvement_eps must be positive")

    def step_limit(self, n: int) -> int:
        return 4 * n if self.max_steps is None else self.max_steps


@dataclass(frozen=True)
class Params:
    sim: SimParams = SimParams()
    action: ActionParams = ActionParams()
    time: TimeParams = TimeParams()
    planner: PlannerParams = PlannerParams()


@dataclass(frozen=True)
class Stuck:
    """No feasible candidate improves the heuristic."""

    rejected: tuple[Rejection, ...]
    non_improving: tuple[Candidate, ...]


@dataclass(frozen=True)
class TraceStep:
    action: Action
    predicted: WorldState
    h_before: float
    h_after: float
    est_time: float
    rejected: tuple[Rejection, ...] = ()


@dataclass(frozen=True)
class EpisodeTrace:
    initial: WorldState
    steps: tuple[TraceStep, ...]
    total_time: float
    method: Method
    seed: int
    terminated: Termination
    # Evidence left by the last step when the episode ended without solving.
    final_rejected: tuple[Rejection, ...] = field(default=())
    final_non_improving: tuple[Candidate, ...] = field(default=())

    @property
    def final(self) -> WorldState:
        return self.steps[-1].predicted if self.steps else self.initial

    def count(self, kind: type) -> int:
        return sum(isinstance(s.action, kind) for s in self.steps)


def greedy_step(w: WorldState, rng: np.random.Generator, params: Params = Params()) -> Union[Candidate, Stuck]:
    """Pick the candidate whose predicted world has the lowest heuristic.

    Survivors must lower the heuristic by strictly more than
    ``improvement_eps``; ties break on estimated time, then on candidate
    ordinal.
    """
    cands, rejected = enumerate_actions(w, rng, params.action, params.time, params.sim)
    h0 = heuristic(w)
    limit = h0 - params.planner.improvement_eps
    scored = []
    losers = []
    for c in cands:
        h = heuristic(c.predicted)
        if h >= limit:
            losers.append(c)
        else:
            scored.append((h, c.action.est_time, c.ordinal, c))
    if not scored:
        return Stuck(tuple(rejected), tuple(losers))
    return min(scored, key=lambda t: t[:3])[3]


def run_sorter(w0: WorldState, seed: int, method: Method, params: Params = Params()) -> EpisodeTrace:
    problems = validate(w0)
    if problems:
        raise ValueError("invalid initial world: " + "; ".join(v.message for v in problems))
    rng = np.random.default_rng(seed)
    if method == Method.PICK_PLACE_ONLY:
        steps, final_rejected = _baseline(w0, rng, params)
        non_improving = ()
        terminated = Termination.SOLVED if all_sorted(steps[-1].predicted if steps else w0) else Termination.STUCK
    else:
        steps, terminated, final_rejected, non_improving = _greedy(w0, rng, params)
    return EpisodeTrace(
        initial=w0,
        steps=tuple(steps),
        total_time=sum(s.est_time for s in steps),
        method=method,
        seed=seed,
        terminated=terminated,
        final_rejected=final_rejected,
        final_non_improving=non_improving,
    )


def run_baseline(w0: WorldState, seed: int, params: Params = Params()) -> EpisodeTrace:
    return run_sorter(w0, seed, Method.PICK_PLACE_ONLY, params)


def _baseline(w: WorldState, rng: np.random.Generator, params: Params):
    ids = sorted(o.id for o in w.objects)
    order = [ids[k] for k in rng.permutation(len(ids))]
    key = int(rng.integers(2**63))
    steps: list[TraceStep] = []
    failed: list[Rejection] = []
    for oid in order:
        obj = w.object(oid)
        if is_sorted(obj, w):
            continue
        try:
            target = sample_place_pose(obj, w, object_rng(key, oid), params.action)
        except Infeasible as e:
            failed.append(Rejection(oid, "pick_place", e.reason))
            continue
        a = PickPlace(oid, target, 0.0)
        a = PickPlace(oid, target, estimate_time(a, w, params.time))
        nxt = apply_pick_place(w, oid, target)
        steps.append(TraceStep(a, nxt, heuristic(w), heuristic(nxt), a.est_time))
        w = nxt
    return steps, tuple(failed)


def _greedy(w: WorldState, rng: np.random.Generator, params: Params):
    steps: list[TraceStep] = []
    limit = params.planner.step_limit(w.n)
    while not all_sorted(w):
        if len(steps) >= limit:
            return steps, Termination.STEP_LIMIT, (), ()
        h0 = heuristic(w)
        res = greedy_step(w, rng, params)
        if isinstance(res, Stuck):
            return steps, Termination.STUCK, res.rejected, res.non_improving
        steps.append(TraceStep(res.action, res.predicted, h0, heuristic(res.predicted), res.action.est_time))
        w = res.predicted
    return steps, Termination.SOLVED, (), ()


# --- JSON-lines traces -----------------------------------------------------


def action_to_dict(a: Action) -> dict:
    if isinstance(a, PickPlace):
        return {"type": "pick_place", "object_id": a.object_id, "target": round_point(a.target)}
    s = a.spec
    return {
        "type": "push",
        "object_id": a.object_id,
        "start": round_point(s.start),
        "end": round_point(s.end),
        "axis_angle": round(s.axis_angle, 6),
        "pusher_length": s.pusher_length,
        "pusher_radius": s.pusher_radius,
    }


def trace_records(trace: EpisodeTrace) -> list[dict]:
    out = [
        {
            "schema_version": TRACE_SCHEMA_VERSION,
            "method": trace.method.value,
            "seed": trace.seed,
            "n": trace.initial.n,
        }
    ]
    for i, s in enumerate(trace.steps):
        out.append(
            {
                "index": i,
                "action": action_to_dict(s.action),
                "h_before": round(s.h_before, 6),
                "h_after": round(s.h_after, 6),
                "est_time": round(s.est_time, 6),
                "object_positions_after": {
                    str(o.id): round_point(o.center) for o in s.predicted.objects
                },
            }
        )
    return out


def write_trace(trace: EpisodeTrace, out: Union[str, Path, IO[str]]) -> None:
    lines = "".join(json.dumps(r, sort_keys=True) + "\n" for r in trace_records(trace))
    if isinstance(out, (str, Path)):
        Path(out).write_text(lines)
    else:
        out.write(lines)


def read_trace(path: Union[str, Path]) -> tuple[dict, list[dict]]:
    """Return the header record and the step records of a trace file."""
    with open(path) as f:
        records = [json.loads(line) for line in f if line.strip()]
    if not records or "schema_version" not in records[0]:
        raise ValueError(f"{path}: missing trace header")
    return records[0], records[1:]


def count_actions(trace: EpisodeTrace) -> tuple[int, int]:
    """(pushes, picks)"""
    return trace.count(Push), trace.count(PickPlace)
