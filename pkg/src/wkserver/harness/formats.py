"""Trace and results file formats.

Traces are a single canonical JSON document (sorted keys, compact
separators, trailing newline), so write -> read -> write is byte-identical.
Results are JSON Lines: a config record, one record per trial, and a
summary record; or a two-section CSV.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict

from ..adversary import StrategyNode, Trace, validate_trace
from ..core import ConsistencyError, UniformSpace

TRACE_FORMAT = "wkserver-trace"
TRACE_VERSION = 1


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def node_to_obj(node: StrategyNode) -> dict:
    if node.level == 0:
        return {"level": 0, "pointset": list(node.pointset), "request": node.leaf_request}
    return {
        "level": node.level,
        "pointset": list(node.pointset),
        "chosen": list(node.chosen_sets),
        "children": [node_to_obj(c) for c in node.children],
    }


def node_from_obj(obj: dict) -> StrategyNode:
    if obj["level"] == 0:
        return StrategyNode(0, tuple(obj["pointset"]), leaf_request=obj["request"])
    return StrategyNode(
        obj["level"],
        tuple(obj["pointset"]),
        tuple(obj["chosen"]),
        tuple(node_from_obj(c) for c in obj["children"]),
    )


def trace_to_obj(trace: Trace) -> dict:
    return {
        "format": TRACE_FORMAT,
        "version": TRACE_VERSION,
        "k": trace.k,
        "beta": trace.beta,
        "seed": trace.seed,
        "space": trace.space.size,
        "mark_order": list(trace.mark_order),
        "calls": [node_to_obj(c) for c in trace.calls],
        "requests": list(trace.requests),
    }


def trace_from_obj(obj: dict, validate: bool = True) -> Trace:
    if obj.get("format") != TRACE_FORMAT or obj.get("version") != TRACE_VERSION:
        raise ConsistencyError(f"not a {TRACE_FORMAT} v{TRACE_VERSION} document")
    trace = Trace(
        obj["k"],
        obj["beta"],
        UniformSpace(obj["space"]),
        tuple(obj["mark_order"]),
        tuple(node_from_obj(c) for c in obj["calls"]),
        tuple(obj["requests"]),
        obj["seed"],
    )
    if validate:
        validate_trace(trace)
    return trace


def dumps_trace(trace: Trace) -> str:
    return _dumps(trace_to_obj(trace)) + "\n"


def loads_trace(text: str, validate: bool = True) -> Trace:
    return trace_from_obj(json.loads(text), validate)


def write_trace(trace: Trace, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps_trace(trace))


def read_trace(path, validate: bool = True) -> Trace:
    with open(path, encoding="utf-8") as fh:
        return loads_trace(fh.read(), validate)


TRIAL_FIELDS = ("trial", "seed", "alg", "opt", "adv", "calls")
SUMMARY_FIELDS = ("quantity", "count", "mean", "variance", "half_width", "minimum", "maximum")


def dumps_results(config: dict, records, stats, fmt: str = "json") -> str:
    if fmt == "json":
        lines = [_dumps({"record": "config", **config})]
        lines += [_dumps({"record": "trial", **asdict(r)}) for r in records]
        lines.append(_dumps({"record": "summary", **stats.to_dict()}))
        return "\n".join(lines) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["# config", _dumps(config)])
        w.writerow(TRIAL_FIELDS)
        for r in records:
            w.writerow([getattr(r, f) for f in TRIAL_FIELDS])
        w.writerow([])
        w.writerow(SUMMARY_FIELDS)
        for name, q in stats.quantities.items():
            w.writerow([name] + [repr(getattr(q, f)) for f in SUMMARY_FIELDS[1:]])
        if stats.gap is not None:
            w.writerow([])
            w.writerow(["gap_alpha", "gap_value", "gap_half_width"])
            w.writerow([repr(stats.gap.alpha), repr(stats.gap.value), repr(stats.gap.half_width)])
        return buf.getvalue()
    raise ValueError(f"unknown results format {fmt!r}")


def write_results(path, config: dict, records, stats, fmt: str = "json") -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps_results(config, records, stats, fmt))
