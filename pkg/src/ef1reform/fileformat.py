"""On-disk instance files (JSON, schema ``ef1reform/1``).

A file holds ``format``, ``n``, ``m`` and ``utilities`` (one row per agent),
and optionally ``allocation`` (list of bundles), ``size_vector``,
``budget_k``, ``question`` and a ``source`` envelope ``{"tag", "payload"}``.
Serialization is canonical: fixed key order, one utility row per line, LF
line endings, trailing newline.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .core import Allocation, Instance
from .generators import ReducedInstance, SourceProblem

FORMAT = "ef1reform/1"


class FormatError(ValueError):
    """The file is not a valid instance file; the message names the offending field."""


@dataclass
class InstanceFile:
    instance: Instance | None = None
    allocation: Allocation | None = None
    size_vector: tuple[int, ...] | None = None
    budget_k: int | None = None
    question: str | None = None
    source: SourceProblem | None = None


def _int(x, where: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise FormatError(f"{where}: expected an integer, got {json.dumps(x)}")
    return x


def _int_list(x, where: str) -> list[int]:
    if not isinstance(x, list):
        raise FormatError(f"{where}: expected a list")
    return [_int(v, f"{where}[{k}]") for k, v in enumerate(x)]


def parse(text: str) -> InstanceFile:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"line {e.lineno}, column {e.colno}: {e.msg}") from None
    if not isinstance(doc, dict):
        raise FormatError("top level: expected an object")
    if doc.get("format") != FORMAT:
        raise FormatError(f"format: expected {FORMAT!r}, got {json.dumps(doc.get('format'))}")
    known = {"format", "n", "m", "utilities", "allocation", "size_vector", "budget_k", "question", "source"}
    extra = sorted(set(doc) - known)
    if extra:
        raise FormatError(f"{extra[0]}: unknown field")

    out = InstanceFile()
    if "source" in doc:
        env = doc["source"]
        if not isinstance(env, dict) or set(env) != {"tag", "payload"}:
            raise FormatError("source: expected an object with exactly 'tag' and 'payload'")
        try:
            out.source = SourceProblem(env["tag"], env["payload"])
        except (ValueError, TypeError, KeyError) as e:
            raise FormatError(f"source: {e}") from None
    if "utilities" not in doc:
        if out.source is None:
            raise FormatError("utilities: missing")
        return out

    n = _int(doc.get("n"), "n")
    m = _int(doc.get("m"), "m")
    rows = doc["utilities"]
    if not isinstance(rows, list) or len(rows) != n:
        raise FormatError(f"utilities: expected {n} rows")
    for i, row in enumerate(rows):
        vals = _int_list(row, f"utilities[{i}]")
        if len(vals) != m:
            raise FormatError(f"utilities[{i}]: expected {m} entries, got {len(vals)}")
        if any(v < 0 for v in vals):
            raise FormatError(f"utilities[{i}]: negative entry")
    try:
        out.instance = Instance(rows)
    except ValueError as e:
        raise FormatError(f"utilities: {e}") from None

    if "allocation" in doc:
        bundles = doc["allocation"]
        if not isinstance(bundles, list) or len(bundles) != n:
            raise FormatError(f"allocation: expected {n} bundles")
        bs = [_int_list(b, f"allocation[{i}]") for i, b in enumerate(bundles)]
        try:
            out.allocation = Allocation(bs)
        except ValueError as e:
            raise FormatError(f"allocation: {e}") from None
        if out.allocation.num_goods != m:
            raise FormatError(f"allocation: covers {out.allocation.num_goods} goods, expected {m}")
    if "size_vector" in doc:
        sv = _int_list(doc["size_vector"], "size_vector")
        if len(sv) != n or sum(sv) != m or min(sv) < 0:
            raise FormatError(f"size_vector: must be {n} non-negative entries summing to {m}")
        out.size_vector = tuple(sv)
    if "budget_k" in doc:
        out.budget_k = _int(doc["budget_k"], "budget_k")
    if "question" in doc:
        if not isinstance(doc["question"], str):
            raise FormatError("question: expected a string")
        out.question = doc["question"]
    return out


def load(path: str) -> InstanceFile:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except UnicodeDecodeError:
        raise FormatError(f"{path}: not UTF-8 text") from None
    return parse(text)


def dumps(f: InstanceFile) -> str:
    lines = ["{", f'  "format": "{FORMAT}"']
    if f.instance is not None:
        inst = f.instance
        lines[-1] += ","
        lines.append(f'  "n": {inst.num_agents},')
        lines.append(f'  "m": {inst.num_goods},')
        rows = [json.dumps(list(r)) for r in inst.utilities]
        lines.append('  "utilities": [')
        lines += [f"    {r}," for r in rows[:-1]] + [f"    {rows[-1]}", "  ]"]
    extras = []
    if f.allocation is not None:
        extras.append(f'  "allocation": {json.dumps([list(b) for b in f.allocation.bundles])}')
    if f.size_vector is not None:
        extras.append(f'  "size_vector": {json.dumps(list(f.size_vector))}')
    if f.budget_k is not None:
        extras.append(f'  "budget_k": {f.budget_k}')
    if f.question is not None:
        extras.append(f'  "question": {json.dumps(f.question)}')
    if f.source is not None:
        env = {"tag": f.source.tag, "payload": f.source.payload}
        extras.append(f'  "source": {json.dumps(env, sort_keys=True)}')
    for e in extras:
        lines[-1] += ","
        lines.append(e)
    lines.append("}")
    return "\n".join(lines) + "\n"


def from_reduced(red: ReducedInstance, source: SourceProblem | None = None) -> InstanceFile:
    return InstanceFile(red.instance, red.initial_allocation, red.size_vector, red.budget_k, red.question, source)
