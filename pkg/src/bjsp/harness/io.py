"""JSON formats for instances and schedules (``"format": "bjsp-v1"``)."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from ..model import Instance, Schedule, validate_instance

FORMAT = "bjsp-v1"


def _check_format(data: dict) -> None:
    fmt = data.get("format", FORMAT)
    if fmt != FORMAT:
        raise ValueError(f"unsupported format {fmt!r}")


def instance_dict(inst: Instance, ident: str | None = None) -> dict[str, Any]:
    d: dict[str, Any] = {"format": FORMAT, "m": inst.m, "g": inst.g, "p": list(inst.p)}
    if ident is not None:
        d["id"] = ident
    return d


def dump_instance(inst: Instance, ident: str | None = None) -> str:
    return json.dumps(instance_dict(inst, ident), sort_keys=True) + "\n"


def load_instance(text: str) -> Instance:
    data = json.loads(text)
    if not isinstance(data, dict):
        raise ValueError("instance file must hold a JSON object")
    _check_format(data)
    return validate_instance(data)


def read_instance(path) -> Instance:
    return load_instance(Path(path).read_text(encoding="utf-8"))


def schedule_dict(s: Schedule, status: str | None = None, extra: dict | None = None) -> dict[str, Any]:
    d: dict[str, Any] = {"format": FORMAT,
                         "starts": {str(j): s.starts[j] for j in sorted(s.starts)}}
    if s.machines is not None:
        d["machines"] = {str(j): s.machines[j] for j in sorted(s.machines)}
    if status is not None:
        d["status"] = status
    if extra:
        d.update(extra)
    return d


def dump_schedule(s: Schedule, status: str | None = None, extra: dict | None = None) -> str:
    return json.dumps(schedule_dict(s, status, extra), sort_keys=True) + "\n"


def load_schedule(text: str, inst: Instance) -> Schedule:
    data = json.loads(text)
    _check_format(data)
    starts = {int(j): int(v) for j, v in data["starts"].items()}
    machines = data.get("machines")
    if machines is not None:
        machines = {int(j): int(v) for j, v in machines.items()}
    return Schedule(inst, starts, machines)


def read_schedule(path, inst: Instance) -> Schedule:
    return load_schedule(Path(path).read_text(encoding="utf-8"), inst)
