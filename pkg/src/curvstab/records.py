"""Lossless JSON records for configurations and results.

Dataclasses map to objects whose keys are the field names; members of the
direction union carry a ``"type"`` tag; non-finite floats become the strings
``"inf"``, ``"-inf"``, ``"nan"``; every float is written with 17 significant
digits.  Decoding is driven by type hints and rejects unknown fields, reporting
the path of the offending entry.
"""

from __future__ import annotations

import dataclasses
import json
import math
import types
import typing
from enum import Enum
from functools import lru_cache
from typing import Any, Union

from .errors import ConfigError, CurvstabError
from .spectral_forms import ConformalScale, FactorTT, FunctionalId, MixedTT

DIRECTION_TYPES = {c.__name__: c for c in (ConformalScale, MixedTT, FactorTT)}
_SPECIAL = {"inf": math.inf, "-inf": -math.inf, "nan": math.nan}


# -- encoding -------------------------------------------------------------------------


def to_record(obj: Any) -> Any:
    """Plain JSON-able structure (floats kept as floats; see :func:`dumps`)."""
    if isinstance(obj, FunctionalId):
        return str(obj)
    if isinstance(obj, Enum):
        return obj.value
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        out = {}
        if type(obj).__name__ in DIRECTION_TYPES:
            out["type"] = type(obj).__name__
        for f in dataclasses.fields(obj):
            out[f.name] = to_record(getattr(obj, f.name))
        return out
    if isinstance(obj, (list, tuple)):
        return [to_record(x) for x in obj]
    if isinstance(obj, dict):
        return {str(k): to_record(v) for k, v in obj.items()}
    if isinstance(obj, float):
        return obj
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if hasattr(obj, "item"):  # numpy scalars
        return to_record(obj.item())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def format_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".17g")


def _dump(obj: Any, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return json.dumps(obj)
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {_dump(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        items = [pad + _dump(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any, indent: int = 2) -> str:
    """Deterministic JSON text of ``obj`` (dataclasses are converted first)."""
    return _dump(to_record(obj), indent, 0)


# -- decoding -------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _hints(cls) -> dict[str, Any]:
    return typing.get_type_hints(cls)


def _is_union(tp) -> bool:
    return typing.get_origin(tp) in (Union, types.UnionType)


def _type_name(tp) -> str:
    return getattr(tp, "__name__", str(tp))


def from_record(tp: Any, data: Any, path: str = "") -> Any:
    """Rebuild a value of type ``tp`` from its record; errors carry the field path."""
    try:
        return _decode(tp, data, path)
    except ConfigError:
        raise
    except (CurvstabError, ValueError, TypeError) as exc:
        raise ConfigError(str(exc), path or "<root>") from None


def _decode(tp: Any, data: Any, path: str) -> Any:
    if tp is Any:
        return data
    if _is_union(tp):
        args = typing.get_args(tp)
        if data is None and type(None) in args:
            return None
        members = [a for a in args if a is not type(None)]
        if all(dataclasses.is_dataclass(a) for a in members) and len(members) > 1:
            return _decode_tagged(members, data, path)
        if len(members) == 1:
            return _decode(members[0], data, path)
        raise ConfigError(f"ambiguous union {tp}", path)
    origin = typing.get_origin(tp)
    if origin is tuple:
        args = typing.get_args(tp)
        if not isinstance(data, (list, tuple)):
            raise ConfigError(f"expected a list, got {type(data).__name__}", path)
        if len(args) == 2 and args[1] is Ellipsis:
            return tuple(_decode(args[0], x, f"{path}[{i}]") for i, x in enumerate(data))
        if len(args) != len(data):
            raise ConfigError(f"expected {len(args)} entries, got {len(data)}", path)
        return tuple(_decode(a, x, f"{path}[{i}]") for i, (a, x) in enumerate(zip(args, data)))
    if origin in (list,):
        (arg,) = typing.get_args(tp)
        if not isinstance(data, list):
            raise ConfigError("expected a list", path)
        return [_decode(arg, x, f"{path}[{i}]") for i, x in enumerate(data)]
    if tp is FunctionalId:
        if not isinstance(data, str):
            raise ConfigError("functional must be a string such as 'Ric' or 'Ft(0.25)'", path)
        return FunctionalId.parse(data)
    if isinstance(tp, type) and issubclass(tp, Enum):
        try:
            return tp(data)
        except ValueError:
            allowed = ", ".join(m.value for m in tp)
            raise ConfigError(f"{data!r} is not one of {allowed}", path) from None
    if tp is float:
        if isinstance(data, str) and data in _SPECIAL:
            return _SPECIAL[data]
        if isinstance(data, bool) or not isinstance(data, (int, float)):
            raise ConfigError(f"expected a number, got {data!r}", path)
        return float(data)
    if tp is int:
        if isinstance(data, bool) or not isinstance(data, int):
            raise ConfigError(f"expected an integer, got {data!r}", path)
        return data
    if tp is bool:
        if not isinstance(data, bool):
            raise ConfigError(f"expected true/false, got {data!r}", path)
        return data
    if tp is str:
        if not isinstance(data, str):
            raise ConfigError(f"expected a string, got {data!r}", path)
        return data
    if dataclasses.is_dataclass(tp):
        return _decode_dataclass(tp, data, path)
    raise ConfigError(f"unsupported field type {tp}", path)


def _decode_tagged(members, data, path):
    if not isinstance(data, dict) or "type" not in data:
        names = ", ".join(m.__name__ for m in members)
        raise ConfigError(f"expected an object with a 'type' tag ({names})", path)
    by_name = {m.__name__: m for m in members}
    cls = by_name.get(data["type"])
    if cls is None:
        raise ConfigError(f"unknown type {data['type']!r}", f"{_join(path, 'type')}")
    body = {k: v for k, v in data.items() if k != "type"}
    return _decode_dataclass(cls, body, path)


def _join(path: str, name: str) -> str:
    return f"{path}.{name}" if path else name


def _decode_dataclass(cls, data, path):
    if not isinstance(data, dict):
        raise ConfigError(f"expected an object for {_type_name(cls)}", path or "<root>")
    hints = _hints(cls)
    fields = {f.name: f for f in dataclasses.fields(cls) if f.init}
    unknown = sorted(set(data) - set(fields))
    if unknown:
        raise ConfigError(f"unknown field {unknown[0]!r}", _join(path, unknown[0]))
    kwargs = {}
    for name, f in fields.items():
        sub = _join(path, name)
        if name not in data:
            if f.default is dataclasses.MISSING and f.default_factory is dataclasses.MISSING:
                raise ConfigError("missing required field", sub)
            continue
        kwargs[name] = _decode(hints[name], data[name], sub)
    try:
        return cls(**kwargs)
    except ConfigError:
        raise
    except (CurvstabError, ValueError, TypeError) as exc:
        raise ConfigError(str(exc), path or "<root>") from None


def loads(tp: Any, text: str) -> Any:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg} at line {exc.lineno}", "<root>") from None
    return from_record(tp, data)
