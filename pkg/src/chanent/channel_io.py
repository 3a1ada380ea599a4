"""Channel specifications: builder strings and the JSON Kraus format.

Builder grammar (colon-separated ``key=value`` options)::

    swap[:d=D]              SWAP of two qudits (default d=2)
    cnot                    CNOT, control A, target B
    id<d>[x<d>...]          identity on one party per dimension, e.g. id2, id2x2
    depol[:p=P][:d=D]       single-qudit depolarizing channel
    replacer:maxmix[:d=D][:n=N]
                            replace N parties of dimension D by the maximally mixed state
    mixing[:d=D][:n=N]      completely mixing map X -> tr(X) 1 (not trace preserving)
    mix:u=<gate>[:p=P][gate options]
                            P * gate + (1 - P) * replacer to the maximally mixed state
    idmix:u=<gate>[:p=P][gate options]
                            P * gate + (1 - P) * identity
    tensor(<spec>,<spec>,...)
                            tensor product, parties relabeled in order
"""

from __future__ import annotations

import json
import os
import re

import numpy as np

from . import channels as ch
from .errors import ValidationError


def _split_top(s: str) -> list[str]:
    parts, depth, cur = [], 0, ""
    for char in s:
        if char == "(":
            depth += 1
        elif char == ")":
            depth -= 1
        if char == "," and depth == 0:
            parts.append(cur)
            cur = ""
        else:
            cur += char
    parts.append(cur)
    return [p.strip() for p in parts if p.strip()]


def _opts(tokens: list[str]) -> dict:
    out = {}
    for t in tokens:
        if "=" not in t:
            raise ValidationError(f"option {t!r} is not of the form key=value")
        k, v = t.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _gate(name: str, opts: dict) -> ch.Channel:
    if name == "swap":
        return ch.swap(int(opts.pop("d", 2)))
    if name == "cnot":
        return ch.cnot()
    raise ValidationError(f"unknown gate {name!r} (expected swap or cnot)")


def _finish(c: ch.Channel, opts: dict, spec: str) -> ch.Channel:
    if opts:
        raise ValidationError(f"unused options {sorted(opts)} in {spec!r}")
    return c


def parse_channel(spec: str) -> ch.Channel:
    """Build a channel from a builder string (see module docstring)."""
    spec = spec.strip()
    try:
        return _parse(spec)
    except (ValueError, KeyError) as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(f"cannot parse channel spec {spec!r}: {exc}") from exc


def _parse(spec: str) -> ch.Channel:
    m = re.fullmatch(r"tensor\((.*)\)", spec)
    if m:
        parts = _split_top(m.group(1))
        if len(parts) < 2:
            raise ValidationError("tensor() needs at least two factors")
        c = _parse(parts[0])
        for p in parts[1:]:
            c = ch.tensor(c, _parse(p))
        return c
    tokens = spec.split(":")
    name, rest = tokens[0].strip(), tokens[1:]
    m = re.fullmatch(r"id(\d+(?:x\d+)*)", name)
    if m:
        return _finish(ch.identity(*[int(d) for d in m.group(1).split("x")]), _opts(rest), spec)
    if name == "id":
        o = _opts(rest)
        return _finish(ch.identity(int(o.pop("d", 2))), o, spec)
    if name in ("swap", "cnot"):
        o = _opts(rest)
        return _finish(_gate(name, o), o, spec)
    if name == "depol":
        o = _opts(rest)
        return _finish(ch.depolarizing(float(o.pop("p", 1.0)), int(o.pop("d", 2))), o, spec)
    if name in ("replacer", "mixing"):
        flags = [t for t in rest if "=" not in t]
        o = _opts([t for t in rest if "=" in t])
        d, n = int(o.pop("d", 2)), int(o.pop("n", 2))
        if name == "replacer":
            if flags != ["maxmix"]:
                raise ValidationError("replacer needs the state tag 'maxmix'")
            return _finish(ch.maxmix_replacer([d] * n), o, spec)
        if flags:
            raise ValidationError(f"unexpected flags {flags}")
        return _finish(ch.completely_mixing_map([d] * n), o, spec)
    if name in ("mix", "idmix"):
        o = _opts(rest)
        if "u" not in o:
            raise ValidationError(f"{name} needs u=<gate>")
        u = o.pop("u")
        p = float(o.pop("p", 1.0))
        gate = _gate(u, o)
        c = ch.white_noise_mixture(gate, p) if name == "mix" else ch.identity_mixture(gate, p)
        return _finish(c, o, spec)
    raise ValidationError(f"unknown channel builder {name!r}")


def channel_to_json(c: ch.Channel) -> dict:
    return {
        "name": c.name,
        "dims": c.dims.to_json(),
        "kraus": [[[[float(z.real), float(z.imag)] for z in row] for row in k] for k in c.kraus],
    }


def channel_from_json(obj: dict) -> ch.Channel:
    """Inverse of :func:`channel_to_json`; validates trace preservation."""
    try:
        dims = ch.SystemDims(tuple((e["label"], int(e["d"])) for e in obj["dims"]["in"]),
                             tuple((e["label"], int(e["d"])) for e in obj["dims"]["out"]))
        kraus = [np.array([[complex(re_, im_) for re_, im_ in row] for row in k]) for k in obj["kraus"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed channel JSON: {exc}") from exc
    return ch.Channel(kraus, dims, name=str(obj.get("name", "channel")))


def load_channel(spec: str) -> ch.Channel:
    """A path to a JSON file, or else a builder string."""
    if spec.endswith(".json") or os.path.isfile(spec):
        try:
            with open(spec, encoding="utf-8") as fh:
                return channel_from_json(json.load(fh))
        except OSError as exc:
            raise ValidationError(f"cannot read {spec}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{spec} is not valid JSON: {exc}") from exc
    return parse_channel(spec)
