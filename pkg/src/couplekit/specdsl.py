"""Spec-string DSL used by the CLI and serialized artifacts.

Grammar: ``name(:key=value(,key=value)*)?`` where values are decimals,
nested specs in angle brackets, weight forms like ``pow:0.5``, or bare
selectors.  Multi-segment names (``seq:lpw``) come from a fixed table, so a
colon inside a value never splits a name.

Examples::

    lp:p=2                  linf
    lorentz:p=2,w=pow:0.5
    orlicz:gen=<power:p=2>
    fromseq:<seq:orlicz-modular:gen=<example1>>
    seq:lpw:p=1             seq:linf
    seq:orlicz-modular:gen=<example1>
    seq:from:<seq:orlicz-modular:gen=<example1>>,weightbase=1.4142135623730951
    rev:<seq:lpw:p=2>
    brudnyi:p=1.5,q=3:F     minimal:alpha=0.05
"""

from __future__ import annotations

import math

from .errors import UsageError
from .measure import UNIT, Window, default_unit_window
from .orlicz import (GeneratorSpec, MinimalFn, OrliczFn, brudnyi_pair,
                     elastic_non_lorentz, example1, logfactor_fn, power,
                     pwpower)
from .spaces import (FromSequenceSpace, GeometricWeighted, LinftySeq, LpSpace,
                     LorentzSpace, OrderReversed, OrliczModular, OrliczSpace,
                     PowerWeight, SeqSpaceSpec, SpaceSpec, dyadic_lp,
                     linf_space)

_FN_NAMES = ("lorentz", "orlicz", "fromseq", "linf", "lp")
_SEQ_NAMES = ("seq:orlicz-modular", "seq:lpw", "seq:linf", "seq:from",
              "seq:induced", "rev")
_GEN_NAMES = ("power", "pwpower", "logfactor", "example1", "elastic-nl",
              "brudnyi", "minimal")


def _split_top(text: str, sep: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "<":
            depth += 1
        elif ch == ">":
            depth -= 1
            if depth < 0:
                raise UsageError(f"unbalanced '>' in spec {text!r}")
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if depth != 0:
        raise UsageError(f"unbalanced '<' in spec {text!r}")
    parts.append("".join(cur))
    return parts


def _match_name(spec: str, names) -> tuple[str, str]:
    for name in sorted(names, key=len, reverse=True):
        if spec == name:
            return name, ""
        if spec.startswith(name + ":"):
            return name, spec[len(name) + 1:]
    raise UsageError(f"unrecognized spec {spec!r}")


def _parse_args(rest: str) -> tuple[dict, list]:
    kwargs, positional = {}, []
    if not rest:
        return kwargs, positional
    for item in _split_top(rest, ","):
        if not item:
            continue
        if "=" in item and not item.startswith("<"):
            key, val = item.split("=", 1)
            kwargs[key.strip()] = val.strip()
        else:
            positional.append(item.strip())
    return kwargs, positional


def _strip(val: str) -> str:
    if val.startswith("<") and val.endswith(">"):
        return val[1:-1]
    return val


def _num(val: str) -> float:
    try:
        return float(_strip(val))
    except ValueError as exc:
        raise UsageError(f"expected a number, got {val!r}") from exc


def _split_selector(body: str) -> tuple[str, str | None]:
    if len(body) > 2 and body[-2] == ":" and body[-1].upper() in ("F", "G"):
        return body[:-2], body[-1].upper()
    return body, None


def parse_generator(spec: str) -> OrliczFn:
    """Parse a generator spec string into an Orlicz function.

    ``brudnyi`` needs a trailing ``:F``/``:G`` selector (or use
    ``parse_generator_pair``).
    """
    body, selector = _split_selector(_strip(spec))
    name, rest = _match_name(body, _GEN_NAMES)
    kwargs, positional = _parse_args(rest)
    if selector is not None:
        positional = [selector] + positional
    if name == "power":
        return power(_num(kwargs["p"]))
    if name == "pwpower":
        return pwpower(_num(kwargs["p0"]), _num(kwargs["p1"]))
    if name == "logfactor":
        return logfactor_fn(_num(kwargs["p"]))
    if name == "example1":
        return example1()
    if name == "elastic-nl":
        return elastic_non_lorentz()
    if name == "minimal":
        return MinimalFn(_num(kwargs.get("alpha", "0.05")))
    if name == "brudnyi":
        sel = positional[0].upper() if positional else None
        F, G = brudnyi_pair(_num(kwargs["p"]), _num(kwargs["q"]))
        if sel == "F":
            return F
        if sel == "G":
            return G
        raise UsageError("brudnyi generator needs a :F or :G selector here")
    raise UsageError(f"unknown generator {name!r}")


def parse_generator_pair(spec: str):
    name, rest = _match_name(_strip(spec), _GEN_NAMES)
    if name != "brudnyi":
        raise UsageError("only the brudnyi generator yields a pair")
    kwargs, _ = _parse_args(rest)
    return brudnyi_pair(_num(kwargs["p"]), _num(kwargs["q"]))


def generator_spec_of(spec: str) -> GeneratorSpec:
    name, rest = _match_name(_strip(spec), _GEN_NAMES)
    kwargs, positional = _parse_args(rest)
    return GeneratorSpec(name, {k: _num(v) for k, v in kwargs.items()},
                         positional[0].upper() if positional else None)


def _parse_weight(val: str) -> PowerWeight:
    val = _strip(val)
    if val.startswith("pow:"):
        return PowerWeight(float(val[4:]))
    raise UsageError(f"unknown weight form {val!r} (use pow:<exponent>)")


def parse_seq_space(spec: str, window: Window | None = None) -> SeqSpaceSpec:
    """Parse a sequence-space spec on the given window (default [-64, -1])."""
    if window is None:
        window = default_unit_window()
    name, rest = _match_name(_strip(spec), _SEQ_NAMES)
    kwargs, positional = _parse_args(rest)
    if name == "seq:lpw":
        p = _num(kwargs["p"]) if kwargs.get("p") not in (None, "inf") else math.inf
        if "wexp" in kwargs:
            s = _num(kwargs["wexp"])
            from .spaces import WeightedLp
            return WeightedLp(p, window, weights=lambda ns: 2.0 ** (ns * s))
        return dyadic_lp(p, window)
    if name == "seq:linf":
        return LinftySeq(window)
    if name == "seq:orlicz-modular":
        return OrliczModular(parse_generator(kwargs["gen"]), window)
    if name == "seq:from":
        if not positional:
            raise UsageError("seq:from needs a nested inner spec in <...>")
        inner = parse_seq_space(positional[0], window)
        return GeometricWeighted(inner, _num(kwargs["weightbase"]))
    if name == "seq:induced":
        if not positional:
            raise UsageError("seq:induced needs a nested function-space spec")
        from .spaces import InducedSeq
        return InducedSeq(parse_space(positional[0]), window)
    if name == "rev":
        if not positional:
            raise UsageError("rev needs a nested spec in <...>")
        return OrderReversed(parse_seq_space(positional[0], window))
    raise UsageError(f"unknown sequence space {name!r}")


def parse_space(spec: str, domain: str = UNIT,
                window: Window | None = None) -> SpaceSpec:
    """Parse a function-space spec (Lp, Lorentz, Orlicz, fromseq)."""
    name, rest = _match_name(_strip(spec), _FN_NAMES)
    kwargs, positional = _parse_args(rest)
    if name == "lp":
        return LpSpace(_num(kwargs["p"]), domain)
    if name == "linf":
        return linf_space(domain)
    if name == "lorentz":
        return LorentzSpace(_num(kwargs["p"]), _parse_weight(kwargs["w"]), domain)
    if name == "orlicz":
        return OrliczSpace(parse_generator(kwargs["gen"]), domain)
    if name == "fromseq":
        if not positional:
            raise UsageError("fromseq needs a nested sequence spec in <...>")
        return FromSequenceSpace(parse_seq_space(positional[0], window))
    raise UsageError(f"unknown function space {name!r}")


def parse_any_space(spec: str, domain: str = UNIT, window: Window | None = None):
    """Function space or sequence space, whichever the name resolves to."""
    body = _strip(spec)
    head = body.split(":", 1)[0]
    if head in ("seq", "rev"):
        return parse_seq_space(spec, window)
    return parse_space(spec, domain, window)
