"""Loader for system-definition files.

A system file is TOML with four sections::

    [group]                 # moduli = [4, 2]  or  index/core/right/left/lo
    [endomorphism]          # kind = ..., or builtin = "name(key=value, ...)"
    [[subgroups]]           # name = "S0", generators = [[1, 0]]  or  copy = 0
    [[patterns]]            # name = "D", right = [2], ...

Elements of a finite group are dense lists; elements of an indexed family
are lists of ``[index, value]`` pairs. Descriptor kinds nest: ``power``,
``quotient`` and ``restriction`` take an ``of`` table, ``direct_sum`` and
``compose`` take a ``parts`` list.
"""

from __future__ import annotations

import re
import sys
from dataclasses import dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

from .endo import (ComposeEndo, DirectSumEndo, DivisorPatternSubgroup, Endomorphism, MatrixEndo,
                   RestrictionEndo, ShiftEndo, bernoulli_shift, copy_subgroup, integer_tail_shift,
                   power, quotient_endo)
from .errors import GrexpandError
from .groups import INTEGERS, NATURALS, Element, GroupSpec, PeriodicPattern
from .subgroup import FiniteSubgroup

KINDS = ("matrix", "shift", "bernoulli_unilateral", "bernoulli_bilateral", "example_4_3",
         "direct_sum", "power", "compose", "quotient", "restriction")


class SystemFileError(GrexpandError):
    """Malformed system file; the message names the offending field."""


@dataclass
class SystemFile:
    path: str
    spec: GroupSpec
    phi: Endomorphism
    subgroups: dict = field(default_factory=dict)
    patterns: dict = field(default_factory=dict)
    descriptor: dict = field(default_factory=dict)

    def subgroup(self, name: str | None) -> FiniteSubgroup:
        if name is None:
            if not self.subgroups:
                raise SystemFileError("the system defines no subgroups")
            return next(iter(self.subgroups.values()))
        if name not in self.subgroups:
            known = ", ".join(self.subgroups) or "none"
            raise SystemFileError(f"unknown subgroup {name!r} (defined: {known})")
        return self.subgroups[name]

    def describe(self) -> dict:
        return {"group": self.spec.to_dict(), "endomorphism": self.phi.describe(),
                "subgroups": sorted(self.subgroups), "patterns": sorted(self.patterns)}


_BUILTIN = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*(?:\((.*)\))?\s*$", re.S)


def parse_builtin(text: str) -> dict:
    """``"bernoulli_bilateral(moduli=[2])"`` -> ``{"kind": ..., "moduli": [2]}``."""
    m = _BUILTIN.match(text)
    if not m:
        raise SystemFileError(f"[endomorphism].builtin: cannot parse {text!r}")
    args = {}
    if m.group(2) and m.group(2).strip():
        try:
            args = tomllib.loads(f"a = {{ {m.group(2)} }}")["a"]
        except tomllib.TOMLDecodeError as exc:
            raise SystemFileError(f"[endomorphism].builtin: bad arguments in {text!r}: {exc}") from None
    return {"kind": m.group(1), **args}


def _where(path: str, what: str) -> str:
    return f"{path}: {what}"


def parse_pattern(data: dict, index: str, where: str) -> PeriodicPattern:
    try:
        if "value" in data:
            return PeriodicPattern.constant(int(data["value"]), index)
        left = tuple(data.get("left", data.get("right", ()))) if index == INTEGERS else ()
        return PeriodicPattern(index, int(data.get("lo", 0)), tuple(data.get("core", ())),
                               tuple(data["right"]), left)
    except KeyError as exc:
        raise SystemFileError(_where(where, f"missing field {exc.args[0]!r}")) from None
    except (TypeError, ValueError, GrexpandError) as exc:
        raise SystemFileError(_where(where, str(exc))) from None


def parse_group(data: dict) -> GroupSpec:
    if "moduli" in data:
        moduli = data["moduli"]
        if not isinstance(moduli, list) or not all(isinstance(m, int) and m >= 0 for m in moduli):
            raise SystemFileError("[group].moduli: expected a list of non-negative integers")
        return GroupSpec.finite(moduli)
    index = data.get("index")
    if index not in (NATURALS, INTEGERS):
        raise SystemFileError("[group]: give moduli, or index = 'naturals' | 'integers'")
    return GroupSpec(pattern=parse_pattern(data, index, "[group]"))


def parse_element(spec: GroupSpec, raw, where: str) -> Element:
    try:
        if spec.is_finite:
            if len(raw) != len(spec.moduli):
                raise SystemFileError(_where(where, f"expected {len(spec.moduli)} coordinates"))
            return spec.vector(raw)
        return Element(spec, [(int(k), int(v)) for k, v in raw])
    except SystemFileError:
        raise
    except (TypeError, ValueError, GrexpandError) as exc:
        raise SystemFileError(_where(where, f"bad element {raw!r}: {exc}")) from None


def _elements(spec, raws, where):
    return [parse_element(spec, g, f"{where}[{i}]") for i, g in enumerate(raws)]


def build_endomorphism(desc: dict, spec: GroupSpec | None, where: str = "[endomorphism]") -> Endomorphism:
    """Evaluate a descriptor tree; ``spec`` is the ambient group, when one is given."""
    if "builtin" in desc:
        desc = {**parse_builtin(desc["builtin"]), **{k: v for k, v in desc.items() if k != "builtin"}}
    kind = desc.get("kind")
    if kind not in KINDS:
        raise SystemFileError(_where(where, f"unknown kind {kind!r}; expected one of {', '.join(KINDS)}"))
    try:
        return _build(kind, desc, spec, where)
    except SystemFileError:
        raise
    except KeyError as exc:
        raise SystemFileError(_where(where, f"missing field {exc.args[0]!r}")) from None
    except GrexpandError as exc:
        raise SystemFileError(_where(where, f"{type(exc).__name__}: {exc}")) from exc


def _need_spec(spec, where, kind):
    if spec is None:
        raise SystemFileError(_where(where, f"kind {kind!r} needs a [group] section"))
    return spec


def _build(kind, desc, spec, where):
    if kind == "matrix":
        return MatrixEndo(_need_spec(spec, where, kind), desc["matrix"], inverse=desc.get("inverse"))
    if kind == "shift":
        spec = _need_spec(spec, where, kind)
        twists = None
        if "twists" in desc:
            twists = parse_pattern(desc["twists"], spec.pattern.index if not spec.is_finite else NATURALS,
                                   f"{where}.twists")
        return ShiftEndo(spec, twists, int(desc.get("offset", 1)))
    if kind == "bernoulli_unilateral":
        return bernoulli_shift(desc["moduli"], NATURALS)
    if kind == "bernoulli_bilateral":
        return bernoulli_shift(desc["moduli"], INTEGERS)
    if kind == "example_4_3":
        return integer_tail_shift()
    if kind in ("direct_sum", "compose"):
        parts = desc["parts"]
        if len(parts) < 2:
            raise SystemFileError(_where(where, "parts needs at least two entries"))
        sub_spec = spec if kind == "compose" else None
        built = [build_endomorphism(p, sub_spec, f"{where}.parts[{i}]") for i, p in enumerate(parts)]
        out = built[0]
        for nxt in built[1:]:
            out = DirectSumEndo(out, nxt) if kind == "direct_sum" else ComposeEndo(out, nxt)
        return out
    if kind == "power":
        return power(build_endomorphism(desc["of"], spec, f"{where}.of"), int(desc["n"]))
    if kind == "quotient":
        inner = build_endomorphism(desc["of"], spec, f"{where}.of")
        H = FiniteSubgroup.from_generators(inner.domain, _elements(inner.domain, desc["by"], f"{where}.by"))
        return quotient_endo(inner, H)[0]
    if kind == "restriction":
        inner = build_endomorphism(desc["of"], spec, f"{where}.of")
        if inner.domain.is_finite:
            raise SystemFileError(_where(where, "restriction needs an indexed family"))
        pattern = parse_pattern(desc["divisors"], inner.domain.pattern.index, f"{where}.divisors")
        return RestrictionEndo(inner, DivisorPatternSubgroup(inner.domain, pattern))
    raise AssertionError(kind)  # pragma: no cover


def load_system(path) -> SystemFile:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise SystemFileError(f"{path}: {exc.strerror}") from None
    return parse_system(text, str(path))


def parse_system(text: str, path: str = "<string>") -> SystemFile:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise SystemFileError(f"{path}: {exc}") from None
    unknown = set(data) - {"group", "endomorphism", "subgroups", "patterns"}
    if unknown:
        raise SystemFileError(f"{path}: unknown section(s) {', '.join(sorted(unknown))}")
    if "endomorphism" not in data:
        raise SystemFileError(f"{path}: missing [endomorphism] section")
    declared = parse_group(data["group"]) if "group" in data else None
    phi = build_endomorphism(data["endomorphism"], declared)
    spec = phi.domain
    if declared is not None and declared != spec and data["endomorphism"].get("kind") not in (
            "quotient", "restriction"):
        raise SystemFileError(f"[group] declares {declared!r} but the endomorphism acts on {spec!r}")
    subgroups = {}
    for i, entry in enumerate(data.get("subgroups", [])):
        where = f"[[subgroups]][{i}]"
        name = entry.get("name")
        if not name:
            raise SystemFileError(f"{where}: missing name")
        if name in subgroups:
            raise SystemFileError(f"{where}: duplicate subgroup name {name!r}")
        if "copy" in entry:
            if not isinstance(phi, ShiftEndo):
                raise SystemFileError(f"{where}.copy: only shift systems have copy subgroups")
            subgroups[name] = copy_subgroup(phi, int(entry["copy"]))
            continue
        try:
            subgroups[name] = FiniteSubgroup.from_generators(
                spec, _elements(spec, entry.get("generators", []), f"{where}.generators"))
        except SystemFileError:
            raise
        except GrexpandError as exc:
            raise SystemFileError(f"{where}: {type(exc).__name__}: {exc}") from None
    patterns = {}
    for i, entry in enumerate(data.get("patterns", [])):
        where = f"[[patterns]][{i}]"
        name = entry.get("name")
        if not name:
            raise SystemFileError(f"{where}: missing name")
        if spec.is_finite:
            raise SystemFileError(f"{where}: divisor patterns need an indexed family")
        pat = parse_pattern(entry, spec.pattern.index, where)
        try:
            patterns[name] = DivisorPatternSubgroup(spec, pat)
        except GrexpandError as exc:
            raise SystemFileError(f"{where}: {exc}") from None
    return SystemFile(path, spec, phi, subgroups, patterns, data["endomorphism"])
