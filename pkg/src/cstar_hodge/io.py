"""JSON interchange and builder-spec parsing."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .algebra import DEFAULT_TOL, AlgebraShape, Tolerance
from .builders import (
    InconsistentPlant,
    SimplicialComplex,
    coboundary_complex,
    group_algebra_shape,
    planted_random_complex,
    random_plant,
)
from .hilbert import ModuleElement, ModuleSpace
from .hodge import CochainComplex


class ParseError(ValueError):
    """Input could not be read or does not follow the expected schema."""


def dumps(data) -> str:
    return json.dumps(data, indent=1, sort_keys=False) + "\n"


def read_json(path: str | Path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"{path}: {exc}") from exc


def load_complex(path: str | Path, tol: Tolerance = DEFAULT_TOL,
                 validate: bool = True) -> CochainComplex:
    """Read a complex file.

    Schema problems raise :class:`ParseError`; with ``validate``, a complex
    with ``d^2 != 0`` raises ``InvalidComplex``.
    """
    data = read_json(path)
    try:
        c = CochainComplex.from_json(data, tol, validate=False)
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise ParseError(f"{path}: malformed complex: {exc}") from exc
    if validate:
        c.validate()
    return c


def load_element(path: str | Path, space: ModuleSpace) -> ModuleElement:
    data = read_json(path)
    try:
        return ModuleElement.from_json(data, space)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}: malformed element: {exc}") from exc


def save_json(data, path: str | Path | None) -> str:
    text = dumps(data)
    if path is not None:
        Path(path).write_text(text)
    return text


# builder specs ---------------------------------------------------------------

_GROUP = re.compile(r"^Z(\d+)$")


@dataclass
class BuilderSpec:
    kind: str
    arg: int | None = None
    options: dict[str, str] = field(default_factory=dict)


def parse_builder_spec(text: str) -> BuilderSpec:
    """Parse ``"cycle:5 blocks=1,2 coeff=2"``-style builder descriptions.

    Kinds: ``point``, ``cycle:N``, ``sphere:D`` (boundary of the D-simplex),
    ``tetra-boundary``, ``zero``, ``planted``. Options: ``blocks=n1,n2``,
    ``group=Z2xZ3``, ``coeff=m``, ``ranks=r0,r1,..``, ``plant=h,h/h,h/..``
    (per degree, blocks separated by commas), ``seed=s``, ``spread=x``.
    """
    kind, arg, options = None, None, {}
    for tok in text.split():
        if "=" in tok:
            key, _, val = tok.partition("=")
            options[key] = val
            continue
        if kind is not None:
            raise ParseError(f"builder spec names two kinds: {kind!r} and {tok!r}")
        name, _, num = tok.partition(":")
        kind = name
        if num:
            try:
                arg = int(num)
            except ValueError as exc:
                raise ParseError(f"bad argument in {tok!r}") from exc
    if kind is None:
        raise ParseError(f"builder spec {text!r} names no kind")
    if kind not in {"point", "cycle", "sphere", "tetra-boundary", "zero", "planted"}:
        raise ParseError(f"unknown builder kind {kind!r}")
    known = {"blocks", "group", "coeff", "ranks", "plant", "seed", "spread"}
    unknown = set(options) - known
    if unknown:
        raise ParseError(f"unknown builder options {sorted(unknown)}")
    return BuilderSpec(kind, arg, options)


def _int_list(text: str, what: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x != ""]
    except ValueError as exc:
        raise ParseError(f"bad {what} list {text!r}") from exc


def spec_shape(spec: BuilderSpec) -> AlgebraShape:
    if "blocks" in spec.options and "group" in spec.options:
        raise ParseError("give either blocks= or group=, not both")
    if "group" in spec.options:
        factors = []
        for part in spec.options["group"].split("x"):
            m = _GROUP.match(part)
            if not m:
                raise ParseError(f"cannot read cyclic factor {part!r}")
            factors.append(int(m.group(1)))
        return group_algebra_shape(factors)
    if "blocks" in spec.options:
        return AlgebraShape(_int_list(spec.options["blocks"], "blocks"))
    return AlgebraShape([1])


def build_from_spec(text: str, seed: int | None = None,
                    tol: Tolerance = DEFAULT_TOL) -> CochainComplex:
    spec = parse_builder_spec(text)
    try:
        shape = spec_shape(spec)
        coeff = int(spec.options.get("coeff", 1))
        if seed is None:
            seed = int(spec.options.get("seed", 0))
        if spec.kind == "point":
            return coboundary_complex(SimplicialComplex(1, []), shape, coeff, tol)
        if spec.kind == "cycle":
            return coboundary_complex(SimplicialComplex.cycle(spec.arg or 3), shape, coeff, tol)
        if spec.kind == "sphere":
            if spec.arg is None:
                raise ParseError("sphere needs a dimension, e.g. sphere:3")
            return coboundary_complex(SimplicialComplex.simplex_boundary(spec.arg), shape,
                                      coeff, tol)
        if spec.kind == "tetra-boundary":
            return coboundary_complex(SimplicialComplex.tetrahedron_boundary(), shape, coeff, tol)
        if "ranks" not in spec.options:
            raise ParseError(f"{spec.kind} needs ranks=")
        ranks = _int_list(spec.options["ranks"], "ranks")
        if spec.kind == "zero":
            return CochainComplex.zero(shape, ranks, tol)
        if "plant" in spec.options:
            plant = [_int_list(row, "plant") for row in spec.options["plant"].split("/")]
        else:
            plant = random_plant(shape, ranks, np.random.default_rng([seed, 1]))
        spread = float(spec.options.get("spread", 1.0))
        return planted_random_complex(shape, ranks, plant, seed=seed, spread=spread,
                                      tol=tol).complex
    except (ParseError, InconsistentPlant):
        raise
    except ValueError as exc:
        raise ParseError(f"builder spec {text!r}: {exc}") from exc
