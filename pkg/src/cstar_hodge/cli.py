"""Command-line entry point: ``cstar-hodge {validate,hodge,decompose,generate}``.

Exit codes: 0 success, 1 mathematical invariant violated, 2 I/O or parse failure.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from dataclasses import dataclass

from .algebra import Tolerance
from .builders import InconsistentPlant
from .hodge import (
    CochainComplex,
    DecompositionError,
    InvalidComplex,
    MultiplicityError,
    decompose_element,
    hodge_decompose,
)
from .io import ParseError, build_from_spec, dumps, load_complex, load_element, save_json
from .operators import NotSelfAdjoint, SpectralGapWarning

EXIT_OK, EXIT_INVARIANT, EXIT_IO = 0, 1, 2


@dataclass(frozen=True)
class RunConfig:
    path: str | None
    spec: str | None
    tol: Tolerance
    fmt: str
    seed: int | None
    out: str | None

    def __post_init__(self):
        if (self.path is None) == (self.spec is None):
            raise ParseError("give exactly one of a complex file or --spec")


def _tolerance(args) -> Tolerance:
    try:
        return Tolerance(rel=args.tol_rel, abs=args.tol_abs)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def _config(args) -> RunConfig:
    tol = _tolerance(args)
    return RunConfig(getattr(args, "path", None), getattr(args, "spec", None), tol,
                     args.format, args.seed, args.out)


def _load(cfg: RunConfig, validate: bool = True) -> CochainComplex:
    if cfg.path is not None:
        return load_complex(cfg.path, cfg.tol, validate=validate)
    return build_from_spec(cfg.spec, seed=cfg.seed, tol=cfg.tol)


def _emit(cfg: RunConfig, data: dict, text: str):
    out = dumps(data) if cfg.fmt == "json" else text
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)


def _tol_line(tol: Tolerance) -> str:
    return f"tolerance: rel={tol.rel!r} abs={tol.abs!r}\n"


def cmd_validate(cfg: RunConfig) -> int:
    c = _load(cfg, validate=False)
    residuals = c.square_residuals()
    tau = cfg.tol.threshold(1.0)
    bad = [k for k, r in enumerate(residuals) if r > tau]
    data = {
        "valid": not bad,
        "tolerance": cfg.tol.to_json(),
        "block_dims": list(c.shape.block_dims),
        "ranks": c.ranks,
        "square_residuals": residuals,
        "violations": [{"degree": k, "message": f"d_{k + 1} d_{k} != 0"} for k in bad],
    }
    lines = [_tol_line(cfg.tol), f"block_dims: {list(c.shape.block_dims)}\n",
             f"ranks: {c.ranks}\n"]
    for k, r in enumerate(residuals):
        flag = "FAIL" if k in bad else "ok"
        lines.append(f"|d_{k + 1} d_{k}| (relative) = {r!r}  {flag}\n")
    lines.append("valid\n" if not bad else
                 "invalid: " + ", ".join(f"d_{k + 1} d_{k} != 0 at degree {k}" for k in bad) + "\n")
    _emit(cfg, data, "".join(lines))
    return EXIT_OK if not bad else EXIT_INVARIANT


def hodge_text(report: dict) -> str:
    lines = [f"tolerance: rel={report['tolerance']['rel']!r} abs={report['tolerance']['abs']!r}\n",
             f"block_dims: {report['block_dims']}\n", f"ranks: {report['ranks']}\n"]
    for deg in report["degrees"]:
        k = deg["degree"]
        lines.append(f"degree {k}:\n")
        lines.append(f"  multiplicities: {deg['multiplicities']}\n")
        lines.append(f"  kernel_dims: {deg['kernel_dims']}\n")
        lines.append(f"  spectral_gap: {deg['spectral_gap']!r}\n")
        lines.append(f"  kernel_cut: {deg['kernel_cut']!r}\n")
        if deg["ill_separated"]:
            lines.append("  WARNING: spectrum ill-separated from the kernel cut\n")
        for name, val in deg["parametrix_residuals"].items():
            lines.append(f"  parametrix {name}: {val!r}\n")
        for name, val in deg["decomposition_residuals"].items():
            lines.append(f"  residual {name}: {val!r}\n")
    return "".join(lines)


def cmd_hodge(cfg: RunConfig) -> int:
    c = _load(cfg)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", SpectralGapWarning)
        result = hodge_decompose(c, strict=False)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    report = result.to_json()
    _emit(cfg, report, hodge_text(report))
    return EXIT_OK


def _element_text(name: str, el) -> str:
    coords = []
    for a in el.coords:
        coords.append([[[repr(z) for z in row] for row in b.tolist()] for b in a.blocks])
    return f"{name}: {coords}\n"


def cmd_decompose(cfg: RunConfig, degree: int, element_path: str) -> int:
    c = _load(cfg)
    if not 0 <= degree <= c.length:
        raise ParseError(f"degree {degree} outside 0..{c.length}")
    x = load_element(element_path, c.space(degree))
    result = hodge_decompose(c, strict=False)
    dec = decompose_element(result, degree, x)
    parts = {
        "harmonic": dec.harmonic, "exact": dec.exact, "coexact": dec.coexact,
        "exact_witness": dec.exact_witness, "coexact_witness": dec.coexact_witness,
    }
    data = {
        "tolerance": cfg.tol.to_json(),
        "degree": degree,
        "reconstruction_error": dec.reconstruction_error,
        "orthogonality": dict(dec.orthogonality),
        **{name: el.to_json() for name, el in parts.items()},
    }
    lines = [_tol_line(cfg.tol), f"degree: {degree}\n",
             f"reconstruction_error: {dec.reconstruction_error!r}\n"]
    for name, val in dec.orthogonality.items():
        lines.append(f"orthogonality ({name}): {val!r}\n")
    for name, el in parts.items():
        lines.append(_element_text(name, el))
    _emit(cfg, data, "".join(lines))
    return EXIT_OK


def cmd_generate(spec: str, seed: int | None, out: str | None, tol: Tolerance) -> int:
    c = build_from_spec(spec, seed=seed, tol=tol)
    text = save_json(c.to_json(), out)
    if out is None:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol-rel", type=float, default=1e-9)
    common.add_argument("--tol-abs", type=float, default=1e-12)
    common.add_argument("--format", choices=["text", "json"], default="text")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--out", default=None, help="write the report here instead of stdout")

    parser = argparse.ArgumentParser(
        prog="cstar-hodge",
        description="Hodge decomposition and cohomology of complexes of Hilbert A-modules.")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, helptext in [("validate", "check d_{k+1} d_k = 0"),
                           ("hodge", "Laplacians, parametrices, cohomology multiplicities")]:
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("path", nargs="?")
        p.add_argument("--spec", help="builder spec instead of a file, e.g. 'cycle:3'")

    p = sub.add_parser("decompose", parents=[common], help="split one element")
    p.add_argument("path", nargs="?")
    p.add_argument("--spec")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--element", required=True, help="JSON module element in C^degree")

    p = sub.add_parser("generate", parents=[common], help="write a builder complex as JSON")
    p.add_argument("builder", help="e.g. 'planted ranks=2,3,2 seed=7' or 'cycle:5'")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "generate":
            return cmd_generate(args.builder, args.seed, args.out, _tolerance(args))
        cfg = _config(args)
        if args.command == "validate":
            return cmd_validate(cfg)
        if args.command == "hodge":
            return cmd_hodge(cfg)
        return cmd_decompose(cfg, args.degree, args.element)
    except (InvalidComplex, DecompositionError, MultiplicityError, NotSelfAdjoint,
            InconsistentPlant) as exc:
        degree = getattr(exc, "degree", None)
        where = f" (degree {degree})" if degree is not None else ""
        print(f"error{where}: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (ParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
