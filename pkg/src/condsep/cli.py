"""Command-line front end.

Every run writes exactly one JSON result document (to --out or stdout) and a
short human summary to stderr. Exit codes are stable:

    0   success / separable-certified / PPT holds / verification passed
    1   entangled-certified (PPT violated)
    2   inconclusive or verification failed
    64  input parse failure
    65  input validation failure (named invariant violated)
    70  numerical singularity or extraction inconsistency

The ``timing_s`` field is the only part of the document excluded from the
byte-for-byte determinism contract.
"""

import argparse
import json
import sys
import time

from . import __version__
from .config import DEFAULT_TOLS
from .entropy import classical_cmi, quantum_cmi, von_neumann_entropy
from .errors import NumericalError, UsageError, ValidationError
from .search import ENTANGLED, SEPARABLE, SearchConfig, classify, ppt_check, search_extension
from .serialize import (
    certificate_to_obj,
    decomposition_from_obj,
    decomposition_to_obj,
    density_from_obj,
    density_to_obj,
    distribution_from_obj,
    dumps,
    report_to_obj,
    tolerances_to_obj,
)
from .states import ExtensionState, build_extension, dedegenerate_weights, random_density, random_separable
from .theorem import extract_decomposition, verify_extension

EXIT_OK = 0
EXIT_ENTANGLED = 1
EXIT_INCONCLUSIVE = 2
EXIT_PARSE = 64
EXIT_VALIDATION = 65
EXIT_NUMERICAL = 70


def _load_json(path):
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as err:
        raise _ParseFailure(f"cannot read {path}: {err}") from err
    # accept this tool's own result documents directly (pipeline closure)
    if isinstance(obj, dict) and obj.get("tool") == "condsep" and "result" in obj:
        return obj["result"]
    return obj


class _ParseFailure(Exception):
    pass


def _parse_tols(pairs):
    overrides = {}
    for item in pairs or []:
        if "=" not in item:
            raise UsageError(f"--tol expects name=value, got {item!r}")
        name, _, value = item.partition("=")
        try:
            overrides[name.strip()] = float(value)
        except ValueError as err:
            raise UsageError(f"--tol {name}: {value!r} is not a number") from err
    return DEFAULT_TOLS.override(**overrides)


def _load_sigma(path, tols):
    dm = density_from_obj(_load_json(path), tols)
    if dm.dims.labels != ("e", "x", "y"):
        raise UsageError(f"extension file must be labeled ['e','x','y'], got {list(dm.dims.labels)}")
    return ExtensionState(sigma=dm)


def _dims_arg(text):
    try:
        return tuple(int(p) for p in text.split(","))
    except ValueError as err:
        raise UsageError(f"--dims expects comma-separated integers, got {text!r}") from err


def _search_config(args):
    return SearchConfig(
        n_terms=args.terms,
        restarts=args.restarts,
        max_iters=args.iters,
        seed=args.seed,
        residual_target=args.target,
        workers=args.workers,
        keep_trace=args.trace,
    )


def _cmd_entropy(args, tols):
    rho = density_from_obj(_load_json(args.rho), tols)
    return EXIT_OK, {"entropy_bits": von_neumann_entropy(rho, tols.eig_floor)}, "entropy computed"


def _cmd_cmi(args, tols):
    if args.sigma is not None:
        rep = quantum_cmi(density_from_obj(_load_json(args.sigma), tols), tols)
        result = {"cmi_bits": rep.cmi, "s_xe": rep.s_xe, "s_ye": rep.s_ye, "s_xye": rep.s_xye, "s_e": rep.s_e}
        return EXIT_OK, result, f"quantum cmi = {rep.cmi:.6e} bits"
    dist = distribution_from_obj(_load_json(args.dist), tols)
    value = classical_cmi(dist, tols.eig_floor)
    return EXIT_OK, {"cmi_bits": value}, f"classical cmi = {value:.6e} bits"


def _cmd_build_extension(args, tols):
    decomp = decomposition_from_obj(_load_json(args.decomp), tols)
    distinct = dedegenerate_weights(decomp, tols=tols)
    ext = build_extension(distinct, tols)
    return EXIT_OK, density_to_obj(ext.sigma), f"extension built: dim(e) = {ext.sigma.dims.dims[0]}"


def _cmd_verify(args, tols):
    rho = density_from_obj(_load_json(args.rho), tols)
    sigma = _load_sigma(args.sigma, tols)
    cert = verify_extension(rho, sigma, tols)
    code = EXIT_OK if cert.overall_pass else EXIT_INCONCLUSIVE
    return code, certificate_to_obj(cert), f"verification {'passed' if cert.overall_pass else 'FAILED'}"


def _cmd_extract(args, tols):
    sigma = _load_sigma(args.sigma, tols)
    result = extract_decomposition(sigma, tols)
    doc = decomposition_to_obj(result.decomposition)
    doc["rebuild_residual"] = result.rebuild_residual
    doc["off_block_residual"] = result.blocks.off_block_residual
    doc["clip_magnitude"] = result.clip_magnitude
    return EXIT_OK, doc, f"extracted {len(result.decomposition.terms)} terms"


def _cmd_ppt(args, tols):
    rho = density_from_obj(_load_json(args.rho), tols)
    res = ppt_check(rho, tols.ppt)
    code = EXIT_OK if res.is_ppt else EXIT_ENTANGLED
    doc = {"min_eigenvalue": res.min_eigenvalue, "is_ppt": res.is_ppt}
    return code, doc, f"partial transpose min eigenvalue = {res.min_eigenvalue:.6e}"


def _verdict_code(verdict):
    if verdict == SEPARABLE:
        return EXIT_OK
    if verdict == ENTANGLED:
        return EXIT_ENTANGLED
    return EXIT_INCONCLUSIVE


def _cmd_search(args, tols):
    rho = density_from_obj(_load_json(args.rho), tols)
    report = search_extension(rho, _search_config(args), tols)
    return _verdict_code(report.verdict), report_to_obj(report, include_trace=args.trace), f"verdict: {report.verdict}"


def _cmd_classify(args, tols):
    rho = density_from_obj(_load_json(args.rho), tols)
    report = classify(rho, _search_config(args), tols)
    return _verdict_code(report.verdict), report_to_obj(report, include_trace=args.trace), f"verdict: {report.verdict}"


def _cmd_gen(args, tols):
    if args.kind == "density":
        dm = random_density(args.dims, rank=args.rank, seed=args.seed, tols=tols)
        return EXIT_OK, density_to_obj(dm), f"generated density on dims {args.dims}"
    if args.kind == "decomposition":
        if len(args.dims) != 2:
            raise UsageError("gen --kind decomposition needs bipartite --dims dx,dy")
        d = random_separable(args.dims, n_terms=args.terms or 4, seed=args.seed, tols=tols)
        return EXIT_OK, decomposition_to_obj(d), f"generated {len(d.terms)}-term decomposition"
    raise UsageError(f"unknown gen kind {args.kind!r}")


def build_parser():
    parser = argparse.ArgumentParser(prog="condsep", description="separability certification toolkit")
    parser.add_argument("--version", action="version", version=f"condsep {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0, help="master random seed")
        p.add_argument("--tol", action="append", metavar="NAME=VALUE", help="tolerance override")
        p.add_argument("--out", help="write the result document to this path (default stdout)")
        p.add_argument("--trace", action="store_true", help="include per-restart residual traces")
        return p

    p = common(sub.add_parser("entropy", help="von Neumann entropy of a density matrix"))
    p.add_argument("--rho", required=True)
    p.set_defaults(handler=_cmd_entropy)

    p = common(sub.add_parser("cmi", help="conditional mutual information (quantum or classical)"))
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--sigma", help="tripartite (e,x,y) density matrix file")
    group.add_argument("--dist", help="joint distribution file")
    p.set_defaults(handler=_cmd_cmi)

    p = common(sub.add_parser("build-extension", help="build the extension of a decomposition"))
    p.add_argument("--decomp", required=True)
    p.set_defaults(handler=_cmd_build_extension)

    p = common(sub.add_parser("verify", help="check the four extension conditions"))
    p.add_argument("--rho", required=True)
    p.add_argument("--sigma", required=True)
    p.set_defaults(handler=_cmd_verify)

    p = common(sub.add_parser("extract", help="extract a decomposition from an extension"))
    p.add_argument("--sigma", required=True)
    p.set_defaults(handler=_cmd_extract)

    p = common(sub.add_parser("ppt", help="partial-transpose entanglement oracle"))
    p.add_argument("--rho", required=True)
    p.set_defaults(handler=_cmd_ppt)

    for name, handler in (("search", _cmd_search), ("classify", _cmd_classify)):
        p = common(sub.add_parser(name, help=f"{name} a bipartite state"))
        p.add_argument("--rho", required=True)
        p.add_argument("--terms", type=int, default=None, help="ansatz size (default (dx*dy)^2)")
        p.add_argument("--restarts", type=int, default=8)
        p.add_argument("--iters", type=int, default=500)
        p.add_argument("--target", type=float, default=1e-7, help="certification residual target")
        p.add_argument("--workers", type=int, default=1, help="parallel restart workers")
        p.set_defaults(handler=handler)

    p = common(sub.add_parser("gen", help="generate random states or decompositions"))
    p.add_argument("--kind", choices=("density", "decomposition"), required=True)
    p.add_argument("--dims", type=_dims_arg, required=True, help="comma-separated subsystem dims")
    p.add_argument("--rank", type=int, default=None)
    p.add_argument("--terms", type=int, default=None)
    p.set_defaults(handler=_cmd_gen)

    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.monotonic()
    try:
        tols = _parse_tols(args.tol)
        code, result, summary = args.handler(args, tols)
    except _ParseFailure as err:
        print(f"condsep: parse error: {err}", file=sys.stderr)
        return EXIT_PARSE
    except ValidationError as err:
        print(f"condsep: validation error: {err}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as err:
        print(f"condsep: numerical error: {err}", file=sys.stderr)
        return EXIT_NUMERICAL

    document = {
        "tool": "condsep",
        "version": __version__,
        "command": args.command,
        "seed": args.seed,
        "tolerances": tolerances_to_obj(tols),
        "result": result,
        "timing_s": time.monotonic() - start,
    }
    text = dumps(document)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(f"condsep {args.command}: {summary}", file=sys.stderr)
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
