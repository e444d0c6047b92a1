"""
Command-line interface.

Every command is configured by flags alone and writes its output atomically.
Exit status is 0 on success, 2 on usage errors and 1 on data errors.

Quadrature specs
----------------
``gl:<N>``
    tensor Gauss--Legendre rule on SO(3) of exactness ``N``
``s1s2:<path>,<N>``
    sphere node file at ``path`` times ``N+1`` equispaced alpha values
``file:<path>``
    an SO(3) node file
``s2gl:<N>``
    Gauss--Legendre rule on the sphere (``verify-quad`` only)
"""
from __future__ import annotations

import argparse
import math
import sys
import warnings

from . import arcs, inversion, quadrature, spectral
from ._util import atomic_write_text
from .sphere import SphericalCoeffs

EXIT_DATA = 1
EXIT_USAGE = 2


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


def parse_quadrature(spec, allow_s2=False):
    """Build a quadrature rule from a ``kind:args`` spec string."""
    kind, _, arg = spec.partition(":")
    if not arg:
        raise UsageError(f"bad quadrature spec {spec!r}")
    try:
        if kind == "gl":
            return quadrature.gauss_legendre_so3(int(arg))
        if kind == "s2gl" and allow_s2:
            return quadrature.gauss_legendre_s2(int(arg))
        if kind == "s1s2":
            path, sep, deg = arg.rpartition(",")
            if not sep or not path:
                raise UsageError(f"bad quadrature spec {spec!r}; use s1s2:<path>,<N>")
            deg = int(deg)
        elif kind != "file":
            raise UsageError(f"unknown quadrature kind {kind!r}")
    except ValueError:
        raise UsageError(f"bad quadrature spec {spec!r}") from None
    try:
        if kind == "s1s2":
            return quadrature.s1_x_s2_so3(quadrature.load_s2_nodes(path), deg)
        if allow_s2:
            return quadrature.load_nodes(arg)
        return quadrature.load_so3_nodes(arg)
    except OSError as exc:
        raise DataError(str(exc)) from None


def _psi_open(psi):
    if not 0.0 < psi < math.pi:
        raise UsageError(f"--psi must lie in (0, pi), got {psi}")


def _read_coeffs(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return SphericalCoeffs.from_json(fh.read())
    except OSError as exc:
        raise DataError(str(exc)) from None


def _read_measurements(path):
    try:
        return arcs.read_measurements(path)
    except OSError as exc:
        raise DataError(str(exc)) from None


# ---------------------------------------------------------------------------
# Commands


def cmd_singvals(args):
    if args.mode == "fixed":
        if args.psi is None:
            raise UsageError("--mode fixed requires --psi")
        if not 0.0 <= args.psi <= math.pi:
            raise UsageError("--psi must lie in [0, pi]")
    table = spectral.singular_value_table(args.nmax, args.mode, args.psi)
    _emit(args.out, table.to_csv())


def cmd_phantom(args):
    coeffs = inversion.make_phantom(args.kind, args.nmax, args.seed)
    _emit(args.out, coeffs.to_json() + "\n")


def cmd_forward(args):
    _psi_open(args.psi)
    coeffs = _read_coeffs(args.coeffs)
    quad = parse_quadrature(args.quadrature)
    meas = inversion.simulate(coeffs, quad, args.psi)
    arcs.write_measurements(args.out, meas)


def cmd_noise(args):
    if args.sigma < 0.0:
        raise UsageError("--sigma must be >= 0")
    meas = _read_measurements(args.measurements)
    arcs.write_measurements(args.out, inversion.add_noise(meas, args.sigma, args.seed))


def cmd_invert(args):
    try:
        filt = inversion.FilterSpec.parse(args.filter)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    meas = _read_measurements(args.measurements)
    _psi_open(meas.psi)
    truth = _read_coeffs(args.truth) if args.truth else None
    report = inversion.invert(meas, args.nmax, filt, truth=truth)
    report.write(args.out)
    if report.rmse is not None:
        print(f"rmse={report.rmse!r}")


def cmd_arcs(args):
    if not 0.0 <= args.psi <= math.pi:
        raise UsageError("--psi must lie in [0, pi]")
    if args.segments < 1:
        raise UsageError("--segments must be >= 1")
    quad = parse_quadrature(args.quadrature)
    lines = [arcs.arc_polyline(a, args.segments)
             for a in arcs.ArcMeasurements(args.psi, quad.nodes, quad.weights,
                                           [0.0] * len(quad)).arcs()]
    arcs.write_polylines(args.out, lines)


def cmd_verify_quad(args):
    quad = parse_quadrature(args.quadrature, allow_s2=True)
    rep = quadrature.verify_exactness(quad, args.nmax)
    status = "ok" if rep.passed(args.tol) else "FAIL"
    print(f"nodes={rep.nodes} declared_exactness={rep.declared_exactness} "
          f"nmax={rep.nmax} max_residual={rep.max_residual:.3e} {status}")
    return 0 if rep.passed(args.tol) else EXIT_DATA


def _emit(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        atomic_write_text(path, text)


# ---------------------------------------------------------------------------


def _nonneg_int(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def build_parser():
    p = argparse.ArgumentParser(
        prog="arctomo",
        description="Great-circle arc transform: singular values, simulation and inversion.",
        epilog="Quadrature specs: gl:<N>, s1s2:<path>,<N>, file:<path> (and s2gl:<N> for verify-quad). "
               "ARCTOMO_THREADS caps worker threads (0 = one per CPU).")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("singvals", help="table of singular values as CSV")
    s.add_argument("--mode", choices=("full", "fixed"), default="full",
                   help="all arcs (full) or arcs of half-length --psi (fixed); default full")
    s.add_argument("--psi", type=float, help="arc half-length, required in fixed mode")
    s.add_argument("--nmax", type=_nonneg_int, default=64, help="largest degree (default 64)")
    s.add_argument("--out", default="-", help="output CSV (default stdout)")
    s.set_defaults(func=cmd_singvals)

    s = sub.add_parser("phantom", help="random real test function as coefficient JSON")
    s.add_argument("--kind", choices=("smooth", "bandlimited"), default="smooth",
                   help="coefficient decay (default smooth)")
    s.add_argument("--nmax", type=_nonneg_int, default=22, help="bandwidth (default 22)")
    s.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    s.add_argument("--out", default="-", help="output JSON (default stdout)")
    s.set_defaults(func=cmd_phantom)

    s = sub.add_parser("forward", help="arc integrals at the nodes of an SO(3) rule")
    s.add_argument("--coeffs", required=True, help="coefficient JSON")
    s.add_argument("--quadrature", required=True, help="quadrature spec")
    s.add_argument("--psi", type=float, required=True, help="arc half-length in (0, pi)")
    s.add_argument("--out", required=True, help="measurement CSV")
    s.set_defaults(func=cmd_forward)

    s = sub.add_parser("noise", help="add white Gaussian noise to measurements")
    s.add_argument("--measurements", required=True)
    s.add_argument("--sigma", type=float, required=True, help="standard deviation")
    s.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_noise)

    s = sub.add_parser("invert", help="reconstruct coefficients from measurements")
    s.add_argument("--measurements", required=True)
    s.add_argument("--nmax", type=_nonneg_int, required=True, help="reconstruction bandwidth")
    s.add_argument("--filter", default="none",
                   help="none, cutoff:<N> or tikhonov:<tau> (default none)")
    s.add_argument("--truth", help="reference coefficient JSON; adds the RMSE to the report")
    s.add_argument("--out", required=True, help="report JSON")
    s.set_defaults(func=cmd_invert)

    s = sub.add_parser("arcs", help="polylines of the arcs at the nodes of an SO(3) rule")
    s.add_argument("--quadrature", required=True)
    s.add_argument("--psi", type=float, required=True)
    s.add_argument("--segments", type=int, default=16, help="segments per arc (default 16)")
    s.add_argument("--out", required=True, help="CSV of x,y,z rows, arcs separated by blank lines")
    s.set_defaults(func=cmd_arcs)

    s = sub.add_parser("verify-quad", help="orthonormality residual of a quadrature rule")
    s.add_argument("--quadrature", required=True)
    s.add_argument("--nmax", type=_nonneg_int, required=True)
    s.add_argument("--tol", type=float, default=1e-10, help="pass threshold (default 1e-10)")
    s.set_defaults(func=cmd_verify_quad)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            code = args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"arctomo {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, ValueError) as exc:
        print(f"arctomo {args.command}: {exc}", file=sys.stderr)
        return EXIT_DATA
    return code or 0


if __name__ == "__main__":
    sys.exit(main())
