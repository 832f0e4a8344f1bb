"""Command-line front end.

Usage::

    qgs <command> GRAPH [--zmax Z] [--alpha A] [--n N] [--N N] [--format csv|json] [--out PATH]

Commands: discriminant, dirichlet, bands, discrete-spec, spectrum, lattice,
validate.  GRAPH is a JSON file::

    {"vertices": ["v1", "v2"],
     "edges": [{"id": "e1", "from": "v1", "to": "v2", "beta": 0.0}],
     "alpha": 0.0,
     "potential": {"breakpoints": [0, 1], "values": [0]},
     "max_degree": 4}

``beta``, ``alpha``, ``potential``, ``max_degree`` and edge ``id`` are
optional.  ``--alpha`` overrides the file.  The ``lattice`` command only uses
the potential and alpha from the file.

Exit codes: 0 success, 1 validation mismatch, 2 bad input, 3 numerical failure.
Set ``QGS_LOG`` to quiet, info or debug to control diagnostics on stderr.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
import time
from dataclasses import dataclass

import numpy as np

from .errors import InputError, NumericalError
from .graph import assemble_discrete_laplacian, discrete_spectrum, load_graph
from .hill import band_edges, dirichlet_eigenvalues, discriminant
from .oracle import validate
from .spectrum import dumps, lattice_spectrum, quantum_spectrum, report_to_csv, report_to_json

log = logging.getLogger("qgs")

COMMANDS = ("discriminant", "dirichlet", "bands", "discrete-spec", "spectrum", "lattice", "validate")
LOG_LEVELS = {"quiet": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}


@dataclass
class RunConfig:
    command: str
    input: str
    zmax: float = 100.0
    alpha: float | None = None
    n: int | None = None
    N: int = 500
    format: str | None = None
    out: str | None = None
    zmin: float | None = None
    points: int = 1001
    tol: float = 1e-2

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise InputError(f"command: expected one of {', '.join(COMMANDS)}, got {self.command!r}")
        if not (self.zmax > 0 and math.isfinite(self.zmax)):
            raise InputError(f"zmax: must be a positive finite number, got {self.zmax}")
        if self.command == "lattice" and self.n is None:
            raise InputError("n: the lattice command needs --n")
        if self.format is None:
            self.format = "csv" if self.command == "discriminant" else "json"
        if self.format not in ("csv", "json"):
            raise InputError(f"format: expected csv or json, got {self.format!r}")


def _g(x) -> str:
    return f"{x:.12g}"


def _csv(header, rows) -> str:
    return "\n".join([",".join(header)] + [",".join(r) for r in rows]) + "\n"


def _positive(text):
    x = float(text)
    if not (x > 0 and math.isfinite(x)):
        raise argparse.ArgumentTypeError(f"must be a positive finite number, got {text}")
    return x


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qgs", description="Quantum-graph spectra from the Hill discriminant.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("input", help="graph description (JSON)")
    p.add_argument("--zmax", type=_positive, default=100.0, help="upper end of the energy window (default 100)")
    p.add_argument("--zmin", type=float, default=None, help="discriminant sweep start (default min U - 1)")
    p.add_argument("--points", type=int, default=1001, help="discriminant sweep size")
    p.add_argument("--alpha", type=float, default=None, help="override the coupling in the file")
    p.add_argument("--n", type=int, default=None, help="lattice dimension (lattice command)")
    p.add_argument("--N", type=int, default=500, help="elements per edge (validate command)")
    p.add_argument("--tol", type=float, default=1e-2, help="relative tolerance (validate command)")
    p.add_argument("--format", choices=("csv", "json"), default=None,
                   help="output format (default: csv for discriminant, json otherwise)")
    p.add_argument("--out", default=None, help="write to this file instead of stdout")
    return p


def _discriminant(g, args):
    U = g.potential
    zmin = U.min - 1.0 if args.zmin is None else args.zmin
    if not zmin < args.zmax:
        raise InputError(f"zmin: {zmin} must be below zmax {args.zmax}")
    if args.points < 2:
        raise InputError("points: need at least 2")
    z = np.linspace(zmin, args.zmax, args.points)
    eta = discriminant(U, g.alpha, z)
    if args.format == "json":
        return dumps({"alpha": g.alpha, "z": z.tolist(), "eta": eta.tolist()})
    return _csv(("z", "eta"), [(_g(a), _g(b)) for a, b in zip(z, eta)])


def _dirichlet(g, args):
    mus = dirichlet_eigenvalues(g.potential, args.zmax)
    if args.format == "csv":
        return _csv(("k", "mu"), [(str(k), _g(m)) for k, m in enumerate(mus)])
    return dumps({"zmax": args.zmax, "mu": mus.tolist()})


def _bands(g, args):
    bs = band_edges(g.potential, g.alpha, args.zmax)
    if args.format == "csv":
        rows = [("band", str(b.k), _g(b.a), _g(b.b), str(b.partial).lower()) for b in bs.bands]
        rows += [("gap", str(gp.k), _g(gp.left), _g(gp.right), "") for gp in bs.gaps]
        rows += [("dirichlet", str(k), _g(m), "", "") for k, m in enumerate(bs.dirichlet)]
        return _csv(("kind", "k", "left", "right", "partial"), rows)
    return dumps(bs.to_dict())


def _discrete(g, args):
    spec = discrete_spectrum(assemble_discrete_laplacian(g))
    if args.format == "csv":
        return _csv(("lambda", "mult"), [(_g(lam), str(m)) for lam, m in spec])
    return dumps({"eigenvalues": [{"lambda": lam, "mult": m} for lam, m in spec]})


def _report(report, args):
    return report_to_csv(report) if args.format == "csv" else report_to_json(report)


def _spectrum(g, args):
    return _report(quantum_spectrum(g, args.zmax), args)


def _lattice(g, args):
    if args.n < 1:
        raise InputError(f"n: lattice dimension must be >= 1, got {args.n}")
    return _report(lattice_spectrum(args.n, g.potential, g.alpha, args.zmax), args)


def _validate(g, args):
    cmp = validate(g, args.N, args.zmax, args.tol)
    if args.format == "csv":
        rows = [(_g(t), _g(o), _g(r), "matched") for t, o, r in cmp.matched]
        rows += [(_g(t), "", "", "theory-only") for t in cmp.unmatched_theory]
        rows += [("", _g(o), "", "oracle-only") for o in cmp.unmatched_oracle]
        text = _csv(("theory", "oracle", "rel_error", "status"), rows)
    else:
        text = dumps(cmp.to_dict())
    return text, (0 if cmp.ok else 1)


HANDLERS = {
    "discriminant": _discriminant,
    "dirichlet": _dirichlet,
    "bands": _bands,
    "discrete-spec": _discrete,
    "spectrum": _spectrum,
    "lattice": _lattice,
    "validate": _validate,
}


def _setup_logging():
    level = os.environ.get("QGS_LOG", "quiet").lower()
    if level not in LOG_LEVELS:
        raise InputError(f"QGS_LOG: expected one of {sorted(LOG_LEVELS)}, got {level!r}")
    logging.basicConfig(level=LOG_LEVELS[level], format="%(levelname)s %(name)s: %(message)s",
                        stream=sys.stderr)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = RunConfig(**vars(args))
    except InputError as exc:
        print(f"qgs: error: {exc}", file=sys.stderr)
        return 2
    return run(config)


def run(args: RunConfig) -> int:
    """Execute one command; returns the process exit code."""
    try:
        _setup_logging()
        g = load_graph(args.input)
        if args.alpha is not None:
            g = g.with_(alpha=args.alpha)
        log.info("graph: %d vertices, %d edges, type %s, alpha=%g",
                 len(g.vertices), len(g.edges), g.graph_type, g.alpha)
        t0 = time.perf_counter()
        result = HANDLERS[args.command](g, args)
        log.info("%s finished in %.3f s", args.command, time.perf_counter() - t0)
    except (InputError, OSError) as exc:
        print(f"qgs: error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"qgs: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    text, code = result if isinstance(result, tuple) else (result, 0)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if code:
        print("qgs: validation mismatch: some theory points have no oracle partner", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
