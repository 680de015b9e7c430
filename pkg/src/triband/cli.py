"""Command-line front end: band sweeps, bound states, strength sweeps,
point-interaction limits and the self-verification suite.

Energies are always exported in units of the mass m and lengths in 1/m; an
explicit --m rescales the inputs accordingly.  Every file output gets a JSON
manifest sidecar recording the run parameters.  Exit codes: 0 ok, 1 usage,
2 numerical-domain error, 3 verification failure.
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from . import __version__, io_utils
from .bands import band_sweep, classify_flat
from .boundstates import eigenfunction, find_bound_states
from .model import DomainError, Geometry, PotentialConfig
from .pointlimits import (
    SqueezeLaw,
    convergence_study,
    limit_energy,
    limit_matrix,
    squeezed_eigenfunction,
)
from .spectra import PencilSpec, classify, sweep
from .verify import run_all

FAMILY_NAMES = {"delta": "delta", "l23": "two_thirds", "l2": "inv_square"}

# canonical pencil per spectrum species (vertex, alphas)
SET_PENCILS = {
    "P": ("P1", (1.0, 1.0, 1.0)),
    "D": ("P2", (-1.0, 1.0, -1.0)),
    "H1": ("P2", (1.0, 1.0, -1.0)),
    "H2": ("P1", (0.0, 1.0, 0.0)),
    "W1": ("P1", (1.0, 0.0, 1.0)),
    "W2": ("P1", (2.0, 1.0, 0.0)),
}

SWEEP_PRESETS = {
    "fig4": ("P1", (1.0, 1.0, 1.0), 0.5),
    "fig5": ("P2", (-1.0, 1.0, -1.0), 5.0),
    "fig6": ("P2", (1.0, 1.0, -1.0), 2.0),
    "fig7": ("P1", (0.0, 1.0, 0.0), 2.0),
    "fig8": ("P1", (1.0, 0.0, 1.0), 2.5),
    "fig9": ("P1", (2.0, 1.0, 0.0), 2.0),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def _triple(text: str):
    parts = [float(p) for p in text.split(",")]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected three comma-separated strengths")
    return tuple(parts)


def _index_range(text: str):
    if ".." in text:
        lo, hi = text.split("..")
        return list(range(int(lo), int(hi) + 1))
    return [int(text)]


def _manifest(args, extra=None):
    payload = {
        "command": args.command,
        "version": __version__,
        "parameters": {
            k: v for k, v in sorted(vars(args).items()) if k not in ("command", "func")
        },
    }
    if extra:
        payload.update(extra)
    return payload


def cmd_bands(args) -> int:
    m = args.m
    cfg = PotentialConfig(args.v[0] / m, args.v[1] / m, args.v[2] / m, 1.0)
    ks = np.linspace(-args.kmax, args.kmax, args.nk)
    t0 = time.perf_counter()
    result = band_sweep(cfg, ks)
    rows = [
        (tr.k, tr.e_minus, tr.e_mid, tr.e_plus, result.panel) for tr in result.triples
    ]
    io_utils.write_csv(args.out, ["k", "e_minus", "e_mid", "e_plus", "panel_class"], rows)
    flat = classify_flat(cfg)
    sys.stderr.write(
        f"panel {result.panel}; on_A={flat.on_a} on_B={flat.on_b} "
        f"flat_energy={io_utils.fmt(flat.flat_energy)}\n"
    )
    if args.out and args.out != "-":
        io_utils.write_manifest(
            args.out + ".manifest.json",
            _manifest(args, {"panel": result.panel, "elapsed_s": time.perf_counter() - t0}),
        )
    return 0


def cmd_flat(args) -> int:
    m = args.m
    cfg = PotentialConfig(args.v11 / m, args.v22 / m, args.v33 / m, 1.0)
    flat = classify_flat(cfg)
    print(f"on_A={str(flat.on_a).lower()}")
    print(f"on_B={str(flat.on_b).lower()}")
    print(f"flat_energy={io_utils.fmt(flat.flat_energy)}")
    return 0


def _geometry(args) -> Geometry:
    if getattr(args, "x1", None) is not None and getattr(args, "x2", None) is not None:
        return Geometry(args.x1 * args.m, args.x2 * args.m)
    return Geometry.centered(args.l * args.m)


def cmd_boundstates(args) -> int:
    m = args.m
    if args.preset == "fig3":
        cfg = PotentialConfig(3.0, 3.0, 3.0, 1.0)
        geom = Geometry.centered(0.5)
    else:
        cfg = PotentialConfig(args.v[0] / m, args.v[1] / m, args.v[2] / m, 1.0)
        geom = _geometry(args)
    t0 = time.perf_counter()
    sols = find_bound_states(cfg, geom, n_grid=args.ngrid, workers=args.workers)
    rows = [(s.parity, s.energy, s.kappa, s.residual) for s in sols]
    io_utils.write_csv(args.out, ["parity", "E_b", "kappa", "residual"], rows)
    if args.wavefunction:
        span = 2.0 * geom.l
        x = np.linspace(geom.x1 - span, geom.x2 + span, args.nx)
        wrows = []
        for s in sols:
            for smp in eigenfunction(s, cfg, geom, x):
                wrows.append((s.parity, s.energy, smp.x, smp.psi1, smp.psi2, smp.psi3))
        io_utils.write_csv(
            args.wavefunction, ["parity", "E_b", "x", "psi1", "psi2", "psi3"], wrows
        )
    if args.out and args.out != "-":
        io_utils.write_manifest(
            args.out + ".manifest.json",
            _manifest(args, {"n_states": len(sols), "elapsed_s": time.perf_counter() - t0}),
        )
    return 0


def cmd_sweep(args) -> int:
    if args.preset:
        vertex, alphas, l = SWEEP_PRESETS[args.preset]
    else:
        vertex, alphas, l = args.vertex, args.alphas, args.l * args.m
    pencil = PencilSpec(vertex, *alphas)
    geom = Geometry.centered(l)
    v_grid = np.linspace(args.vmin, args.vmax, args.nv)
    t0 = time.perf_counter()
    spectrum = sweep(pencil, geom, v_grid, n_grid=args.ngrid, workers=args.workers)
    rows = []
    for bi, br in enumerate(spectrum.branches):
        for v, st in zip(br.v_values, br.states):
            rows.append((v, st.parity, st.energy, bi, int(np.sign(st.k2))))
    rows.sort(key=lambda r: (r[0], r[2]))
    io_utils.write_csv(args.out, ["V", "parity", "E_b", "branch_id", "k2_sign"], rows)
    stype = classify(pencil)
    if args.out and args.out != "-":
        io_utils.write_manifest(
            args.out + ".manifest.json",
            _manifest(
                args,
                {
                    "pencil": {"vertex": vertex, "alphas": list(alphas), "l": l},
                    "spectrum_type": stype.tag,
                    "beta": stype.beta,
                    "events": [list(e) for e in spectrum.events],
                    "elapsed_s": time.perf_counter() - t0,
                },
            ),
        )
    return 0


def _table1_rows():
    """One row per tabulated squeezed matrix, each at a strength inside its
    validity window (delta rates cover ground states, l23/l2 the ladders)."""
    combos = [
        ("H1", "l23", 1.5, range(1, 4)),
        ("W1", "delta", 3.0, (0,)),
        ("W1", "l2", 45.0, range(0, 3)),
        ("H2", "delta", 2.0, (0,)),
        ("H2", "l2", 2.0, range(0, 4)),
        ("W2", "delta", -2.0, (0,)),
        ("W2", "l2", -60.0, range(0, 3)),
    ]
    out = []
    for set_tag, fam, g, ns in combos:
        vertex, alphas = SET_PENCILS[set_tag]
        pencil = PencilSpec(vertex, *alphas)
        law = SqueezeLaw(FAMILY_NAMES[fam], g)
        for n in ns:
            try:
                e = limit_energy(pencil, law, n=n)
            except DomainError:
                continue
            if e is None:
                continue
            pi = limit_matrix(pencil, law, n=n, e_n=e)
            lam = pi.lambda_n
            out.append(
                {
                    "set": set_tag,
                    "family": fam,
                    "g": g,
                    "n": n,
                    "E_n": e,
                    "chi_n": pi.chi_n,
                    "lambda": [[lam.l11, lam.l12], [lam.l21, lam.l22]],
                }
            )
    return out


def cmd_pointlimit(args) -> int:
    if args.preset == "table1":
        payload = {"entries": _table1_rows()}
        io_utils.write_manifest(args.out or "table1.json", payload)
        return 0
    if args.preset == "fig10":
        pencil = PencilSpec(SET_PENCILS["P"][0], *SET_PENCILS["P"][1])
        law = SqueezeLaw("delta", np.pi / 2.0)
        x = np.linspace(-8.0, 8.0, args.nx)
        rows = []
        for par in ("+", "-"):
            e = limit_energy(pencil, law, parity=par)
            for smp in squeezed_eigenfunction(pencil, law, parity=par, x_grid=x):
                rows.append((par, e, smp.x, smp.psi1, smp.psi2, smp.psi3))
        io_utils.write_csv(args.out, ["parity", "E_b", "x", "psi1", "psi2", "psi3"], rows)
        return 0
    if args.preset == "fig11":
        pencil = PencilSpec(SET_PENCILS["H2"][0], *SET_PENCILS["H2"][1])
        law = SqueezeLaw("inv_square", 2.0)
        x = np.linspace(-30.0, 30.0, args.nx)
        rows = []
        for n in range(4):
            e = limit_energy(pencil, law, n=n)
            for smp in squeezed_eigenfunction(pencil, law, n=n, x_grid=x):
                rows.append((n, e, smp.x, smp.psi1, smp.psi2, smp.psi3))
        io_utils.write_csv(args.out, ["n", "E_n", "x", "psi1", "psi2", "psi3"], rows)
        return 0

    vertex, alphas = SET_PENCILS[args.set]
    pencil = PencilSpec(vertex, *alphas)
    law = SqueezeLaw(FAMILY_NAMES[args.family], args.g)
    rows = []
    if args.converge:
        ls = [args.l0 * 2.0**-k for k in range(args.levels)]
        for n in args.n:
            for row in convergence_study(
                pencil, law, n=n, l_sequence=ls, parity=args.parity
            ):
                rows.append((n, row.l, row.v, row.e_b, row.error, row.order))
        io_utils.write_csv(args.out, ["n", "l", "V", "E_b", "error", "order"], rows)
        return 0
    for n in args.n:
        e = limit_energy(pencil, law, n=n, parity=args.parity)
        if e is None:
            rows.append((n, "", "", "", "", ""))
            continue
        pi = limit_matrix(pencil, law, n=n, e_n=e, parity=args.parity)
        lam = pi.lambda_n
        rows.append((n, e, lam.l11, lam.l12, lam.l21, lam.l22))
    io_utils.write_csv(args.out, ["n", "E_n", "l11", "l12", "l21", "l22"], rows)
    return 0


def cmd_verify(args) -> int:
    results = run_all(seed=args.seed, cases=args.cases)
    ok = True
    for name, passed, detail in results:
        status = "PASS" if passed else "FAIL"
        print(f"[{status}] {name}: {detail}")
        ok = ok and passed
    return 0 if ok else 3


def build_parser() -> _Parser:
    p = _Parser(prog="triband", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bands", help="three-band dispersion over a k grid")
    b.add_argument("--v", type=_triple, required=True, metavar="V11,V22,V33")
    b.add_argument("--m", type=float, default=1.0)
    b.add_argument("--kmax", type=float, default=5.0)
    b.add_argument("--nk", type=int, default=400)
    b.add_argument("--out", default=None)
    b.set_defaults(func=cmd_bands)

    f = sub.add_parser("flat", help="flat-band plane membership of a strength triple")
    f.add_argument("--v11", type=float, default=0.0)
    f.add_argument("--v22", type=float, default=0.0)
    f.add_argument("--v33", type=float, default=0.0)
    f.add_argument("--m", type=float, default=1.0)
    f.set_defaults(func=cmd_flat)

    bs = sub.add_parser("boundstates", help="bound states of one rectangular potential")
    bs.add_argument("--v", type=_triple, default=(0.0, 0.0, 0.0), metavar="V11,V22,V33")
    bs.add_argument("--m", type=float, default=1.0)
    bs.add_argument("--l", type=float, default=1.0)
    bs.add_argument("--x1", type=float, default=None)
    bs.add_argument("--x2", type=float, default=None)
    bs.add_argument("--preset", choices=["fig3"], default=None)
    bs.add_argument("--ngrid", type=int, default=4000)
    bs.add_argument("--workers", type=int, default=1)
    bs.add_argument("--wavefunction", default=None, help="also write samples to this CSV")
    bs.add_argument("--nx", type=int, default=801)
    bs.add_argument("--out", default=None)
    bs.set_defaults(func=cmd_boundstates)

    sw = sub.add_parser("sweep", help="bound states along a strength pencil")
    sw.add_argument("--preset", choices=sorted(SWEEP_PRESETS), default=None)
    sw.add_argument("--vertex", choices=["P1", "P2"], default="P1")
    sw.add_argument("--alphas", type=_triple, default=(1.0, 1.0, 1.0), metavar="a1,a2,a3")
    sw.add_argument("--l", type=float, default=1.0)
    sw.add_argument("--m", type=float, default=1.0)
    sw.add_argument("--vmin", type=float, default=-12.0)
    sw.add_argument("--vmax", type=float, default=12.0)
    sw.add_argument("--nv", type=int, default=2400)
    sw.add_argument("--ngrid", type=int, default=4000)
    sw.add_argument("--workers", type=int, default=1)
    sw.add_argument("--out", default=None)
    sw.set_defaults(func=cmd_sweep)

    pl = sub.add_parser("pointlimit", help="point-interaction limits and convergence")
    pl.add_argument("--family", choices=sorted(FAMILY_NAMES), default="delta")
    pl.add_argument("--set", choices=sorted(SET_PENCILS), default="H2")
    pl.add_argument("--g", type=float, default=1.0)
    pl.add_argument("--n", type=_index_range, default=[0], metavar="N or N0..N1")
    pl.add_argument("--parity", choices=["+", "-"], default=None)
    pl.add_argument("--preset", choices=["fig10", "fig11", "table1"], default=None)
    pl.add_argument("--converge", action="store_true", help="run a finite-width study")
    pl.add_argument("--l0", type=float, default=0.25, help="largest width of the study")
    pl.add_argument("--levels", type=int, default=7, help="number of width halvings")
    pl.add_argument("--nx", type=int, default=601)
    pl.add_argument("--out", default=None)
    pl.set_defaults(func=cmd_pointlimit)

    vf = sub.add_parser("verify", help="oracle cross-check and invariant suite")
    vf.add_argument("--seed", type=int, default=42)
    vf.add_argument("--cases", type=int, default=20)
    vf.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DomainError as exc:
        sys.stderr.write(f"numerical domain error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
