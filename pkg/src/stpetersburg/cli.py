"""Command-line front end.

Exit status: 0 on success, 2 for malformed flags, 3 when the inputs violate
a precondition of the requested computation.
"""

from __future__ import annotations

import argparse
import math
import sys

from . import constructions, experiments, gibbs, growth, pressure, spectrum
from .dyadic import birkhoff_g_interval_trace, birkhoff_phi_trace, hitting_time
from .errors import PreconditionError
from .io import csv_text, digits_line, fmt, fmt_outward, json_text, read_digits
from .streams import explicit_stream

HELP_WIDTH = 100


def _formatter(prog):
    return argparse.HelpFormatter(prog, width=HELP_WIDTH)


def _psi(text: str) -> growth.GrowthFunction:
    try:
        return growth.parse_psi(text)
    except PreconditionError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1: {text!r}")
    return v


def _real(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if math.isnan(v):
        raise argparse.ArgumentTypeError("nan is not accepted")
    return v


def _seed(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer seed: {text!r}") from None
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must lie in [0, 2**64)")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="stpetersburg", formatter_class=_formatter,
        description="Birkhoff sums of the Saint-Petersburg potential under the doubling map.")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, help_):
        sp = sub.add_parser(name, help=help_, description=help_, formatter_class=_formatter)
        sp.add_argument("--out", default="-", metavar="FILE",
                        help="output file (default: standard output)")
        return sp

    sp = add("pressure", "evaluate P(t, q) and its partial derivatives (JSON)")
    sp.add_argument("--t", type=_real, required=True)
    sp.add_argument("--q", type=_real, required=True)
    sp.add_argument("--tol", type=_real, default=pressure.DEFAULT_TOL)

    sp = add("tq", "solve P(t, q) = 0 for t(q) and t'(q) (JSON)")
    sp.add_argument("--q", type=_real, required=True)

    sp = add("spectrum", "dimension of level sets E(alpha) on a grid (CSV)")
    sp.add_argument("--alpha-min", type=_real, required=True)
    sp.add_argument("--alpha-max", type=_real, required=True)
    sp.add_argument("--steps", type=_positive_int, required=True)

    sp = add("gibbs", "Birkhoff ratio and local dimension of Gibbs samples (JSON)")
    sp.add_argument("--q", type=_real, required=True)
    sp.add_argument("--ell", type=_positive_int, required=True)
    sp.add_argument("--reps", type=_positive_int, required=True)
    sp.add_argument("--seed", type=_seed, required=True)
    sp.add_argument("--threads", type=_positive_int, default=1)

    sp = add("weak-law", "quantiles of S_n / (n ln n) over uniform points (JSON)")
    sp.add_argument("--n", type=_positive_int, required=True)
    sp.add_argument("--samples", type=_positive_int, required=True)
    sp.add_argument("--seed", type=_seed, required=True)
    sp.add_argument("--boundary", action="store_true",
                    help="evaluate at the last block boundary <= n")
    sp.add_argument("--threads", type=_positive_int, default=1)

    sp = add("construct", "digits of a point with S_n ~ beta Psi(n) (JSON, digits, CSV)")
    sp.add_argument("--psi", type=_psi, required=True, help="nlogn | n^A | 2^n^G")
    sp.add_argument("--beta", type=_real, required=True, help="positive real or inf")
    sp.add_argument("--digits", type=_positive_int, required=True)
    sp.add_argument("--m", type=_positive_int, required=True)
    sp.add_argument("--seed", type=_seed, required=True)
    sp.add_argument("--filler", choices=("seeded", "deterministic"), default="seeded")

    sp = add("infinity", "digits of a point with S_n / 2^(n^gamma) unbounded (JSON, digits, CSV)")
    sp.add_argument("--gamma", type=_real, required=True)
    sp.add_argument("--digits", type=_positive_int, required=True)

    sp = add("classify", "full-dimension or empty verdict for E_Psi(beta)")
    sp.add_argument("--psi", type=_psi, required=True, help="nlogn | n^A | 2^n^G")
    sp.add_argument("--beta-class", required=True, choices=sorted(growth.BETA_ALIASES))
    sp.add_argument("--potential", choices=growth.POTENTIALS, default="phi")

    sp = add("trace", "log2 S_n against log2 Psi(n) for a digit file (CSV)")
    sp.add_argument("--psi", type=_psi, required=True, help="nlogn | n^A | 2^n^G")
    sp.add_argument("--digits-file", required=True, metavar="F")

    sp = add("orbit", "Birkhoff sums of phi (exact) or 1/x (enclosures) (CSV)")
    sp.add_argument("--prefix-file", required=True, metavar="F")
    sp.add_argument("--potential", choices=growth.POTENTIALS, default="phi")
    sp.add_argument("--n", type=_positive_int, required=True)

    sp = add("dichotomy", "partial sums of lambda(phi >= Psi(n)) (CSV)")
    sp.add_argument("--psi", type=_psi, required=True, help="nlogn | n^A | 2^n^G")
    sp.add_argument("--N", type=_positive_int, required=True)

    sp = add("entropy", "entropy rate of sampled prefixes, in bits per digit (JSON)")
    sp.add_argument("--source", required=True, help="uniform | fm:M | gibbs:Q")
    sp.add_argument("--depth", type=_positive_int, required=True)
    sp.add_argument("--samples", type=_positive_int, required=True)
    sp.add_argument("--seed", type=_seed, required=True)
    return p


def full_help() -> str:
    """Top-level help followed by the help of every subcommand."""
    p = build_parser()
    parts = [p.format_help()]
    sub = next(a for a in p._actions if isinstance(a, argparse._SubParsersAction))
    for name, sp in sub.choices.items():
        parts.append(sp.format_help())
    return "\n".join(parts)


# -- handlers ----------------------------------------------------------------

def cmd_pressure(a) -> str:
    ev = pressure.eval_pressure(a.t, a.q, a.tol)
    return json_text({"t": a.t, "q": a.q, "tol": a.tol, "value": ev.value,
                      "dP_dt": ev.dP_dt, "dP_dq": ev.dP_dq, "terms_used": ev.terms_used,
                      "tail_bound": ev.tail_bound})


def cmd_tq(a) -> str:
    s = pressure.solve_t(a.q)
    return json_text({"q": a.q, "t_of_q": s.t_of_q, "t_prime": s.t_prime, "alpha": s.alpha,
                      "residual": s.residual, "bracket": list(s.bracket),
                      "slope_excess": s.slope_excess})


def cmd_spectrum(a) -> str:
    rows = spectrum.spectrum_curve(a.alpha_min, a.alpha_max, a.steps)
    return csv_text(("alpha", "q0", "t_q0", "dimension"),
                    ((r.alpha, r.q0, r.t_q0, r.dimension) for r in rows))


def cmd_gibbs(a) -> str:
    dist = gibbs.build_distribution(a.q)
    st = gibbs.gibbs_statistics(dist, a.ell, a.reps, a.seed, threads=a.threads)
    return json_text(st.report())


def cmd_weak_law(a) -> str:
    r = experiments.weak_law(a.n, a.samples, a.seed, boundary=a.boundary, threads=a.threads)
    return json_text(r.report())


def cmd_construct(a) -> str:
    c = constructions.build_cantor(a.psi, a.beta, a.m, a.filler, a.seed)
    sched = c.schedule
    levels = sched.levels_through(a.digits)
    header = {"psi": a.psi.spec, "beta": a.beta, "m": a.m, "seed": a.seed,
              "filler": a.filler, "digits": a.digits, **sched.parameters(),
              "target_psi": sched.psi.spec, "target_beta": sched.beta}
    prefix = c.stream.take(a.digits)
    rows = []
    if levels:
        tr = birkhoff_phi_trace(c.stream, levels[-1].N)
        log2_beta = math.log2(sched.beta)
        for lv in levels:
            s_log2 = growth.log2_int(tr.S(lv.N))
            p_log2 = sched.psi.log2(lv.N)
            rows.append((lv.k, lv.N, s_log2, p_log2, 2.0 ** (s_log2 - p_log2 - log2_beta)))
    return (json_text(header) + digits_line(prefix)
            + csv_text(("k", "N_k", "S_NK_log2", "psi_log2", "ratio"), rows))


def cmd_infinity(a) -> str:
    delta = constructions.infinity_delta(a.gamma)
    stream = constructions.infinity_stream(a.gamma)
    K = constructions.infinity_K(delta)
    prefix = stream.take(a.digits)
    header = {"gamma": a.gamma, "delta": delta, "K": K, "digits": a.digits}
    psi = growth.GrowthFunction("double-exp", a.gamma)
    points = []
    k = K
    while True:
        n = constructions.zero_block(k, delta)[1] + 1
        if n > a.digits:
            break
        points.append(n)
        k += 1
    rows = []
    if points:
        tr = birkhoff_phi_trace(stream, points[-1])
        for n in points:
            s_log2 = growth.log2_int(tr.S(n))
            p_log2 = psi.log2(n)
            rows.append((n, s_log2, p_log2, s_log2 - p_log2))
    return (json_text(header) + digits_line(prefix)
            + csv_text(("n", "log2_S", "log2_psi", "log_ratio"), rows))


def cmd_classify(a) -> str:
    v = growth.classify(a.psi, a.beta_class, a.potential)
    return f"{v.verdict}\t{v.citation}\n"


def cmd_trace(a) -> str:
    word = read_digits(a.digits_file)
    last_one = word.rfind("1") + 1
    if last_one < 2:
        raise PreconditionError("the digit file needs a digit 1 beyond position 1")
    tr = growth.ratio_trace(explicit_stream(word), a.psi, last_one)
    return csv_text(("n", "log2_S", "log2_psi", "log_ratio"), tr.rows())


def cmd_orbit(a) -> str:
    word = read_digits(a.prefix_file)
    if a.potential == "phi":
        tr = birkhoff_phi_trace(explicit_stream(word), a.n)
        return csv_text(("n", "S_n"), ((i + 1, v) for i, v in enumerate(tr.tolist())))
    if a.n > len(word) or hitting_time(word[a.n - 1:]) is None:
        raise PreconditionError("1/x is unbounded there: the prefix needs a digit 1 "
                                "at or after position n")
    ivs = birkhoff_g_interval_trace(word, a.n)
    return csv_text(("n", "lower", "upper"),
                    ((i + 1, fmt_outward(iv.lower, False), fmt_outward(iv.upper, True))
                     for i, iv in enumerate(ivs)))


def cmd_dichotomy(a) -> str:
    sums = experiments.dichotomy_series(a.psi, a.N)
    ns = sorted({1 << k for k in range(a.N.bit_length()) if 1 << k <= a.N} | {a.N})
    return csv_text(("n", "partial_sum"), ((n, float(sums[n - 1])) for n in ns))


def cmd_entropy(a) -> str:
    est = experiments.entropy_dim_estimate(a.source, a.depth, a.samples, a.seed)
    return json_text({"source": a.source, "depth": a.depth, "samples": a.samples,
                      "seed": a.seed, "estimate": est,
                      "target": experiments.entropy_target(a.source)})


HANDLERS = {
    "pressure": cmd_pressure, "tq": cmd_tq, "spectrum": cmd_spectrum, "gibbs": cmd_gibbs,
    "weak-law": cmd_weak_law, "construct": cmd_construct, "infinity": cmd_infinity,
    "classify": cmd_classify, "trace": cmd_trace, "orbit": cmd_orbit,
    "dichotomy": cmd_dichotomy, "entropy": cmd_entropy,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        text = HANDLERS[args.command](args)
    except (PreconditionError, OSError) as e:
        print(f"stpetersburg {args.command}: {e}", file=sys.stderr)
        return 3
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
