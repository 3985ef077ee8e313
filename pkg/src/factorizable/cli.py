"""Command-line entry point.

Exit codes: 0 all checks passed, 1 a verification failed, 2 usage or input
error, 3 numerical failure.
"""

import argparse
import hashlib
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import channels as chan
from . import correlations as corr
from . import factorization as fact
from . import games
from . import io
from . import zoo
from ._linalg import DEFAULT_TOL, dagger, matrix_units
from .errors import (
    FactorizableError,
    NotCompletelyPositive,
    NotCorrelationMatrix,
    NotTracePreserving,
    NotUCPT,
    NotUnital,
    SchemaError,
)

VERIFICATION_ERRORS = (NotCompletelyPositive, NotCorrelationMatrix, NotTracePreserving, NotUCPT,
                       NotUnital)

AGREEMENT_TOL = 1e-10

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


@dataclass
class RunReport:
    command: str
    inputs: str
    results: dict = field(default_factory=dict)
    passed: bool = True
    tolerances: dict = field(default_factory=dict)

    def check(self, name, ok):
        self.results.setdefault("checks", {})[name] = bool(ok)
        self.passed = self.passed and bool(ok)

    def to_json(self):
        return {
            "command": self.command,
            "inputs": self.inputs,
            "results": _jsonable(self.results),
            "pass": bool(self.passed),
            "tolerances": _jsonable(self.tolerances),
        }


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, Fraction):
        return io.weight_to_json(v)
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, (np.floating, float)):
        return float(v)
    if isinstance(v, np.ndarray):
        return _jsonable(v.tolist())
    return v


def _digest(args, files):
    h = hashlib.sha256()
    h.update(" ".join(args.argv).encode())
    for path in files:
        with open(path, "rb") as fh:
            h.update(b"\0" + fh.read())
    return "sha256:" + h.hexdigest()


def _new_report(args, *files):
    return RunReport(
        command=args.command_name,
        inputs=_digest(args, [f for f in files if f]),
        tolerances={"tol": args.tol},
    )


def _write(args, writer, obj, report):
    if args.out:
        writer(args.out, obj)
        report.results["written"] = args.out


def _verification(report, ch, tol):
    v = chan.verify_channel(ch, tol)
    report.results.update({
        "cp": v.cp,
        "trace_preserving": v.trace_preserving,
        "unital": v.unital,
        "choi_rank": v.choi_rank,
        "min_choi_eigenvalue": v.min_choi_eigenvalue,
    })
    return v


# -- chan -------------------------------------------------------------------

def cmd_chan_verify(args):
    ch = io.read_channel(args.input)
    r = _new_report(args, args.input)
    v = _verification(r, ch, args.tol)
    r.check("cp", v.cp)
    r.check("trace_preserving", v.trace_preserving)
    return r


def cmd_chan_choi(args):
    ch = io.read_channel(args.input)
    r = _new_report(args, args.input)
    c = chan.choi_of(ch).matrix
    _verification(r, ch, args.tol)
    if args.out:
        _write(args, io.write_matrix, c, r)
    else:
        r.results["choi"] = io.matrix_to_json(c)
    return r


def cmd_chan_kraus(args):
    m = io.read_matrix(args.input)
    r = _new_report(args, args.input)
    try:
        ch = chan.channel_from_choi(m, args.tol)
    except NotCompletelyPositive as exc:
        r.results["min_choi_eigenvalue"] = exc.min_eigenvalue
        r.check("cp", False)
        return r
    err = float(np.abs(chan.choi_of(ch).matrix - m).max())
    r.results.update({"num_kraus": ch.num_kraus, "choi_error": err})
    r.check("cp", True)
    r.check("choi_roundtrip", err <= args.tol * max(1.0, float(np.abs(m).max())) * 10)
    _write(args, io.write_channel, ch, r)
    return r


def cmd_chan_compose(args):
    a, b = io.read_channel(args.first), io.read_channel(args.second)
    r = _new_report(args, args.first, args.second)
    ch = chan.compose(a, b)
    err = chan.map_distance(ch, lambda x: b(a(x)), ch.dim)
    r.results.update({"num_kraus": ch.num_kraus, "sequential_error": err})
    r.check("matches_sequential", err <= AGREEMENT_TOL)
    r.tolerances["agreement"] = AGREEMENT_TOL
    _write(args, io.write_channel, ch, r)
    return r


def cmd_chan_adjoint(args):
    ch = io.read_channel(args.input)
    r = _new_report(args, args.input)
    adj = chan.adjoint_channel(ch)
    worst = 0.0
    for _, _, x in matrix_units(ch.dim):
        for _, _, y in matrix_units(ch.dim):
            lhs = np.trace(dagger(y) @ ch(x))
            rhs = np.trace(dagger(adj(y)) @ x)
            worst = max(worst, abs(lhs - rhs))
    r.results["pairing_error"] = float(worst)
    r.check("pairing", worst <= AGREEMENT_TOL)
    r.tolerances["agreement"] = AGREEMENT_TOL
    _write(args, io.write_channel, adj, r)
    return r


# -- zoo --------------------------------------------------------------------

def cmd_zoo_depolarizing(args):
    r = _new_report(args)
    ch, mix = zoo.depolarizing(args.n)
    n = args.n
    err = chan.map_distance(ch, lambda x: np.trace(x) / n * np.eye(n), n)
    v = _verification(r, ch, args.tol)
    r.results.update({"dim": n, "num_kraus": ch.num_kraus, "formula_error": err,
                      "weights": list(mix.weights)})
    r.check("ucpt", v.ucpt)
    r.check("formula", err <= AGREEMENT_TOL)
    r.check("choi_rank", v.choi_rank == n * n)
    r.tolerances["agreement"] = AGREEMENT_TOL
    _write(args, io.write_channel, ch, r)
    return r


def cmd_zoo_holevo_werner(args):
    r = _new_report(args)
    n = args.n
    ch = zoo.holevo_werner(n)
    err = chan.map_distance(ch, zoo.holevo_werner_formula(n), n)
    v = _verification(r, ch, args.tol)
    cert = zoo.extremality_certificate(ch, args.tol)
    r.results.update({"dim": n, "num_kraus": ch.num_kraus, "formula_error": err,
                      "kraus_count": cert.kraus_count, "gram_rank": cert.gram_rank,
                      "extreme": cert.extreme})
    r.check("ucpt", v.ucpt)
    r.check("formula", err <= AGREEMENT_TOL)
    r.tolerances["agreement"] = AGREEMENT_TOL
    _write(args, io.write_channel, ch, r)
    return r


def cmd_zoo_schur(args):
    b = io.read_matrix(args.b)
    r = _new_report(args, args.b)
    try:
        ch = zoo.schur_channel(b, args.tol)
    except NotCorrelationMatrix as exc:
        r.results["error"] = str(exc)
        r.check("correlation_matrix", False)
        return r
    r.check("correlation_matrix", True)
    v = _verification(r, ch, args.tol)
    r.check("ucpt", v.ucpt)
    _write(args, io.write_channel, ch, r)
    return r


def cmd_zoo_mixture(args):
    us = [io.read_matrix(p) for p in args.unitaries]
    ws = [fact.parse_weight(w) for w in args.weights]
    r = _new_report(args, *args.unitaries)
    ch = zoo.mixture_of_unitaries(us, ws, args.tol)
    v = _verification(r, ch, args.tol)
    r.check("ucpt", v.ucpt)
    _write(args, io.write_channel, ch, r)
    return r


def cmd_zoo_haar(args):
    r = _new_report(args)
    u = zoo.haar_unitary(args.d, args.seed)
    err = float(np.abs(dagger(u) @ u - np.eye(args.d)).max())
    r.results.update({"dim": args.d, "seed": args.seed, "unitarity_error": err})
    r.check("unitary", err <= 1e-12)
    if args.out:
        _write(args, io.write_matrix, u, r)
    else:
        r.results["unitary"] = io.matrix_to_json(u)
    return r


# -- fact -------------------------------------------------------------------

def _fact_summary(f):
    return {"dim": f.dim, "blocks": list(f.blocks), "weights": list(f.weights)}


def cmd_fact_eval(args):
    f = io.read_factorization(args.input)
    r = _new_report(args, args.input)
    ch = fact.channel_of_factorization(f)
    v = _verification(r, ch, args.tol)
    r.results.update(_fact_summary(f))
    r.check("ucpt", v.ucpt)
    _write(args, io.write_channel, ch, r)
    return r


def cmd_fact_check(args):
    f = io.read_factorization(args.input)
    r = _new_report(args, args.input)
    ch = fact.channel_of_factorization(f)
    direct = chan.map_distance(ch, lambda x: fact.evaluate_factorization(f, x), f.dim)
    pairing = chan.map_distance(ch, fact.recover_eq2(f, args.tol), f.dim)
    v = _verification(r, ch, args.tol)
    r.results.update(_fact_summary(f))
    r.results.update({"kraus_vs_direct": direct, "kraus_vs_pairing": pairing})
    r.check("ucpt", v.ucpt)
    r.check("kraus_vs_direct", direct <= AGREEMENT_TOL)
    r.check("kraus_vs_pairing", pairing <= AGREEMENT_TOL)
    r.tolerances["agreement"] = AGREEMENT_TOL
    return r


def cmd_fact_two_unitary(args):
    u1, u2 = io.read_matrix(args.u1), io.read_matrix(args.u2)
    r = _new_report(args, args.u1, args.u2)
    t = fact.parse_weight(args.t)
    rep, f = fact.two_unitary_factorization(u1, u2, t, args.kmax, args.tol)
    r.results.update({
        "independent": rep.independent,
        "admissible_k": list(rep.admissible_k),
        "verdict": rep.verdict.value,
        "k": rep.k,
        "t": t,
    })
    if f is not None:
        target = fact.mixture_channel(u1, u2, t)
        err = chan.map_distance(fact.channel_of_factorization(f), target, u1.shape[0])
        r.results["mixture_error"] = err
        r.check("reproduces_mixture", err <= AGREEMENT_TOL)
        if rep.k is not None:
            z1, z2 = fact.noisy_witness(t, rep.k)
            witness_err = max(float(np.abs(dagger(z1) @ z1 + dagger(z2) @ z2 - np.eye(rep.k)).max()),
                      float(np.abs(dagger(z2) @ z1).max()))
            r.results["witness_error"] = witness_err
            r.check("witness", witness_err <= 1e-12)
        _write(args, io.write_factorization, f, r)
    r.tolerances["agreement"] = AGREEMENT_TOL
    return r


def cmd_fact_compose(args):
    f, g = io.read_factorization(args.first), io.read_factorization(args.second)
    r = _new_report(args, args.first, args.second)
    h = fact.compose_factorizations(f, g)
    cf, cg = fact.channel_of_factorization(f), fact.channel_of_factorization(g)
    err = chan.map_distance(fact.channel_of_factorization(h), lambda x: cg(cf(x)), f.dim)
    r.results.update(_fact_summary(h))
    r.results["sequential_error"] = err
    r.check("matches_sequential", err <= AGREEMENT_TOL)
    r.tolerances["agreement"] = AGREEMENT_TOL
    _write(args, io.write_factorization, h, r)
    return r


def cmd_fact_mix(args):
    fs = [io.read_factorization(p) for p in args.inputs]
    ws = [fact.parse_weight(w) for w in args.weights]
    r = _new_report(args, *args.inputs)
    h = fact.convex_combine(fs, ws)
    chans = [fact.channel_of_factorization(f) for f in fs]
    err = chan.map_distance(
        fact.channel_of_factorization(h),
        lambda x: sum(float(w) * c(x) for w, c in zip(ws, chans)),
        h.dim,
    )
    r.results.update(_fact_summary(h))
    r.results["combination_error"] = err
    r.check("matches_combination", err <= AGREEMENT_TOL)
    r.tolerances["agreement"] = AGREEMENT_TOL
    _write(args, io.write_factorization, h, r)
    return r


def cmd_fact_split(args):
    f = io.read_factorization(args.input)
    r = _new_report(args, args.input)
    parts = fact.split_factorization(f, args.tol)
    ws = [w for w, _ in parts]
    back = fact.convex_combine([p for _, p in parts], ws) if parts else None
    err = chan.map_distance(fact.channel_of_factorization(back),
                            fact.channel_of_factorization(f), f.dim)
    r.results["parts"] = [{"weight": w, "k": p.blocks[0]} for w, p in parts]
    r.results["roundtrip_error"] = err
    r.check("roundtrip", err <= AGREEMENT_TOL)
    r.tolerances["agreement"] = AGREEMENT_TOL
    if args.out:
        written = []
        for j, (_, p) in enumerate(parts):
            path = f"{args.out}.{j}.fact.json"
            io.write_factorization(path, p)
            written.append(path)
        r.results["written"] = written
    return r


def cmd_fact_stinespring(args):
    ch = io.read_channel(args.input)
    r = _new_report(args, args.input)
    d = fact.stinespring(ch, args.mode, args.tol)
    rank = chan.verify_channel(ch, args.tol).choi_rank
    err = chan.map_distance(d, ch, ch.dim)
    unit_err = float(np.abs(dagger(d.unitary) @ d.unitary - np.eye(d.unitary.shape[0])).max())
    r.results.update({"mode": args.mode, "r": d.r, "choi_rank": rank,
                      "reconstruction_error": err, "unitarity_error": unit_err})
    r.check("reconstruction", err <= AGREEMENT_TOL)
    r.check("r_is_choi_rank", d.r == rank)
    r.check("unitary", unit_err <= 1e-10)
    r.tolerances["agreement"] = AGREEMENT_TOL
    _write(args, io.write_matrix, d.unitary, r)
    return r


def cmd_fact_recover_eq2(args):
    f = io.read_factorization(args.input)
    r = _new_report(args, args.input)
    ch = fact.recover_eq2(f, args.tol)
    err = chan.map_distance(ch, fact.channel_of_factorization(f), f.dim)
    r.results["kraus_vs_pairing"] = err
    r.check("kraus_vs_pairing", err <= AGREEMENT_TOL)
    r.tolerances["agreement"] = AGREEMENT_TOL
    _write(args, io.write_channel, ch, r)
    return r


# -- corr -------------------------------------------------------------------

def _theta_results(report, check):
    report.results.update({
        "theta": check.member,
        "min_eigenvalue": check.min_eigenvalue,
        "max_diagonal_deviation": check.max_diagonal_deviation,
        "hermitian_deviation": check.hermitian_deviation,
    })


def cmd_corr_gram(args):
    t = io.read_tuple(args.input)
    r = _new_report(args, args.input)
    g = corr.gram_correlation(t)
    chk = corr.is_theta(g, args.tol)
    _theta_results(r, chk)
    r.check("theta", chk.member)
    if args.out:
        _write(args, io.write_matrix, g, r)
    else:
        r.results["gram"] = io.matrix_to_json(g)
    return r


def cmd_corr_check_theta(args):
    b = io.read_matrix(args.input)
    r = _new_report(args, args.input)
    chk = corr.is_theta(b, args.tol)
    _theta_results(r, chk)
    r.check("theta", chk.member)
    return r


def cmd_corr_sample(args):
    r = _new_report(args)
    grams = corr.sample_grams(args.n, args.k, args.count, args.seed)
    checks = [corr.is_theta(g, args.tol) for g in grams]
    r.results.update({
        "n": args.n, "k": args.k, "count": args.count, "seed": args.seed,
        "min_eigenvalue": min(c.min_eigenvalue for c in checks),
        "all_theta": all(c.member for c in checks),
    })
    r.check("all_theta", all(c.member for c in checks))
    if args.out:
        io.save_json(args.out, [io.matrix_to_json(g) for g in grams])
        r.results["written"] = args.out
    return r


def cmd_corr_embed(args):
    t = io.read_tuple(args.input)
    r = _new_report(args, args.input)
    e = corr.embed_divisible(t, args.k_target)
    err = float(np.abs(corr.gram_correlation(e) - corr.gram_correlation(t)).max())
    r.results["gram_error"] = err
    r.check("gram_preserved", err <= 1e-12)
    r.tolerances["gram"] = 1e-12
    _write(args, io.write_tuple, e, r)
    return r


def cmd_corr_mix(args):
    t1, t2 = io.read_tuple(args.first), io.read_tuple(args.second)
    r = _new_report(args, args.first, args.second)
    lam = fact.parse_weight(args.lam)
    m = corr.direct_sum_mix(t1, t2, lam)
    expected = float(lam) * corr.gram_correlation(t1) + (1 - float(lam)) * corr.gram_correlation(t2)
    err = float(np.abs(corr.gram_correlation(m) - expected).max())
    r.results["affine_error"] = err
    r.check("affine", err <= 1e-12)
    r.tolerances["gram"] = 1e-12
    _write(args, io.write_tuple, m, r)
    return r


# -- game -------------------------------------------------------------------

def cmd_game_table(args):
    s = io.strategy_from_json(io.load_json(args.input))
    r = _new_report(args, args.input)
    if isinstance(s, dict):
        table = games.classical_table(s["weights"], s["n"], s["k"], args.tol)
    elif isinstance(s, games.TensorStrategy):
        table = games.tensor_table(s, args.tol)
    else:
        table = games.commuting_table(s, args.tol)
    r.results.update({"n": table.n, "k": table.k, "synchronous": games.is_synchronous(table, args.tol)})
    if args.out:
        _write(args, io.write_table, table, r)
    else:
        r.results["p"] = table.p
    return r


def cmd_game_member_cc(args):
    t = io.read_table(args.input)
    r = _new_report(args, args.input)
    res = games.membership_Cc(t)
    r.results.update({"member": res.member, "residual": res.residual,
                      "support": int(np.count_nonzero(res.weights > 1e-12))})
    r.check("member", res.member)
    r.tolerances["residual"] = 1e-7
    return r


def cmd_game_chsh(args):
    r = _new_report(args)
    res = games.maximize_chsh(args.mode, args.seed, product=args.product)
    r.results.update({"mode": args.mode, "value": res.value, "argmax": res.argmax})
    tsirelson = 2 * np.sqrt(2)
    if args.mode == "classical" or args.product:
        r.check("local_bound", res.value <= 2 + 1e-6)
    else:
        r.results["tsirelson_gap"] = float(tsirelson - res.value)
        r.check("below_tsirelson", res.value <= tsirelson + 1e-9)
        r.check("reaches_2.82", res.value >= 2.82)
    if args.mode == "classical":
        r.check("classical_value_2", res.value == 2.0)
    return r


def cmd_game_bell(args):
    t = io.read_table(args.table)
    files = [args.table]
    if args.functional:
        f = io.functional_from_json(io.load_json(args.functional))
        files.append(args.functional)
    else:
        f = games.chsh_functional()
    r = _new_report(args, *files)
    r.results["value"] = games.bell_value(t, f)
    return r


def cmd_game_synchronous(args):
    t = io.read_table(args.input)
    r = _new_report(args, args.input)
    sync = games.is_synchronous(t, args.tol)
    r.results["synchronous"] = sync
    r.check("synchronous", sync)
    return r


# -- parser -----------------------------------------------------------------

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=DEFAULT_TOL)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--json", action="store_true", help="print the report as JSON")
    common.add_argument("--out", default=None, help="output file")

    parser = argparse.ArgumentParser(prog="factorizable", description=__doc__.splitlines()[0])
    groups = parser.add_subparsers(dest="group", required=True)

    def leaf(group, name, func, help_text):
        p = group.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(func=func, command_name=f"{group.group_name} {name}")
        return p

    def command_group(name, help_text):
        sub = groups.add_parser(name, help=help_text).add_subparsers(dest="cmd", required=True)
        sub.group_name = name
        return sub

    g = command_group("chan", "channel calculus")
    leaf(g, "verify", cmd_chan_verify, "CP/TP/unital report").add_argument("--in", dest="input", required=True)
    leaf(g, "choi", cmd_chan_choi, "Choi matrix").add_argument("--in", dest="input", required=True)
    leaf(g, "kraus", cmd_chan_kraus, "Kraus form from a Choi matrix").add_argument(
        "--in", dest="input", required=True)
    p = leaf(g, "compose", cmd_chan_compose, "second o first")
    p.add_argument("--first", required=True)
    p.add_argument("--second", required=True)
    leaf(g, "adjoint", cmd_chan_adjoint, "trace-adjoint channel").add_argument(
        "--in", dest="input", required=True)

    g = command_group("zoo", "named channels")
    leaf(g, "depolarizing", cmd_zoo_depolarizing, "completely depolarizing channel").add_argument(
        "--n", type=int, required=True)
    leaf(g, "holevo-werner", cmd_zoo_holevo_werner, "W_n^- channel").add_argument(
        "--n", type=int, required=True)
    leaf(g, "schur", cmd_zoo_schur, "Schur multiplier channel").add_argument("--b", required=True)
    p = leaf(g, "mixture", cmd_zoo_mixture, "mixture of unitaries")
    p.add_argument("--unitaries", nargs="+", required=True)
    p.add_argument("--weights", nargs="+", required=True)
    leaf(g, "haar", cmd_zoo_haar, "Haar random unitary").add_argument("--d", type=int, required=True)

    g = command_group("fact", "factorizations")
    leaf(g, "eval", cmd_fact_eval, "channel of a factorization").add_argument(
        "--in", dest="input", required=True)
    leaf(g, "check", cmd_fact_check, "verify a factorization").add_argument(
        "--in", dest="input", required=True)
    p = leaf(g, "two-unitary", cmd_fact_two_unitary, "k-noisy test for a two-unitary mixture")
    p.add_argument("--u1", required=True)
    p.add_argument("--u2", required=True)
    p.add_argument("--t", required=True)
    p.add_argument("--kmax", type=int, required=True)
    p = leaf(g, "compose", cmd_fact_compose, "compose two factorizations")
    p.add_argument("--first", required=True)
    p.add_argument("--second", required=True)
    p = leaf(g, "mix", cmd_fact_mix, "convex combination")
    p.add_argument("--in", dest="inputs", nargs="+", required=True)
    p.add_argument("--weights", nargs="+", required=True)
    leaf(g, "split", cmd_fact_split, "split into single-block factorizations").add_argument(
        "--in", dest="input", required=True)
    p = leaf(g, "stinespring", cmd_fact_stinespring, "unitary dilation")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--mode", choices=("cptp", "ucp"), default="cptp")
    leaf(g, "recover-eq2", cmd_fact_recover_eq2, "rebuild via the inner-product formula").add_argument(
        "--in", dest="input", required=True)

    g = command_group("corr", "unitary correlation matrices")
    leaf(g, "gram", cmd_corr_gram, "Gram matrix of a unitary tuple").add_argument(
        "--in", dest="input", required=True)
    leaf(g, "check-theta", cmd_corr_check_theta, "correlation-matrix test").add_argument(
        "--in", dest="input", required=True)
    p = leaf(g, "sample", cmd_corr_sample, "Haar-sampled Gram matrices")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--count", type=int, default=1)
    p = leaf(g, "embed", cmd_corr_embed, "u -> u (x) 1")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--k-target", type=int, required=True)
    p = leaf(g, "mix", cmd_corr_mix, "direct-sum mixture")
    p.add_argument("--first", required=True)
    p.add_argument("--second", required=True)
    p.add_argument("--lam", required=True)

    g = command_group("game", "nonlocal correlations")
    leaf(g, "table", cmd_game_table, "correlation table of a strategy").add_argument(
        "--in", dest="input", required=True)
    leaf(g, "member-cc", cmd_game_member_cc, "classical polytope membership").add_argument(
        "--in", dest="input", required=True)
    p = leaf(g, "chsh", cmd_game_chsh, "maximize CHSH")
    p.add_argument("--mode", choices=("classical", "quantum"), default="quantum")
    p.add_argument("--product", action="store_true", help="restrict to product states")
    p = leaf(g, "bell", cmd_game_bell, "evaluate a Bell functional")
    p.add_argument("--table", required=True)
    p.add_argument("--functional", default=None, help="functional file; CHSH if omitted")
    leaf(g, "synchronous", cmd_game_synchronous, "synchronicity test").add_argument(
        "--in", dest="input", required=True)
    return parser


def format_text(report):
    color = sys.stdout.isatty() and "NO_COLOR" not in os.environ
    status = "PASS" if report.passed else "FAIL"
    if color:
        status = ("\033[32m" if report.passed else "\033[31m") + status + "\033[0m"
    lines = [f"{report.command}: {status}", f"  inputs: {report.inputs}"]
    for key, value in _jsonable(report.results).items():
        lines.append(f"  {key}: {value}")
    for key, value in report.tolerances.items():
        lines.append(f"  tolerance {key}: {value}")
    return "\n".join(lines)


def parse_and_dispatch(argv):
    """Run one command; returns ``(report or None, exit code, error message)``."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return None, EXIT_USAGE if exc.code else EXIT_PASS, None
    args.argv = list(argv)
    try:
        report = args.func(args)
    except SchemaError as exc:
        return None, EXIT_USAGE, f"schema error at {exc.path}: {exc}"
    except VERIFICATION_ERRORS as exc:
        return None, EXIT_FAIL, f"verification failed: {exc}"
    except (FactorizableError, ValueError, OSError) as exc:
        if isinstance(exc, np.linalg.LinAlgError):
            return None, EXIT_NUMERIC, f"numerical failure: {exc}"
        return None, EXIT_USAGE, f"error: {exc}"
    except np.linalg.LinAlgError as exc:
        return None, EXIT_NUMERIC, f"numerical failure: {exc}"
    return report, (EXIT_PASS if report.passed else EXIT_FAIL), None


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    report, code, message = parse_and_dispatch(argv)
    if message:
        print(message, file=sys.stderr)
    if report is not None:
        if "--json" in argv:
            sys.stdout.write(io.dumps(report.to_json()))
        else:
            print(format_text(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
