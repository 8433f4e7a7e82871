"""Command-line front end and the verify-all pipeline.

Exit codes: 0 when every verdict passes, 2 on a verification failure, 1 on an
execution error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from typing import Any, Callable

from . import __version__, analysis, arith, lemma51, localsums, powers2, series
from .errors import Sqpow2Error
from .interval import RInterval

EXIT_PASS, EXIT_ERROR, EXIT_FAIL = 0, 1, 2


# ----------------------------------------------------------------- config
@dataclass
class VerifyConfig:
    eta_count: float = 0.05
    eta_integral: float = 0.01
    pmax_series: int = 10**5
    dp_modulus_cap: int = 10**6
    M: int = 40
    lam: str = "0.887167"
    k: int = 44
    L_values: list[int] = field(default_factory=lambda: [10, 12])
    seed: int = arith.RHO_SEED
    residue_samples: int = 10
    full: bool = False
    count_N: int = 4 * 10**8
    output_path: str | None = None

    def __post_init__(self):
        for name in ("pmax_series", "dp_modulus_cap", "M", "residue_samples", "count_N"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if not 0 < Fraction(self.lam) < 1:
            raise ValueError("lambda must lie in (0, 1)")

    @classmethod
    def from_dict(cls, d: dict) -> "VerifyConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)


# ----------------------------------------------------------------- report
@dataclass
class Entry:
    name: str
    lo: float | None
    hi: float | None
    paper_target: Any
    direction: str  # "<", "<=", ">", ">=", "in", "==", "info"
    verdict: str  # pass / fail / info / skipped: <reason>
    mandatory: bool = True
    notes: str = ""


@dataclass
class VerifyReport:
    version: str
    config: dict
    entries: list[Entry]
    overall: str
    timing_ms: dict[str, int] = field(default_factory=dict)

    def to_json(self, include_timing: bool = False) -> str:
        d = asdict(self)
        if not include_timing:
            d.pop("timing_ms")
        return json.dumps(d, indent=2, sort_keys=True, default=_jsonable)


def _jsonable(x):
    if isinstance(x, RInterval):
        return [x.lo, x.hi]
    if isinstance(x, Fraction):
        return str(x)
    raise TypeError(f"not serializable: {type(x)}")


def recompute_verdict(e: Entry) -> str:
    """Verdict implied by an entry's stored enclosure and target."""
    t = e.paper_target
    if e.direction == "<":
        return "pass" if e.hi < t else "fail"
    if e.direction == "<=":
        return "pass" if e.hi <= t else "fail"
    if e.direction == ">":
        return "pass" if e.lo > t else "fail"
    if e.direction == ">=":
        return "pass" if e.lo >= t else "fail"
    if e.direction == "in":
        return "pass" if t[0] < e.lo and e.hi < t[1] else "fail"
    if e.direction == "==":
        return "pass" if e.lo == e.hi == t else "fail"
    return e.verdict


def _entry(name, iv, target, direction, mandatory=True, notes="") -> Entry:
    if isinstance(iv, RInterval):
        lo, hi = iv.lo, iv.hi
    elif isinstance(iv, bool):
        lo = hi = float(iv)
    else:
        lo = hi = float(iv)
    e = Entry(name, lo, hi, target, direction, "info", mandatory, notes)
    e.verdict = recompute_verdict(e)
    return e


def _flag(name: str, ok: bool, mandatory: bool = True, notes: str = "") -> Entry:
    return _entry(name, 1.0 if ok else 0.0, 1.0, "==", mandatory, notes)


# ------------------------------------------------------------- pipeline
def _steps(cfg: VerifyConfig) -> list[tuple[str, bool, Callable[[dict], list[Entry]]]]:
    lam = Fraction(cfg.lam)

    def dyadic(_):
        ok = all(localsums.dyadic_factor(k) == 4 for k in range(3, 41))
        return [_flag("dyadic_factor_eq_4_k3_40", ok)]

    def suma(_):
        ok = all(lemma51.sum_A_identity(int(p)).holds for p in arith.primes_up_to(100))
        return [_flag("sum_A_identity_p_le_100", ok)]

    def local_id(_):
        bad = sum(
            not localsums.local_identity(int(p), h).holds
            for p in arith.primes_up_to(199)[1:]
            for h in range(-50, 51)
        )
        return [_flag("local_identity_p_le_199_h_le_50", bad == 0, notes=f"{bad} failures")]

    def bbold_sweep(_):
        bad = sum(
            localsums.bbold_exact(int(p), h) != localsums.bbold_closed(int(p), h)
            for p in arith.primes_up_to(500)[1:]
            for h in range(-50, 51)
        )
        return [_flag("bbold_table_p_le_500_h_le_50", bad == 0, notes=f"{bad} mismatches")]

    def c34(state):
        c3, c4 = series.c3_c4()
        state["c3"] = c3
        return [_entry("c3", c3, 1.3904, "<="), _entry("c4", c4, 0.9743, "<=")]

    def c12(state):
        rep = powers2.c1_c2(cfg.M, cfg.dp_modulus_cap)
        e = rep.entries
        state["c0"] = e["c0"]
        return [
            _entry("c1_upper", e["c1"], None, "info", False),
            _entry("c2_upper", e["c2"], None, "info", False),
            _entry("c0", e["c0"], 0.69, "<", notes="; ".join(rep.notes)),
            _entry("c0_with_counted_5adic_factor", e["c0_local5"], None, "info", False),
        ]

    def pp51(state):
        pp = lemma51.prime_product_51()
        state["C1"] = pp.C1
        return [
            _entry("prime_product_head", pp.head, 0.904923, ">="),
            _entry("prime_product_tail", pp.tail, 0.99994271, ">", False, "printed tail; computed value recorded"),
            _entry("C1", pp.C1, 0.904811, ">="),
        ]

    def mx(state):
        r = lemma51.maxexp(lemma51.Q3, (35, 44))
        state["maxexp"] = r
        out = [
            _entry("maxexp_15015", r.max_abs, [34.5, 34.6], "in"),
            _entry("slack_k35", r.slack[35], 1e-7, "<", False, "printed bound; recomputed"),
            _entry("slack_k44", r.slack[44], None, "info", False),
        ]
        if "C1" in state:
            down = 8 * state["C1"] * (1 - r.slack[44])
            out.append(_entry("downstream_8C1_1_minus_slack44", down, 7.2, ">="))
        return out

    def rc(state):
        m = state.get("maxexp") or lemma51.maxexp(lemma51.Q3, (35,))
        res = [lemma51.residue_count(lemma51.Q3, 35, lemma51.crt_residue(j), m) for j in range(1, cfg.residue_samples + 1)]
        ok = all(r.in_band for r in res)
        worst = max(abs(float(r.relative_deviation)) for r in res)
        return [_flag("residue_count_15015_k35_in_band", ok, notes=f"max relative deviation {worst:.3e}")]

    def mratio(_):
        rows = powers2.m_ratio_check(40)
        return [_flag("m_ratio_x_9_40", all(r.holds for r in rows if r.x >= 9))]

    def margin(state):
        si = analysis.singular_integral(1.0, cfg.eta_integral, "I")
        sj = analysis.singular_integral(0.0, cfg.eta_integral, "J")
        ratio = sj / si
        c0 = state.get("c0") or powers2.c1_c2(cfg.M, cfg.dp_modulus_cap).entries["c0"]
        out = []
        m_c, k_c = lemma51.final_margin(lemma51.MarginInput(cfg.k, c0, ratio, lam))
        out.append(_entry(f"margin_k{cfg.k}_computed_c0", m_c, 0.0, ">"))
        out.append(_entry("minimal_k_computed_c0", k_c, 44, "info", False, "least k with positive margin"))
        m_p, k_p = lemma51.final_margin(lemma51.MarginInput(cfg.k, RInterval(Fraction("0.69")), ratio, lam))
        out.append(_entry("minimal_k_printed_c0", k_p, 44, "=="))
        out.append(_entry("ji_ratio", ratio, 1.0, ">="))
        return out

    def mertens(_):
        a = analysis.mertens_check(100)
        b = analysis.mertens_check(10**4)
        return [
            _entry("mertens_ratio_z100", a.ratio, [0.95, 1.05], "in", notes="expected about 0.987"),
            _flag("mertens_z1e4_closer", abs(b.ratio.mid - 1) < abs(a.ratio.mid - 1)),
        ]

    def chain(_):
        eta = cfg.eta_integral
        i1 = analysis.singular_integral(1.0, eta, "I")
        j0 = analysis.singular_integral(0.0, eta, "J")
        jp = analysis.singular_integral(0.0, eta, "Jplus")
        oracle = (2 / 3) * (2 * eta) ** 3
        return [
            _entry("integral_I1_vs_oracle", i1 / oracle, [0.95, 1.05], "in"),
            _flag("integral_chain", i1.hi <= j0.lo and j0.hi <= jp.lo),
        ]

    def sum_r7(state):
        out = []
        for L in cfg.L_values:
            for mode in ("lemma42", "lemma43"):
                r = series.sum_r7_weighted(L, mode, state.get("c0"))
                out.append(_entry(f"sum_r7_{mode}_L{L}_ratio", r.ratio, None, "info", False))
                out.append(_flag(f"sum_r7_{mode}_L{L}_symmetric", r.symmetric and r.zero_unless_3, False))
        return out

    def empirical(_):
        w = analysis.count4_window(cfg.count_N, cfg.eta_count)
        a = lemma51.avg_singular_series(10**6 + 4, 3)
        return [
            _entry("count4_mean_ratio", w.mean_ratio, [0.5, 1.5], "in", False, f"dispersion {w.dispersion:.3f}"),
            _entry("avg_singular_series_ratio", a.ratio, 0.5, ">=", False),
        ]

    steps = [
        ("dyadic", True, dyadic),
        ("sumA", True, suma),
        ("local_identity", True, local_id),
        ("bbold", True, bbold_sweep),
        ("c3c4", True, c34),
        ("c1c2", True, c12),
        ("primeprod51", True, pp51),
        ("maxexp", True, mx),
        ("residue_count", True, rc),
        ("mratio", True, mratio),
        ("margin", True, margin),
        ("mertens", True, mertens),
        ("integrals", True, chain),
        ("sum_r7", False, sum_r7),
    ]
    if cfg.full:
        steps.append(("empirical", False, empirical))
    return steps


def verify_all(cfg: VerifyConfig) -> VerifyReport:
    entries: list[Entry] = []
    timing: dict[str, int] = {}
    state: dict = {}
    for name, mandatory, fn in _steps(cfg):
        t0 = time.perf_counter()
        try:
            entries.extend(fn(state))
        except Sqpow2Error as exc:
            entries.append(Entry(name, None, None, None, "info", f"skipped: {exc}", mandatory))
        timing[name] = int(1000 * (time.perf_counter() - t0))
    overall = "pass" if all(e.verdict in ("pass", "info") for e in entries if e.mandatory) else "fail"
    return VerifyReport(__version__, asdict(cfg), entries, overall, timing)


# ------------------------------------------------------------ subcommands
def _iv(x: RInterval) -> list[float]:
    return [x.lo, x.hi]


def _emit(obj: Any) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True, default=_jsonable))


def _cmd_order(a):
    _emit({"q": a.q, "rho": arith.mult_order2(a.q)})


def _cmd_maxexp(a):
    r = lemma51.maxexp(a.q, tuple(a.k))
    _emit({"q": r.q, "rho": r.rho, "max_abs": r.max_abs, "j": r.attaining_j, "slack": {str(k): v for k, v in r.slack.items()}})


def _cmd_sseries(a):
    v = series.singular_series(a.n, a.pmax)
    _emit({"n": a.n, "value": v.value, "pmax": v.pmax, "tail_log_bound": v.tail_log_bound, "exact_part": v.exact_part})


def _cmd_sbold(a):
    v = series.sbold(a.h, a.pmax)
    _emit({"h": a.h, "value": v.value, "tail_log_bound": v.tail_log_bound, **{k: v.extras[k] for k in v.extras}})


def _cmd_c3c4(a):
    c3, c4 = series.c3_c4(a.pmax)
    _emit({"pmax": a.pmax, "c3": c3, "c4": c4, "targets": {"c3": series.C3_TARGET, "c4": series.C4_TARGET}})


def _cmd_sum_r7(a):
    c0 = powers2.c1_c2(a.M).entries["c0"] if a.computed_c0 else None
    r = series.sum_r7_weighted(a.L, a.mode, c0)
    _emit({
        "L": r.L, "mode": r.mode, "lhs": r.lhs, "ratio": r.ratio, "rhs_constant": r.rhs_constant,
        "symmetric": r.symmetric, "zero_unless_3": r.zero_unless_3, "support": list(r.support),
    })


def _cmd_bbold(a):
    e, c = localsums.bbold(a.p, a.h)
    _emit({"p": a.p, "h": a.h, "counted": e, "closed_form": c, "agree": e == c})


def _cmd_local_factor(a):
    f = localsums.local_factor(a.n, a.p)
    _emit({"p": f.p, "n": f.h_or_n, "B": f.bvalue, "factor": f.factor})


def _cmd_dyadic_factor(a):
    v = localsums.dyadic_factor(a.k)
    _emit({"kmax": a.k, "value": v})
    return EXIT_PASS if a.k < 3 or v == 4 else EXIT_FAIL


def _cmd_rt(a):
    h = powers2.r_t_histogram(a.t, a.L)
    if a.csv:
        w = csv.writer(sys.stdout)
        w.writerow(["h", "r_t"])
        lo, hi = h.support
        for x in range(lo, hi + 1):
            if h[x]:
                w.writerow([x, h[x]])
    else:
        _emit({"t": a.t, "L": a.L, "total": h.total(), "r_t(0)": h[0], "support": list(h.support)})


def _cmd_pcc(a):
    d, n = powers2.power_congruence_count(a.q, a.t)
    _emit({"q": a.q, "t": a.t, "rho": d.rho, "n": n, "total": d.total()})


def _cmd_beta(a):
    b = powers2.beta(a.d)
    _emit({"d": a.d, "beta": b, "beta_float": float(b)})


def _cmd_c1c2(a):
    r = powers2.c1_c2(a.M)
    _emit({"entries": {k: _iv(v) for k, v in r.entries.items()}, "target": r.paper_target, "verdict": r.verdict, "notes": r.notes})
    return EXIT_PASS if r.verdict == "pass" else EXIT_FAIL


def _cmd_primeprod51(a):
    p = lemma51.prime_product_51()
    _emit({"head": p.head, "tail": p.tail, "C1": p.C1, "p_5000": p.p_bound})


def _cmd_residue_count(a):
    r = lemma51.residue_count(a.q, a.k, a.a)
    _emit({"q": r.q3, "k": r.k, "a": r.a, "count": str(r.count), "relative_deviation": float(r.relative_deviation),
           "slack": r.slack, "lower_bound_ok": r.lower_bound_ok, "in_band": r.in_band})
    return EXIT_PASS if r.in_band else EXIT_FAIL


def _cmd_sumA(a):
    r = lemma51.sum_A_identity(a.p)
    _emit({"p": a.p, "sum": r.total, "holds": r.holds})
    return EXIT_PASS if r.holds else EXIT_FAIL


def _cmd_margin(a):
    c0 = RInterval(Fraction(a.c0)) if a.c0 else powers2.c1_c2(a.M).entries["c0"]
    m, k = lemma51.final_margin(lemma51.MarginInput(a.k, c0, RInterval(Fraction(a.ratio)), Fraction(a.lam)))
    _emit({"k": a.k, "margin": m, "minimal_k": k, "c0": c0})


def _cmd_count4(a):
    lo, hi = (int(x) for x in a.window.split(":")) if a.window else (None, None)
    targets = [n for n in range(lo, hi + 1) if n % 24 == 4] if a.window else None
    w = analysis.count4_window(a.N, a.eta, targets)
    if a.csv:
        wr = csv.writer(sys.stdout)
        wr.writerow(["n", "count", "weighted", "pred_lo", "pred_hi", "ratio"])
        for r in w.rows:
            wr.writerow([r.n, r.count, r.weighted, r.prediction.lo, r.prediction.hi, r.ratio])
    else:
        _emit({"N": a.N, "eta": a.eta, "targets": len(w.rows), "mean_ratio": w.mean_ratio,
               "dispersion": w.dispersion, "primes_in_window": w.primes_in_window})


def _cmd_rieger(a):
    _emit(asdict(analysis.rieger_sum(a.N, a.eta)))


def _cmd_lemmaj(a):
    q = analysis.lemma_j(a.P)
    _emit({k: str(v) if isinstance(v, int) and k != "P" else v for k, v in asdict(q).items()})


def _cmd_integral(a):
    _emit({"kind": a.kind, "h": a.h, "eta": a.eta, "value": analysis.singular_integral(a.h, a.eta, a.kind)})


def _cmd_mertens(a):
    r = analysis.mertens_check(a.z)
    _emit({"z": a.z, "product": r.product, "reference": r.reference, "ratio": r.ratio})


def _cmd_mratio(a):
    rows = powers2.m_ratio_check(a.xmax)
    _emit([{"x": r.x, "ratio": float(r.ratio), "bound": r.bound, "holds": r.holds} for r in rows])
    return EXIT_PASS if all(r.holds for r in rows if r.x >= 9) else EXIT_FAIL


def _cmd_verify_all(a):
    cfg_dict: dict = {}
    if a.config:
        with open(a.config) as fh:
            cfg_dict = json.load(fh)
    if a.full:
        cfg_dict["full"] = True
    if a.out:
        cfg_dict["output_path"] = a.out
    cfg = VerifyConfig.from_dict(cfg_dict)
    rep = verify_all(cfg)
    text = rep.to_json(include_timing=a.timing)
    if cfg.output_path:
        with open(cfg.output_path, "w") as fh:
            fh.write(text + "\n")
    print(text)
    return EXIT_PASS if rep.overall == "pass" else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sqpow2", description="Numerical verification toolkit for four prime squares and powers of two.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="cmd", required=True)

    def add(name, fn, **kw):
        sp = sub.add_parser(name, **kw)
        sp.set_defaults(fn=fn)
        sp.add_argument("--json", action="store_true", help="JSON output (the default)")
        return sp

    s = add("verify-all", _cmd_verify_all)
    s.add_argument("--full", action="store_true", help="include the statistical counting suite")
    s.add_argument("--config", help="JSON file with VerifyConfig fields")
    s.add_argument("--out", help="write the report here as well")
    s.add_argument("--timing", action="store_true", help="include per-step runtimes")

    add("order", _cmd_order).add_argument("--q", type=int, required=True)
    s = add("maxexp", _cmd_maxexp)
    s.add_argument("--q", type=int, default=lemma51.Q3)
    s.add_argument("--k", type=int, nargs="*", default=[35, 44])
    s = add("sseries", _cmd_sseries)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--pmax", type=int, default=series.DEFAULT_PMAX)
    s = add("sbold", _cmd_sbold)
    s.add_argument("--h", type=int, required=True)
    s.add_argument("--pmax", type=int, default=series.DEFAULT_PMAX)
    add("c3c4", _cmd_c3c4).add_argument("--pmax", type=int, default=series.C3C4_PMAX)
    s = add("sum-r7", _cmd_sum_r7)
    s.add_argument("--L", type=int, required=True)
    s.add_argument("--mode", choices=["lemma42", "lemma43"], default="lemma42")
    s.add_argument("--computed-c0", action="store_true", help="compare against the computed c0 instead of 0.69")
    s.add_argument("--M", type=int, default=40)
    s = add("bbold", _cmd_bbold)
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--h", type=int, required=True)
    s = add("local-factor", _cmd_local_factor)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--p", type=int, required=True)
    add("dyadic-factor", _cmd_dyadic_factor).add_argument("--k", type=int, default=40)
    s = add("rt", _cmd_rt)
    s.add_argument("--t", type=int, required=True)
    s.add_argument("--L", type=int, required=True)
    s.add_argument("--csv", action="store_true")
    s = add("pcc", _cmd_pcc)
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--t", type=int, required=True)
    add("beta", _cmd_beta).add_argument("--d", type=int, required=True)
    add("c1c2", _cmd_c1c2).add_argument("--M", type=int, default=40)
    add("primeprod51", _cmd_primeprod51)
    s = add("residue-count", _cmd_residue_count)
    s.add_argument("--q", type=int, default=lemma51.Q3)
    s.add_argument("--k", type=int, default=35)
    s.add_argument("--a", type=int, default=0)
    add("sumA", _cmd_sumA).add_argument("--p", type=int, required=True)
    s = add("margin", _cmd_margin)
    s.add_argument("--k", type=int, default=44)
    s.add_argument("--lambda", dest="lam", default=str(lemma51.LAMBDA))
    s.add_argument("--c0", default=None, help="decimal c0; computed when omitted")
    s.add_argument("--ratio", default="1")
    s.add_argument("--M", type=int, default=40)
    s = add("count4", _cmd_count4)
    s.add_argument("--N", type=int, required=True)
    s.add_argument("--eta", type=float, default=0.05)
    s.add_argument("--window", help="a:b range of targets (n = 4 mod 24 kept)")
    s.add_argument("--csv", action="store_true")
    s = add("rieger", _cmd_rieger)
    s.add_argument("--N", type=int, required=True)
    s.add_argument("--eta", type=float, default=0.05)
    add("lemmaj", _cmd_lemmaj).add_argument("--P", type=int, required=True)
    s = add("integral", _cmd_integral)
    s.add_argument("--kind", choices=["I", "J", "Jplus"], default="I")
    s.add_argument("--h", type=float, default=1.0)
    s.add_argument("--eta", type=float, default=0.01)
    add("mertens", _cmd_mertens).add_argument("--z", type=int, required=True)
    add("mratio", _cmd_mratio).add_argument("--xmax", type=int, default=40)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        rc = args.fn(args)
    except (Sqpow2Error, ValueError, OSError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return EXIT_ERROR
    return EXIT_PASS if rc is None else rc


if __name__ == "__main__":
    sys.exit(main())
