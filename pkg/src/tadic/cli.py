"""Command line surface: polynomial parsing, configuration, JSON reports.

Everything emitted is exact and deterministic: rationals as numerator and
denominator decimal strings, residues as decimal strings, dictionary keys
sorted at dump time.  Exit codes: 0 success, 1 usage or input error,
2 precision underflow, 3 violated internal identity.
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
from dataclasses import dataclass, fields, replace
from fractions import Fraction

from .arith import CycElement, FieldContext
from .dwork import (
    DworkMatrix,
    ZqPi,
    char_c_crosscheck,
    char_series,
    facial_criterion,
    psi_a_matrix,
    verify_trace_formula,
)
from .errors import (
    DomainError,
    IntegralityError,
    ParseError,
    PrecisionError,
    TadicError,
    TheoremViolation,
)
from .polytope import (
    LaurentPoly,
    hodge_polygon,
    hodge_polygon_absolute,
    newton_data,
)
from .series import NewtonPolygon, SSeries, TSeries
from .sums import (
    congruence_check,
    c_function,
    l_function,
    np_report,
    s_f_T,
    s_f_psi,
    survey_family,
)

COMMANDS = (
    "hodge",
    "sum",
    "lfun",
    "cfun",
    "np",
    "dwork",
    "verify",
    "congruence",
    "survey",
    "faces",
)


# ---------------------------------------------------------------------------
# Laurent polynomial parser
# ---------------------------------------------------------------------------

_WS = re.compile(r"\s*")
_INT = re.compile(r"-?\d+")
_UINT = re.compile(r"\d+")
_VAR = re.compile(r"x(\d+)")


class _Scanner:
    __slots__ = ("text", "i")

    def __init__(self, text: str):
        self.text = text
        self.i = 0

    def skip_ws(self):
        self.i = _WS.match(self.text, self.i).end()

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.i] if self.i < len(self.text) else ""

    def take(self, ch: str):
        if self.peek() != ch:
            raise ParseError(f"expected {ch!r}", self.i)
        self.i += 1

    def match(self, pat):
        self.skip_ws()
        m = pat.match(self.text, self.i)
        if m:
            self.i = m.end()
        return m


def _parse_power(sc: _Scanner) -> int:
    if sc.peek() == "^":
        sc.i += 1
        m = sc.match(_INT)
        if not m:
            raise ParseError("expected integer exponent after '^'", sc.i)
        return int(m.group())
    return 1


def _parse_factor(sc: _Scanner, ctx: FieldContext, exps: dict):
    """One '*'-joined factor: a variable power or (first position) a coefficient."""
    m = sc.match(_VAR)
    if not m:
        raise ParseError("expected a variable like x1", sc.i)
    idx = int(m.group(1))
    if idx < 1:
        raise ParseError("variable indices start at x1", sc.i)
    exps[idx] = exps.get(idx, 0) + _parse_power(sc)


def _parse_coeff(sc: _Scanner, ctx: FieldContext):
    """Leading coefficient of a term, or None if the term starts with a variable."""
    c = sc.peek()
    if c == "g":
        start = sc.i
        sc.i += 1
        if sc.peek() != "^":
            raise ParseError("generator powers are written g^k", start)
        sc.i += 1
        m = sc.match(_INT)
        if not m:
            raise ParseError("expected integer exponent after 'g^'", sc.i)
        return ctx.pow(ctx.generator, int(m.group()))
    if c.isdigit() or c == "-":
        start = sc.i
        m = sc.match(_INT)
        if not m:
            raise ParseError("expected an integer coefficient", sc.i)
        val = ctx.from_int(int(m.group()))
        if val == ctx.zero():
            raise ParseError(
                f"coefficient {m.group()} reduces to zero mod {ctx.p}", start
            )
        return val
    return None


def parse_laurent(text: str, ctx: FieldContext) -> LaurentPoly:
    """Parse `term (+|- term)*` where a term is an optional coefficient
    (integer, or g^k in generator notation) times a product of variable
    powers x1^e1*x2^e2...  The variable count is the largest index used."""
    sc = _Scanner(text)
    if sc.peek() == "":
        raise ParseError("empty polynomial", 0)
    raw = []
    sign = 1
    first = True
    while True:
        c = sc.peek()
        if not first:
            if c == "":
                break
            if c == "+":
                sign = 1
            elif c == "-":
                sign = -1
            else:
                raise ParseError("expected '+' or '-' between terms", sc.i)
            sc.i += 1
        first = False
        term_at = sc.i
        coeff = _parse_coeff(sc, ctx)
        exps: dict = {}
        if coeff is None:
            coeff = ctx.one()
            _parse_factor(sc, ctx, exps)
        while sc.peek() == "*":
            sc.i += 1
            _parse_factor(sc, ctx, exps)
        if sign < 0:
            coeff = ctx.neg(coeff)
        raw.append((exps, coeff, term_at))
    n = max((max(e) for e, _, _ in raw if e), default=0)
    if n == 0:
        raise ParseError("no variables: a constant has no exponential sum", 0)
    merged: dict = {}
    offsets: dict = {}
    for e, coeff, at in raw:
        key = tuple(e.get(i, 0) for i in range(1, n + 1))
        if key in merged:
            merged[key] = ctx.add(merged[key], coeff)
            if merged[key] == ctx.zero():
                raise ParseError("terms cancel to a zero coefficient", at)
        else:
            merged[key] = coeff
            offsets[key] = at
    return LaurentPoly.make(n, merged, ctx)


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


@dataclass
class RunConfig:
    """Resolved invocation: every knob a command may read.

    prec_t is the T-adic cap for sum-side series and doubles as the
    pi-adic cap for the operator side; hodge_depth and basis resolve to
    polytope-dependent defaults when left unset.
    """

    command: str
    poly: str = ""
    p: int = 3
    a: int = 1
    m_list: tuple = ()
    prec_p: int = 4
    prec_t: int = 16
    deg_s: int = 2
    basis: int | None = None
    hodge_depth: int | None = None
    k_list: tuple = ()
    seed: int = 0
    samples: int = 20
    what: str = "all"
    override_nondegenerate: bool = False
    out: str = ""


_INT_KEYS = {"p", "a", "prec_p", "prec_t", "deg_s", "basis", "hodge_depth", "seed", "samples"}
_LIST_KEYS = {"m_list": "m", "k_list": "k"}


def _parse_int_list(text: str) -> tuple:
    try:
        return tuple(int(x) for x in str(text).split(",") if x.strip() != "")
    except ValueError:
        raise ParseError(f"expected comma-separated integers, got {text!r}", 0)


def read_config_file(path: str) -> dict:
    """key=value lines, '#' comments; keys use the flag spellings."""
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            if "=" not in body:
                raise ParseError(f"{path}:{lineno}: expected key=value", 0)
            key, val = (part.strip() for part in body.split("=", 1))
            out[key.replace("-", "_")] = val
    return out


def _config_to_fields(raw: dict) -> dict:
    """Map config-file strings onto RunConfig fields."""
    known = {f.name for f in fields(RunConfig)}
    alias = {"m": "m_list", "k": "k_list", "prec_p": "prec_p", "prec_t": "prec_t"}
    out = {}
    for key, val in raw.items():
        name = alias.get(key, key)
        if name not in known:
            raise ParseError(f"unknown config key {key!r}", 0)
        if name in ("m_list", "k_list"):
            out[name] = _parse_int_list(val)
        elif name in _INT_KEYS:
            out[name] = int(val)
        elif name == "override_nondegenerate":
            out[name] = str(val).lower() in ("1", "true", "yes")
        else:
            out[name] = val
    return out


class _UsageError(TadicError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(
        prog="tadic",
        description="Exact T-adic exponential sums, L/C-functions, Newton "
        "polygons, and the operator-side cross checks.",
    )
    sub = ap.add_subparsers(dest="command", metavar="command")
    for name, blurb in (
        ("hodge", "combinatorial lower-bound polygon of the support"),
        ("sum", "T-adic torus sums, optionally specialized to a character order"),
        ("lfun", "L-function coefficients"),
        ("cfun", "C-function coefficients"),
        ("np", "certified Newton polygons and ordinariness flags"),
        ("dwork", "transfer-operator characteristic series"),
        ("verify", "cross-check the sum side against the operator side"),
        ("congruence", "high-degree coefficient congruences of L"),
        ("survey", "seeded random-coefficient survey over one support"),
        ("faces", "per-face ordinariness determinants"),
    ):
        cp = sub.add_parser(name, help=blurb, description=blurb)
        cp.add_argument("poly", nargs="?", default="", help="polynomial text, e.g. 'x1^3 + g^1*x2'")
        cp.add_argument("--config", default="", help="key=value file; flags win")
        cp.add_argument("--p", type=int, help="prime")
        cp.add_argument("--a", type=int, help="extension degree, q = p^a")
        cp.add_argument("--m", help="comma list of character orders p^m")
        cp.add_argument("--prec-p", type=int, dest="prec_p", help="p-adic digits")
        cp.add_argument("--prec-t", type=int, dest="prec_t", help="T- (and pi-) adic cap")
        cp.add_argument("--deg-s", type=int, dest="deg_s", help="s-degree window")
        cp.add_argument("--basis", type=int, help="operator basis degree bound")
        cp.add_argument(
            "--hodge-depth", type=int, dest="hodge_depth", help="polygon/criterion depth on the 1/D grid"
        )
        cp.add_argument("-k", "--k", dest="k", help="comma list of torus extension steps")
        cp.add_argument("--seed", type=int, help="survey RNG seed")
        cp.add_argument("--samples", type=int, help="survey sample count")
        cp.add_argument("--what", choices=("trace", "char", "all"), help="verify target")
        cp.add_argument(
            "--override-nondegenerate",
            action="store_true",
            default=None,
            dest="override_nondegenerate",
            help="attest nondegeneracy when the certificate search is inconclusive",
        )
        cp.add_argument("--out", help="write the JSON document here instead of stdout")
    return ap


def build_config(argv) -> RunConfig:
    ns = build_parser().parse_args(argv)
    if not ns.command:
        raise _UsageError(f"choose a command: {', '.join(COMMANDS)}")
    cfg = RunConfig(command=ns.command)
    if ns.config:
        cfg = replace(cfg, **_config_to_fields(read_config_file(ns.config)))
    updates = {}
    for name in (
        "poly",
        "p",
        "a",
        "prec_p",
        "prec_t",
        "deg_s",
        "basis",
        "hodge_depth",
        "seed",
        "samples",
        "what",
        "override_nondegenerate",
        "out",
    ):
        val = getattr(ns, name, None)
        if val not in (None, ""):
            updates[name] = val
    if ns.m is not None:
        updates["m_list"] = _parse_int_list(ns.m)
    if ns.k is not None:
        updates["k_list"] = _parse_int_list(ns.k)
    return replace(cfg, **updates)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def jfrac(x) -> dict:
    fr = Fraction(x)
    return {"num": str(fr.numerator), "den": str(fr.denominator)}


def jpolygon(P: NewtonPolygon) -> dict:
    return {
        "vertices": [[jfrac(x), jfrac(y)] for x, y in P.vertices],
        "certified_upto": jfrac(P.certified_upto),
    }


def jtseries(ts: TSeries) -> dict:
    return {
        "ring": "Z[[T]]",
        "den": str(ts.den),
        "prec_p": str(ts.prec),
        "cap": str(ts.cap),
        "coeffs": {str(j): str(c) for j, c in sorted(ts.coeffs.items())},
    }


def jzqpi(z: ZqPi) -> dict:
    return {
        "ring": "Zq[[pi]]",
        "den": str(z.den),
        "prec_p": str(z.prec),
        "cap": str(z.cap),
        "coeffs": {str(j): [str(c) for c in t] for j, t in sorted(z.coeffs.items())},
    }


def jcyc(c: CycElement) -> dict:
    return {
        "ring": "Zp[pi_psi]",
        "p": c.ctx.p,
        "m": c.ctx.m,
        "prec_p": str(c.prec),
        "coeffs": [str(x) for x in c.coeffs],
    }


def jsseries(F: SSeries) -> list:
    out = []
    for c in F.coeffs:
        if isinstance(c, TSeries):
            out.append(jtseries(c))
        elif isinstance(c, ZqPi):
            out.append(jzqpi(c))
        else:
            out.append(jcyc(c))
    return out


def _pi_modulus_label(Mx: DworkMatrix) -> str:
    return f"pi^{Fraction(Mx.cert_cap(), Mx.D)}"


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _parse_poly(cfg: RunConfig) -> LaurentPoly:
    if not cfg.poly:
        raise _UsageError("this command needs a polynomial")
    return parse_laurent(cfg.poly, FieldContext(cfg.p, cfg.a))


def _resolve_basis(cfg: RunConfig, n_pi: int) -> int:
    if cfg.basis is not None:
        return cfg.basis
    return math.ceil(Fraction(n_pi, cfg.p - 1))


def _operator_caps(cfg: RunConfig) -> int:
    # the T-window flag doubles as the pi-window; default 16 is sized for
    # sums and would be enormous operator-side, so clamp the default
    return min(cfg.prec_t, 6)


def cmd_hodge(cfg: RunConfig) -> dict:
    f = _parse_poly(cfg)
    dd = newton_data(f)
    K = cfg.hodge_depth if cfg.hodge_depth is not None else dd.D - 1
    return {
        "command": "hodge",
        "p": cfg.p,
        "a": cfg.a,
        "poly": cfg.poly,
        "rank": dd.rank,
        "denominator": dd.D,
        "depth": K,
        "normalized_volume": dd.normalized_volume(),
        "weights": dd.weight_counts(K),
        "polygon": jpolygon(hodge_polygon(dd, cfg.p, cfg.a, K)),
        "polygon_absolute": jpolygon(hodge_polygon_absolute(dd, K)),
    }


def cmd_sum(cfg: RunConfig) -> dict:
    f = _parse_poly(cfg)
    doc = {
        "command": "sum",
        "p": cfg.p,
        "a": cfg.a,
        "poly": cfg.poly,
        "sums": {},
        "specialized": {},
    }
    for k in cfg.k_list or (1,):
        S = s_f_T(f, k, cfg.prec_p, cfg.prec_t)
        doc["sums"][str(k)] = jtseries(S)
        for m in cfg.m_list:
            doc["specialized"].setdefault(str(m), {})[str(k)] = jcyc(
                s_f_psi(f, k, m, cfg.prec_p)
            )
    return doc


def cmd_lfun(cfg: RunConfig) -> dict:
    f = _parse_poly(cfg)
    L = l_function(f, cfg.deg_s, cfg.prec_p, cfg.prec_t)
    return {
        "command": "lfun",
        "p": cfg.p,
        "a": cfg.a,
        "poly": cfg.poly,
        "deg_s": cfg.deg_s,
        "coeffs": jsseries(L),
    }


def cmd_cfun(cfg: RunConfig) -> dict:
    f = _parse_poly(cfg)
    C = c_function(f, cfg.deg_s, cfg.prec_p, cfg.prec_t)
    return {
        "command": "cfun",
        "p": cfg.p,
        "a": cfg.a,
        "poly": cfg.poly,
        "deg_s": cfg.deg_s,
        "coeffs": jsseries(C),
    }


def cmd_np(cfg: RunConfig) -> dict:
    f = _parse_poly(cfg)
    rep = np_report(f, cfg.m_list, cfg.deg_s, cfg.prec_p, cfg.prec_t)
    return {
        "command": "np",
        "p": rep.p,
        "a": rep.a,
        "poly": cfg.poly,
        "deg_s": rep.deg_s,
        "np_t": jpolygon(rep.np_t),
        "np_pi": {str(m): jpolygon(P) for m, P in rep.np_pi.items()},
        "hp_q": jpolygon(rep.hp_q),
        "hp_absolute": jpolygon(rep.hp_absolute),
        "flags": dict(rep.flags),
        "per_m": {str(m): dict(v) for m, v in rep.per_m.items()},
        "nondegenerate": rep.nondegenerate,
    }


def cmd_dwork(cfg: RunConfig) -> dict:
    f = _parse_poly(cfg)
    n_pi = _operator_caps(cfg)
    B = _resolve_basis(cfg, n_pi)
    Mx = psi_a_matrix(f, B, cfg.prec_p, n_pi)
    C = char_series(Mx, min(cfg.deg_s, Mx.dim))
    return {
        "command": "dwork",
        "p": cfg.p,
        "a": cfg.a,
        "poly": cfg.poly,
        "basis_bound": B,
        "dimension": Mx.dim,
        "certified_modulus": _pi_modulus_label(Mx),
        "deg_s": min(cfg.deg_s, Mx.dim),
        "char_series": jsseries(C),
    }


def cmd_verify(cfg: RunConfig) -> dict:
    f = _parse_poly(cfg)
    n_pi = _operator_caps(cfg)
    B = _resolve_basis(cfg, n_pi)
    checks = []
    if cfg.what in ("trace", "all"):
        for k in cfg.k_list or (1,):
            chk = verify_trace_formula(f, k, B, cfg.prec_p, n_pi)
            checks.append(
                {
                    "what": "trace",
                    "k": k,
                    "pass": chk.ok,
                    "modulus": f"pi^{chk.pi_modulus}, p^{chk.p_modulus}",
                }
            )
    if cfg.what in ("char", "all"):
        cc = char_c_crosscheck(f, cfg.deg_s, B, cfg.prec_p, n_pi)
        checks.append(
            {
                "what": "char",
                "deg_s": cc.deg_s,
                "pass": cc.ok,
                "modulus": f"pi^{cc.pi_modulus}, p^{cc.p_modulus}",
                "mismatched_coefficients": list(cc.mismatches),
            }
        )
    doc = {
        "command": "verify",
        "p": cfg.p,
        "a": cfg.a,
        "poly": cfg.poly,
        "pass": all(c["pass"] for c in checks),
        "checks": checks,
    }
    if len(checks) == 1:
        doc["modulus"] = checks[0]["modulus"]
    return doc


def cmd_congruence(cfg: RunConfig) -> dict:
    f = _parse_poly(cfg)
    dd = newton_data(f)
    ms = cfg.m_list or (1,)
    reports = {}
    for m in ms:
        bound = dd.normalized_volume() * cfg.p ** (f.n * (m - 1))
        ks = cfg.k_list or (bound + 1, bound + 2)
        rep = congruence_check(
            f, m, ks, cfg.prec_p, cfg.prec_t, cfg.override_nondegenerate
        )
        reports[str(m)] = {
            "degree_bound": rep.degree_bound,
            "modulus_degree": rep.modulus_degree,
            "tail_floor": rep.tail_floor,
            "nondegenerate": rep.nondegenerate,
            "override": rep.override,
            "checks": [
                {"k": c.k, "status": c.status, "proven_mod_exponent": c.proven_mod_exponent}
                for c in rep.checks
            ],
        }
    return {
        "command": "congruence",
        "p": cfg.p,
        "a": cfg.a,
        "poly": cfg.poly,
        "reports": reports,
    }


def cmd_survey(cfg: RunConfig) -> dict:
    f = _parse_poly(cfg)
    rep = survey_family(
        [u for u, _ in f.terms],
        cfg.p,
        cfg.a,
        cfg.samples,
        cfg.seed,
        cfg.deg_s,
        cfg.prec_p,
        cfg.prec_t,
    )
    return {
        "command": "survey",
        "p": rep.p,
        "a": rep.a,
        "support": [list(u) for u in rep.exponents],
        "sample_count": rep.sample_count,
        "seed": rep.seed,
        "deg_s": rep.deg_s,
        "t_ordinary": rep.t_ordinary,
        "not_t_ordinary": rep.not_t_ordinary,
        "uncertified": rep.uncertified,
        "nondegenerate_failures": rep.nondegenerate_failures,
        "histogram": [
            {
                "prefix": [[jfrac(x), jfrac(y)] for x, y in verts],
                "count": count,
            }
            for verts, count in rep.histogram
        ],
    }


def cmd_faces(cfg: RunConfig) -> dict:
    f = _parse_poly(cfg)
    dd = newton_data(f)
    K = cfg.hodge_depth if cfg.hodge_depth is not None else dd.D
    fr = facial_criterion(f, K, cfg.prec_p)
    return {
        "command": "faces",
        "p": cfg.p,
        "a": cfg.a,
        "poly": cfg.poly,
        "depth": K,
        "denominator": fr.whole.D,
        "whole": list(fr.whole.verdicts),
        "conjunction": list(fr.conjunction),
        "faces": [
            {
                "label": fv.label,
                "vertices": [list(v) for v in fv.vertices],
                "depth": fv.report.K,
                "denominator": fv.report.D,
                "verdicts": list(fv.report.verdicts),
            }
            for fv in fr.faces
        ],
    }


_DISPATCH = {
    "hodge": cmd_hodge,
    "sum": cmd_sum,
    "lfun": cmd_lfun,
    "cfun": cmd_cfun,
    "np": cmd_np,
    "dwork": cmd_dwork,
    "verify": cmd_verify,
    "congruence": cmd_congruence,
    "survey": cmd_survey,
    "faces": cmd_faces,
}


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def _emit(doc: dict, out_path: str):
    blob = json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(blob)
    else:
        sys.stdout.write(blob)


def run(cfg: RunConfig) -> dict:
    return _DISPATCH[cfg.command](cfg)


def main(argv=None) -> int:
    try:
        cfg = build_config(argv if argv is not None else sys.argv[1:])
        doc = run(cfg)
    except (_UsageError, ParseError, DomainError, OSError) as err:
        kind = "UsageError" if isinstance(err, _UsageError) else type(err).__name__
        _emit({"error": {"type": kind, "message": str(err)}}, "")
        return 1
    except PrecisionError as err:
        _emit({"error": {"type": "PrecisionError", "message": str(err)}}, "")
        return 2
    except (TheoremViolation, IntegralityError) as err:
        _emit({"error": {"type": type(err).__name__, "message": str(err)}}, "")
        return 3
    _emit(doc, cfg.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
