"""Solver input formats: CPLEX LP, OPB (pseudo-Boolean) and SMT-LIB2 (OMT).

Only the subset each encoder emits is parsed back by :func:`parse_model`.
"""

from __future__ import annotations

import re
from pathlib import Path
from typing import Iterable, Optional

from .model import (
    EQ,
    GE,
    LE,
    OBJECTIVE_SCALE,
    LinearConstraint,
    Model01LP,
    VarRef,
    make_constraint,
    scale_objective,
)
from .scenario import _fmt

_WRAP = 240


class EncodingError(ValueError):
    pass


class ModelSyntaxError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


def _names(m: Model01LP) -> list[str]:
    return [v.name for v in m.var_table]


def _wrapped(head: str, pieces: Iterable[str], tail: str) -> list[str]:
    lines, cur = [], head
    for piece in pieces:
        if len(cur) + len(piece) + 1 > _WRAP and cur.strip():
            lines.append(cur)
            cur = "  "
        cur += " " + piece if cur.strip() else piece
    cur += tail
    lines.append(cur)
    return lines


def _lp_terms(terms, names) -> list[str]:
    out = []
    for k, (c, j) in enumerate(terms):
        sign = "-" if c < 0 else "+"
        mag = _fmt(abs(c))
        if k == 0 and c > 0:
            out.append(f"{mag} {names[j]}")
        else:
            out.append(f"{sign} {mag} {names[j]}")
    return out


def encode_lp(m: Model01LP) -> str:
    """CPLEX LP text; feasibility models get a constant ``obj: 0`` row."""
    names = _names(m)
    kind = "feasibility" if m.is_feasibility else "optimisation"
    out = [f"\\ relayplace 0-1 LP ({kind})", f"\\ variables {m.num_vars} constraints {len(m.constraints)}"]
    out.append("Minimize")
    objective = m.objective or ()
    if objective:
        out += _wrapped(" obj:", _lp_terms(objective, names), "")
    else:
        out.append(" obj: 0")
    out.append("Subject To")
    seen: dict[str, int] = {}
    for con in m.constraints:
        k = seen.get(con.family, 0)
        seen[con.family] = k + 1
        pieces = _lp_terms(con.terms, names)
        if not pieces:
            pieces = [f"0 {names[0]}"] if names else ["0"]
        out += _wrapped(f" {con.family}_{k}:", pieces, f" {con.sense} {con.rhs}")
    out.append("Binary")
    out += [f" {n}" for n in names]
    out.append("End")
    return "\n".join(out) + "\n"


def _opb_terms(terms) -> str:
    return " ".join(f"{'+' if c > 0 else '-'}{abs(c)} x{j + 1}" for c, j in terms)


def _check_integral(con: LinearConstraint):
    if any(not float(c).is_integer() for c, _ in con.terms) or not float(con.rhs).is_integer():
        raise EncodingError(f"non-integer coefficient in {con.family} row")


def encode_opb(m: Model01LP, scale: int = OBJECTIVE_SCALE) -> str:
    """OPB text. ``<=`` rows are negated into ``>=``; ``=`` rows become two rows.

    The objective is multiplied by ``scale`` and rounded half-to-even; the
    factor is recorded in a header comment.
    """
    rows = []
    for con in m.constraints:
        _check_integral(con)
        terms = [(int(c), j) for c, j in con.terms]
        rhs = int(con.rhs)
        neg = [(-c, j) for c, j in terms]
        if con.sense == GE:
            rows.append((terms, rhs))
        elif con.sense == LE:
            rows.append((neg, -rhs))
        else:
            rows.append((terms, rhs))
            rows.append((neg, -rhs))
    kind = "feasibility" if m.is_feasibility else "optimisation"
    out = [
        f"* #variable= {m.num_vars} #constraint= {len(rows)}",
        f"* relayplace 0-1 LP ({kind}) objective_scale= {scale}",
    ]
    if not m.is_feasibility:
        obj = [(c, j) for c, j in scale_objective(m.objective, scale) if c]
        out.append(f"min: {_opb_terms(obj)} ;".replace("  ", " "))
    for terms, rhs in rows:
        body = _opb_terms(terms)
        out.append(f"{body} >= {rhs} ;" if body else f">= {rhs} ;")
    return "\n".join(out) + "\n"


def _smt_sum(terms, names) -> str:
    parts = []
    for c, j in terms:
        if c == 1:
            parts.append(names[j])
        elif c == -1:
            parts.append(f"(- {names[j]})")
        elif c < 0:
            parts.append(f"(* (- {_fmt(-c)}) {names[j]})")
        else:
            parts.append(f"(* {_fmt(c)} {names[j]})")
    if not parts:
        return "0"
    if len(parts) == 1:
        return parts[0]
    return "(+ " + " ".join(parts) + ")"


def encode_smt2(m: Model01LP, scale: int = OBJECTIVE_SCALE) -> str:
    """SMT-LIB2 over QF_LIA with an OMT ``minimize`` directive.

    Integral objective coefficients are written as is; otherwise the
    objective is scaled to integers as for OPB and the factor noted.
    """
    names = _names(m)
    kind = "feasibility" if m.is_feasibility else "optimisation"
    out = [f"; relayplace 0-1 LP ({kind})"]
    objective = None
    if not m.is_feasibility:
        objective = [(c, j) for c, j in m.objective if c]
        if all(float(c).is_integer() for c, _ in objective):
            objective = [(int(c), j) for c, j in objective]
        else:
            objective = [(c, j) for c, j in scale_objective(objective, scale) if c]
            out.append(f"; objective_scale {scale}")
    out.append("(set-logic QF_LIA)")
    for n in names:
        out.append(f"(declare-fun {n} () Int)")
    for n in names:
        out.append(f"(assert (and (<= 0 {n}) (<= {n} 1)))")
    seen: dict[str, int] = {}
    for con in m.constraints:
        _check_integral(con)
        k = seen.get(con.family, 0)
        seen[con.family] = k + 1
        op = "=" if con.sense == EQ else con.sense
        lhs = _smt_sum([(int(c), j) for c, j in con.terms], names)
        out.append(f"(assert (! ({op} {lhs} {int(con.rhs)}) :named {con.family}_{k}))")
    if objective is not None:
        out.append(f"(minimize {_smt_sum(objective, names)})")
    out.append("(check-sat)")
    if objective is not None:
        out.append("(get-objectives)")
    out.append("(get-model)")
    return "\n".join(out) + "\n"


def encode_varmap(m: Model01LP) -> str:
    lines = ["name,column"] + [f"{v.name},{v.column}" for v in m.var_table]
    return "\n".join(lines) + "\n"


def read_varmap(text: str) -> dict[str, int]:
    rows = text.strip().splitlines()
    if not rows or rows[0].strip() != "name,column":
        raise ModelSyntaxError("varmap header must be 'name,column'", 1)
    out = {}
    for lineno, row in enumerate(rows[1:], start=2):
        name, _, col = row.partition(",")
        try:
            out[name.strip()] = int(col)
        except ValueError:
            raise ModelSyntaxError(f"bad column {col!r}", lineno) from None
    return out


def write_instance(m: Model01LP, stem, formats=("lp", "opb", "smt2")) -> list[Path]:
    """Write ``<stem>.<fmt>`` files plus ``<stem>.varmap.csv``."""
    encoders = {"lp": encode_lp, "opb": encode_opb, "smt2": encode_smt2}
    stem = Path(stem)
    written = []
    for fmt in formats:
        if fmt not in encoders:
            raise ValueError(f"unknown format {fmt!r}")
        path = stem.with_name(f"{stem.name}.{fmt}")
        path.write_text(encoders[fmt](m))
        written.append(path)
    path = stem.with_name(f"{stem.name}.varmap.csv")
    path.write_text(encode_varmap(m))
    written.append(path)
    return written


# -- parsing ---------------------------------------------------------------

_NAME_PATTERNS = (
    (re.compile(r"^x_s(\d+)_i(\d+)_j(\d+)_e(\d+)$"), "X"),
    (re.compile(r"^y_s(\d+)_a(\d+)$"), "Y"),
    (re.compile(r"^z_a(\d+)$"), "Z"),
    (re.compile(r"^p_v(\d+)$"), "P"),
    (re.compile(r"^u_e(\d+)$"), "U"),
)
_NUMBER = re.compile(r"^[0-9]+(\.[0-9]*)?([eE][-+]?[0-9]+)?$|^\.[0-9]+([eE][-+]?[0-9]+)?$")
_IDENT = re.compile(r"^[A-Za-z_][A-Za-z0-9_.\[\]]*$")


def decode_name(name: str, column: int) -> VarRef:
    for pat, kind in _NAME_PATTERNS:
        mt = pat.match(name)
        if mt:
            return VarRef(kind, tuple(int(g) for g in mt.groups()), column)
    return VarRef("other", (name,), column)


def _as_number(tok: str):
    val = float(tok)
    return int(val) if val.is_integer() else val


def _linear(tokens):
    """Parse ``[sign] [coef] name`` sequences into (coef, name) pairs."""
    terms = []
    k = 0
    while k < len(tokens):
        sign = 1
        tok, ln = tokens[k]
        if tok in "+-":
            sign = -1 if tok == "-" else 1
            k += 1
            if k >= len(tokens):
                raise ModelSyntaxError("dangling sign", ln)
            tok, ln = tokens[k]
        elif tok[0] in "+-" and len(tok) > 1 and tok[1] not in "+-":
            sign = -1 if tok[0] == "-" else 1
            tok = tok[1:]
        coef = 1
        if _NUMBER.match(tok):
            coef = _as_number(tok)
            k += 1
            if k >= len(tokens) or not _IDENT.match(tokens[k][0]):
                if coef == 0 and k >= len(tokens):
                    break
                raise ModelSyntaxError(f"expected variable after {tok!r}", ln)
            tok, ln = tokens[k]
        if not _IDENT.match(tok):
            raise ModelSyntaxError(f"unexpected token {tok!r}", ln)
        terms.append((sign * coef, tok, ln))
        k += 1
    return terms


def _tokenize_lp(text):
    """Yield (section, [(token, line)...]) pairs."""
    sections = []
    cur_name, cur = None, []
    headers = {
        "minimize": "min", "minimise": "min", "min": "min",
        "subject to": "st", "such that": "st", "st": "st", "s.t.": "st",
        "binary": "bin", "binaries": "bin", "bin": "bin",
        "end": "end",
    }
    meta = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if raw.lstrip().startswith("\\"):
            mt = re.search(r"relayplace 0-1 LP \((\w+)\)", raw)
            if mt:
                meta["kind"] = mt.group(1)
            continue
        line = raw.split("\\", 1)[0].strip()
        if not line:
            continue
        key = line.lower()
        if key in headers:
            if cur_name is not None:
                sections.append((cur_name, cur))
            cur_name, cur = headers[key], []
            continue
        if cur_name is None:
            raise ModelSyntaxError(f"text before first section: {line!r}", lineno)
        spaced = re.sub(r"(<=|>=|=<|=>|(?<![<>=])=(?![<>=])|:)", r" \1 ", line)
        cur.extend((tok, lineno) for tok in spaced.split())
    if cur_name is not None:
        sections.append((cur_name, cur))
    return sections, meta


def _parse_lp(text: str) -> Model01LP:
    sections, meta = _tokenize_lp(text)
    kinds = [s for s, _ in sections]
    for need in ("min", "st", "bin"):
        if need not in kinds:
            raise ModelSyntaxError(f"missing section {need!r}")
    body = dict(sections)

    binaries = [tok for tok, _ in body["bin"]]
    col = {}
    for name in binaries:
        if name in col:
            raise ModelSyntaxError(f"duplicate binary {name!r}")
        col[name] = len(col)

    def resolve(terms, integral):
        out = []
        for coef, name, ln in terms:
            if name not in col:
                raise ModelSyntaxError(f"undeclared variable {name!r}", ln)
            if integral and not float(coef).is_integer():
                raise ModelSyntaxError("unsupported construct: fractional constraint coefficient", ln)
            out.append((int(coef) if integral else float(coef), col[name]))
        return out

    obj_tokens = body["min"]
    if len(obj_tokens) >= 2 and obj_tokens[1][0] == ":":
        obj_tokens = obj_tokens[2:]
    header = meta.get("kind")
    if header == "feasibility":
        objective = None
    elif len(obj_tokens) == 1 and obj_tokens[0][0] == "0":
        objective = () if header == "optimisation" else None
    else:
        acc: dict[int, float] = {}
        for c, j in resolve(_linear(obj_tokens), integral=False):
            acc[j] = acc.get(j, 0.0) + c
        objective = tuple((c, j) for j, c in sorted(acc.items()) if c)

    constraints = []
    toks = body["st"]
    k = 0
    while k < len(toks):
        if k + 1 >= len(toks) or toks[k + 1][0] != ":":
            raise ModelSyntaxError(f"expected 'name:' got {toks[k][0]!r}", toks[k][1])
        label, ln = toks[k]
        k += 2
        start = k
        while k < len(toks) and toks[k][0] not in ("<=", ">=", "=", "=<", "=>"):
            k += 1
        if k + 1 >= len(toks):
            raise ModelSyntaxError(f"constraint {label!r} has no sense/rhs", ln)
        sense = {"=<": LE, "=>": GE}.get(toks[k][0], toks[k][0])
        rhs_tok, rln = toks[k + 1]
        try:
            rhs = float(rhs_tok)
        except ValueError:
            raise ModelSyntaxError(f"bad right-hand side {rhs_tok!r}", rln) from None
        if not rhs.is_integer():
            raise ModelSyntaxError("unsupported construct: fractional right-hand side", rln)
        terms = resolve(_linear(toks[start:k]), integral=True)
        family = label.rsplit("_", 1)[0] if re.search(r"_\d+$", label) else label
        constraints.append(make_constraint(terms, sense, int(rhs), family))
        k += 2

    var_table = tuple(decode_name(n, c) for n, c in col.items())
    return Model01LP(len(col), var_table, tuple(constraints), objective)


_OPB_TERM = re.compile(r"^[+-]?\d+$")


def _parse_opb(text: str, varmap: Optional[dict] = None) -> Model01LP:
    num_vars = None
    scale = 1
    objective = None
    constraints = []
    max_var = 0

    def terms_of(tokens, lineno):
        if len(tokens) % 2:
            raise ModelSyntaxError("terms must be '<coef> x<k>' pairs", lineno)
        out = []
        for k in range(0, len(tokens), 2):
            c, v = tokens[k], tokens[k + 1]
            if not _OPB_TERM.match(c):
                raise ModelSyntaxError(f"malformed coefficient {c!r}", lineno)
            if not re.match(r"^x[1-9]\d*$", v):
                raise ModelSyntaxError(f"malformed variable {v!r}", lineno)
            out.append((int(c), int(v[1:]) - 1))
        return out

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("*"):
            mt = re.search(r"#variable=\s*(\d+)", line)
            if mt:
                num_vars = int(mt.group(1))
            mt = re.search(r"objective_scale=\s*(\d+)", line)
            if mt:
                scale = int(mt.group(1))
            continue
        if not line.endswith(";"):
            raise ModelSyntaxError("missing ';'", lineno)
        line = line[:-1].strip()
        if line.startswith("min:"):
            if objective is not None:
                raise ModelSyntaxError("multiple objectives", lineno)
            objective = terms_of(line[4:].split(), lineno)
            for _, j in objective:
                max_var = max(max_var, j + 1)
            continue
        toks = line.split()
        if len(toks) < 2 or toks[-2] not in (">=", "="):
            raise ModelSyntaxError("expected '>= <rhs> ;' or '= <rhs> ;'", lineno)
        if not _OPB_TERM.match(toks[-1]):
            raise ModelSyntaxError(f"malformed right-hand side {toks[-1]!r}", lineno)
        terms = terms_of(toks[:-2], lineno)
        for _, j in terms:
            max_var = max(max_var, j + 1)
        sense = GE if toks[-2] == ">=" else EQ
        constraints.append(make_constraint(terms, sense, int(toks[-1]), "opb"))

    n = num_vars if num_vars is not None else max_var
    if max_var > n:
        raise ModelSyntaxError(f"variable x{max_var} exceeds #variable= {n}")
    if varmap:
        names = {c: nm for nm, c in varmap.items()}
        var_table = tuple(decode_name(names.get(c, f"x{c + 1}"), c) for c in range(n))
    else:
        var_table = tuple(VarRef("other", (f"x{c + 1}",), c) for c in range(n))
    obj = None
    if objective is not None:
        obj = tuple((c / scale, j) for c, j in objective)
    return Model01LP(n, var_table, tuple(constraints), obj)


def parse_model(text: str, format: str, varmap: Optional[dict] = None) -> Model01LP:
    """Parse LP or OPB text emitted by this module back into a model.

    ``varmap`` (name -> column) restores semantic names for OPB input.
    """
    if format == "lp":
        return _parse_lp(text)
    if format == "opb":
        return _parse_opb(text, varmap)
    raise ValueError(f"unsupported format {format!r}")
