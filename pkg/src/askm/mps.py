"""Reader for a subset of the MPS format.

Supported: NAME, ROWS (N/E/L/G), COLUMNS, RHS, BOUNDS (UP/LO/FX/FR/MI/PL)
and ENDATA. Lines are split on whitespace, which covers free-format files
and fixed-format files whose names contain no blanks. RANGES, SOS,
OBJSENSE, integer markers and integer bound types raise ``Unsupported``.

Inequality rows become equalities through one slack column each:
``a x <= r`` gets ``a x + s = r`` with ``s >= 0`` and ``a x >= r`` gets
``a x + s = r`` with ``s <= 0``.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .errors import ParseError, Unsupported
from .problems import LPInstance

SECTIONS = {"NAME", "ROWS", "COLUMNS", "RHS", "BOUNDS", "RANGES", "SOS", "OBJSENSE", "ENDATA"}
ORDER = ["NAME", "ROWS", "COLUMNS", "RHS", "BOUNDS", "ENDATA"]
VALUE_BOUNDS = {"UP", "LO", "FX"}
FREE_BOUNDS = {"FR", "MI", "PL"}
INTEGER_BOUNDS = {"BV", "LI", "UI", "SC"}
_UNSET = object()


def _number(tok, lineno):
    try:
        val = float(tok)
    except ValueError:
        raise ParseError(lineno, f"bad number {tok!r}") from None
    if not math.isfinite(val):
        raise ParseError(lineno, f"non-finite number {tok!r}")
    return val


def parse_mps_subset(text, p_star: float = math.nan) -> LPInstance:
    """Parse MPS text (``str`` or ``bytes``) into an equality-form :class:`LPInstance`.

    ``p_star`` is not part of MPS and must come from a side channel.
    """
    if isinstance(text, (bytes, bytearray)):
        text = bytes(text).decode("latin-1")
    name = "lp"
    section = None
    seen = []
    objective = None
    row_types = {}  # constraint rows in file order
    free_rows = set()
    columns = {}  # name -> index, insertion ordered
    coef = {}  # (row, col index) -> value
    cost = {}
    rhs = {}
    rhs_set = _UNSET
    lower, upper, lower_set = {}, {}, set()
    bound_set = _UNSET
    ended = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip()
        if not line.strip() or line.lstrip().startswith("*"):
            continue
        if ended:
            raise ParseError(lineno, "content after ENDATA")
        tokens = line.split()
        head = tokens[0].upper()
        if not line[0].isspace() and head in SECTIONS:
            if head in ("RANGES", "SOS"):
                raise Unsupported(head)
            if head == "OBJSENSE":
                raise Unsupported(head)
            if head in seen:
                raise ParseError(lineno, f"duplicate section {head}")
            if seen and ORDER.index(head) < ORDER.index(seen[-1]):
                raise ParseError(lineno, f"section {head} out of order")
            seen.append(head)
            section = head
            if head == "NAME":
                name = " ".join(tokens[1:]) or name
            elif len(tokens) > 1:
                raise ParseError(lineno, f"unexpected tokens after {head}")
            if head == "ENDATA":
                ended = True
            continue
        if not line[0].isspace():
            raise ParseError(lineno, f"unknown section {tokens[0]!r}")
        if section is None or section == "NAME":
            raise ParseError(lineno, "data line outside a section")

        if section == "ROWS":
            if len(tokens) != 2:
                raise ParseError(lineno, "ROWS lines need a type and a name")
            kind, rname = tokens[0].upper(), tokens[1]
            if kind not in ("N", "E", "L", "G"):
                raise ParseError(lineno, f"unknown row type {tokens[0]!r}")
            if rname in row_types or rname in free_rows or rname == objective:
                raise ParseError(lineno, f"duplicate row {rname!r}")
            if kind == "N":
                if objective is None:
                    objective = rname
                else:
                    free_rows.add(rname)
            else:
                row_types[rname] = kind

        elif section == "COLUMNS":
            if "'MARKER'" in tokens:
                raise Unsupported("integer markers")
            if len(tokens) not in (3, 5):
                raise ParseError(lineno, "COLUMNS lines need a column and one or two row/value pairs")
            col = columns.setdefault(tokens[0], len(columns))
            for rname, tok in zip(tokens[1::2], tokens[2::2]):
                val = _number(tok, lineno)
                if rname == objective:
                    target = cost
                    key = col
                elif rname in row_types:
                    target = coef
                    key = (rname, col)
                elif rname in free_rows:
                    continue
                else:
                    raise ParseError(lineno, f"unknown row {rname!r}")
                if key in target:
                    raise ParseError(lineno, f"duplicate entry for row {rname!r}")
                target[key] = val

        elif section == "RHS":
            if len(tokens) % 2:
                setname, pairs = tokens[0], tokens[1:]
            else:
                setname, pairs = None, tokens
            if not pairs or len(pairs) > 4:
                raise ParseError(lineno, "RHS lines need one or two row/value pairs")
            if rhs_set is _UNSET:
                rhs_set = setname
            if setname != rhs_set:
                continue
            for rname, tok in zip(pairs[::2], pairs[1::2]):
                val = _number(tok, lineno)
                if rname == objective or rname in free_rows:
                    continue
                if rname not in row_types:
                    raise ParseError(lineno, f"unknown row {rname!r}")
                if rname in rhs:
                    raise ParseError(lineno, f"duplicate rhs for row {rname!r}")
                rhs[rname] = val

        elif section == "BOUNDS":
            kind = tokens[0].upper()
            if kind in INTEGER_BOUNDS:
                raise Unsupported(f"bound type {kind}")
            if kind in VALUE_BOUNDS:
                if len(tokens) == 4:
                    setname, cname, tok = tokens[1:]
                elif len(tokens) == 3:
                    setname, (cname, tok) = None, tokens[1:]
                else:
                    raise ParseError(lineno, f"{kind} bound needs a column and a value")
                val = _number(tok, lineno)
            elif kind in FREE_BOUNDS:
                if len(tokens) in (3, 4):
                    setname, cname = tokens[1], tokens[2]
                elif len(tokens) == 2:
                    setname, cname = None, tokens[1]
                else:
                    raise ParseError(lineno, f"{kind} bound needs a column")
                val = None
            else:
                raise ParseError(lineno, f"unknown bound type {tokens[0]!r}")
            if bound_set is _UNSET:
                bound_set = setname
            if setname != bound_set:
                continue
            if cname not in columns:
                raise ParseError(lineno, f"bound on unknown column {cname!r}")
            j = columns[cname]
            if kind == "UP":
                upper[j] = val
                if val < 0 and j not in lower_set:
                    lower[j] = -math.inf
            elif kind == "LO":
                lower[j] = val
                lower_set.add(j)
            elif kind == "FX":
                lower[j] = upper[j] = val
                lower_set.add(j)
            elif kind == "FR":
                lower[j], upper[j] = -math.inf, math.inf
                lower_set.add(j)
            elif kind == "MI":
                lower[j] = -math.inf
                lower_set.add(j)
            else:
                upper[j] = math.inf

    if not ended:
        raise ParseError(len(text.splitlines()), "missing ENDATA")
    if "ROWS" not in seen:
        raise ParseError(0, "missing ROWS section")
    if objective is None:
        raise ParseError(0, "no objective (N) row")
    if not columns:
        raise ParseError(0, "empty COLUMNS section")

    n_struct = len(columns)
    cons = list(row_types)
    slack_rows = [r for r in cons if row_types[r] != "E"]
    n = n_struct + len(slack_rows)
    A = np.zeros((len(cons), n))
    row_index = {r: i for i, r in enumerate(cons)}
    for (rname, j), val in coef.items():
        A[row_index[rname], j] = val
    b = np.array([rhs.get(r, 0.0) for r in cons])
    c = np.zeros(n)
    for j, val in cost.items():
        c[j] = val
    l = np.zeros(n)
    u = np.full(n, math.inf)
    for j, val in lower.items():
        l[j] = val
    for j, val in upper.items():
        u[j] = val
    for s, rname in enumerate(slack_rows):
        j = n_struct + s
        A[row_index[rname], j] = 1.0
        if row_types[rname] == "G":
            l[j], u[j] = -math.inf, 0.0
    bad = np.flatnonzero(l > u)
    if bad.size:
        raise ParseError(0, f"inconsistent bounds on column {int(bad[0])}")
    if np.any(l == math.inf) or np.any(u == -math.inf):
        raise ParseError(0, "infinite bound on the wrong side")
    names = list(columns) + [f"slack_{r}" for r in slack_rows]
    return LPInstance(A, b, l, u, c, p_star=p_star, name=name, column_names=names)


def read_mps(path, p_star: float = math.nan) -> LPInstance:
    return parse_mps_subset(Path(path).read_bytes(), p_star=p_star)
