"""Exact linear programming over rationals.

Dense two-phase tableau simplex.  Pricing is most-negative reduced cost with
a permanent switch to least-index (Bland) selection after a run of degenerate
pivots, which keeps the solver deterministic and cycle-free.  Optimal solves
report the exact primal assignment and the exact dual values per constraint.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

_Z = Fraction(0)

_RELS = ("<=", "=", ">=")

# consecutive degenerate pivots tolerated before Bland pricing takes over
_BLAND_TRIGGER = 30


class LinearProgram:
    """maximize objective . x subject to rational linear constraints.

    Variables are nonnegative unless registered with free=True.
    """

    def __init__(self):
        self.variables: list[str] = []
        self.free: set[str] = set()
        self.objective: dict[str, Fraction] = {}
        self.constraints: list[tuple[dict[str, Fraction], str, Fraction, str]] = []
        self._vindex: dict[str, int] = {}
        self._cnames: set[str] = set()

    def add_variable(self, name: str, free: bool = False) -> str:
        if name in self._vindex:
            raise ValueError(f"duplicate variable {name!r}")
        self._vindex[name] = len(self.variables)
        self.variables.append(name)
        if free:
            self.free.add(name)
        return name

    def set_objective(self, coeffs: dict) -> None:
        self.objective = {v: Fraction(c) for v, c in coeffs.items() if Fraction(c)}
        for v in self.objective:
            if v not in self._vindex:
                raise ValueError(f"objective references unknown variable {v!r}")

    def add_constraint(self, coeffs: dict, rel: str, rhs, name: str | None = None) -> str:
        if rel not in _RELS:
            raise ValueError(f"relation must be one of {_RELS}, got {rel!r}")
        clean = {}
        for v, c in coeffs.items():
            if v not in self._vindex:
                raise ValueError(f"constraint references unknown variable {v!r}")
            c = Fraction(c)
            if c:
                clean[v] = c
        if name is None:
            name = f"c{len(self.constraints)}"
        if name in self._cnames:
            raise ValueError(f"duplicate constraint name {name!r}")
        self._cnames.add(name)
        self.constraints.append((clean, rel, Fraction(rhs), name))
        return name

    def to_text(self) -> str:
        """Human-readable inequality listing, one constraint per line."""

        def terms(coeffs):
            parts = []
            for v in self.variables:
                if v not in coeffs:
                    continue
                c = coeffs[v]
                sign = "-" if c < 0 else "+"
                mag = abs(c)
                t = v if mag == 1 else f"{mag} {v}"
                parts.append(f"{sign} {t}" if parts else (f"-{t}" if c < 0 else t))
            return " ".join(parts) if parts else "0"

        lines = [f"maximize {terms(self.objective)}"]
        for coeffs, rel, rhs, name in self.constraints:
            lines.append(f"  {name}: {terms(coeffs)} {rel} {rhs}")
        if self.free:
            lines.append("free: " + " ".join(sorted(self.free)))
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class SimplexResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    value: Fraction | None = None
    primal: dict | None = None
    dual: dict | None = None  # constraint name -> Fraction


def simplex_solve(lp: LinearProgram) -> SimplexResult:
    nvars = len(lp.variables)

    # structural columns; free variables split into a positive/negative pair
    col_of: list[list[tuple[int, int]]] = []  # var index -> [(col, sign)]
    ncols = 0
    for v in lp.variables:
        if v in lp.free:
            col_of.append([(ncols, 1), (ncols + 1, -1)])
            ncols += 2
        else:
            col_of.append([(ncols, 1)])
            ncols += 1
    nstruct = ncols

    # rows normalized to nonnegative rhs; remember per-row sign flips
    rows = []
    for coeffs, rel, rhs, _name in lp.constraints:
        dense = [_Z] * nstruct
        for v, c in coeffs.items():
            for col, sign in col_of[lp._vindex[v]]:
                dense[col] = c if sign > 0 else -c
        flipped = rhs < 0
        if flipped:
            dense = [-c for c in dense]
            rhs = -rhs
            rel = {"<=": ">=", ">=": "<=", "=": "="}[rel]
        rows.append((dense, rel, rhs, flipped))

    # slack / artificial layout
    slack_col = {}
    art_col = {}
    for i, (_dense, rel, _rhs, _f) in enumerate(rows):
        if rel in ("<=", ">="):
            slack_col[i] = ncols
            ncols += 1
    art_first = ncols
    for i, (_dense, rel, _rhs, _f) in enumerate(rows):
        if rel in ("=", ">="):
            art_col[i] = ncols
            ncols += 1
    bcol = ncols

    tab = []
    basis = []
    origin = []  # original constraint index per live tableau row
    for i, (dense, rel, rhs, _f) in enumerate(rows):
        row = dense + [_Z] * (ncols - nstruct) + [rhs]
        if rel == "<=":
            row[slack_col[i]] = Fraction(1)
            basis.append(slack_col[i])
        elif rel == ">=":
            row[slack_col[i]] = Fraction(-1)
            row[art_col[i]] = Fraction(1)
            basis.append(art_col[i])
        else:
            row[art_col[i]] = Fraction(1)
            basis.append(art_col[i])
        tab.append(row)
        origin.append(i)

    artificials = frozenset(art_col.values())

    # phase 1: drive the artificial variables to zero
    if artificials:
        costs1 = [_Z] * ncols
        for c in artificials:
            costs1[c] = Fraction(-1)
        zrow = _reduced_costs(tab, basis, costs1, bcol)
        status = _iterate(tab, basis, zrow, banned=frozenset(), bcol=bcol)
        assert status == "optimal"  # phase-1 objective is bounded above by 0
        if zrow[bcol] != 0:
            return SimplexResult(status="infeasible")
        _drive_out_artificials(tab, basis, origin, artificials, nstruct, bcol)

    # phase 2
    costs2 = [_Z] * ncols
    for v, c in lp.objective.items():
        for col, sign in col_of[lp._vindex[v]]:
            costs2[col] = c if sign > 0 else -c
    zrow = _reduced_costs(tab, basis, costs2, bcol)
    status = _iterate(tab, basis, zrow, banned=artificials, bcol=bcol)
    if status == "unbounded":
        return SimplexResult(status="unbounded")

    # primal values
    colval = {}
    for i, b in enumerate(basis):
        colval[b] = tab[i][bcol]
    primal = {}
    for vi, v in enumerate(lp.variables):
        val = _Z
        for col, sign in col_of[vi]:
            val += sign * colval.get(col, _Z)
        primal[v] = val

    # duals read off the reduced costs of each row's initial identity column
    live = {ci: i for i, ci in enumerate(origin)}
    dual = {}
    for i, (coeffs, rel, rhs, name) in enumerate(lp.constraints):
        if i not in live:
            dual[name] = _Z  # redundant row dropped in phase 1
            continue
        _dense, nrel, _rhs, flipped = rows[i]
        idcol = art_col[i] if nrel in ("=", ">=") else slack_col[i]
        y = zrow[idcol]
        dual[name] = -y if flipped else y
    return SimplexResult(status="optimal", value=zrow[bcol], primal=primal, dual=dual)


def _reduced_costs(tab, basis, costs, bcol):
    zrow = [-c for c in costs] + [_Z]
    for i, row in enumerate(tab):
        cb = costs[basis[i]]
        if cb:
            for j, a in enumerate(row):
                if a:
                    zrow[j] += cb * a
    return zrow


def _iterate(tab, basis, zrow, banned, bcol):
    bland = False
    degenerate_run = 0
    while True:
        enter = -1
        if bland:
            for j in range(bcol):
                if j not in banned and zrow[j] < 0:
                    enter = j
                    break
        else:
            best = _Z
            for j in range(bcol):
                if j not in banned and zrow[j] < best:
                    best = zrow[j]
                    enter = j
        if enter < 0:
            return "optimal"
        leave = -1
        best_ratio = None
        for i, row in enumerate(tab):
            a = row[enter]
            if a > 0:
                ratio = row[bcol] / a
                if (best_ratio is None or ratio < best_ratio
                        or (ratio == best_ratio and basis[i] < basis[leave])):
                    best_ratio = ratio
                    leave = i
        if leave < 0:
            return "unbounded"
        if best_ratio == 0:
            degenerate_run += 1
            if degenerate_run >= _BLAND_TRIGGER:
                bland = True
        else:
            degenerate_run = 0
        _pivot(tab, basis, zrow, leave, enter, bcol)


def _pivot(tab, basis, zrow, leave, enter, bcol):
    prow = tab[leave]
    piv = prow[enter]
    if piv != 1:
        inv = 1 / piv
        for j in range(bcol + 1):
            if prow[j]:
                prow[j] *= inv
    nz = [j for j in range(bcol + 1) if prow[j]]
    for row in tab:
        if row is prow:
            continue
        f = row[enter]
        if f:
            for j in nz:
                row[j] -= f * prow[j]
    f = zrow[enter]
    if f:
        for j in nz:
            zrow[j] -= f * prow[j]
    basis[leave] = enter


def _drive_out_artificials(tab, basis, origin, artificials, nstruct, bcol):
    """Pivot basic artificials out; drop rows that prove redundant."""
    i = 0
    while i < len(tab):
        if basis[i] not in artificials:
            i += 1
            continue
        row = tab[i]
        enter = -1
        for j in range(bcol):
            if j not in artificials and row[j]:
                enter = j
                break
        if enter < 0:
            del tab[i], basis[i], origin[i]
            continue
        # b is zero here, so pivoting preserves feasibility regardless of sign
        zdummy = [_Z] * (bcol + 1)
        _pivot(tab, basis, zdummy, i, enter, bcol)
        i += 1
