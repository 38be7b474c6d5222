"""Game structures, GR(k) conditions and the ``.sgrk`` text format.

A specification is kept at two levels:

* :class:`SpecText` holds formula trees and prints back to canonical text;
* :class:`SeparatedGame` holds the same content as decision diagrams inside a
  kernel, ready for solving.

File layout (``#`` starts a comment)::

    INPUT_VARS: t1 t0
    OUTPUT_VARS: a1 a0
    INIT_ENV: !t1 & !t0
    INIT_SYS: !a1 & !a0
    TRANS_ENV: ...
    TRANS_SYS: ...
    GRK:
      ASSUME: GF(!t1 & !t0)
      GUARANTEE: GF(!a1 & !a0)

Each ``GRK:`` block is one conjunct.  ``ASSUME``/``GUARANTEE`` lines may be
repeated or omitted; a line may hold several ``GF(...)`` items.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

from .dd import BDD, Function
from .errors import DeadlockError, InitError, SeparationError, SpecSyntaxError
from .formula import FALSE, TRUE, Formula, compile_formula, parse_formula, show, variables

__all__ = [
    "GameStructure", "Conjunct", "GRkCondition", "SeparatedGame", "SpecText",
    "ValidationReport", "parse_spec", "parse_spec_text", "print_spec", "validate",
    "state_space_size",
]

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_RESERVED = {"true", "false", "GF"}


# ----------------------------------------------------------------------
# symbolic model
class GameStructure:
    """``(I, O, theta_I, theta_O, rho_I, rho_O)`` over a shared kernel.

    ``rho_I`` may mention ``I, I'`` (and, for a general game, ``O``); ``rho_O``
    may mention ``I, O, I', O'`` in a general game and only ``O, O'`` in a
    separated one.  ``separated`` is computed from the actual supports.
    """

    def __init__(self, bdd: BDD, inputs: Sequence[str], outputs: Sequence[str],
                 theta_i: Function, theta_o: Function, rho_i: Function, rho_o: Function):
        self.bdd = bdd
        self.inputs = list(inputs)
        self.outputs = list(outputs)
        self.theta_i, self.theta_o = theta_i, theta_o
        self.rho_i, self.rho_o = rho_i, rho_o
        if set(self.inputs) & set(self.outputs):
            raise SeparationError("a variable is both input and output")

    # variable lists ---------------------------------------------------
    @cached_property
    def X(self) -> List[str]:
        return self.inputs + self.outputs

    @cached_property
    def Xp(self) -> List[str]:
        return [v + "'" for v in self.X]

    @cached_property
    def Xa(self) -> List[str]:
        return [v + "''" for v in self.X]

    @cached_property
    def Ip(self) -> List[str]:
        return [v + "'" for v in self.inputs]

    @cached_property
    def Op(self) -> List[str]:
        return [v + "'" for v in self.outputs]

    @cached_property
    def Oa(self) -> List[str]:
        return [v + "''" for v in self.outputs]

    def prime_map(self, names: Optional[Sequence[str]] = None) -> Dict[str, str]:
        return {v: v + "'" for v in (self.X if names is None else names)}

    def unprime_map(self, names: Optional[Sequence[str]] = None) -> Dict[str, str]:
        return {v + "'": v for v in (self.X if names is None else names)}

    @cached_property
    def trans(self) -> Function:
        return self.rho_i & self.rho_o

    @property
    def N(self) -> int:
        return 1 << (len(self.inputs) + len(self.outputs))

    @cached_property
    def separated(self) -> bool:
        return not _separation_violations(self, None)


def state_space_size(game) -> int:
    """Nominal state count ``2^(|I|+|O|)``."""
    g = game.structure if isinstance(game, SeparatedGame) else game
    return g.N


@dataclass
class Conjunct:
    assumptions: List[Function]
    guarantees: List[Function]


@dataclass
class GRkCondition:
    conjuncts: List[Conjunct] = field(default_factory=list)

    @property
    def k(self) -> int:
        return len(self.conjuncts)

    @property
    def size(self) -> int:
        """``|phi|``: total number of assumptions and guarantees."""
        return sum(len(c.assumptions) + len(c.guarantees) for c in self.conjuncts)

    def guarantee_list(self) -> List[Function]:
        """All guarantees flattened in declaration order."""
        return [g for c in self.conjuncts for g in c.guarantees]


@dataclass
class SeparatedGame:
    structure: GameStructure
    condition: GRkCondition
    text: Optional["SpecText"] = None

    @property
    def bdd(self) -> BDD:
        return self.structure.bdd

    @property
    def N(self) -> int:
        return self.structure.N

    @property
    def registry(self):
        return self.structure.bdd.registry


# ----------------------------------------------------------------------
# validation
@dataclass
class ValidationReport:
    separated: bool
    deadlock_free: bool
    witnesses: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.separated and self.deadlock_free


def _separation_violations(g: GameStructure, cond: Optional[GRkCondition]) -> List[Tuple[str, str]]:
    bdd = g.bdd
    I, O = set(g.inputs), set(g.outputs)
    Ip, Op = {v + "'" for v in I}, {v + "'" for v in O}
    checks = [("INIT_ENV", g.theta_i, I), ("INIT_SYS", g.theta_o, O),
              ("TRANS_ENV", g.rho_i, I | Ip), ("TRANS_SYS", g.rho_o, O | Op)]
    if cond is not None:
        for l, c in enumerate(cond.conjuncts):
            checks += [(f"assumption {l}.{i}", a, I) for i, a in enumerate(c.assumptions)]
            checks += [(f"guarantee {l}.{j}", x, O) for j, x in enumerate(c.guarantees)]
    out = []
    for where, f, allowed in checks:
        for name in bdd.support(f):
            if name not in allowed:
                out.append((where, name))
    return out


def deadlock_witnesses(g: GameStructure) -> List[Tuple[str, Dict[str, bool]]]:
    """States where a player has no legal move, one witness per player."""
    bdd = g.bdd
    out = []
    env_ok = bdd.exists(g.Ip, g.rho_i)
    if not env_ok.is_true:
        out.append(("environment", bdd.pick_one(~env_ok, g.X)))
    sys_ok = bdd.forall(g.Ip, g.rho_i.implies(bdd.exists(g.Op, g.rho_o)))
    if not sys_ok.is_true:
        out.append(("system", bdd.pick_one(~sys_ok, g.X)))
    return out


def validate(game) -> ValidationReport:
    """Separation and deadlock-freedom report; never raises."""
    if isinstance(game, SeparatedGame):
        g, cond = game.structure, game.condition
    else:
        g, cond = game, None
    sep = _separation_violations(g, cond)
    dead = deadlock_witnesses(g)
    witnesses = [f"{where} mentions {name}" for where, name in sep]
    witnesses += [f"{player} deadlocks at {_bits(w, g.X)}" for player, w in dead]
    return ValidationReport(separated=not sep, deadlock_free=not dead, witnesses=witnesses)


def _bits(assignment: Dict[str, bool], names: Sequence[str]) -> str:
    return "".join("1" if assignment.get(n, False) else "0" for n in names)


# ----------------------------------------------------------------------
# text model
@dataclass
class SpecText:
    inputs: List[str]
    outputs: List[str]
    init_env: Formula = TRUE
    init_sys: Formula = TRUE
    trans_env: Formula = TRUE
    trans_sys: Formula = TRUE
    grk: List[Tuple[List[Formula], List[Formula]]] = field(default_factory=list)
    comment: str = ""

    @property
    def num_vars(self) -> int:
        return len(self.inputs) + len(self.outputs)

    def build(self, bdd: Optional[BDD] = None, require_separated: bool = True) -> SeparatedGame:
        """Compile into a kernel and validate; raises on any defect."""
        self.check_syntax()
        if bdd is None:
            bdd = BDD()
        for v in self.inputs:
            bdd.declare(v, "input")
        for v in self.outputs:
            bdd.declare(v, "output")
        c = lambda f: compile_formula(f, bdd)  # noqa: E731
        g = GameStructure(bdd, self.inputs, self.outputs, c(self.init_env), c(self.init_sys),
                          c(self.trans_env), c(self.trans_sys))
        cond = GRkCondition([Conjunct([c(a) for a in asm], [c(x) for x in gar])
                             for asm, gar in self.grk])
        # the mixed initial condition is rejected even for general games
        extra = [n for n in bdd.support(g.theta_o) if n not in self.outputs]
        if extra:
            raise SeparationError(f"INIT_SYS must mention outputs only; found {extra[0]}", extra[0])
        viol = _separation_violations(g, cond)
        if require_separated and viol:
            where, name = viol[0]
            raise SeparationError(f"{where} mentions {name}, which breaks variable separation", name)
        for label, f in (("INIT_ENV", g.theta_i), ("INIT_SYS", g.theta_o)):
            if f.is_false:
                raise InitError(f"{label} is unsatisfiable")
        dead = deadlock_witnesses(g)
        if dead:
            player, w = dead[0]
            raise DeadlockError(f"{player} has no move from state {_bits(w, g.X)} "
                                f"({' '.join(g.X)})", player, w)
        return SeparatedGame(g, cond, self)

    def check_syntax(self) -> None:
        names = self.inputs + self.outputs
        for n in names:
            if not _IDENT.match(n) or n in _RESERVED:
                raise SpecSyntaxError(f"bad variable name {n!r}")
        if len(set(names)) != len(names):
            dup = next(n for n in names if names.count(n) > 1)
            raise SpecSyntaxError(f"variable {dup!r} declared twice")
        known = set(names)
        for label, f, primes in (("INIT_ENV", self.init_env, False), ("INIT_SYS", self.init_sys, False),
                                 ("TRANS_ENV", self.trans_env, True), ("TRANS_SYS", self.trans_sys, True)):
            _check_vars(label, f, known, primes)
        for l, (asm, gar) in enumerate(self.grk):
            for f in asm + gar:
                _check_vars(f"GRK block {l + 1}", f, known, False)


def _check_vars(label: str, f: Formula, known: set, primes_ok: bool) -> None:
    for name in variables(f):
        base = name[:-1] if name.endswith("'") else name
        if base not in known:
            raise SpecSyntaxError(f"{label}: unknown variable {base!r}")
        if name.endswith("'") and not primes_ok:
            raise SpecSyntaxError(f"{label}: primed variable {name!r} not allowed here")


_SECTIONS = ["INPUT_VARS", "OUTPUT_VARS", "INIT_ENV", "INIT_SYS", "TRANS_ENV", "TRANS_SYS"]
_HEADER = re.compile(r"\s*([A-Z_]+)\s*:(.*)\Z")
_GF = re.compile(r"GF\s*\(")


def _strip_comment(line: str) -> str:
    k = line.find("#")
    return line if k < 0 else line[:k]


def _split_gf(body: str, lineno: int, col0: int) -> List[Formula]:
    """Parse a run of ``GF(...)`` items separated by whitespace."""
    out = []
    pos = 0
    while True:
        while pos < len(body) and body[pos].isspace():
            pos += 1
        if pos >= len(body):
            return out
        m = _GF.match(body, pos)
        if not m:
            raise SpecSyntaxError("expected GF(...)", lineno, col0 + pos)
        depth, k = 1, m.end()
        while k < len(body) and depth:
            depth += {"(": 1, ")": -1}.get(body[k], 0)
            k += 1
        if depth:
            raise SpecSyntaxError("unbalanced parenthesis in GF(...)", lineno, col0 + pos)
        inner = body[m.end():k - 1]
        out.append(parse_formula(inner, lineno, col0 + m.end()))
        pos = k


def parse_spec_text(text: str) -> SpecText:
    """Parse ``.sgrk`` text into formula trees (no kernel involved)."""
    if text.startswith("﻿"):
        text = text[1:]
    seen: Dict[str, Tuple[str, int, int]] = {}
    grk: List[Tuple[List[Formula], List[Formula]]] = []
    current: Optional[str] = None
    order = 0
    comment_lines = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        stripped = raw.strip()
        if stripped.startswith("#") and not seen and not grk:
            comment_lines.append(stripped[1:].strip())
        line = _strip_comment(raw)
        if not line.strip():
            continue
        m = _HEADER.match(line)
        if m and (m.group(1) in _SECTIONS or m.group(1) in ("GRK", "ASSUME", "GUARANTEE")):
            key, body = m.group(1), m.group(2)
            col0 = m.start(2) + 1
            if key in _SECTIONS:
                if grk:
                    raise SpecSyntaxError(f"{key} after GRK blocks", lineno, 1)
                idx = _SECTIONS.index(key)
                if key in seen:
                    raise SpecSyntaxError(f"duplicate section {key}", lineno, 1)
                if idx < order:
                    raise SpecSyntaxError(f"section {key} out of order", lineno, 1)
                order = idx
                seen[key] = (body, lineno, col0)
                current = key
            elif key == "GRK":
                if body.strip():
                    raise SpecSyntaxError("GRK: takes no argument", lineno, col0)
                grk.append(([], []))
                current = "GRK"
            else:
                if not grk:
                    raise SpecSyntaxError(f"{key} outside a GRK block", lineno, 1)
                items = _split_gf(body, lineno, col0)
                grk[-1][0 if key == "ASSUME" else 1].extend(items)
                current = key
            continue
        # continuation line of a multi-line section
        if current in _SECTIONS:
            body, ln, c0 = seen[current]
            seen[current] = (body + "\n" + line, ln, c0)
        elif current in ("ASSUME", "GUARANTEE"):
            grk[-1][0 if current == "ASSUME" else 1].extend(_split_gf(line, lineno, 1))
        else:
            raise SpecSyntaxError(f"unexpected text {line.strip()[:20]!r}", lineno, 1)
    for key in ("INPUT_VARS", "OUTPUT_VARS"):
        if key not in seen:
            raise SpecSyntaxError(f"missing section {key}")
    inputs = seen["INPUT_VARS"][0].split()
    outputs = seen["OUTPUT_VARS"][0].split()

    def formula(key):
        if key not in seen:
            return TRUE
        body, ln, c0 = seen[key]
        # keep line numbers meaningful for multi-line bodies
        lines = body.split("\n")
        joined = " ".join(lines)
        if not joined.strip():
            raise SpecSyntaxError(f"empty section {key}", ln, c0)
        return parse_formula(joined, ln, c0)

    spec = SpecText(inputs, outputs, formula("INIT_ENV"), formula("INIT_SYS"),
                    formula("TRANS_ENV"), formula("TRANS_SYS"), grk,
                    comment="\n".join(comment_lines))
    spec.check_syntax()
    return spec


def parse_spec(text: str, require_separated: bool = True, bdd: Optional[BDD] = None) -> SeparatedGame:
    """Parse and validate a specification document."""
    return parse_spec_text(text).build(bdd, require_separated=require_separated)


def print_spec(spec) -> str:
    """Canonical text of a specification (idempotent under re-parsing)."""
    if isinstance(spec, SeparatedGame):
        if spec.text is None:
            raise ValueError("game has no text form")
        spec = spec.text
    out = []
    if spec.comment:
        out += ["# " + c if c else "#" for c in spec.comment.split("\n")]
    out.append("INPUT_VARS: " + " ".join(spec.inputs))
    out.append("OUTPUT_VARS: " + " ".join(spec.outputs))
    out.append("INIT_ENV: " + show(spec.init_env))
    out.append("INIT_SYS: " + show(spec.init_sys))
    out.append("TRANS_ENV: " + show(spec.trans_env))
    out.append("TRANS_SYS: " + show(spec.trans_sys))
    for asm, gar in spec.grk:
        out.append("GRK:")
        if asm:
            out.append("  ASSUME: " + " ".join(f"GF({show(a)})" for a in asm))
        if gar:
            out.append("  GUARANTEE: " + " ".join(f"GF({show(g)})" for g in gar))
    return "\n".join(out) + "\n"
