"""Strict-semantics LTL export and a lasso evaluator for the emitted formulas."""

from __future__ import annotations

from typing import Dict, List, Mapping, Sequence

from .formula import TRUE, Formula, conj, implies, neg, parse_formula, show

__all__ = ["to_next", "export_ltl", "parse_ltl", "eval_lasso"]


def _X(f: Formula) -> Formula:
    return Formula("X", (f,))


def _G(f: Formula) -> Formula:
    return Formula("G", (f,))


def _F(f: Formula) -> Formula:
    return Formula("F", (f,))


def to_next(f: Formula) -> Formula:
    """Rewrite primed atoms ``v'`` as ``X v``."""
    if f.op == "var":
        name = f.args[0]
        return _X(Formula("var", (name[:-1],))) if name.endswith("'") else f
    if f.op == "const":
        return f
    return Formula(f.op, tuple(to_next(a) for a in f.args))


def export_ltl(spec) -> str:
    """``theta_I -> (theta_O & (rho_O W !rho_I) & (G rho_I -> phi))``.

    ``spec`` is a :class:`~sgrk.spec.SpecText` (or a game carrying one).
    """
    text = getattr(spec, "text", None) or spec
    rho_i, rho_o = to_next(text.trans_env), to_next(text.trans_sys)
    conjuncts = []
    for asm, gar in text.grk:
        lhs = conj(_G(_F(a)) for a in asm)
        rhs = conj(_G(_F(g)) for g in gar)
        conjuncts.append(implies(lhs, rhs))
    phi = conj(conjuncts)
    safety = Formula("W", (rho_o, neg(rho_i)))
    body = conj([text.init_sys, safety, implies(_G(rho_i), phi)])
    return show(implies(text.init_env, body)) + "\n"


def parse_ltl(text: str) -> Formula:
    return parse_formula(text.strip(), temporal=True)


def eval_lasso(f: Formula, prefix: Sequence[Mapping[str, bool]], loop: Sequence[Mapping[str, bool]]) -> bool:
    """Truth of ``f`` at position 0 of the word ``prefix . loop^omega``."""
    word = list(prefix) + list(loop)
    n = len(word)
    if not loop:
        raise ValueError("lasso needs a non-empty loop")
    start = len(prefix)
    succ = [k + 1 for k in range(n - 1)] + [start]
    memo: Dict[Formula, List[bool]] = {}

    def sat(g: Formula) -> List[bool]:
        r = memo.get(g)
        if r is not None:
            return r
        op = g.op
        if op == "const":
            r = [g.args[0]] * n
        elif op == "var":
            r = [bool(w[g.args[0]]) for w in word]
        elif op == "not":
            r = [not x for x in sat(g.args[0])]
        elif op in ("and", "or", "implies", "iff"):
            a, b = sat(g.args[0]), sat(g.args[1])
            fn = {"and": lambda x, y: x and y, "or": lambda x, y: x or y,
                  "implies": lambda x, y: (not x) or y, "iff": lambda x, y: x == y}[op]
            r = [fn(x, y) for x, y in zip(a, b)]
        elif op == "X":
            a = sat(g.args[0])
            r = [a[succ[k]] for k in range(n)]
        elif op in ("U", "F"):
            a = [True] * n if op == "F" else sat(g.args[0])
            b = sat(g.args[-1])
            r = list(b)
            changed = True
            while changed:
                changed = False
                for k in range(n):
                    if not r[k] and a[k] and r[succ[k]]:
                        r[k] = changed = True
        elif op in ("W", "G"):
            a = sat(g.args[0])
            b = [False] * n if op == "G" else sat(g.args[1])
            r = [x or y for x, y in zip(a, b)]
            changed = True
            while changed:
                changed = False
                for k in range(n):
                    if r[k] and not b[k] and not r[succ[k]]:
                        r[k] = False
                        changed = True
        else:
            raise ValueError(f"unknown operator {op}")
        memo[g] = r
        return r

    return sat(f)[0]
