"""Parametric benchmark families and seeded random games.

Families
--------
``multimode(n)``
    ``2^n`` modes.  The environment leaves mode 0 once, to any mode, and then
    stays.  The system starts in mode 0, may go from 0 to any odd mode, and
    otherwise toggles between ``2i`` and ``2i+1``.  One conjunct per mode
    ``v``: ``GF(t = v) -> GF(a = v)``.  ``2n`` variables.

``cleaning(n)``
    Two robots walk a corridor of ``n`` rooms (one-hot positions).  The
    environment robot may clean each room it enters, reaches the last room
    and then toggles ``done`` forever.  The system robot follows and must
    clean exactly the rooms the first robot skipped.  ``4n+1`` variables.

``railways(n, m)``
    ``n`` rails with signals and saturating step counters of
    ``ceil(log2 m)`` bits on both sides.  The environment raises at most one
    signal at a time; the system must raise a maximal non-overlapping set.
    ``(2 + 2 ceil(log2 m)) n`` variables.
"""

from __future__ import annotations

import math
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .dd import BDD, Function
from .formula import FALSE, TRUE, Formula, conj, disj, eq_bits, iff, implies, lit, neg, var
from .spec import Conjunct, GameStructure, GRkCondition, SeparatedGame, SpecText

__all__ = ["multimode", "cleaning", "railways", "generate", "FAMILIES", "benchmark_grid",
           "expected_var_count", "gen_random_grk", "gen_random_weak_buchi", "random_cube_table",
           "overlaps"]


def _same(names: Sequence[str]) -> Formula:
    return conj(iff(var(v + "'"), var(v)) for v in names)


def _exactly_one(names: Sequence[str], primed: bool = False) -> Formula:
    s = "'" if primed else ""
    return disj(conj(lit(w + s, w == v) for w in names) for v in names)


def _at_most_one(names: Sequence[str], primed: bool = False) -> Formula:
    s = "'" if primed else ""
    return conj(neg(var(a + s)) | neg(var(b + s))
                for k, a in enumerate(names) for b in names[k + 1:])


# ----------------------------------------------------------------------
def multimode(n: int) -> SpecText:
    if n < 1:
        raise ValueError("multimode needs n >= 1")
    t = [f"t{k}" for k in reversed(range(n))]
    a = [f"a{k}" for k in reversed(range(n))]
    t_zero, a_zero = eq_bits(t, 0), eq_bits(a, 0)
    trans_env = t_zero | _same(t)
    toggle = conj([_same(a[:-1]), iff(var(a[-1] + "'"), neg(var(a[-1])))]) if n > 1 else \
        iff(var(a[-1] + "'"), neg(var(a[-1])))
    trans_sys = (a_zero & var(a[-1] + "'")) | (neg(a_zero) & toggle)
    grk = [([eq_bits(t, v)], [eq_bits(a, v)]) for v in range(1 << n)]
    return SpecText(t, a, t_zero, a_zero, trans_env, trans_sys, grk,
                    comment=f"multimode n={n}")


def cleaning(n: int) -> SpecText:
    if n < 1:
        raise ValueError("cleaning needs n >= 1")
    rooms = range(1, n + 1)
    ip = [f"in_pos{k}" for k in rooms]
    ic = [f"in_clean{k}" for k in rooms]
    op = [f"out_pos{k}" for k in rooms]
    oc = [f"out_clean{k}" for k in rooms]
    inputs = [x for k in range(n) for x in (ip[k], ic[k])] + ["done"]
    outputs = [x for k in range(n) for x in (op[k], oc[k])]

    def walker(pos, clean, extra_last=None):
        valid = _exactly_one(pos)
        moves = []
        for k in range(n):
            here = var(pos[k])
            if k < n - 1:
                stay = _same(pos) & _same(clean)
                enter = conj([eq_one(pos, k + 1, True), _same(clean[:k + 1] + clean[k + 2:])])
                moves.append(implies(here, stay | enter))
            else:
                last = _same(pos) & _same(clean)
                if extra_last is not None:
                    last = last & extra_last
                moves.append(implies(here, last))
        return valid, conj(moves)

    def eq_one(pos, k, primed):
        s = "'" if primed else ""
        return conj(lit(p + s, j == k) for j, p in enumerate(pos))

    valid_in, moves_in = walker(ip, ic, iff(var("done'"), neg(var("done"))))
    not_done = implies(neg(var(ip[-1])), neg(var("done'")))
    trans_env = neg(valid_in) | (moves_in & not_done)
    valid_out, moves_out = walker(op, oc)
    trans_sys = neg(valid_out) | moves_out
    init_env = conj([eq_one(ip, 0, False)] + [neg(var(c)) for c in ic[1:]] + [neg(var("done"))])
    init_sys = conj([eq_one(op, 0, False)] + [neg(var(c)) for c in oc[1:]])
    grk = []
    for k in range(n):
        grk.append(([var("done"), neg(var(ic[k]))], [var(oc[k])]))
        grk.append(([var("done"), var(ic[k])], [neg(var(oc[k]))]))
    return SpecText(inputs, outputs, init_env, init_sys, trans_env, trans_sys, grk,
                    comment=f"cleaning n={n}")


def overlaps(n: int) -> List[Tuple[int, int]]:
    """Rail pairs (0-based) sharing a window ``2k+1 .. 2k+4`` (1-based)."""
    out = set()
    for start in range(1, n + 1, 2):
        window = [r for r in range(start, start + 4) if r <= n]
        for x in window:
            for y in window:
                if x < y:
                    out.add((x - 1, y - 1))
    return sorted(out)


def _counter(bits: Sequence[str], sig: str, cap: int) -> Formula:
    """Next counter value: 0 when the signal is raised, else saturating increment."""
    reset = implies(var(sig + "'"), eq_bits(bits, 0, primed=True))
    incs = [implies(eq_bits(bits, v), eq_bits(bits, min(v + 1, cap), primed=True))
            for v in range(cap + 1)]
    return reset & implies(neg(var(sig + "'")), conj(incs))


def _below(bits: Sequence[str], bound: int) -> Formula:
    """Counter value strictly below ``bound``."""
    return disj(eq_bits(bits, v) for v in range(min(bound, 1 << len(bits))))


def railways(n: int, m: int) -> SpecText:
    if n < 2:
        raise ValueError("railways needs n >= 2")
    if m < 2:
        raise ValueError("railways needs m >= 2")
    b = max(1, math.ceil(math.log2(m)))
    cap = (1 << b) - 1
    rails = range(1, n + 1)
    isig = [f"in_sig{r}" for r in rails]
    osig = [f"out_sig{r}" for r in rails]
    icnt = [[f"in_cnt{r}_{k}" for k in reversed(range(b))] for r in rails]
    ocnt = [[f"out_cnt{r}_{k}" for k in reversed(range(b))] for r in rails]
    inputs = [x for r in range(n) for x in [isig[r]] + icnt[r]]
    outputs = [x for r in range(n) for x in [osig[r]] + ocnt[r]]
    nbr = {r: set() for r in range(n)}
    for x, y in overlaps(n):
        nbr[x].add(y)
        nbr[y].add(x)

    def maximal(primed):
        s = "'" if primed else ""
        return conj(iff(var(osig[r] + s), conj(neg(var(osig[q] + s)) for q in sorted(nbr[r])))
                    for r in range(n))

    trans_env = conj([_at_most_one(isig, primed=True)] + [_counter(icnt[r], isig[r], cap) for r in range(n)])
    trans_sys = conj([maximal(True)] + [_counter(ocnt[r], osig[r], cap) for r in range(n)])
    init_env = conj([neg(var(s)) for s in isig] + [eq_bits(c, 0) for c in icnt])
    init_sys = conj([maximal(False)] + [eq_bits(c, 0) for c in ocnt])
    grk = []
    for r in range(n):
        grk.append(([var(isig[r])], [var(osig[r])]))
        grk.append(([_below(icnt[r], m - 1)], [_below(ocnt[r], m - 1)]))
    return SpecText(inputs, outputs, init_env, init_sys, trans_env, trans_sys, grk,
                    comment=f"railways n={n} m={m}")


FAMILIES = {"multimode": multimode, "cleaning": cleaning, "railways": railways}


def generate(family: str, n: int, m: Optional[int] = None) -> SpecText:
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
    if family == "railways":
        return railways(n, 2 if m is None else m)
    if m is not None:
        raise ValueError(f"{family} takes no m parameter")
    return FAMILIES[family](n)


def expected_var_count(family: str, n: int, m: Optional[int] = None) -> int:
    if family == "multimode":
        return 2 * n
    if family == "cleaning":
        return 4 * n + 1
    return (2 + 2 * math.ceil(math.log2(m))) * n


def benchmark_grid() -> List[Tuple[str, int, Optional[int]]]:
    """MultiMode(1..8), Cleaning(1..6), Railways(2..5, m in {2, 3})."""
    grid = [("multimode", n, None) for n in range(1, 9)]
    grid += [("cleaning", n, None) for n in range(1, 7)]
    grid += [("railways", n, m) for n in range(2, 6) for m in (2, 3)]
    return grid


# ----------------------------------------------------------------------
# random instances
def random_cube_table(rng: np.random.Generator, nvars: int, max_lits: int = 3) -> np.ndarray:
    """Truth table of a random conjunction of literals."""
    k = int(rng.integers(0, min(max_lits, nvars) + 1))
    chosen = rng.choice(nvars, size=k, replace=False) if k else []
    idx = np.arange(1 << nvars)
    tab = np.ones(1 << nvars, dtype=bool)
    for v in chosen:
        pol = bool(rng.integers(0, 2))
        bit = (idx >> (nvars - 1 - int(v))) & 1
        tab &= bit == pol
    return tab


def _random_graph(rng: np.random.Generator, n: int, layered: bool) -> np.ndarray:
    p = rng.uniform(0.2, 0.8)
    adj = rng.random((n, n)) < p
    if layered:
        perm = rng.permutation(n)
        rank = np.empty(n, dtype=int)
        rank[perm] = np.arange(n)
        adj &= rank[:, None] <= rank[None, :]
    dead = ~adj.any(axis=1)
    adj[dead, dead] = True
    return adj


def _declare(bdd: BDD, ni: int, no: int) -> Tuple[List[str], List[str]]:
    inputs = [f"i{k}" for k in range(ni)]
    outputs = [f"o{k}" for k in range(no)]
    for v in inputs:
        bdd.declare(v, "input")
    for v in outputs:
        bdd.declare(v, "output")
    return inputs, outputs


SIDE_CAP = 7


def _split(rng: np.random.Generator, n_vars: Optional[int], lo: int = 2, hi: int = 10) -> Tuple[int, int]:
    """Variable split with at most ``SIDE_CAP`` variables per player.

    A dense random graph over more than 128 valuations is close to
    incompressible and dominates the random suite's run time.
    """
    n = int(rng.integers(lo, hi + 1)) if n_vars is None else n_vars
    ni = int(rng.integers(max(1, n - SIDE_CAP), min(n - 1, SIDE_CAP) + 1))
    return ni, n - ni


def gen_random_grk(seed: int, n_vars: Optional[int] = None, layered: Optional[bool] = None,
                   bdd: Optional[BDD] = None) -> SeparatedGame:
    """A seeded random separated GR(k) game with at most 10 variables."""
    rng = np.random.default_rng(seed)
    ni, no = _split(rng, n_vars)
    if layered is None:
        layered = bool(rng.integers(0, 2))
    bdd = bdd or BDD()
    inputs, outputs = _declare(bdd, ni, no)
    Ip, Op = [v + "'" for v in inputs], [v + "'" for v in outputs]
    env = _random_graph(rng, 1 << ni, layered)
    sys_ = _random_graph(rng, 1 << no, layered)
    g = GameStructure(bdd, inputs, outputs,
                      bdd.from_table(random_cube_table(rng, ni), inputs),
                      bdd.from_table(random_cube_table(rng, no), outputs),
                      bdd.from_table(env, inputs + Ip), bdd.from_table(sys_, outputs + Op))
    conjuncts = []
    for _ in range(int(rng.integers(0, 4))):
        asm = [bdd.from_table(random_cube_table(rng, ni), inputs) for _ in range(int(rng.integers(0, 3)))]
        gar = [bdd.from_table(random_cube_table(rng, no), outputs) for _ in range(int(rng.integers(0, 3)))]
        conjuncts.append(Conjunct(asm, gar))
    return SeparatedGame(g, GRkCondition(conjuncts))


def gen_random_weak_buchi(seed: int, n_vars: Optional[int] = None, separated: bool = True,
                          layered: Optional[bool] = None, bdd: Optional[BDD] = None
                          ) -> Tuple[GameStructure, Function]:
    """A seeded random game structure with an SCC-closed acceptance set.

    Separated structures have at most 8 variables.  General (non-separated)
    ones let both players' moves depend on the whole state and have at most 6.
    """
    from .oracle import enumerate_game  # local: oracle imports spec only

    rng = np.random.default_rng(seed)
    ni, no = _split(rng, n_vars, hi=8 if separated else 6)
    if layered is None:
        layered = bool(rng.integers(0, 2))
    bdd = bdd or BDD()
    inputs, outputs = _declare(bdd, ni, no)
    X = inputs + outputs
    Ip, Op = [v + "'" for v in inputs], [v + "'" for v in outputs]
    nI, nO = 1 << ni, 1 << no
    theta_i = bdd.from_table(random_cube_table(rng, ni), inputs)
    theta_o = bdd.from_table(random_cube_table(rng, no), outputs)
    if separated:
        rho_i = bdd.from_table(_random_graph(rng, nI, layered), inputs + Ip)
        rho_o = bdd.from_table(_random_graph(rng, nO, layered), outputs + Op)
    else:
        nS = nI * nO
        p_env, p_sys = rng.uniform(0.2, 0.8, size=2)
        env = rng.random((nS, nI)) < p_env
        sys_ = rng.random((nS, nI, nO)) < p_sys
        if layered:
            rank = rng.permutation(nS)
            nxt_rank = rank.reshape(nI, nO)
            sys_ &= rank[:, None, None] <= nxt_rank[None, :, :]
        for s in np.flatnonzero(~env.any(axis=1)):
            env[s, int(rng.integers(0, nI))] = True
        for s, i in zip(*np.nonzero(~sys_.any(axis=2))):
            sys_[s, i, int(rng.integers(0, nO))] = True
        rho_i = bdd.from_table(env, X + Ip)
        rho_o = bdd.from_table(sys_, X + Ip + Op)
    g = GameStructure(bdd, inputs, outputs, theta_i, theta_o, rho_i, rho_o)
    eg = enumerate_game(g, cap=1 << 10)
    lab = rng.random(eg.n_scc) < 0.5
    acc = bdd.from_table(lab[eg.scc_id], X)
    return g, acc
