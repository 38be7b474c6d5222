"""Reachability, safety and weak-Büchi games on a symbolic game structure.

Turn order inside one step: from state ``(i, o)`` the environment picks
``i'`` allowed by ``rho_I``, then the system picks ``o'`` allowed by
``rho_O``.  The controllable predecessor of ``Z`` is therefore::

    pre_s(Z) = forall I'. rho_I -> exists O'. rho_O & Z(X')

Strategies are relations over ``X, I', O'`` and may be nondeterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

from .dd import Function
from .errors import NotWeakError, SGRKError
from .graph import GraphPredicates, Space, build_graph, dc_step
from .spec import GameStructure

__all__ = ["SubgameResult", "WeakBuchiSolution", "cpre", "solve_reachability", "solve_safety",
           "solve_weak_buchi", "check_realizable", "check_weak"]


@dataclass
class SubgameResult:
    win: Function
    strat: Function
    rounds: int = 0


@dataclass
class WeakBuchiSolution:
    win: Function
    fb: Function
    iterations: int
    ops_used: int
    preds: GraphPredicates
    layer_ops: List[int] = field(default_factory=list)
    layer_sizes: List[int] = field(default_factory=list)


def game_space(game: GameStructure) -> Space:
    return Space(game.bdd, game.X)


def cpre(game: GameStructure, z: Function) -> Function:
    """States from which the system can force the next state into ``z``."""
    bdd = game.bdd
    zp = bdd.rename(z, game.prime_map())
    sys_ok = bdd.and_exists(game.rho_o, zp, game.Op)
    return bdd.forall(game.Ip, bdd.apply("implies", game.rho_i, sys_ok))


def _moves_into(game: GameStructure, z: Function) -> Function:
    """Relation ``rho_I -> (rho_O & z(X'))``."""
    bdd = game.bdd
    zp = bdd.rename(z, game.prime_map())
    return bdd.apply("implies", game.rho_i, bdd.apply("and", game.rho_o, zp))


def solve_reachability(game: GameStructure, source: Function, target: Function) -> SubgameResult:
    """Attractor of ``target`` through ``source``.

    ``win`` is the part of ``source`` from which ``target`` can be forced; the
    strategy moves from rank ``k+1`` to rank ``k``.
    """
    bdd = game.bdd
    z = target
    strat = bdd.apply("and", bdd.apply("and", source, target),
                      bdd.apply("implies", game.rho_i, game.rho_o))
    rounds = 0
    while True:
        grown = bdd.apply("or", z, bdd.apply("and", source, cpre(game, z)))
        layer = bdd.apply("and", grown, bdd.negate(z))
        rounds += 1
        if layer.is_false:
            break
        strat = bdd.apply("or", strat, bdd.apply("and", layer, _moves_into(game, z)))
        z = grown
    return SubgameResult(bdd.apply("and", z, source), strat, rounds)


def solve_safety(game: GameStructure, source: Function, safe: Function) -> SubgameResult:
    """Greatest set inside ``safe`` the system can stay in forever."""
    bdd = game.bdd
    z = safe
    rounds = 0
    while True:
        shrunk = bdd.apply("and", z, cpre(game, z))
        rounds += 1
        if shrunk == z:
            break
        z = shrunk
    win = bdd.apply("and", z, source)
    strat = bdd.apply("and", win, _moves_into(game, z))
    return SubgameResult(win, strat, rounds)


def check_weak(space: Space, scc: Function, acc: Function) -> None:
    """Raise :class:`NotWeakError` when ``acc`` splits an SCC."""
    bdd = space.bdd
    split = bdd.apply("and", scc, bdd.apply("xor", acc, space.prime(acc)))
    if not split.is_false:
        w = bdd.pick_one(split, space.cur + space.pri)
        raise NotWeakError("acceptance set splits an SCC", witness=w)


def solve_weak_buchi(game: GameStructure, acc: Function,
                     preds: Optional[GraphPredicates] = None) -> WeakBuchiSolution:
    """Winning region and memoryless strategy for ``G F acc`` with SCC-closed ``acc``.

    SCCs are peeled in layers of downward-closed sets starting from the
    terminal SCCs.  In each new layer, non-accepting states must be able to
    force the previous winning region, accepting states must be able to stay
    in their layer or the previous winning region.
    """
    bdd = game.bdd
    start_ops = bdd.ops.count
    space = game_space(game)
    if preds is None:
        preds = build_graph(space, game.trans)
    check_weak(space, preds.scc, acc)

    dc = preds.terminal
    win = bdd.apply("and", dc, acc)
    fb = bdd.apply("and", dc, bdd.apply("implies", game.rho_i, game.rho_o))
    iterations = 0
    cap = game.N
    layer_ops, layer_sizes = [], []
    while not dc.is_true:
        before = bdd.ops.count
        nxt = dc_step(space, preds, dc)
        new = bdd.apply("and", nxt, bdd.negate(dc))
        if new.is_false:
            raise SGRKError("downward-closed layering stalled before covering all states")
        non_acc = bdd.apply("and", new, bdd.negate(acc))
        is_acc = bdd.apply("and", new, acc)
        r = solve_reachability(game, non_acc, win)
        s = solve_safety(game, is_acc, bdd.apply("or", is_acc, win))
        fb = bdd.apply("or", fb, bdd.apply("or", bdd.apply("and", non_acc, r.strat),
                                           bdd.apply("and", is_acc, s.strat)))
        win = bdd.apply("or", win, bdd.apply("or", r.win, s.win))
        dc = nxt
        iterations += 1
        layer_ops.append(bdd.ops.count - before)
        layer_sizes.append(bdd.sat_count(new, space.cur))
        if iterations > cap:
            raise SGRKError("weak-Büchi fixed point exceeded its iteration cap")
    return WeakBuchiSolution(win, fb, iterations, bdd.ops.count - start_ops, preds,
                             layer_ops, layer_sizes)


def check_realizable(game: GameStructure, win: Function) -> bool:
    """``forall I. theta_I -> exists O. theta_O & win``."""
    bdd = game.bdd
    inner = bdd.exists(game.outputs, bdd.apply("and", game.theta_o, win))
    return bdd.forall(game.inputs, bdd.apply("implies", game.theta_i, inner)).is_true
