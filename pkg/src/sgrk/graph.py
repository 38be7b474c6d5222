"""Symbolic game-graph predicates: reachability, SCCs, terminal SCCs.

All relations are over a *space*: a list of current-state variables ``X``
together with their primed copies ``X'`` (successor) and auxiliary copies
``X''`` (intermediate state of a relational product).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

from .dd import BDD, Function
from .errors import SGRKError

__all__ = ["Space", "GraphPredicates", "build_reach", "build_reach_inv", "build_scc",
           "build_terminal", "dc_step", "build_graph", "is_scc_saturated", "identity"]


class Space:
    """Variable bookkeeping for relations over ``X`` and ``X'``."""

    def __init__(self, bdd: BDD, names: Sequence[str]):
        self.bdd = bdd
        self.cur = list(names)
        self.pri = [v + "'" for v in self.cur]
        self.aux = [v + "''" for v in self.cur]
        self.to_pri = dict(zip(self.cur, self.pri))
        self.to_cur = dict(zip(self.pri, self.cur))
        self.cur_to_aux = dict(zip(self.cur, self.aux))
        self.pri_to_aux = dict(zip(self.pri, self.aux))
        swap = dict(self.to_pri)
        swap.update(self.to_cur)
        self.swap = swap

    def prime(self, f: Function) -> Function:
        return self.bdd.rename(f, self.to_pri)

    def unprime(self, f: Function) -> Function:
        return self.bdd.rename(f, self.to_cur)


def identity(space: Space) -> Function:
    """The relation ``X = X'``."""
    bdd = space.bdd
    r = bdd.true
    for v, vp in zip(reversed(space.cur), reversed(space.pri)):
        r = bdd.apply("and", bdd.apply("iff", bdd.mk_var(v), bdd.mk_var(vp)), r)
    return r


@dataclass
class GraphPredicates:
    space: Space
    trans: Function
    reach: Function
    reach_inv: Function
    scc: Function
    terminal: Function
    reach_iterations: int = 0


def build_reach(space: Space, trans: Function, stats: Optional[Dict[str, int]] = None) -> Function:
    """Reflexive-transitive closure of ``trans`` by frontier iteration.

    ``Path^{k+1}(X, X') = Path^k | exists X''. trans(X, X'') & Path^k(X'', X')``,
    extending only the pairs discovered in the previous round.
    """
    bdd = space.bdd
    step_rel = bdd.rename(trans, space.pri_to_aux)  # trans(X, X'')
    path = identity(space)
    frontier = path
    rounds = 0
    while True:
        shifted = bdd.rename(frontier, space.cur_to_aux)  # F(X'', X')
        pred = bdd.and_exists(step_rel, shifted, space.aux)
        new = bdd.apply("and", pred, bdd.negate(path))
        rounds += 1
        if new.is_false:
            break
        path = bdd.apply("or", path, new)
        frontier = new
    if stats is not None:
        stats["reach_iterations"] = rounds
    return path


def build_reach_inv(space: Space, reach: Function) -> Function:
    """``reach_inv(s, t') <-> reach(t, s')``."""
    return space.bdd.rename(reach, space.swap)


def build_scc(reach: Function, reach_inv: Function) -> Function:
    return reach.bdd.apply("and", reach, reach_inv)


def build_terminal(space: Space, reach: Function, scc: Function) -> Function:
    """States whose every reachable state lies in their own SCC."""
    bdd = space.bdd
    return bdd.forall(space.pri, bdd.apply("implies", reach, scc))


def dc_step(space: Space, preds: GraphPredicates, dc: Function, check: bool = False) -> Function:
    """``forall X'. reach -> (scc | dc(X'))``: grow a downward-closed union of SCCs."""
    bdd = space.bdd
    if check and not is_scc_saturated(space, preds.scc, dc):
        raise SGRKError("dc_step called on a set that is not a union of SCCs")
    dcp = space.prime(dc)
    return bdd.forall(space.pri, bdd.apply("implies", preds.reach, bdd.apply("or", preds.scc, dcp)))


def is_scc_saturated(space: Space, scc: Function, s: Function) -> bool:
    """True when ``s`` never splits an SCC."""
    bdd = space.bdd
    split = bdd.apply("and", scc, bdd.apply("xor", s, space.prime(s)))
    return split.is_false


def build_graph(space: Space, trans: Function) -> GraphPredicates:
    stats: Dict[str, int] = {}
    reach = build_reach(space, trans, stats)
    reach_inv = build_reach_inv(space, reach)
    scc = build_scc(reach, reach_inv)
    terminal = build_terminal(space, reach, scc)
    return GraphPredicates(space, trans, reach, reach_inv, scc, terminal, stats["reach_iterations"])
