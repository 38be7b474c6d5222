"""Brute-force ground truth on enumerated game graphs.

Everything here works on dense numpy tables:

* ``env[s, i']``      environment may move to input ``i'`` from state ``s``;
* ``sys[s, i', o']``  system may answer ``o'`` after ``i'``.

State index is ``s = i * 2^|O| + o`` with the first declared variable most
significant.  The same layout serves separated and general games.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from graphlib import TopologicalSorter
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import BudgetError, SGRKError
from .spec import GameStructure, GRkCondition, SeparatedGame

__all__ = [
    "ExplicitGame", "enumerate_game", "strong_components", "label_grk", "label_from_acc",
    "solve_backward", "solve_env_backward", "check_delay_property", "check_scc_saturation",
    "check_scc_product", "model_check_controller", "check_env_spoiling", "Verdict",
    "closure", "env_travel_lasso", "CrossCheck", "crosscheck_grk", "crosscheck_weak_buchi",
    "condition_tables",
]

DEFAULT_CAP = 1 << 14


@dataclass
class Verdict:
    ok: bool
    message: str = ""
    witness: object = None

    def __bool__(self):
        return self.ok


def strong_components(adj: np.ndarray) -> Tuple[int, np.ndarray]:
    """SCC count and labels of a dense boolean adjacency matrix."""
    return connected_components(csr_matrix(adj), directed=True, connection="strong")


def closure(adj: np.ndarray) -> np.ndarray:
    """Reflexive-transitive closure of a boolean matrix by frontier doubling."""
    n = adj.shape[0]
    r = np.eye(n, dtype=bool) | adj
    a = adj.astype(np.float32)
    while True:
        nxt = r | ((r.astype(np.float32) @ a) > 0)
        if (nxt == r).all():
            return r
        r = nxt


@dataclass
class ExplicitGame:
    inputs: List[str]
    outputs: List[str]
    env: np.ndarray
    sys: np.ndarray
    theta_i: np.ndarray
    theta_o: np.ndarray
    separated: bool
    env_graph: Optional[np.ndarray] = None   # (nI, nI) when separated
    sys_graph: Optional[np.ndarray] = None   # (nO, nO) when separated
    adj: np.ndarray = field(init=False)
    scc_id: np.ndarray = field(init=False)
    n_scc: int = field(init=False)
    topo: List[int] = field(init=False)
    acc_label: Optional[np.ndarray] = None   # per SCC

    def __post_init__(self):
        nS, nI, nO = self.nS, self.nI, self.nO
        self.adj = (self.env[:, :, None] & self.sys).reshape(nS, nS)
        if not self.adj.any(axis=1).all():
            bad = int(np.flatnonzero(~self.adj.any(axis=1))[0])
            raise SGRKError(f"state {bad} has no successor")
        self.n_scc, self.scc_id = strong_components(self.adj)
        dag: Dict[int, set] = {c: set() for c in range(self.n_scc)}
        src, dst = np.nonzero(self.adj)
        a, b = self.scc_id[src], self.scc_id[dst]
        cross = a != b
        for x, y in set(zip(a[cross].tolist(), b[cross].tolist())):
            dag[y].add(x)   # y depends on x: x is an ancestor
        self.topo = list(TopologicalSorter(dag).static_order())

    @property
    def nI(self) -> int:
        return 1 << len(self.inputs)

    @property
    def nO(self) -> int:
        return 1 << len(self.outputs)

    @property
    def nS(self) -> int:
        return self.nI * self.nO

    def i_of(self, s):
        return s // self.nO

    def o_of(self, s):
        return s % self.nO

    def members(self, c: int) -> np.ndarray:
        return np.flatnonzero(self.scc_id == c)

    def nontrivial(self) -> np.ndarray:
        """Per-SCC flag: more than one state or a self-loop."""
        sizes = np.bincount(self.scc_id, minlength=self.n_scc)
        loops = np.zeros(self.n_scc, dtype=bool)
        diag = np.flatnonzero(np.diag(self.adj))
        loops[self.scc_id[diag]] = True
        return (sizes > 1) | loops

    def bits(self, s: int) -> str:
        n = len(self.inputs) + len(self.outputs)
        return format(int(s), f"0{n}b") if n else ""

    def state_acc(self) -> np.ndarray:
        return self.acc_label[self.scc_id]


def enumerate_game(game, cap: int = DEFAULT_CAP) -> ExplicitGame:
    """Materialise a symbolic game structure as dense tables."""
    g: GameStructure = game.structure if isinstance(game, SeparatedGame) else game
    if g.N > cap:
        raise BudgetError(f"game has {g.N} states, above the budget {cap}")
    bdd = g.bdd
    nI, nO = 1 << len(g.inputs), 1 << len(g.outputs)
    nS = nI * nO
    sep = g.separated
    env = bdd.to_table(g.rho_i, g.X + g.Ip).reshape(nS, nI)
    sys_ = bdd.to_table(g.rho_o, g.X + g.Ip + g.Op).reshape(nS, nI, nO)
    theta_i = bdd.to_table(g.theta_i, g.inputs)
    theta_o = bdd.to_table(g.theta_o, g.outputs)
    env_graph = sys_graph = None
    if sep:
        env_graph = bdd.to_table(g.rho_i, g.inputs + g.Ip).reshape(nI, nI)
        sys_graph = bdd.to_table(g.rho_o, g.outputs + g.Op).reshape(nO, nO)
    return ExplicitGame(list(g.inputs), list(g.outputs), env, sys_, theta_i, theta_o, sep,
                        env_graph, sys_graph)


def label_from_acc(eg: ExplicitGame, acc_states: np.ndarray) -> np.ndarray:
    """Per-SCC labels from a per-state acceptance vector (must be SCC-closed)."""
    lab = np.zeros(eg.n_scc, dtype=bool)
    lab[eg.scc_id[acc_states]] = True
    if (lab[eg.scc_id] != acc_states).any():
        raise SGRKError("acceptance vector splits an SCC")
    eg.acc_label = lab
    return lab


def condition_tables(game: SeparatedGame) -> List[Tuple[List[np.ndarray], List[np.ndarray]]]:
    g = game.structure
    bdd = g.bdd
    return [([bdd.to_table(a, g.inputs) for a in c.assumptions],
             [bdd.to_table(x, g.outputs) for x in c.guarantees]) for c in game.condition.conjuncts]


def label_grk(eg: ExplicitGame, tables) -> np.ndarray:
    """Accepting SCCs per the two settling clauses, evaluated by enumeration."""
    lab = np.ones(eg.n_scc, dtype=bool)
    for c in range(eg.n_scc):
        mem = eg.members(c)
        ins = np.unique(eg.i_of(mem))
        outs = np.unique(eg.o_of(mem))
        for asm, gar in tables:
            all_gar = all(t[outs].any() for t in gar)
            some_missing = any(not t[ins].any() for t in asm)
            if not (all_gar or some_missing):
                lab[c] = False
                break
    eg.acc_label = lab
    return lab


# ----------------------------------------------------------------------
def _cpre_sys(eg: ExplicitGame, states: np.ndarray, target: np.ndarray) -> np.ndarray:
    """For each listed state: every legal input has a legal reply inside ``target``."""
    t = target.reshape(eg.nI, eg.nO)
    reply = (eg.sys[states] & t[None]).any(axis=2)
    return (~eg.env[states] | reply).all(axis=1)


def _cpre_env(eg: ExplicitGame, states: np.ndarray, target: np.ndarray) -> np.ndarray:
    """For each listed state: some legal input forces every reply into ``target``."""
    t = target.reshape(eg.nI, eg.nO)
    forced = (~eg.sys[states] | t[None]).all(axis=2)
    return (eg.env[states] & forced).any(axis=1)


def _induction(eg: ExplicitGame, player_cpre, attract_when: bool) -> np.ndarray:
    """Backward induction over the SCC DAG, sinks first.

    For SCCs whose label equals ``attract_when`` the player must force the
    already-won region (attractor); otherwise it may stay inside the SCC or
    the won region (safety).
    """
    if eg.acc_label is None:
        raise SGRKError("acceptance labels missing")
    won = np.zeros(eg.nS, dtype=bool)
    for c in reversed(eg.topo):
        mem = eg.members(c)
        if eg.acc_label[c] == attract_when:
            pending = mem
            while pending.size:
                ok = player_cpre(eg, pending, won)
                if not ok.any():
                    break
                won[pending[ok]] = True
                pending = pending[~ok]
        else:
            inside = np.zeros(eg.nS, dtype=bool)
            inside[mem] = True
            cur = mem
            while cur.size:
                ok = player_cpre(eg, cur, won | inside)
                if ok.all():
                    break
                inside[cur[~ok]] = False
                cur = cur[ok]
            won[cur] = True
    return won


def solve_backward(eg: ExplicitGame) -> np.ndarray:
    """System winning states of ``G F acc`` (non-accepting SCCs are attractor layers)."""
    return _induction(eg, _cpre_sys, attract_when=False)


def solve_env_backward(eg: ExplicitGame) -> np.ndarray:
    """Environment winning states of ``F G !acc`` (dual roles)."""
    return _induction(eg, _cpre_env, attract_when=True)


# ----------------------------------------------------------------------
def check_scc_saturation(eg: ExplicitGame, win: np.ndarray) -> Verdict:
    for c in range(eg.n_scc):
        vals = win[eg.members(c)]
        if vals.any() and not vals.all():
            return Verdict(False, f"SCC {c} is split by the winning set", c)
    return Verdict(True)


def check_delay_property(eg: ExplicitGame, win: np.ndarray) -> Verdict:
    """Winning survives the environment running ahead and the system lagging behind."""
    if not eg.separated:
        raise SGRKError("the delay property is only claimed for separated games")
    r_in = closure(eg.env_graph)
    r_out = closure(eg.sys_graph)
    w = win.reshape(eg.nI, eg.nO).astype(np.float32)
    implied = (r_in.T.astype(np.float32) @ w @ r_out.T.astype(np.float32)) > 0
    bad = implied & ~win.reshape(eg.nI, eg.nO)
    if bad.any():
        i_n, o_m = map(int, np.argwhere(bad)[0])
        src = np.argwhere(win.reshape(eg.nI, eg.nO) & r_in[:, i_n][:, None] & r_out[o_m][None, :])[0]
        return Verdict(False, "delay property violated",
                       {"from": (int(src[0]), int(src[1])), "to": (i_n, o_m)})
    return Verdict(True)


def check_scc_product(eg: ExplicitGame) -> Verdict:
    """Every non-trivial SCC projects onto a whole component SCC on each side."""
    if not eg.separated:
        raise SGRKError("product structure needs a separated game")
    _, in_id = strong_components(eg.env_graph)
    _, out_id = strong_components(eg.sys_graph)
    nt = eg.nontrivial()
    for c in np.flatnonzero(nt):
        mem = eg.members(c)
        ins = np.unique(eg.i_of(mem))
        outs = np.unique(eg.o_of(mem))
        if not (set(np.flatnonzero(in_id == in_id[ins[0]])) == set(ins.tolist())
                and set(np.flatnonzero(out_id == out_id[outs[0]])) == set(outs.tolist())):
            return Verdict(False, f"SCC {c} does not project onto component SCCs", c)
    return Verdict(True)


# ----------------------------------------------------------------------
def model_check_controller(eg: ExplicitGame, table, tables, win: np.ndarray,
                           roots: Optional[np.ndarray] = None) -> Verdict:
    """Check a tabulated controller against the GR(k) condition.

    The product graph has nodes ``(state, mem)``.  Starting from every winning
    state with every memory value (or from ``roots``), it follows all legal
    inputs and the controller's answers.  Conjunct ``l`` fails iff for some
    guarantee ``g`` the nodes where ``g`` is false contain a reachable cycle
    component in which every assumption of ``l`` occurs; the environment could
    then loop there forever.
    """
    M = max(table.m, 1)
    nS, nI, nO = eg.nS, eg.nI, eg.nO
    out = table.out
    node = lambda s, m: s * M + m  # noqa: E731
    if roots is None:
        roots = np.flatnonzero(win)
    start = np.array([node(s, m) for s in roots for m in range(M)], dtype=np.int64)
    reached = np.zeros(nS * M, dtype=bool)
    reached[start] = True
    frontier = start
    src_l, dst_l = [], []
    while frontier.size:
        s = frontier // M
        m = frontier % M
        legal = eg.env[s]                              # (F, nI)
        o2 = out[s, :, m]                              # (F, nI)
        m2 = table.mem_next[s, :, m]
        fi, ii = np.nonzero(legal)
        chosen = o2[fi, ii]
        if (chosen < 0).any():
            k = int(np.flatnonzero(chosen < 0)[0])
            return Verdict(False, "controller undefined on a reachable configuration",
                           {"state": eg.bits(s[fi[k]]), "mem": int(m[fi[k]]), "input": int(ii[k])})
        if not eg.sys[s[fi], ii, chosen].all():
            k = int(np.flatnonzero(~eg.sys[s[fi], ii, chosen])[0])
            return Verdict(False, "controller chose an illegal output",
                           {"state": eg.bits(s[fi[k]]), "input": int(ii[k]), "output": int(chosen[k])})
        nxt_s = ii * nO + chosen
        if not win[nxt_s].all():
            k = int(np.flatnonzero(~win[nxt_s])[0])
            return Verdict(False, "controller left the winning region",
                           {"state": eg.bits(s[fi[k]]), "next": eg.bits(nxt_s[k])})
        dst = nxt_s * M + m2[fi, ii]
        src = frontier[fi]
        src_l.append(src)
        dst_l.append(dst)
        new = np.unique(dst[~reached[dst]])
        reached[new] = True
        frontier = new
    src = np.concatenate(src_l) if src_l else np.zeros(0, dtype=np.int64)
    dst = np.concatenate(dst_l) if dst_l else np.zeros(0, dtype=np.int64)
    n_nodes = nS * M
    state_of = np.arange(n_nodes) // M
    i_of, o_of = state_of // nO, state_of % nO
    for l, (asm, gar) in enumerate(tables):
        for j, gt in enumerate(gar):
            keep = reached & ~gt[o_of]
            e = keep[src] & keep[dst]
            if not e.any():
                continue
            graph = csr_matrix((np.ones(int(e.sum()), dtype=np.int8), (src[e], dst[e])),
                               shape=(n_nodes, n_nodes))
            _, lab = connected_components(graph, directed=True, connection="strong")
            sizes = np.bincount(lab, minlength=lab.max() + 1)
            cyc = np.zeros(lab.max() + 1, dtype=bool)
            cyc[sizes > 1] = True
            loops = src[e][src[e] == dst[e]]
            cyc[lab[loops]] = True
            for c in np.flatnonzero(cyc):
                nodes = np.flatnonzero((lab == c) & keep)
                if nodes.size == 0:
                    continue
                ins = i_of[nodes]
                if all(t[ins].any() for t in asm):
                    return Verdict(False, f"conjunct {l} fails: guarantee {j} avoidable forever",
                                   {"nodes": [(eg.bits(n // M), int(n % M)) for n in nodes[:8]]})
    return Verdict(True, f"{int(reached.sum())} product nodes checked")


def env_travel_lasso(eg: ExplicitGame, tables) -> Optional[Verdict]:
    """Build one environment tour that spoils a non-accepting SCC.

    Picks a non-trivial non-accepting SCC ``S`` of a separated game, a conjunct
    that ``S`` does not settle, and a guarantee missing from ``S|_O``.  Returns
    a cycle of the input graph inside ``S|_I`` visiting every assumption of
    that conjunct; while the system stays in ``S|_O`` that guarantee never
    holds.  ``None`` when no such SCC exists.
    """
    if not eg.separated:
        return None
    _, in_id = strong_components(eg.env_graph)
    nt = eg.nontrivial()
    for c in np.flatnonzero(nt & ~eg.acc_label):
        mem = eg.members(c)
        ins = np.unique(eg.i_of(mem))
        outs = np.unique(eg.o_of(mem))
        for asm, gar in tables:
            missing = [j for j, t in enumerate(gar) if not t[outs].any()]
            if not missing or not all(t[ins].any() for t in asm):
                continue
            comp = ins.tolist()
            stops = [int(ins[np.flatnonzero(t[ins])[0]]) for t in asm] or [comp[0]]
            tour = [stops[0]]
            for goal in stops[1:] + [stops[0]]:
                path = _bfs_path(eg.env_graph, tour[-1], goal, set(comp))
                if path is None:
                    return Verdict(False, "no input path inside the SCC", c)
                tour += path[1:]
            if len(tour) == 1:
                if not eg.env_graph[tour[0], tour[0]]:
                    step = _bfs_path(eg.env_graph, tour[0], tour[0], set(comp), allow_empty=False)
                    tour = step
            ok = all(eg.env_graph[a, b] for a, b in zip(tour, tour[1:]))
            ok &= all(any(t[x] for x in tour) for t in asm)
            ok &= not gar[missing[0]][outs].any()
            return Verdict(bool(ok), f"environment tour of length {len(tour) - 1} in SCC {c}",
                           {"scc": int(c), "tour": tour})
    return None


def _bfs_path(adj, a, b, allowed, allow_empty=True):
    """Shortest path ``a .. b`` through ``allowed`` (at least one edge unless ``a == b`` is allowed)."""
    if a == b and allow_empty:
        return [a]
    prev = {a: None}
    queue = deque([a])
    while queue:
        x = queue.popleft()
        for y in np.flatnonzero(adj[x]).tolist():
            if y not in allowed:
                continue
            if y == b:
                path = [b]
                z = x
                while z is not None:
                    path.append(z)
                    z = prev[z]
                return path[::-1]
            if y not in prev:
                prev[y] = x
                queue.append(y)
    return None


def check_env_spoiling(eg: ExplicitGame, win: np.ndarray, tables=None) -> Verdict:
    """Determinacy: the dual induction covers exactly the complement of ``win``."""
    env_win = solve_env_backward(eg)
    both = win & env_win
    if both.any():
        return Verdict(False, "state won by both players", eg.bits(np.flatnonzero(both)[0]))
    neither = ~win & ~env_win
    if neither.any():
        return Verdict(False, "state won by neither player", eg.bits(np.flatnonzero(neither)[0]))
    if tables is not None:
        lasso = env_travel_lasso(eg, tables)
        if lasso is not None and not lasso.ok:
            return lasso
    return Verdict(True, f"{int(env_win.sum())} environment-winning states")


# ----------------------------------------------------------------------
@dataclass
class CrossCheck:
    """Outcome of comparing the symbolic pipeline with enumeration on one game."""

    n_states: int
    realizable: bool
    win_size: int = 0
    checks: Dict[str, Verdict] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(v.ok for v in self.checks.values())

    def failures(self) -> List[str]:
        return [f"{k}: {v.message}" for k, v in self.checks.items() if not v.ok]


def _same_set(name: str, eg: ExplicitGame, symbolic: np.ndarray, explicit: np.ndarray) -> Verdict:
    diff = symbolic != explicit
    if diff.any():
        s = int(np.flatnonzero(diff)[0])
        return Verdict(False, f"{name} differs at state {eg.bits(s)} "
                              f"(symbolic={bool(symbolic[s])}, explicit={bool(explicit[s])})", s)
    return Verdict(True)


def crosscheck_grk(game: SeparatedGame, controller: bool = True) -> CrossCheck:
    """Solve ``game`` symbolically and audit every claim against enumeration."""
    from .grk import solve  # local: grk imports this module's siblings only

    g = game.structure
    bdd = g.bdd
    res = solve(game, synthesize=controller)
    eg = enumerate_game(game)
    tables = condition_tables(game)
    label_grk(eg, tables)
    acc_sym = bdd.to_table(res.acc.acc, g.X)
    win_sym = bdd.to_table(res.win, g.X)
    win_exp = solve_backward(eg)
    out = CrossCheck(eg.nS, res.realizable, int(win_sym.sum()))
    out.checks["acc"] = _same_set("accepting set", eg, acc_sym, eg.acc_label[eg.scc_id])
    out.checks["win"] = _same_set("winning set", eg, win_sym, win_exp)
    out.checks["delay"] = check_delay_property(eg, win_sym)
    out.checks["saturation"] = check_scc_saturation(eg, win_sym)
    out.checks["determinacy"] = check_env_spoiling(eg, win_sym, tables)
    if controller and res.controller is not None:
        table = res.controller.tabulate()
        out.checks["controller"] = model_check_controller(eg, table, tables, win_sym)
    return out


def crosscheck_weak_buchi(g: GameStructure, acc) -> CrossCheck:
    """Symbolic weak-Büchi winning set against the explicit induction."""
    from .games import solve_weak_buchi

    bdd = g.bdd
    sol = solve_weak_buchi(g, acc)
    eg = enumerate_game(g)
    label_from_acc(eg, bdd.to_table(acc, g.X))
    win_sym = bdd.to_table(sol.win, g.X)
    out = CrossCheck(eg.nS, bool(win_sym.any()), int(win_sym.sum()))
    out.checks["win"] = _same_set("winning set", eg, win_sym, solve_backward(eg))
    out.checks["determinacy"] = check_env_spoiling(eg, win_sym)
    return out
