"""Separated GR(k): accepting states, travel strategies and the combined controller.

For an SCC ``S`` of the game graph, conjunct ``l`` is *settled* in ``S`` when
either every guarantee of ``l`` holds somewhere in the output projection of
``S`` or some assumption of ``l`` holds nowhere in its input projection.
``acc`` collects the states whose SCC settles every conjunct.  Playing the
weak-Büchi strategy for ``G F acc`` outside accepting SCCs and touring the
guarantees inside them wins the GR(k) game.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .dd import Function
from .errors import ControllerError, ExportError, SeparationError
from .games import WeakBuchiSolution, check_realizable, game_space, solve_weak_buchi
from .graph import GraphPredicates, Space, build_graph
from .spec import GameStructure, GRkCondition, SeparatedGame, validate

__all__ = ["AcceptingPredicate", "TravelStrategy", "CombinedController", "SolveResult",
           "build_acc", "build_travel", "solve", "controller_step", "determinize",
           "ControllerTable", "StrategyTable", "export_stratjson", "read_stratjson",
           "write_stratjson", "count_strategy_rows", "ROW_LIMIT"]

ROW_LIMIT = 1 << 20


@dataclass
class AcceptingPredicate:
    acc: Function
    sgar: List[List[Function]]
    sasm: List[List[Function]]


def build_acc(game: SeparatedGame, preds: GraphPredicates) -> AcceptingPredicate:
    g, cond = game.structure, game.condition
    _require_separated(game)
    bdd = g.bdd
    space = preds.space
    acc = bdd.true
    sgar_all, sasm_all = [], []
    for conj in cond.conjuncts:
        sgar = [bdd.and_exists(preds.scc, space.prime(x), space.pri) for x in conj.guarantees]
        sasm = [bdd.forall(space.pri, bdd.apply("implies", preds.scc, bdd.negate(space.prime(a))))
                for a in conj.assumptions]
        all_gar = bdd.true
        for x in sgar:
            all_gar = bdd.apply("and", all_gar, x)
        some_asm = bdd.false
        for x in sasm:
            some_asm = bdd.apply("or", some_asm, x)
        acc = bdd.apply("and", acc, bdd.apply("or", all_gar, some_asm))
        sgar_all.append(sgar)
        sasm_all.append(sasm)
    return AcceptingPredicate(acc, sgar_all, sasm_all)


def _require_separated(game: SeparatedGame) -> None:
    rep = validate(game)
    if not rep.separated:
        raise SeparationError("GR(k) pipeline needs a separated game: " + "; ".join(rep.witnesses))


# ----------------------------------------------------------------------
@dataclass
class TravelStrategy:
    """Per-guarantee moves on the output graph that never leave the output SCC."""

    guarantees: List[Function]
    moves: List[Function]          # relations over O, O'
    stay: Function                 # rho_O restricted to the output SCC
    space: Space
    preds: GraphPredicates


def build_travel(game: SeparatedGame) -> TravelStrategy:
    g = game.structure
    bdd = g.bdd
    space = Space(bdd, g.outputs)
    preds = build_graph(space, g.rho_o)
    stay = bdd.apply("and", g.rho_o, preds.scc)
    gars = game.condition.guarantee_list()
    moves = []
    for gar in gars:
        # rank 1: an in-SCC successor satisfies the guarantee
        hit = bdd.apply("and", stay, space.prime(gar))
        layer = bdd.exists(space.pri, hit)
        rel = hit
        while True:
            toward = bdd.apply("and", stay, space.prime(layer))
            grown = bdd.apply("or", layer, bdd.exists(space.pri, toward))
            fresh = bdd.apply("and", grown, bdd.negate(layer))
            if fresh.is_false:
                break
            rel = bdd.apply("or", rel, bdd.apply("and", fresh, toward))
            layer = grown
        moves.append(rel)
    return TravelStrategy(gars, moves, stay, space, preds)


# ----------------------------------------------------------------------
def _bits(values: Dict[str, bool], names: Sequence[str]) -> str:
    return "".join("1" if values[n] else "0" for n in names)


def _from_bits(bits: str, names: Sequence[str]) -> Dict[str, bool]:
    if len(bits) != len(names) or set(bits) - {"0", "1"}:
        raise ControllerError(f"bad bitstring {bits!r} for {len(names)} variables")
    return {n: b == "1" for n, b in zip(names, bits)}


class CombinedController:
    """Weak-Büchi strategy outside accepting SCCs, guarantee tour inside.

    ``mem`` indexes the flattened guarantee list and lives outside the
    diagrams.  ``step`` mutates it; :func:`controller_step` is the pure form.
    """

    def __init__(self, game: SeparatedGame, win: Function, acc: Function, fb: Function,
                 travel: TravelStrategy):
        self.game = game
        self.win, self.acc, self.fb = win, acc, fb
        self.travel = travel
        self.m = len(travel.guarantees)
        self.mem = 0
        self._fb_cache: Dict[Tuple[str, str], Optional[str]] = {}
        self._tour_cache: Dict[Tuple[str, int], Optional[Tuple[str, int]]] = {}
        self._inputs_cache: Dict[str, List[str]] = {}

    @property
    def structure(self) -> GameStructure:
        return self.game.structure

    def reset(self, mem: int = 0) -> None:
        self.mem = mem

    def step(self, state: Dict[str, bool], inp: Dict[str, bool]) -> Dict[str, bool]:
        out, self.mem = controller_step(self, state, inp, self.mem)
        return out

    # helpers on bitstrings ---------------------------------------------
    def legal_inputs(self, state_bits: str) -> List[str]:
        """Bitstrings of the inputs the environment may pick from a state."""
        g = self.structure
        key = state_bits if not g.separated else state_bits[:len(g.inputs)]
        r = self._inputs_cache.get(key)
        if r is None:
            bdd = g.bdd
            env = bdd.restrict(g.rho_i, _from_bits(state_bits, g.X))
            r = [_bits({k[:-1]: v for k, v in a.items()}, g.inputs)
                 for a in bdd.enumerate(env, g.Ip, limit=1 << 24)]
            self._inputs_cache[key] = r
        return r

    def initial_choices(self) -> List[Tuple[str, str]]:
        """For each initial input, the least initial output inside ``win``."""
        g = self.structure
        bdd = g.bdd
        out = []
        for a in bdd.enumerate(g.theta_i, g.inputs, limit=1 << 24):
            ok = bdd.apply("and", g.theta_o, bdd.restrict(self.win, a))
            pick = bdd.pick_one(ok, g.outputs)
            if pick is None:
                raise ControllerError(f"no winning initial output for input {_bits(a, g.inputs)}")
            out.append((_bits(a, g.inputs), _bits(pick, g.outputs)))
        return out

    def _tour(self, o_bits: str, mem: int) -> Optional[Tuple[str, int]]:
        key = (o_bits, mem)
        if key in self._tour_cache:
            return self._tour_cache[key]
        g = self.structure
        bdd = g.bdd
        tr = self.travel
        o_vals = _from_bits(o_bits, g.outputs)
        res = None
        for j in range(self.m):
            nxt = (mem + j) % self.m
            cand = bdd.pick_one(bdd.restrict(tr.moves[nxt], o_vals), g.Op)
            if cand is not None:
                o2 = {k[:-1]: v for k, v in cand.items()}
                hit = bdd.evaluate(tr.guarantees[nxt], o2)
                res = (_bits(o2, g.outputs), (nxt + 1) % self.m if hit else mem)
                break
        if res is None:
            cand = bdd.pick_one(bdd.restrict(tr.stay, o_vals), g.Op)
            if cand is not None:
                res = (_bits({k[:-1]: v for k, v in cand.items()}, g.outputs), mem)
        self._tour_cache[key] = res
        return res

    def _fallback(self, s_bits: str, i_bits: str) -> Optional[str]:
        key = (s_bits, i_bits)
        if key in self._fb_cache:
            return self._fb_cache[key]
        g = self.structure
        bdd = g.bdd
        fix = _from_bits(s_bits, g.X)
        fix.update({v + "'": b for v, b in _from_bits(i_bits, g.inputs).items()})
        cand = bdd.pick_one(bdd.restrict(self.fb, fix), g.Op)
        res = None if cand is None else _bits({k[:-1]: v for k, v in cand.items()}, g.outputs)
        self._fb_cache[key] = res
        return res

    def step_bits(self, s_bits: str, i_bits: str, mem: int) -> Tuple[str, int]:
        g = self.structure
        bdd = g.bdd
        state = _from_bits(s_bits, g.X)
        fix = dict(state)
        fix.update({v + "'": b for v, b in _from_bits(i_bits, g.inputs).items()})
        if not bdd.evaluate(g.rho_i, {k: fix[k] for k in bdd.support(g.rho_i)}):
            raise ControllerError(f"illegal input {i_bits} at state {s_bits}")
        if not bdd.evaluate(self.win, state):
            raise ControllerError(f"controller undefined at losing state {s_bits}")
        if bdd.evaluate(self.acc, state):
            if self.m == 0:
                mem = 0
            tour = self._tour(s_bits[len(g.inputs):], mem % max(self.m, 1))
            if tour is not None:
                return tour
        out = self._fallback(s_bits, i_bits)
        if out is None:
            raise ControllerError(f"strategy relation empty at state {s_bits}, input {i_bits}")
        return out, 0

    def tabulate(self) -> "ControllerTable":
        return ControllerTable.from_controller(self)


def controller_step(ctrl: CombinedController, state: Dict[str, bool], inp: Dict[str, bool],
                    mem: int = 0) -> Tuple[Dict[str, bool], int]:
    """One move of the combined controller.

    ``state`` assigns ``I`` and ``O``; ``inp`` assigns the new inputs (unprimed
    names).  Returns the chosen outputs and the next memory value.
    """
    g = ctrl.structure
    try:
        s_bits = _bits(state, g.X)
        i_bits = _bits(inp, g.inputs)
    except KeyError as e:
        raise ControllerError(f"assignment misses {e.args[0]!r}") from None
    o_bits, mem2 = ctrl.step_bits(s_bits, i_bits, mem)
    return _from_bits(o_bits, g.outputs), mem2


def determinize(rel: Function, keep: Sequence[str], choose: Sequence[str]) -> Function:
    """Keep, for each assignment to ``keep``, only the least ``choose`` assignment.

    Least is lexicographic over ``choose`` taken in kernel level order, with
    false below true.  Works by a
    sweep from the least significant chosen variable upwards: a model with
    ``v = 1`` survives only where no model with ``v = 0`` and the same prefix
    exists.
    """
    bdd = rel.bdd
    r = rel
    ordered = sorted(choose, key=bdd.level)
    for k, v in enumerate(ordered):
        rest = ordered[k + 1:]
        has_low = bdd.exists(rest, bdd.restrict(r, {v: False}))
        # for v = 1 keep only where no v = 0 continuation exists
        keep_high = bdd.apply("and", bdd.mk_var(v), bdd.negate(has_low))
        r = bdd.apply("and", r, bdd.apply("or", bdd.negate(bdd.mk_var(v)), keep_high))
    return r


# ----------------------------------------------------------------------
@dataclass
class SolveResult:
    realizable: bool
    win: Function
    acc: AcceptingPredicate
    solution: WeakBuchiSolution
    controller: Optional[CombinedController]
    ops: int
    iterations: int


def solve(game: SeparatedGame, synthesize: bool = True) -> SolveResult:
    """Decide realizability and, on success, build the combined controller."""
    g = game.structure
    bdd = g.bdd
    start = bdd.ops.count
    _require_separated(game)
    preds = build_graph(game_space(g), g.trans)
    acc = build_acc(game, preds)
    sol = solve_weak_buchi(g, acc.acc, preds)
    ok = check_realizable(g, sol.win)
    ctrl = None
    if ok and synthesize:
        travel = build_travel(game)
        ctrl = CombinedController(game, sol.win, acc.acc, sol.fb, travel)
    return SolveResult(ok, sol.win, acc, sol, ctrl, bdd.ops.count - start, sol.iterations)


# ----------------------------------------------------------------------
class ControllerTable:
    """The combined controller tabulated over all states, inputs and memory values.

    State index is ``i * 2^|O| + o`` with the first declared variable most
    significant, matching the explicit oracle.
    """

    def __init__(self, n_in: int, n_out: int, m: int, out: np.ndarray, mem_next: np.ndarray,
                 defined: np.ndarray):
        self.n_in, self.n_out, self.m = n_in, n_out, m
        self.out = out            # (nS, nI, M) chosen output index, -1 where undefined
        self.mem_next = mem_next  # (nS, nI, M)
        self.defined = defined    # (nS,) states where the controller is defined

    @classmethod
    def from_controller(cls, ctrl: CombinedController) -> "ControllerTable":
        g = ctrl.structure
        bdd = g.bdd
        nI, nO = 1 << len(g.inputs), 1 << len(g.outputs)
        nS = nI * nO
        M = max(ctrl.m, 1)
        win = bdd.to_table(ctrl.win, g.X)
        acc = bdd.to_table(ctrl.acc, g.X)
        fb = bdd.to_table(ctrl.fb & g.rho_o, g.X + g.Ip + g.Op).reshape(nS, nI, nO)
        fb_has = fb.any(axis=2)
        fb_choice = np.where(fb_has, fb.argmax(axis=2), -1)
        tr = ctrl.travel
        O, Op = g.outputs, g.Op
        stay = bdd.to_table(tr.stay, O + Op).reshape(nO, nO)
        stay_choice = np.where(stay.any(axis=1), stay.argmax(axis=1), -1)
        fr = [bdd.to_table(r, O + Op).reshape(nO, nO) for r in tr.moves]
        fr_choice = [np.where(t.any(axis=1), t.argmax(axis=1), -1) for t in fr]
        gar = [bdd.to_table(x, O) for x in tr.guarantees]
        tour_o = np.full((nO, M), -1, dtype=np.int64)
        tour_m = np.zeros((nO, M), dtype=np.int64)
        for o in range(nO):
            for mem in range(M):
                for j in range(ctrl.m):
                    nxt = (mem + j) % ctrl.m
                    c = fr_choice[nxt][o]
                    if c >= 0:
                        tour_o[o, mem] = c
                        tour_m[o, mem] = (nxt + 1) % ctrl.m if gar[nxt][c] else mem
                        break
                else:
                    tour_o[o, mem] = stay_choice[o]
                    tour_m[o, mem] = mem
        o_of = np.arange(nS) % nO
        use_tour = (acc & (tour_o[o_of, 0] >= 0))  # stay nonempty iff some tour exists
        out = np.where(use_tour[:, None, None], tour_o[o_of][:, None, :],
                       fb_choice[:, :, None]).astype(np.int64)
        out = np.broadcast_to(out, (nS, nI, M)).copy()
        mem_next = np.where(use_tour[:, None, None], tour_m[o_of][:, None, :], 0)
        mem_next = np.broadcast_to(mem_next, (nS, nI, M)).copy()
        out[~win] = -1
        return cls(nI, nO, ctrl.m, out, mem_next, win)

    def step(self, s: int, i: int, mem: int) -> Tuple[int, int]:
        return int(self.out[s, i, mem]), int(self.mem_next[s, i, mem])


# ----------------------------------------------------------------------
# strategy export
@dataclass
class StrategyTable:
    inputs: List[str]
    outputs: List[str]
    mem_bound: int
    initial: List[Tuple[str, str]]
    rows: List[Tuple[int, str, str, str, int]]
    _index: Dict[Tuple[int, str, str], Tuple[str, int]] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self._index = {(m, s, i): (o, mn) for m, s, i, o, mn in self.rows}

    def lookup(self, mem: int, state: str, inp: str) -> Tuple[str, int]:
        try:
            return self._index[(mem, state, inp)]
        except KeyError:
            raise ControllerError(f"no row for mem={mem} state={state} input={inp}") from None

    def initial_output(self, inp: str) -> str:
        for i, o in self.initial:
            if i == inp:
                return o
        raise ControllerError(f"input {inp} is not initial")


def _explore(ctrl: CombinedController, limit: int):
    """Rows for every configuration reachable from the initial ones."""
    g = ctrl.structure
    nI = len(g.inputs)
    initial = ctrl.initial_choices()
    seen = set()
    queue = deque()
    for i_bits, o_bits in initial:
        cfg = (0, i_bits + o_bits)
        if cfg not in seen:
            seen.add(cfg)
            queue.append(cfg)
    rows = []
    while queue:
        mem, s_bits = queue.popleft()
        for i_bits in ctrl.legal_inputs(s_bits):
            o_bits, mem2 = ctrl.step_bits(s_bits, i_bits, mem)
            rows.append((mem, s_bits, i_bits, o_bits, mem2))
            if len(rows) > limit:
                raise ExportError(f"strategy has more than {limit} rows; use --dump-dd instead")
            cfg = (mem2, i_bits + o_bits)
            if cfg not in seen:
                seen.add(cfg)
                queue.append(cfg)
    rows.sort()
    return initial, rows


def count_strategy_rows(ctrl: CombinedController, limit: int = ROW_LIMIT) -> int:
    return len(_explore(ctrl, limit)[1])


def export_stratjson(ctrl: CombinedController, limit: int = ROW_LIMIT) -> StrategyTable:
    g = ctrl.structure
    initial, rows = _explore(ctrl, limit)
    return StrategyTable(list(g.inputs), list(g.outputs), ctrl.m, initial, rows)


def write_stratjson(table: StrategyTable) -> str:
    head = {"format": "stratjson", "version": 1, "inputs": table.inputs,
            "outputs": table.outputs, "mem_bound": table.mem_bound}
    lines = ["{"]
    for k, v in head.items():
        lines.append(f"  {json.dumps(k)}: {json.dumps(v)},")
    init = ", ".join(json.dumps({"input": i, "output": o}) for i, o in table.initial)
    lines.append(f'  "initial": [{init}],')
    lines.append('  "rows": [')
    body = [json.dumps({"mem": m, "state": s, "input": i, "output": o, "mem_next": mn})
            for m, s, i, o, mn in table.rows]
    lines.append(",\n".join("    " + b for b in body))
    lines.append("  ]")
    lines.append("}")
    return "\n".join(lines) + "\n"


def read_stratjson(text: str) -> StrategyTable:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ExportError(f"not JSON: {e}") from None
    if doc.get("format") != "stratjson" or doc.get("version") != 1:
        raise ExportError("not a stratjson v1 document")
    inputs, outputs = list(doc["inputs"]), list(doc["outputs"])
    m = int(doc["mem_bound"])
    nI, nO = len(inputs), len(outputs)
    rows = []
    for r in doc["rows"]:
        row = (int(r["mem"]), str(r["state"]), str(r["input"]), str(r["output"]), int(r["mem_next"]))
        if len(row[1]) != nI + nO or len(row[2]) != nI or len(row[3]) != nO:
            raise ExportError(f"row has bitstrings of the wrong width: {r}")
        if set(row[1] + row[2] + row[3]) - {"0", "1"}:
            raise ExportError(f"row has a non-binary bitstring: {r}")
        if not (0 <= row[0] < max(m, 1) and 0 <= row[4] < max(m, 1)):
            raise ExportError(f"memory value out of range: {r}")
        rows.append(row)
    initial = [(str(x["input"]), str(x["output"])) for x in doc.get("initial", [])]
    return StrategyTable(inputs, outputs, m, initial, rows)
