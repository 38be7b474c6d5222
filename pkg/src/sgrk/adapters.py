"""Explicit transducers, their projection to transition systems, and adapter assembly.

A transducer reads input symbols and emits output labels.  Output labels
that feed a game are bitstrings over a fixed variable list (first variable
first).  The adapter for a target/adaptee pair is built as::

    adapter = invert(adaptee) . controller . target

where ``.`` is cascade composition (the right machine runs first).
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

from .errors import ControllerError, TransducerError
from .formula import FALSE, Formula, conj, disj, eq_bits, evaluate, iff, neg, var
from .spec import SpecText

__all__ = ["Transducer", "TransitionSystem", "project", "compose", "invert", "identity_transducer",
           "read_tx", "write_tx", "controller_transducer", "assemble_adapter", "cosimulate",
           "CoSimResult", "adapter_spec", "running_example", "output_language", "ts_language",
           "is_isomorphic", "lassos"]


@dataclass
class Transducer:
    """Deterministic, possibly partial, finite-state transducer.

    ``delta[(state, symbol)] = (successor, output)``.  ``pre_label`` is the
    output assignment the machine is considered to show before its first
    step; ``None`` means all-false of the output width.
    """

    states: List[str]
    initial: str
    delta: Dict[Tuple[str, str], Tuple[str, str]]
    pre_label: Optional[str] = None

    def __post_init__(self):
        known = set(self.states)
        if self.initial not in known:
            raise TransducerError(f"initial state {self.initial!r} is not declared")
        for (q, a), (r, _) in self.delta.items():
            if q not in known or r not in known:
                raise TransducerError(f"transition {q} --{a}--> {r} uses an undeclared state")

    @property
    def inputs(self) -> List[str]:
        return sorted({a for _, a in self.delta})

    @property
    def outputs(self) -> List[str]:
        return sorted({o for _, o in self.delta.values()})

    def out_width(self) -> int:
        widths = {len(o) for o in self.outputs}
        if self.pre_label is not None:
            widths.add(len(self.pre_label))
        if len(widths) > 1:
            raise TransducerError(f"output labels have mixed widths {sorted(widths)}")
        return widths.pop() if widths else 0

    def initial_label(self) -> str:
        return self.pre_label if self.pre_label is not None else "0" * self.out_width()

    def moves(self, q: str) -> List[Tuple[str, str, str]]:
        """``(symbol, successor, output)`` for every transition out of ``q``."""
        return sorted((a, r, o) for (p, a), (r, o) in self.delta.items() if p == q)

    def step(self, q: str, a: str) -> Tuple[str, str]:
        try:
            return self.delta[(q, a)]
        except KeyError:
            raise TransducerError(f"no transition from state {q!r} on input {a!r}") from None

    def run(self, word: Sequence[str], q: Optional[str] = None) -> Tuple[List[str], str]:
        q = self.initial if q is None else q
        outs = []
        for a in word:
            q, o = self.step(q, a)
            outs.append(o)
        return outs, q

    def trim(self) -> "Transducer":
        """Drop states unreachable from the initial state."""
        seen = {self.initial}
        queue = deque([self.initial])
        while queue:
            q = queue.popleft()
            for _, r, _ in self.moves(q):
                if r not in seen:
                    seen.add(r)
                    queue.append(r)
        states = [q for q in self.states if q in seen]
        delta = {k: v for k, v in self.delta.items() if k[0] in seen}
        return Transducer(states, self.initial, delta, self.pre_label)


def identity_transducer(labels: Iterable[str], pre_label: Optional[str] = None) -> Transducer:
    """One state echoing every label."""
    labels = list(labels)
    return Transducer(["q"], "q", {("q", x): ("q", x) for x in labels}, pre_label)


# ----------------------------------------------------------------------
# .tx files
_STATE = re.compile(r"STATE\s+(\S+)(?:\s+(initial)(?:\s+([01]+))?)?\s*\Z")
_TRANS = re.compile(r"TRANS\s+(\S+)\s+--(\S+?)/(\S+?)-->\s+(\S+)\s*\Z")


def read_tx(text: str) -> Transducer:
    """Parse ``STATE name [initial [label]]`` / ``TRANS src --in/out--> dst`` lines."""
    states: List[str] = []
    initial = None
    pre = None
    delta: Dict[Tuple[str, str], Tuple[str, str]] = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _STATE.match(line)
        if m:
            name = m.group(1)
            if name in states:
                raise TransducerError(f"line {n}: state {name!r} declared twice")
            states.append(name)
            if m.group(2):
                if initial is not None:
                    raise TransducerError(f"line {n}: second initial state {name!r}")
                initial, pre = name, m.group(3)
            continue
        m = _TRANS.match(line)
        if m:
            src, a, o, dst = m.groups()
            if (src, a) in delta and delta[(src, a)] != (dst, o):
                raise TransducerError(f"line {n}: nondeterministic on input {a!r} at {src!r}")
            delta[(src, a)] = (dst, o)
            continue
        raise TransducerError(f"line {n}: cannot parse {raw.strip()!r}")
    if initial is None:
        raise TransducerError("no initial state")
    return Transducer(states, initial, delta, pre)


def write_tx(t: Transducer) -> str:
    lines = []
    for q in t.states:
        if q == t.initial:
            tail = " initial" + (f" {t.pre_label}" if t.pre_label is not None else "")
        else:
            tail = ""
        lines.append(f"STATE {q}{tail}")
    for q in t.states:
        for a, r, o in t.moves(q):
            lines.append(f"TRANS {q} --{a}/{o}--> {r}")
    return "\n".join(lines) + "\n"


# ----------------------------------------------------------------------
# projection
@dataclass
class TransitionSystem:
    """Label-keyed transition system over bitstring states."""

    width: int
    states: List[str]
    initial: Set[str]
    edges: Set[Tuple[str, str]]
    collisions: List[str] = field(default_factory=list)

    def successors(self, u: str) -> List[str]:
        return sorted(v for a, v in self.edges if a == u)

    def init_formula(self, names: Sequence[str]) -> Formula:
        return disj(eq_bits(names, int(u, 2)) for u in sorted(self.initial)) if self.initial else FALSE

    def trans_formula(self, names: Sequence[str]) -> Formula:
        """Edges over ``names``/``names'``; valuations outside the system loop on themselves."""
        by_src: Dict[str, List[str]] = {}
        for u, v in sorted(self.edges):
            by_src.setdefault(u, []).append(v)
        parts = [eq_bits(names, int(u, 2)) & disj(eq_bits(names, int(v, 2), primed=True) for v in vs)
                 for u, vs in by_src.items()]
        known = disj(eq_bits(names, int(u, 2)) for u in self.states) if self.states else FALSE
        stuck = neg(known) & conj(iff(var(x + "'"), var(x)) for x in names)
        return disj(parts + [stuck])


def project(t: Transducer) -> TransitionSystem:
    """Quotient of ``t`` onto its output labels.

    A transducer state is keyed by the label of any transition entering it;
    the initial state also carries the pre-initial label.  ``(u, v)`` is an
    edge when a transition labelled ``u`` can be followed by one labelled
    ``v``.  States sharing a label with different successor sets are merged;
    the merge is recorded in ``collisions``.
    """
    t = t.trim()
    pre = t.initial_label()
    width = t.out_width()
    entered: Dict[str, Set[str]] = {pre: {t.initial}}
    for (_, _), (r, o) in t.delta.items():
        entered.setdefault(o, set()).add(r)
    edges: Set[Tuple[str, str]] = set()
    collisions = []
    for u, qs in sorted(entered.items()):
        succ_sets = [frozenset(o for _, _, o in t.moves(q)) for q in sorted(qs)]
        if len(set(succ_sets)) > 1:
            collisions.append(f"label {u} is shared by states {sorted(qs)} with different successors")
        for s in succ_sets:
            edges.update((u, v) for v in s)
    return TransitionSystem(width, sorted(entered), {pre}, edges, collisions)


def output_language(t: Transducer, length: int) -> Set[Tuple[str, ...]]:
    """All label sequences of at most ``length`` labels, the pre-initial label first."""
    pre = t.initial_label()
    out = {(pre,)} if length >= 1 else {()}
    frontier = [((pre,), t.initial)]
    for _ in range(length - 1):
        nxt = []
        for seq, q in frontier:
            for _, r, o in t.moves(q):
                s = seq + (o,)
                out.add(s)
                nxt.append((s, r))
        frontier = nxt
    return out


def ts_language(ts: TransitionSystem, length: int) -> Set[Tuple[str, ...]]:
    out: Set[Tuple[str, ...]] = {(u,) for u in ts.initial} if length >= 1 else {()}
    frontier = list(out)
    for _ in range(length - 1):
        frontier = [seq + (v,) for seq in frontier for v in ts.successors(seq[-1])]
        frontier = list(set(frontier))
        out.update(frontier)
    return out


# ----------------------------------------------------------------------
# composition and inversion
def compose(f: Transducer, g: Transducer) -> Transducer:
    """Cascade ``f . g``: ``g`` reads the input, ``f`` reads ``g``'s output."""
    missing = sorted(set(g.outputs) - set(f.inputs))
    if missing:
        raise TransducerError(f"alphabet mismatch: {missing[0]!r} is emitted but never read")
    name = lambda p, q: f"{p}.{q}"  # noqa: E731
    start = (g.initial, f.initial)
    seen = {start}
    queue = deque([start])
    delta: Dict[Tuple[str, str], Tuple[str, str]] = {}
    while queue:
        qg, qf = queue.popleft()
        for a, rg, y in g.moves(qg):
            hit = f.delta.get((qf, y))
            if hit is None:
                continue
            rf, z = hit
            delta[(name(qg, qf), a)] = (name(rg, rf), z)
            if (rg, rf) not in seen:
                seen.add((rg, rf))
                queue.append((rg, rf))
    order = sorted(seen, key=lambda p: (p != start, p))
    return Transducer([name(*p) for p in order], name(*start), delta, f.pre_label)


def invert(t: Transducer) -> Transducer:
    """Swap inputs and outputs; each state's outgoing labels must be distinct."""
    delta: Dict[Tuple[str, str], Tuple[str, str]] = {}
    for q in t.states:
        for a, r, o in t.moves(q):
            if (q, o) in delta:
                raise TransducerError(f"not invertible: state {q!r} emits {o!r} on two inputs")
            delta[(q, o)] = (r, a)
    return Transducer(list(t.states), t.initial, delta, None)


def is_isomorphic(a: Transducer, b: Transducer) -> bool:
    """Isomorphism of the reachable parts (deterministic, so a joint walk decides it)."""
    a, b = a.trim(), b.trim()
    if len(a.states) != len(b.states) or len(a.delta) != len(b.delta):
        return False
    match = {a.initial: b.initial}
    queue = deque([a.initial])
    while queue:
        p = queue.popleft()
        q = match[p]
        ma, mb = a.moves(p), b.moves(q)
        if [(x, o) for x, _, o in ma] != [(x, o) for x, _, o in mb]:
            return False
        for (_, rp, _), (_, rq, _) in zip(ma, mb):
            if rp in match:
                if match[rp] != rq:
                    return False
            else:
                match[rp] = rq
                queue.append(rp)
    return len(set(match.values())) == len(match)


# ----------------------------------------------------------------------
# adapter assembly
def controller_transducer(ctrl) -> Transducer:
    """The combined controller as a machine reading input labels and emitting output labels.

    States are ``i|o|mem`` for every configuration reachable from the initial
    game state(s); the single initial state requires a unique initial input.
    """
    g = ctrl.structure
    init = ctrl.initial_choices()
    if len(init) != 1:
        raise TransducerError(f"controller shell needs one initial input, found {len(init)}")
    i0, o0 = init[0]
    name = lambda i, o, m: f"{i}|{o}|{m}"  # noqa: E731
    start = (i0, o0, 0)
    seen = {start}
    queue = deque([start])
    delta: Dict[Tuple[str, str], Tuple[str, str]] = {}
    while queue:
        i, o, m = queue.popleft()
        for i2 in ctrl.legal_inputs(i + o):
            try:
                o2, m2 = ctrl.step_bits(i + o, i2, m)
            except ControllerError as e:
                raise TransducerError(f"controller undefined at {name(i, o, m)} on {i2}: {e}") from None
            delta[(name(i, o, m), i2)] = (name(i2, o2, m2), o2)
            if (i2, o2, m2) not in seen:
                seen.add((i2, o2, m2))
                queue.append((i2, o2, m2))
    order = sorted(seen, key=lambda c: (c != start, c))
    return Transducer([name(*c) for c in order], name(*start), delta, o0)


def assemble_adapter(target: Transducer, adaptee: Transducer, ctrl) -> Transducer:
    """``invert(adaptee) . controller . target``, checked on every reachable target move."""
    g = ctrl.structure
    pre_t, pre_a = target.initial_label(), adaptee.initial_label()
    init = dict(ctrl.initial_choices())
    if init.get(pre_t) != pre_a:
        raise TransducerError(f"controller starts at {init.get(pre_t)} but the adaptee shows {pre_a}")
    shell = controller_transducer(ctrl)
    inner = compose(shell, target)
    _check_total(target, inner)
    adapter = compose(invert(adaptee), inner)
    _check_total(target, adapter)
    return adapter


def _check_total(target: Transducer, machine: Transducer) -> None:
    """Every input word the target accepts must drive ``machine`` too."""
    start = (target.initial, machine.initial)
    prev: Dict[Tuple[str, str], Optional[Tuple[Tuple[str, str], str]]] = {start: None}
    queue = deque([start])
    while queue:
        qt, qm = queue.popleft()
        for a, rt, _ in target.moves(qt):
            hit = machine.delta.get((qm, a))
            if hit is None:
                trace = [a]
                node = (qt, qm)
                while prev[node] is not None:
                    node, sym = prev[node]
                    trace.append(sym)
                raise TransducerError(f"assembly stuck after input trace {trace[::-1]}")
            nxt = (rt, hit[0])
            if nxt not in prev:
                prev[nxt] = ((qt, qm), a)
                queue.append(nxt)


# ----------------------------------------------------------------------
# co-simulation
@dataclass
class CoSimResult:
    trace: List[Tuple[str, str]]
    cycle: List[Tuple[str, str]]
    tally: List[Tuple[List[int], List[int]]]
    satisfied: List[bool]

    @property
    def ok(self) -> bool:
        return all(self.satisfied)


def _holds(f: Formula, names: Sequence[str], bits: str) -> bool:
    return evaluate(f, {n: b == "1" for n, b in zip(names, bits)})


def cosimulate(target: Transducer, adaptee: Transducer, adapter: Transducer,
               prefix: Sequence[str], loop: Sequence[str] = (), rounds: int = 1,
               spec: Optional[SpecText] = None) -> CoSimResult:
    """Drive ``target`` and ``adaptee . adapter`` with the same input word.

    With a non-empty ``loop`` the word is ``prefix loop^omega``: the loop is
    repeated until the joint machine state at its start recurs, and the
    labels seen between the two visits form the induced cycle.  With
    ``spec``, each conjunct's ``GF(assumptions) -> GF(guarantees)`` is
    evaluated on that cycle (target labels against inputs, adaptee labels
    against outputs).  ``rounds`` loop repetitions go into ``trace``.
    """
    qt, qd, qa = target.initial, adapter.initial, adaptee.initial
    trace: List[Tuple[str, str]] = []

    def step(a):
        nonlocal qt, qd, qa
        qt, t_out = target.step(qt, a)
        qd, cmd = adapter.step(qd, a)
        qa, a_out = adaptee.step(qa, cmd)
        return t_out, a_out

    for a in prefix:
        trace.append(step(a))
    cycle: List[Tuple[str, str]] = []
    if loop:
        seen: Dict[Tuple[str, str, str], int] = {}
        laps: List[List[Tuple[str, str]]] = []
        while (qt, qd, qa) not in seen:
            seen[(qt, qd, qa)] = len(laps)
            laps.append([step(a) for a in loop])
        first = seen[(qt, qd, qa)]
        cycle = [x for lap in laps[first:] for x in lap]
        k = 0
        while len(trace) < len(prefix) + rounds * len(loop):
            lap = laps[k] if k < len(laps) else laps[first + (k - first) % (len(laps) - first)]
            trace.extend(lap)
            k += 1
    tally, satisfied = [], []
    if spec is not None:
        for asm, gar in spec.grk:
            ta = [sum(_holds(f, spec.inputs, t) for t, _ in cycle) for f in asm]
            tg = [sum(_holds(f, spec.outputs, o) for _, o in cycle) for f in gar]
            tally.append((ta, tg))
            satisfied.append(not cycle or not all(ta) or all(tg))
    return CoSimResult(trace, cycle, tally, satisfied)


def lassos(t: Transducer, max_prefix: int, max_cycle: int):
    """Every ``(prefix, loop)`` within the bounds whose word ``t`` accepts forever."""

    def walks(q: str, length: int):
        if length == 0:
            yield [], q
            return
        for a, r, _ in t.moves(q):
            for rest, end in walks(r, length - 1):
                yield [a] + rest, end

    def loops_forever(q: str, loop: List[str]) -> bool:
        seen = set()
        while q not in seen:
            seen.add(q)
            for a in loop:
                hit = t.delta.get((q, a))
                if hit is None:
                    return False
                q = hit[0]
        return True

    for p in range(max_prefix + 1):
        for prefix, q in walks(t.initial, p):
            for c in range(1, max_cycle + 1):
                for loop, _ in walks(q, c):
                    if loops_forever(q, loop):
                        yield prefix, loop


# ----------------------------------------------------------------------
# game from a transducer pair
def adapter_spec(target: Transducer, adaptee: Transducer, inputs: Sequence[str],
                 outputs: Sequence[str], modes: Optional[Sequence[Tuple[str, str]]] = None) -> SpecText:
    """Game over the projected systems with ``GF(t = u) -> GF(a = v)`` per mode pair.

    By default the modes are the labels both machines can emit, excluding
    the pre-initial ones, each paired with itself.
    """
    ins, outs = project(target), project(adaptee)
    if ins.width != len(inputs) or outs.width != len(outputs):
        raise TransducerError("label widths do not match the variable lists")
    if modes is None:
        shared = sorted((set(target.outputs) & set(adaptee.outputs))
                        - {target.initial_label(), adaptee.initial_label()})
        modes = [(u, u) for u in shared]
    grk = [([eq_bits(inputs, int(u, 2))], [eq_bits(outputs, int(v, 2))]) for u, v in modes]
    return SpecText(list(inputs), list(outputs), ins.init_formula(inputs), outs.init_formula(outputs),
                    ins.trans_formula(inputs), outs.trans_formula(outputs), grk,
                    comment="adapter game over projected target and adaptee")


def running_example() -> Tuple[Transducer, Transducer]:
    """The two-mode target and adaptee used throughout the docs.

    The target goes up (``U``) to mode 01 or down (``D``) to mode 10 and
    stays (``S``).  The adaptee reaches 01 only briefly: from 01 it must
    return to 00, while 10 is absorbing.
    """
    target = Transducer(["s0", "s1", "s2"], "s0", {
        ("s0", "U"): ("s1", "01"), ("s0", "D"): ("s2", "10"),
        ("s1", "S"): ("s1", "01"), ("s2", "S"): ("s2", "10"),
    }, "00")
    adaptee = Transducer(["s0", "s1", "s2"], "s0", {
        ("s0", "U"): ("s1", "01"), ("s0", "D"): ("s2", "10"),
        ("s1", "D"): ("s0", "00"), ("s2", "S"): ("s2", "10"),
    }, "00")
    return target, adaptee
