"""Reduced ordered binary decision diagrams.

A small shared-arena BDD engine.  Nodes are integers; ``0`` and ``1`` are the
constant leaves.  Every internal node is a triple ``(level, low, high)`` kept
unique through a hash-consing table, so two functions are equal exactly when
their node numbers are equal.

Each declared variable ``v`` owns three adjacent levels::

    v      current-state copy
    v''    auxiliary copy (used as the intermediate state of relational products)
    v'     next-state copy

Putting the auxiliary copy between ``v`` and ``v'`` keeps the renamings used by
the graph constructions (``v -> v''`` on relations over ``v, v'`` and
``v' -> v''`` on relations over ``v, v'``) order preserving, so they run as a
plain node rebuild.

Every public symbolic operation (apply, negate, quantify, the fused
``and_exists``, rename, restrict) adds exactly one to :attr:`BDD.ops`.  Queries
such as evaluation, counting and enumeration are free.
"""

from __future__ import annotations

import itertools
import sys
import weakref
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .errors import DDError

__all__ = ["BDD", "Function", "VarRegistry", "OpCounter"]

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))

_LEAF_LEVEL = 1 << 30
_CACHE_LIMIT = 1 << 21

ROLES = ("input", "output", "auxiliary")
CURRENT, AUX, PRIMED = 0, 1, 2
_SUFFIX = {CURRENT: "", AUX: "''", PRIMED: "'"}


@dataclass
class OpCounter:
    """Number of symbolic operations issued through the public kernel API."""

    count: int = 0

    def reset(self) -> None:
        self.count = 0


@dataclass
class VarRegistry:
    """Declared variables, their roles and their primed partners.

    ``names`` lists the base (unprimed) identifiers in declaration order.  The
    primed partner of ``v`` is ``v'``; the auxiliary copy is ``v''``.
    """

    names: List[str] = field(default_factory=list)
    role: Dict[str, str] = field(default_factory=dict)

    def partner(self, name: str) -> str:
        if name.endswith("'"):
            base = name[:-1]
            if base in self.role and not base.endswith("'"):
                return base
        elif name in self.role:
            return name + "'"
        raise DDError(f"unknown variable {name!r}")

    def __contains__(self, name: str) -> bool:
        return name in self.role


class Function:
    """Handle to a node of a :class:`BDD`.

    Handles compare equal iff they denote the same Boolean function of the same
    kernel.  Operators ``&``, ``|``, ``~`` and ``^`` route through the kernel and
    are counted like the corresponding named calls.
    """

    __slots__ = ("bdd", "node", "__weakref__")

    def __init__(self, bdd: "BDD", node: int):
        self.bdd = bdd
        self.node = node
        bdd._live[id(self)] = self

    def __eq__(self, other):
        return isinstance(other, Function) and other.bdd is self.bdd and other.node == self.node

    def __hash__(self):
        return hash((id(self.bdd), self.node))

    def __repr__(self):
        if self.node <= 1:
            return f"Function({bool(self.node)})"
        return f"Function(node={self.node}, size={len(self)})"

    def __len__(self):
        return self.bdd.dag_size(self)

    def __and__(self, other):
        return self.bdd.apply("and", self, other)

    def __or__(self, other):
        return self.bdd.apply("or", self, other)

    def __xor__(self, other):
        return self.bdd.apply("xor", self, other)

    def __invert__(self):
        return self.bdd.negate(self)

    def implies(self, other):
        return self.bdd.apply("implies", self, other)

    def iff(self, other):
        return self.bdd.apply("iff", self, other)

    def exists(self, names):
        return self.bdd.quantify("exists", names, self)

    def forall(self, names):
        return self.bdd.quantify("forall", names, self)

    @property
    def is_true(self) -> bool:
        return self.node == 1

    @property
    def is_false(self) -> bool:
        return self.node == 0


class BDD:
    """A shared, canonical BDD store with an operation counter."""

    def __init__(self, reorder: bool = False):
        self.registry = VarRegistry()
        self.ops = OpCounter()
        self.reorder_enabled = reorder
        # keyed by identity: equal handles are distinct objects and all need remapping
        self._live: "weakref.WeakValueDictionary[int, Function]" = weakref.WeakValueDictionary()
        self._level_name: List[str] = []
        self._name_level: Dict[str, int] = {}
        self._reset_arena()

    # ------------------------------------------------------------------
    # arena
    def _reset_arena(self) -> None:
        self._lvl: List[int] = [_LEAF_LEVEL, _LEAF_LEVEL]
        self._lo: List[int] = [0, 1]
        self._hi: List[int] = [0, 1]
        self._unique: Dict[Tuple[int, int, int], int] = {}
        self._clear_caches()

    def _clear_caches(self) -> None:
        self._c_and: Dict[int, int] = {}
        self._c_or: Dict[int, int] = {}
        self._c_xor: Dict[int, int] = {}
        self._c_not: Dict[int, int] = {}
        self._c_quant: Dict[Tuple[int, int, int], int] = {}
        self._c_ae: Dict[Tuple[int, int, int], int] = {}
        self._c_ite: Dict[Tuple[int, int, int], int] = {}
        self._cubes: Dict[frozenset, int] = {}
        self._cube_list: List[Tuple[frozenset, int]] = []

    def _mk(self, lvl: int, lo: int, hi: int) -> int:
        if lo == hi:
            return lo
        key = (lvl, lo, hi)
        r = self._unique.get(key)
        if r is None:
            r = len(self._lvl)
            self._lvl.append(lvl)
            self._lo.append(lo)
            self._hi.append(hi)
            self._unique[key] = r
        return r

    def _maybe_trim(self) -> None:
        if len(self._c_and) + len(self._c_or) + len(self._c_quant) + len(self._c_ae) > _CACHE_LIMIT:
            cubes, cube_list = self._cubes, self._cube_list
            self._clear_caches()
            self._cubes, self._cube_list = cubes, cube_list

    def __len__(self) -> int:
        return len(self._lvl)

    # ------------------------------------------------------------------
    # variables
    def declare(self, name: str, role: str) -> None:
        """Declare ``name`` with its auxiliary and primed copies."""
        if role not in ("input", "output"):
            raise DDError(f"bad role {role!r}")
        if not name or name.endswith("'"):
            raise DDError(f"bad variable name {name!r}")
        if name in self.registry.role:
            raise DDError(f"duplicate variable {name!r}")
        self.registry.names.append(name)
        self.registry.role[name] = role
        for copy in (CURRENT, AUX, PRIMED):
            full = name + _SUFFIX[copy]
            self._name_level[full] = len(self._level_name)
            self._level_name.append(full)

    def level(self, name: str) -> int:
        try:
            return self._name_level[name]
        except KeyError:
            raise DDError(f"unknown variable {name!r}") from None

    def levels(self, names: Iterable[str]) -> List[int]:
        return [self.level(n) for n in names]

    def name_of(self, level: int) -> str:
        return self._level_name[level]

    @property
    def true(self) -> Function:
        return Function(self, 1)

    @property
    def false(self) -> Function:
        return Function(self, 0)

    def const(self, value: bool) -> Function:
        return Function(self, 1 if value else 0)

    def mk_var(self, name: str) -> Function:
        """The predicate "``name`` is true" (``name`` may carry primes)."""
        return Function(self, self._mk(self.level(name), 0, 1))

    var = mk_var

    def cube(self, assignment: Mapping[str, bool]) -> Function:
        """Conjunction of literals; not counted (a constructor like ``mk_var``)."""
        u = 1
        for lvl, val in sorted(((self.level(k), v) for k, v in assignment.items()), reverse=True):
            u = self._mk(lvl, 0, u) if val else self._mk(lvl, u, 0)
        return Function(self, u)

    def _own(self, f: Function) -> int:
        if not isinstance(f, Function):
            raise DDError(f"expected a diagram handle, got {type(f).__name__}")
        if f.bdd is not self:
            raise DDError("handle belongs to a different kernel")
        return f.node

    # ------------------------------------------------------------------
    # core recursions (uncounted)
    def _not(self, u: int) -> int:
        if u <= 1:
            return 1 - u
        c = self._c_not
        r = c.get(u)
        if r is None:
            r = self._mk(self._lvl[u], self._not(self._lo[u]), self._not(self._hi[u]))
            c[u] = r
            c[r] = u
        return r

    def _and(self, u: int, v: int) -> int:
        if u == v:
            return u
        if u == 0 or v == 0:
            return 0
        if u == 1:
            return v
        if v == 1:
            return u
        if u > v:
            u, v = v, u
        key = (u << 32) | v
        c = self._c_and
        r = c.get(key)
        if r is not None:
            return r
        lvl, lo, hi = self._lvl, self._lo, self._hi
        lu, lv = lvl[u], lvl[v]
        if lu == lv:
            r = self._mk(lu, self._and(lo[u], lo[v]), self._and(hi[u], hi[v]))
        elif lu < lv:
            r = self._mk(lu, self._and(lo[u], v), self._and(hi[u], v))
        else:
            r = self._mk(lv, self._and(u, lo[v]), self._and(u, hi[v]))
        c[key] = r
        return r

    def _or(self, u: int, v: int) -> int:
        if u == v:
            return u
        if u == 1 or v == 1:
            return 1
        if u == 0:
            return v
        if v == 0:
            return u
        if u > v:
            u, v = v, u
        key = (u << 32) | v
        c = self._c_or
        r = c.get(key)
        if r is not None:
            return r
        lvl, lo, hi = self._lvl, self._lo, self._hi
        lu, lv = lvl[u], lvl[v]
        if lu == lv:
            r = self._mk(lu, self._or(lo[u], lo[v]), self._or(hi[u], hi[v]))
        elif lu < lv:
            r = self._mk(lu, self._or(lo[u], v), self._or(hi[u], v))
        else:
            r = self._mk(lv, self._or(u, lo[v]), self._or(u, hi[v]))
        c[key] = r
        return r

    def _xor(self, u: int, v: int) -> int:
        if u == v:
            return 0
        if u == 0:
            return v
        if v == 0:
            return u
        if u == 1:
            return self._not(v)
        if v == 1:
            return self._not(u)
        if u > v:
            u, v = v, u
        key = (u << 32) | v
        c = self._c_xor
        r = c.get(key)
        if r is not None:
            return r
        lvl, lo, hi = self._lvl, self._lo, self._hi
        lu, lv = lvl[u], lvl[v]
        if lu == lv:
            r = self._mk(lu, self._xor(lo[u], lo[v]), self._xor(hi[u], hi[v]))
        elif lu < lv:
            r = self._mk(lu, self._xor(lo[u], v), self._xor(hi[u], v))
        else:
            r = self._mk(lv, self._xor(u, lo[v]), self._xor(u, hi[v]))
        c[key] = r
        return r

    def _ite(self, f: int, g: int, h: int) -> int:
        if f == 1:
            return g
        if f == 0:
            return h
        if g == h:
            return g
        if g == 1 and h == 0:
            return f
        if g == 0 and h == 1:
            return self._not(f)
        if g == 1:
            return self._or(f, h)
        if h == 0:
            return self._and(f, g)
        key = (f, g, h)
        r = self._c_ite.get(key)
        if r is not None:
            return r
        lvl, lo, hi = self._lvl, self._lo, self._hi
        top = min(lvl[f], lvl[g], lvl[h])

        def cof(x, b):
            if lvl[x] == top:
                return hi[x] if b else lo[x]
            return x

        r = self._mk(
            top,
            self._ite(cof(f, 0), cof(g, 0), cof(h, 0)),
            self._ite(cof(f, 1), cof(g, 1), cof(h, 1)),
        )
        self._c_ite[key] = r
        return r

    def _cube_id(self, levels: Iterable[int]) -> Tuple[int, frozenset, int]:
        fs = frozenset(levels)
        cid = self._cubes.get(fs)
        if cid is None:
            cid = len(self._cube_list)
            self._cubes[fs] = cid
            self._cube_list.append((fs, max(fs) if fs else -1))
        return cid, fs, (max(fs) if fs else -1)

    def _exists(self, u: int, cube: Tuple[int, frozenset, int]) -> int:
        cid, fs, top = cube
        lvl, lo, hi, mk, _or = self._lvl, self._lo, self._hi, self._mk, self._or
        cache = self._c_quant

        def rec(x):
            if x <= 1 or lvl[x] > top:
                return x
            key = (0, x, cid)
            r = cache.get(key)
            if r is not None:
                return r
            lx = lvl[x]
            if lx in fs:
                r0 = rec(lo[x])
                r = 1 if r0 == 1 else _or(r0, rec(hi[x]))
            else:
                r = mk(lx, rec(lo[x]), rec(hi[x]))
            cache[key] = r
            return r

        return rec(u)

    def _forall(self, u: int, cube: Tuple[int, frozenset, int]) -> int:
        cid, fs, top = cube
        lvl, lo, hi, mk, _and = self._lvl, self._lo, self._hi, self._mk, self._and
        cache = self._c_quant

        def rec(x):
            if x <= 1 or lvl[x] > top:
                return x
            key = (1, x, cid)
            r = cache.get(key)
            if r is not None:
                return r
            lx = lvl[x]
            if lx in fs:
                r0 = rec(lo[x])
                r = 0 if r0 == 0 else _and(r0, rec(hi[x]))
            else:
                r = mk(lx, rec(lo[x]), rec(hi[x]))
            cache[key] = r
            return r

        return rec(u)

    def _and_exists(self, u: int, v: int, cube: Tuple[int, frozenset, int]) -> int:
        cid, fs, top = cube
        lvl, lo, hi, mk, _or, _and = self._lvl, self._lo, self._hi, self._mk, self._or, self._and
        cache = self._c_ae
        ex = self._exists

        def rec(a, b):
            if a == 0 or b == 0:
                return 0
            if a == 1 and b == 1:
                return 1
            if a == 1 or a == b:
                return ex(b, cube)
            if b == 1:
                return ex(a, cube)
            if a > b:
                a, b = b, a
            la, lb = lvl[a], lvl[b]
            t = la if la < lb else lb
            if t > top:
                return _and(a, b)
            key = (a, b, cid)
            r = cache.get(key)
            if r is not None:
                return r
            if la == t:
                a0, a1 = lo[a], hi[a]
            else:
                a0 = a1 = a
            if lb == t:
                b0, b1 = lo[b], hi[b]
            else:
                b0 = b1 = b
            if t in fs:
                r0 = rec(a0, b0)
                r = 1 if r0 == 1 else _or(r0, rec(a1, b1))
            else:
                r = mk(t, rec(a0, b0), rec(a1, b1))
            cache[key] = r
            return r

        return rec(u, v)

    def _support(self, u: int) -> set:
        seen = set()
        out = set()
        stack = [u]
        lvl, lo, hi = self._lvl, self._lo, self._hi
        while stack:
            x = stack.pop()
            if x <= 1 or x in seen:
                continue
            seen.add(x)
            out.add(lvl[x])
            stack.append(lo[x])
            stack.append(hi[x])
        return out

    def _rename(self, u: int, lmap: Dict[int, int]) -> int:
        sup = sorted(self._support(u))
        image = [lmap.get(x, x) for x in sup]
        monotone = all(a < b for a, b in zip(image, image[1:]))
        lvl, lo, hi, mk = self._lvl, self._lo, self._hi, self._mk
        memo: Dict[int, int] = {}
        if monotone:
            def rec(x):
                if x <= 1:
                    return x
                r = memo.get(x)
                if r is None:
                    lx = lvl[x]
                    r = mk(lmap.get(lx, lx), rec(lo[x]), rec(hi[x]))
                    memo[x] = r
                return r
        else:
            def rec(x):
                if x <= 1:
                    return x
                r = memo.get(x)
                if r is None:
                    lx = lvl[x]
                    r = self._ite(mk(lmap.get(lx, lx), 0, 1), rec(hi[x]), rec(lo[x]))
                    memo[x] = r
                return r
        return rec(u)

    def _restrict(self, u: int, values: Dict[int, bool]) -> int:
        lvl, lo, hi, mk = self._lvl, self._lo, self._hi, self._mk
        top = max(values) if values else -1
        memo: Dict[int, int] = {}

        def rec(x):
            if x <= 1 or lvl[x] > top:
                return x
            r = memo.get(x)
            if r is None:
                lx = lvl[x]
                if lx in values:
                    r = rec(hi[x] if values[lx] else lo[x])
                else:
                    r = mk(lx, rec(lo[x]), rec(hi[x]))
                memo[x] = r
            return r

        return rec(u)

    # ------------------------------------------------------------------
    # counted public operations
    def apply(self, op: str, a: Function, b: Function) -> Function:
        """Binary Boolean combination: ``and``, ``or``, ``implies``, ``iff``, ``xor``."""
        u, v = self._own(a), self._own(b)
        self.ops.count += 1
        self._maybe_trim()
        if op == "and":
            r = self._and(u, v)
        elif op == "or":
            r = self._or(u, v)
        elif op == "implies":
            r = self._or(self._not(u), v)
        elif op == "iff":
            r = self._not(self._xor(u, v))
        elif op == "xor":
            r = self._xor(u, v)
        else:
            raise DDError(f"unknown operator {op!r}")
        return Function(self, r)

    def negate(self, a: Function) -> Function:
        u = self._own(a)
        self.ops.count += 1
        return Function(self, self._not(u))

    def ite(self, f: Function, g: Function, h: Function) -> Function:
        u, v, w = self._own(f), self._own(g), self._own(h)
        self.ops.count += 1
        return Function(self, self._ite(u, v, w))

    def quantify(self, kind: str, names: Iterable[str], a: Function) -> Function:
        """Existential or universal projection of ``names`` out of ``a``."""
        u = self._own(a)
        cube = self._cube_id(self.levels(names))
        self.ops.count += 1
        self._maybe_trim()
        if not cube[1]:
            return Function(self, u)
        if kind == "exists":
            return Function(self, self._exists(u, cube))
        if kind == "forall":
            return Function(self, self._forall(u, cube))
        raise DDError(f"unknown quantifier {kind!r}")

    def exists(self, names: Iterable[str], a: Function) -> Function:
        return self.quantify("exists", names, a)

    def forall(self, names: Iterable[str], a: Function) -> Function:
        return self.quantify("forall", names, a)

    def and_exists(self, a: Function, b: Function, names: Iterable[str]) -> Function:
        """Relational product ``exists names. a & b`` in a single pass."""
        u, v = self._own(a), self._own(b)
        cube = self._cube_id(self.levels(names))
        self.ops.count += 1
        self._maybe_trim()
        return Function(self, self._and_exists(u, v, cube))

    def rename(self, a: Function, mapping: Mapping[str, str]) -> Function:
        """Substitute variables according to an injective ``mapping``.

        Order-preserving maps rebuild the diagram directly; other maps (swaps
        and the like) fall back to if-then-else composition.
        """
        u = self._own(a)
        lmap = {self.level(k): self.level(v) for k, v in mapping.items()}
        if len(set(lmap.values())) != len(lmap):
            raise DDError("renaming is not injective")
        self.ops.count += 1
        return Function(self, self._rename(u, lmap))

    def restrict(self, a: Function, assignment: Mapping[str, bool]) -> Function:
        """Cofactor of ``a`` with the given variables fixed."""
        u = self._own(a)
        values = {self.level(k): bool(v) for k, v in assignment.items()}
        self.ops.count += 1
        return Function(self, self._restrict(u, values))

    # ------------------------------------------------------------------
    # free queries
    def support(self, a: Function) -> List[str]:
        return [self._level_name[x] for x in sorted(self._support(self._own(a)))]

    def dag_size(self, a: Function) -> int:
        u = self._own(a)
        seen = set()
        stack = [u]
        while stack:
            x = stack.pop()
            if x in seen:
                continue
            seen.add(x)
            if x > 1:
                stack.append(self._lo[x])
                stack.append(self._hi[x])
        return len(seen)

    def evaluate(self, a: Function, assignment: Mapping[str, bool]) -> bool:
        """Value of ``a`` under ``assignment`` (missing support variables raise)."""
        u = self._own(a)
        lvl, lo, hi, names = self._lvl, self._lo, self._hi, self._level_name
        while u > 1:
            try:
                b = assignment[names[lvl[u]]]
            except KeyError:
                raise DDError(f"assignment misses {names[lvl[u]]!r}") from None
            u = hi[u] if b else lo[u]
        return u == 1

    def eval_levels(self, u: int, values: Mapping[int, bool]) -> bool:
        lvl, lo, hi = self._lvl, self._lo, self._hi
        while u > 1:
            u = hi[u] if values[lvl[u]] else lo[u]
        return u == 1

    def _project(self, a: Function, over: Sequence[str]) -> Tuple[int, List[int]]:
        u = self._own(a)
        keep = sorted(set(self.levels(over)))
        extra = self._support(u) - set(keep)
        if extra:
            u = self._exists(u, self._cube_id(extra))
        return u, keep

    def sat_count(self, a: Function, over: Iterable[str]) -> int:
        """Number of assignments to ``over`` that extend to a model of ``a``."""
        u, keep = self._project(a, list(over))
        pos = {lvl: i for i, lvl in enumerate(keep)}
        n = len(keep)
        lvl, lo, hi = self._lvl, self._lo, self._hi
        memo: Dict[int, int] = {}

        def idx(x):
            return n if x <= 1 else pos[lvl[x]]

        def rec(x):
            # models over the variables at positions idx(x)..n-1
            if x <= 1:
                return x
            r = memo.get(x)
            if r is None:
                i = idx(x)
                l, h = lo[x], hi[x]
                r = rec(l) * (1 << (idx(l) - i - 1)) + rec(h) * (1 << (idx(h) - i - 1))
                memo[x] = r
            return r

        return rec(u) << idx(u)

    def pick_one(self, a: Function, over: Iterable[str]) -> Optional[Dict[str, bool]]:
        """The lexicographically least model over ``over`` (false < true), or None."""
        over = list(over)
        u, keep = self._project(a, over)
        if u == 0:
            return None
        lvl, lo, hi = self._lvl, self._lo, self._hi
        out = {}
        for level in keep:
            if u > 1 and lvl[u] == level:
                if lo[u] != 0:
                    out[self._level_name[level]] = False
                    u = lo[u]
                else:
                    out[self._level_name[level]] = True
                    u = hi[u]
            else:
                out[self._level_name[level]] = False
        return out

    def enumerate(self, a: Function, over: Iterable[str], limit: int = 1 << 16) -> List[Dict[str, bool]]:
        """All models over ``over`` in lexicographic order; raises past ``limit``."""
        over = list(over)
        total = self.sat_count(a, over)
        if total > limit:
            raise DDError(f"{total} models exceed the enumeration limit {limit}")
        u, keep = self._project(a, over)
        names = [self._level_name[x] for x in keep]
        lvl, lo, hi = self._lvl, self._lo, self._hi
        out: List[Dict[str, bool]] = []

        def rec(x, i, acc):
            if x == 0:
                return
            if i == len(keep):
                out.append(dict(zip(names, acc)))
                return
            if x > 1 and lvl[x] == keep[i]:
                rec(lo[x], i + 1, acc + [False])
                rec(hi[x], i + 1, acc + [True])
            else:
                rec(x, i + 1, acc + [False])
                rec(x, i + 1, acc + [True])

        rec(u, 0, [])
        return out

    # ------------------------------------------------------------------
    # explicit tables
    def to_table(self, a: Function, names: Sequence[str]) -> np.ndarray:
        """Truth table of ``a`` as a flat bool array indexed by ``names``.

        The first name is the most significant bit.  ``a`` must not depend on
        variables outside ``names``.
        """
        u = self._own(a)
        lv = self.levels(names)
        if len(set(lv)) != len(lv):
            raise DDError("repeated variable in table axes")
        extra = self._support(u) - set(lv)
        if extra:
            raise DDError("table axes miss support variables: "
                          + ", ".join(self._level_name[x] for x in sorted(extra)))
        order = sorted(range(len(lv)), key=lambda k: lv[k])
        keep = [lv[k] for k in order]
        lvl, lo, hi = self._lvl, self._lo, self._hi
        n = len(keep)
        memo: Dict[Tuple[int, int], np.ndarray] = {}

        def rec(x, i):
            if i == n:
                return np.array([x == 1])
            key = (x, i)
            r = memo.get(key)
            if r is None:
                if x > 1 and lvl[x] == keep[i]:
                    r = np.concatenate((rec(lo[x], i + 1), rec(hi[x], i + 1)))
                else:
                    t = rec(x, i + 1)
                    r = np.concatenate((t, t))
                memo[key] = r
            return r

        flat = rec(u, 0)
        if n == 0:
            return flat
        # axes are currently in level order; move them to the requested order
        arr = flat.reshape((2,) * n)
        inv = [0] * n
        for pos, k in enumerate(order):
            inv[k] = pos
        return np.ascontiguousarray(arr.transpose(inv)).reshape(-1)

    def from_table(self, table, names: Sequence[str]) -> Function:
        """Build the function whose truth table over ``names`` is ``table``."""
        lv = self.levels(names)
        n = len(lv)
        tab = np.asarray(table, dtype=bool).reshape(-1)
        if tab.size != 1 << n:
            raise DDError(f"table of size {tab.size} does not match {n} variables")
        if len(set(lv)) != n:
            raise DDError("repeated variable in table axes")
        order = sorted(range(n), key=lambda k: lv[k])
        if n:
            tab = tab.reshape((2,) * n).transpose(order).reshape(-1)
        keep = [lv[k] for k in order]
        nodes = tab.astype(np.int64)
        mk = self._mk
        for level in reversed(keep):
            pairs = nodes.reshape(-1, 2)
            uniq, inv = np.unique(pairs, axis=0, return_inverse=True)
            made = np.fromiter((mk(level, int(l), int(h)) for l, h in uniq), dtype=np.int64, count=len(uniq))
            nodes = made[inv.reshape(-1)]
        return Function(self, int(nodes[0]))

    # ------------------------------------------------------------------
    # reordering (opt-in)
    def reorder(self, order: Optional[Sequence[str]] = None) -> None:
        """Permute variable blocks (``v, v'', v'`` move together).

        With ``order=None`` one pass of block sifting is run, keeping the
        permutation that minimises the number of nodes reachable from live
        handles.  Live handles are remapped in place; caches are dropped.
        """
        names = list(self.registry.names)
        if order is not None:
            if sorted(order) != sorted(names):
                raise DDError("reorder needs a permutation of the declared variables")
            self._apply_order(list(order))
            return
        best = list(names)
        best_size = self._live_size()
        for var in names:
            current = [v for v in best if v != var]
            for pos in range(len(current) + 1):
                trial = current[:pos] + [var] + current[pos:]
                if trial == best:
                    continue
                self._apply_order(trial)
                size = self._live_size()
                if size < best_size:
                    best, best_size = trial, size
            self._apply_order(best)

    def _live_size(self) -> int:
        seen = set()
        stack = [f.node for f in list(self._live.values())]
        while stack:
            x = stack.pop()
            if x in seen:
                continue
            seen.add(x)
            if x > 1:
                stack.append(self._lo[x])
                stack.append(self._hi[x])
        return len(seen)

    def _apply_order(self, order: List[str]) -> None:
        old_lvl, old_lo, old_hi = self._lvl, self._lo, self._hi
        old_names = list(self._level_name)
        new_level_name: List[str] = []
        for base in order:
            for copy in (CURRENT, AUX, PRIMED):
                new_level_name.append(base + _SUFFIX[copy])
        new_name_level = {n: i for i, n in enumerate(new_level_name)}
        remap = [new_name_level[n] for n in old_names]
        live = list(self._live.values())
        self._reset_arena()
        self._level_name = new_level_name
        self._name_level = new_name_level
        self.registry.names = list(order)
        memo: Dict[int, int] = {0: 0, 1: 1}

        def rec(x):
            r = memo.get(x)
            if r is None:
                r = self._ite(self._mk(remap[old_lvl[x]], 0, 1), rec(old_hi[x]), rec(old_lo[x]))
                memo[x] = r
            return r

        for f in live:
            f.node = rec(f.node)
        self._clear_caches()

    # ------------------------------------------------------------------
    def to_dot(self, roots: Mapping[str, Function]) -> str:
        """Graphviz text: solid edges for then-branches, dashed for else."""
        lines = ["digraph bdd {", '  node [shape=circle];',
                 '  "F" [shape=box, label="0"];', '  "T" [shape=box, label="1"];']
        seen = set()

        def nid(x):
            return "F" if x == 0 else "T" if x == 1 else f"n{x}"

        stack = []
        for label, f in roots.items():
            u = self._own(f)
            lines.append(f'  "{label}" [shape=plaintext];')
            lines.append(f'  "{label}" -> "{nid(u)}";')
            stack.append(u)
        while stack:
            x = stack.pop()
            if x <= 1 or x in seen:
                continue
            seen.add(x)
            lines.append(f'  "{nid(x)}" [label="{self._level_name[self._lvl[x]]}"];')
            lines.append(f'  "{nid(x)}" -> "{nid(self._hi[x])}";')
            lines.append(f'  "{nid(x)}" -> "{nid(self._lo[x])}" [style=dashed];')
            stack.append(self._lo[x])
            stack.append(self._hi[x])
        lines.append("}")
        return "\n".join(lines) + "\n"


def assignments(names: Sequence[str]) -> Iterator[Dict[str, bool]]:
    """All assignments to ``names`` in lexicographic order (first name most significant)."""
    for bits in itertools.product((False, True), repeat=len(names)):
        yield dict(zip(names, bits))
