import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sgrk.dd import BDD, assignments
from sgrk.errors import DDError

from conftest import truth_table

NAMES = ["a", "b", "c", "d", "w", "x", "y", "z"]


def test_literal_semantics(kernel):
    t = kernel.mk_var("a")
    assert kernel.evaluate(t, {"a": True})
    assert not kernel.evaluate(t, {"a": False})
    with pytest.raises(DDError):
        kernel.mk_var("zz")


def test_apply_identities(kernel):
    x = kernel.mk_var("a")
    assert kernel.apply("and", kernel.true, x) == x
    assert kernel.negate(kernel.negate(x)) == x
    assert kernel.apply("or", x, kernel.negate(x)).is_true
    assert kernel.true != kernel.false


def test_quantifier_examples(kernel):
    i, o = kernel.mk_var("a"), kernel.mk_var("w")
    f = (i & o) | (i & ~o)
    assert kernel.exists(["w"], f) == i
    assert kernel.forall(["w"], i | o) == i
    assert kernel.exists([], i) == i


def test_rename_examples(kernel):
    v = kernel.mk_var("a")
    up = kernel.rename(v, {"a": "a'"})
    assert up == kernel.mk_var("a'")
    assert kernel.rename(up, {"a'": "a"}) == v
    f = kernel.mk_var("a") & kernel.mk_var("b'")
    swapped = kernel.rename(f, {"a": "b", "b": "a", "a'": "b'", "b'": "a'"})
    assert swapped == kernel.mk_var("b") & kernel.mk_var("a'")


def test_counting_and_picking(kernel):
    assert kernel.sat_count(kernel.true, ["a", "b"]) == 4
    assert kernel.sat_count(kernel.false, ["a", "b"]) == 0
    f = kernel.mk_var("a") & ~kernel.mk_var("b")
    assert kernel.pick_one(f, ["a", "b"]) == {"a": True, "b": False}
    assert kernel.pick_one(kernel.false, ["a"]) is None
    # least model first: false below true, first name most significant
    g = kernel.mk_var("a") | kernel.mk_var("b")
    assert kernel.pick_one(g, ["a", "b"]) == {"a": False, "b": True}
    assert [m for m in kernel.enumerate(g, ["a", "b"])] == [
        {"a": False, "b": True}, {"a": True, "b": False}, {"a": True, "b": True}]


def test_enumerate_limit(kernel):
    with pytest.raises(DDError):
        kernel.enumerate(kernel.true, ["a", "b", "c"], limit=4)


def test_op_counter_counts_public_calls(kernel):
    a, b = kernel.mk_var("a"), kernel.mk_var("b")
    start = kernel.ops.count
    f = kernel.apply("and", a, b)
    g = kernel.negate(f)
    kernel.exists(["a"], g)
    kernel.rename(f, {"a": "a'"})
    kernel.and_exists(f, g, ["b"])
    assert kernel.ops.count - start == 5
    kernel.sat_count(f, ["a", "b"])
    kernel.evaluate(f, {"a": True, "b": True})
    kernel.to_table(f, ["a", "b"])
    assert kernel.ops.count - start == 5
    kernel.ops.reset()
    assert kernel.ops.count == 0


def test_table_round_trip(kernel):
    rng = np.random.default_rng(1)
    tab = rng.random(1 << 5) < 0.5
    names = ["a", "w", "b'", "c", "z"]
    f = kernel.from_table(tab, names)
    assert (kernel.to_table(f, names) == tab).all()
    assert (truth_table(kernel, f, names) == tab).all()


def test_declaration_errors():
    bdd = BDD()
    bdd.declare("v", "input")
    with pytest.raises(DDError):
        bdd.declare("v", "output")
    with pytest.raises(DDError):
        bdd.declare("q'", "input")


def test_kernel_mismatch():
    a, b = BDD(), BDD()
    a.declare("v", "input")
    b.declare("v", "input")
    with pytest.raises(DDError):
        a.apply("and", a.mk_var("v"), b.mk_var("v"))


def test_reorder_preserves_functions(kernel):
    rng = np.random.default_rng(7)
    names = ["a", "b", "c", "w", "x"]
    tab = rng.random(32) < 0.4
    f = kernel.from_table(tab, names)
    g = kernel.mk_var("a") & kernel.mk_var("x'")
    kernel.reorder()
    assert (kernel.to_table(f, names) == tab).all()
    assert g == kernel.mk_var("a") & kernel.mk_var("x'")
    kernel.reorder(["z", "y", "x", "w", "d", "c", "b", "a"])
    assert (kernel.to_table(f, names) == tab).all()


def test_reorder_remaps_every_equal_handle(kernel):
    f1 = kernel.mk_var("a") & kernel.mk_var("w")
    f2 = kernel.mk_var("w") & kernel.mk_var("a")
    assert f1 == f2 and f1 is not f2
    kernel.reorder(["w", "a", "b", "c", "d", "x", "y", "z"])
    assert f1 == f2
    for f in (f1, f2):
        assert (kernel.to_table(f, ["a", "w"]) == [False, False, False, True]).all()


def test_dot_dump(kernel):
    text = kernel.to_dot({"f": kernel.mk_var("a") & ~kernel.mk_var("w")})
    assert text.startswith("digraph") and "dashed" in text


# ----------------------------------------------------------------------
# property-based checks against truth tables
tables = st.lists(st.booleans(), min_size=16, max_size=16)
FOUR = ["a", "b", "w", "x"]


def _mk(bdd, bits):
    return bdd.from_table(np.array(bits), FOUR)


@settings(max_examples=150, deadline=None)
@given(tables, tables)
def test_canonicity_and_boolean_laws(p, q):
    bdd = BDD()
    for v in "ab":
        bdd.declare(v, "input")
    for v in "wx":
        bdd.declare(v, "output")
    f, g = _mk(bdd, p), _mk(bdd, q)
    assert (f == g) == (p == q)
    tf, tg = np.array(p), np.array(q)
    assert (bdd.to_table(f & g, FOUR) == (tf & tg)).all()
    assert (bdd.to_table(f | g, FOUR) == (tf | tg)).all()
    assert (bdd.to_table(f ^ g, FOUR) == (tf ^ tg)).all()
    assert (bdd.to_table(bdd.apply("implies", f, g), FOUR) == (~tf | tg)).all()
    assert ~(f & g) == (~f | ~g)
    assert bdd.forall(["a", "w"], f) == ~bdd.exists(["a", "w"], ~f)
    assert bdd.and_exists(f, g, ["b", "x"]) == bdd.exists(["b", "x"], f & g)
    assert bdd.ite(f, g, ~g) == ~(f ^ g)


@settings(max_examples=100, deadline=None)
@given(tables, st.sets(st.sampled_from(FOUR)))
def test_quantify_matches_enumeration(p, qs):
    bdd = BDD()
    for v in "ab":
        bdd.declare(v, "input")
    for v in "wx":
        bdd.declare(v, "output")
    f = _mk(bdd, p)
    ex = bdd.exists(qs, f)
    tab = np.array(p).reshape((2,) * 4)
    axes = tuple(FOUR.index(v) for v in qs)
    want = tab.any(axis=axes, keepdims=True) if axes else tab
    want = np.broadcast_to(want, tab.shape).reshape(-1)
    assert (bdd.to_table(ex, FOUR) == want).all()
    assert bdd.sat_count(f, FOUR) == sum(p)


@settings(max_examples=60, deadline=None)
@given(tables, st.dictionaries(st.sampled_from(FOUR), st.booleans()))
def test_restrict_matches_substitution(p, fix):
    bdd = BDD()
    for v in "ab":
        bdd.declare(v, "input")
    for v in "wx":
        bdd.declare(v, "output")
    f = _mk(bdd, p)
    r = bdd.restrict(f, fix)
    for env in assignments(FOUR):
        env2 = dict(env)
        env2.update(fix)
        assert bdd.evaluate(r, env) == bdd.evaluate(f, env2)
