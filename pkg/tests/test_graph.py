import numpy as np
import pytest

from sgrk.bench import gen_random_weak_buchi
from sgrk.dd import BDD
from sgrk.errors import SGRKError
from sgrk.graph import Space, build_graph, build_reach, dc_step, identity, is_scc_saturated
from sgrk.oracle import closure, enumerate_game, strong_components
from sgrk.spec import parse_spec

from test_spec import TWO_MODE


def _space(n_bits):
    bdd = BDD()
    names = [f"v{k}" for k in range(n_bits)]
    for v in names:
        bdd.declare(v, "input")
    return bdd, Space(bdd, names)


def _rel(bdd, space, edges, n_bits):
    tab = np.zeros((1 << n_bits, 1 << n_bits), dtype=bool)
    for a, b in edges:
        tab[a, b] = True
    return bdd.from_table(tab, space.cur + space.pri)


def test_single_self_loop():
    bdd, sp = _space(1)
    trans = _rel(bdd, sp, [(0, 0)], 1)
    # state 1 is not part of the graph, reach is still reflexive on it
    reach = build_reach(sp, trans)
    assert reach == identity(sp)


def test_input_system_reach():
    bdd, sp = _space(2)
    trans = _rel(bdd, sp, [(0, 1), (0, 2), (1, 1), (2, 2), (3, 3)], 2)
    reach = bdd.to_table(build_reach(sp, trans), sp.cur + sp.pri).reshape(4, 4)
    want = np.eye(4, dtype=bool)
    want[0, 1] = want[0, 2] = True
    assert (reach == want).all()


def test_chain_of_four():
    bdd, sp = _space(2)
    trans = _rel(bdd, sp, [(0, 1), (1, 2), (2, 3), (3, 3)], 2)
    preds = build_graph(sp, trans)
    assert bdd.sat_count(preds.reach, sp.cur + sp.pri) == 10
    assert preds.reach_iterations == 4
    assert bdd.to_table(preds.terminal, sp.cur).tolist() == [False, False, False, True]


def test_two_scc_chain_dc_step():
    bdd, sp = _space(2)
    # A = {0, 1} -> B = {2, 3}
    trans = _rel(bdd, sp, [(0, 1), (1, 0), (1, 2), (2, 3), (3, 2)], 2)
    preds = build_graph(sp, trans)
    b = bdd.from_table(np.array([False, False, True, True]), sp.cur)
    assert preds.terminal == b
    assert dc_step(sp, preds, b).is_true
    assert dc_step(sp, preds, bdd.true).is_true
    with pytest.raises(SGRKError):
        dc_step(sp, preds, bdd.from_table(np.array([False, True, True, True]), sp.cur), check=True)


def test_running_example_product():
    game = parse_spec(TWO_MODE)
    g = game.structure
    bdd = g.bdd
    sp = Space(bdd, g.X)
    preds = build_graph(sp, g.trans)
    eg = enumerate_game(game)
    valid = [i * 4 + o for i in (0, 1, 2) for o in (0, 1, 2)]
    classes = {frozenset(s for s in valid if eg.scc_id[s] == eg.scc_id[v]) for v in valid}
    # input 00 has no self-loop, so states with t = 00 are singleton classes
    name = lambda s: (format(s // 4, "02b"), format(s % 4, "02b"))  # noqa: E731
    got = {frozenset(map(name, c)) for c in classes}
    assert got == {
        frozenset({("00", "00")}), frozenset({("00", "01")}), frozenset({("00", "10")}),
        frozenset({("01", "00"), ("01", "01")}), frozenset({("01", "10")}),
        frozenset({("10", "00"), ("10", "01")}), frozenset({("10", "10")}),
    }
    term = bdd.to_table(preds.terminal, g.X)
    assert {name(s) for s in valid if term[s]} == {("01", "10"), ("10", "10")}
    first = dc_step(sp, preds, bdd.false)
    assert first == preds.terminal


def test_scc_is_an_equivalence():
    g, _ = gen_random_weak_buchi(5, n_vars=5)
    sp = Space(g.bdd, g.X)
    preds = build_graph(sp, g.trans)
    bdd = g.bdd
    scc = preds.scc
    assert bdd.apply("implies", identity(sp), scc).is_true
    assert scc == bdd.rename(scc, sp.swap)
    # transitivity via the auxiliary copy
    left = bdd.rename(scc, sp.pri_to_aux)
    right = bdd.rename(scc, sp.cur_to_aux)
    comp = bdd.and_exists(left, right, sp.aux)
    assert bdd.apply("implies", comp, scc).is_true


@pytest.mark.parametrize("seed", range(60))
def test_random_structures_match_explicit_graphs(seed):
    g, _ = gen_random_weak_buchi(seed, separated=seed % 3 != 0)
    bdd = g.bdd
    sp = Space(bdd, g.X)
    preds = build_graph(sp, g.trans)
    eg = enumerate_game(g)
    n = eg.nS
    reach = bdd.to_table(preds.reach, sp.cur + sp.pri).reshape(n, n)
    assert (reach == closure(eg.adj)).all()
    scc = bdd.to_table(preds.scc, sp.cur + sp.pri).reshape(n, n)
    _, lab = strong_components(eg.adj)
    assert (scc == (lab[:, None] == lab[None, :])).all()
    term = bdd.to_table(preds.terminal, sp.cur)
    want = (~reach | scc).all(axis=1)
    assert (term == want).all()
    dc, steps = preds.terminal, 0
    while not dc.is_true:
        nxt = dc_step(sp, preds, dc, check=True)
        assert bdd.apply("implies", dc, nxt).is_true and nxt != dc
        assert is_scc_saturated(sp, preds.scc, nxt)
        dc, steps = nxt, steps + 1
    assert steps <= eg.n_scc
