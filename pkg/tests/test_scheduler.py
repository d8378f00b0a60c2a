import itertools

import pytest
from hypothesis import given, settings, strategies as st

from unison_lab.core import Configuration
from unison_lab.engine import run, step
from unison_lab.protocol import enabled_decisions
from unison_lab.scheduler import (
    LRU,
    Daemon,
    History,
    NotALasso,
    RoundRobin,
    Scripted,
    ScriptExhausted,
    ScriptViolation,
    SeededRandom,
    classify_cycle,
    classify_lasso,
    greedy_selection,
    is_legal,
    neutralized,
    parse_policy,
    parse_script,
    select,
)
from unison_lab.topology import chain, ring, y_network


def test_daemon_legality():
    g = chain(5)
    en = [1, 2, 4]
    assert is_legal(Daemon.LOCALLY_CENTRAL, g, [1, 4], en)
    assert not is_legal(Daemon.LOCALLY_CENTRAL, g, [1, 2], en)
    assert is_legal(Daemon.DISTRIBUTED, g, [1, 2], en)
    assert not is_legal(Daemon.CENTRAL, g, [1, 4], en)
    assert is_legal(Daemon.CENTRAL, g, [4], en)
    assert is_legal(Daemon.SYNCHRONOUS, g, [1, 2, 4], en)
    assert not is_legal(Daemon.SYNCHRONOUS, g, [1, 4], en)
    assert not is_legal(Daemon.DISTRIBUTED, g, [], en)
    assert not is_legal(Daemon.DISTRIBUTED, g, [0], en)


def test_lru_examples():
    c = Configuration.of((0,) * 5)
    h = History(5)
    h.record(9, [2])
    # non-adjacent pair: both chosen
    assert set(LRU().select(Daemon.LOCALLY_CENTRAL, chain(5), c, [2, 4], h, 10)) == {2, 4}
    # adjacent pair: the never-executed one wins
    assert LRU().select(Daemon.LOCALLY_CENTRAL, chain(5), c, [2, 3], h, 10) == (3,)
    assert LRU().select(Daemon.CENTRAL, chain(5), c, [2, 4], h, 10) == (4,)


def test_round_robin_advances():
    rr = RoundRobin()
    c = Configuration.of((0,) * 4)
    h = History(4)
    picks = [rr.select(Daemon.CENTRAL, ring(4), c, [0, 1, 2, 3], h, k) for k in range(5)]
    assert picks == [(0,), (1,), (2,), (3,), (0,)]


def test_seeded_random_is_reproducible():
    g = ring(6)
    c = Configuration.of((0,) * 6)
    a = [SeededRandom(5).select(Daemon.LOCALLY_CENTRAL, g, c, list(range(6)), History(6), 0) for _ in range(3)]
    assert len(set(a)) == 1
    assert is_legal(Daemon.LOCALLY_CENTRAL, g, a[0], range(6))


def test_scripted_errors():
    g = chain(5)
    c = Configuration.of((1, 7, 6, 7, 13))
    sc = Scripted([(1, 2)])
    with pytest.raises(ScriptViolation) as err:
        sc.select(Daemon.LOCALLY_CENTRAL, g, c, [1, 2, 4], History(5), 0)
    assert err.value.step == 0
    with pytest.raises(ScriptExhausted):
        sc.select(Daemon.LOCALLY_CENTRAL, g, c, [1, 2], History(5), 1)
    crashed = c.with_crashed({1})
    with pytest.raises(ScriptViolation):
        Scripted([(1,)]).select(Daemon.LOCALLY_CENTRAL, g, crashed, [4], History(5), 0)


def test_select_requires_enabled():
    with pytest.raises(ValueError):
        select(LRU(), Daemon.CENTRAL, chain(2), Configuration.of((0, 0)), [], History(2))


def test_parse_policy_and_script(tmp_path):
    assert parse_policy("lru").descriptor == "lru"
    assert parse_policy("random:3").seed == 3
    path = tmp_path / "s.sel"
    path.write_text("1,4\n# comment\n0,3\n")
    assert parse_policy(f"script:{path}").selections == [(1, 4), (0, 3)]
    assert parse_script("2\n\n3,1\n") == [(2,), (3, 1)]
    for bad in ("fifo", "random:x", "script:"):
        with pytest.raises(ValueError):
            parse_policy(bad)


def test_classify_cycle_definitions():
    # p enabled everywhere, never executed: not weakly fair
    v = classify_cycle([{0, 1}, {0, 1}], [{1}, {1}])
    assert not v.weakly_fair_admissible and not v.strongly_fair_admissible
    # p enabled at some but not all configurations, never executed
    v = classify_cycle([{0, 1}, {1}], [{1}, {1}])
    assert v.weakly_fair_admissible and not v.strongly_fair_admissible
    v = classify_cycle([{0, 1}, {1}], [{0}, {1}])
    assert v.weakly_fair_admissible and v.strongly_fair_admissible


sets = st.frozensets(st.integers(0, 5), max_size=6)


@given(st.lists(st.tuples(sets, sets), min_size=1, max_size=6))
def test_strong_implies_weak(cycle):
    v = classify_cycle([a for a, _ in cycle], [b for _, b in cycle])
    assert not v.strongly_fair_admissible or v.weakly_fair_admissible


def test_classify_lasso_on_y_network():
    g = y_network(1)
    script = [(3,), (3,), (3,), (4,), (4,), (4,), (3,)]
    t = run(g, Configuration.of((0, 1, 2, 3, 3), {0}), Scripted(script), max_steps=7)
    v = classify_lasso(g, t, 1)
    assert v.strongly_fair_admissible and v.weakly_fair_admissible
    assert v.enabled_somewhere == {3, 4}
    with pytest.raises(NotALasso):
        classify_lasso(g, t, 0)
    with pytest.raises(NotALasso):
        classify_lasso(g, t, 7)


def test_neutralized_examples():
    g = chain(3)
    before = Configuration.of((0, 3, 4))
    after = step(g, before, [0])
    assert after.clocks == (2, 3, 4)
    assert neutralized(g, before, after, 1, executed=False)
    assert not neutralized(g, before, after, 1, executed=True)
    # disabled before the step
    blocked = Configuration.of((4, 5, 6))
    assert not neutralized(g, blocked, step(g, blocked, [0]), 1, executed=False)


@st.composite
def lc_runs(draw):
    n = draw(st.integers(3, 6))
    g = draw(st.sampled_from([chain(n), ring(n)]))
    clocks = draw(st.lists(st.integers(0, 10), min_size=n, max_size=n))
    crashed = draw(st.sets(st.integers(0, n - 1), max_size=1))
    policy = draw(st.sampled_from(["lru", "rr", "rand"]))
    daemon = draw(st.sampled_from(list(Daemon)))
    return g, Configuration.of(clocks, crashed), policy, daemon, draw(st.integers(0, 99))


@settings(max_examples=60, deadline=None)
@given(lc_runs())
def test_every_policy_emits_legal_selections(case):
    g, c, kind, daemon, seed = case
    policy = {"lru": LRU(), "rr": RoundRobin(), "rand": SeededRandom(seed)}[kind]
    t = run(g, c, policy, daemon, max_steps=60)
    configs = t.configurations()
    for i, s in enumerate(t.steps):
        en = enabled_decisions(g, configs[i])
        assert is_legal(daemon, g, s.selected, en)
        assert not set(s.selected) & configs[i].crashed


@pytest.mark.parametrize("g", [chain(5), ring(5)])
def test_lru_no_long_enabled_wait(g):
    for seed in range(5):
        import random

        rng = random.Random(seed)
        c = Configuration.of([rng.randint(0, 10) for _ in range(g.n)])
        t = run(g, c, LRU(), Daemon.LOCALLY_CENTRAL, max_steps=10_000)
        configs = t.configurations()
        wait = [0] * g.n
        for i, s in enumerate(t.steps):
            en = enabled_decisions(g, configs[i])
            for p in range(g.n):
                wait[p] = 0 if (p not in en or p in s.selected) else wait[p] + 1
                assert wait[p] < 4 * g.n


def test_greedy_selection_is_maximal():
    g = ring(6)
    for order in itertools.permutations(range(6)):
        sel = greedy_selection(Daemon.LOCALLY_CENTRAL, g, order)
        rest = [p for p in range(6) if p not in sel]
        assert all(any(q in sel for q in g.neighbors(p)) for p in rest)
