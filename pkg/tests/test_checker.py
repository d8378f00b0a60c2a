import pytest
from hypothesis import given, settings, strategies as st

import oracle
from unison_lab import tracefile
from unison_lab.checker import (
    STRONG,
    WEAK,
    StateSpace,
    check_blocking,
    check_closure,
    check_convergence_reachability,
    check_potential_decrease,
    check_priority,
    find_fair_cycle,
    find_starvation_lasso,
    validate_lasso_raw,
    walk_is_fair,
)
from unison_lab.core import Configuration
from unison_lab.engine import replays_exactly
from unison_lab.protocol import N, Protocol, RuleDecision, UFTSS_PROTOCOL
from unison_lab.scheduler import classify_lasso
from unison_lab.topology import chain, ring, y_network


class PlusTwo(Protocol):
    """UFTSS with rule N replaced by H := H + 2."""

    def decide(self, g, c, p):
        d = UFTSS_PROTOCOL.decide(g, c, p)
        return RuleDecision(N, c.clocks[p] + 2) if d.rule == N else d


def test_state_enumeration_matches_oracle():
    space = StateSpace(chain(3), (), 2)
    assert {c.clocks for c in space.states()} == set(oracle.canonical_states(3, 2))


def test_state_space_independent_of_traversal_order():
    space = StateSpace(chain(3), (), 3)
    a = space.explore(strategy="bfs")
    b = space.explore(strategy="dfs")
    assert set(a.nodes) == set(b.nodes)

    def edges(ex):
        return {(ex.nodes[t.src], ex.nodes[t.dst], t.selected, t.extra) for t in ex.transitions}

    assert edges(a) == edges(b)
    assert a.boundary == b.boundary


def test_transitions_canonical_and_boundary_counted():
    space = StateSpace(chain(4), (1,), 2)
    ex = space.explore(overapprox=False)
    for t in ex.transitions:
        assert space.contains(ex.nodes[t.src]) and space.contains(ex.nodes[t.dst])
    assert ex.boundary > 0


def test_overapprox_adds_shifted_successor():
    space = StateSpace(chain(2), (), 3)
    c = Configuration.of((3, 4))
    ex = space.explore([c], overapprox=True)
    # raw (3,4) -> (3,2) but canonical (1,2) -> (1,0); both are kept
    targets = {ex.nodes[t.dst].clocks for t in ex.transitions if t.src == ex.initial[0]}
    assert (1, 0) in targets and (2, 1) in targets


@pytest.mark.parametrize("g", [chain(4), ring(4)])
@pytest.mark.parametrize("crashed", [(), (0,), (2,)])
def test_closure_clean(g, crashed):
    assert check_closure(g, crashed, 3) == []


def test_closure_negative_control():
    found = check_closure(chain(4), (), 3, protocol=PlusTwo())
    assert found
    v = found[0]
    assert v.kind == "closure"
    assert replays_exactly(v.trace, PlusTwo())


def test_closure_counts_match_oracle():
    g = chain(4)
    adj = oracle.adjacency(4, g.edges())
    want = sum(
        len(list(oracle.lc_selections(adj, oracle.enabled(adj, s, ()))))
        for s in oracle.canonical_states(4, 3) if oracle.gamma1(adj, s)
    )
    assert check_closure(g, (), 3).transitions == want


def test_blocking():
    assert check_blocking(chain(5), 4) == []
    assert check_blocking(ring(5), 4) == []
    # on the degree-3 hub a far third neighbor empties Inter and C1 can fire
    assert check_blocking(y_network(1), 4)


def test_priority():
    for g in (chain(2), chain(4), ring(3), ring(4)):
        assert check_priority(g, 3) == []
    assert check_priority(chain(4), 3, protocol=PlusTwo())


def test_potential_decrease():
    assert check_potential_decrease(chain(4), 4) == []
    assert check_potential_decrease(ring(4), 4, (0,)) == []
    assert check_potential_decrease(chain(4), 4, (1,)) == []


def test_potential_decrease_counts_match_oracle():
    g = ring(4)
    adj = oracle.adjacency(4, g.edges())
    total = 0
    for s in oracle.canonical_states(4, 4):
        if oracle.gamma1(adj, s):
            continue
        en = [p for p in oracle.enabled(adj, s, ()) if max(abs(s[p] - s[q]) for q in adj[p]) >= 2]
        for sel in oracle.lc_selections(adj, en):
            total += 1
            after = oracle.apply(adj, s, sel)
            assert oracle.lex_less(oracle.drift_counts(adj, after), oracle.drift_counts(adj, s))
    assert check_potential_decrease(g, 4).transitions == total


# ---------------------------------------------------------------- fair cycles


@st.composite
def labeled_graphs(draw):
    k = draw(st.integers(1, 4))
    procs = st.frozensets(st.integers(0, 2), max_size=3)
    m = draw(st.integers(1, 6))
    edges = [
        (draw(st.integers(0, k - 1)), draw(st.integers(0, k - 1)), draw(st.frozensets(st.integers(0, 2), min_size=1, max_size=2)))
        for _ in range(m)
    ]
    enabled = {u: draw(procs) for u in range(k)}
    return edges, enabled


@settings(max_examples=300, deadline=None)
@given(labeled_graphs(), st.sampled_from([STRONG, WEAK]))
def test_fair_cycle_search_matches_brute_force(case, fairness):
    edges, enabled = case
    walk = find_fair_cycle(edges, enabled, fairness, nodes=range(len(enabled)))
    assert (walk is not None) == oracle.brute_fair_cycle_exists(edges, enabled, fairness)
    if walk is not None:
        assert walk_is_fair(walk, edges, enabled, fairness)


def test_fair_cycle_handmade():
    # two-state loop; p2 enabled at A but only p0/p1 execute
    edges = [("A", "B", frozenset({0})), ("B", "A", frozenset({1}))]
    enabled = {"A": frozenset({0, 2}), "B": frozenset({1})}
    assert find_fair_cycle(edges, enabled, STRONG) is None
    assert find_fair_cycle(edges, enabled, WEAK) is not None
    # a self-loop at B avoiding A is strongly fair
    edges.append(("B", "B", frozenset({1})))
    walk = find_fair_cycle(edges, enabled, STRONG)
    assert walk == [2]


# ---------------------------------------------------------------- lassos


def test_starvation_witness_on_y_network():
    v = find_starvation_lasso(y_network(1), (0,), 4, STRONG)
    assert v is not None and v.kind == "starvation" and v.validated
    assert 2 in v.processors
    t = v.trace
    assert replays_exactly(t)
    assert classify_lasso(t.graph, t, t.lasso_start).strongly_fair_admissible
    assert validate_lasso_raw(t, starving=v.processors)
    assert tracefile.loads(tracefile.dumps(t)).lasso_start == t.lasso_start


def test_starvation_target_and_initial():
    start = Configuration.of((0, 1, 2, 3, 3), {0})
    v = find_starvation_lasso(y_network(1), (0,), 4, STRONG, initial=[start], target=2)
    assert v is not None and 2 in v.processors and v.validated
    assert v.trace.initial == start


@pytest.mark.parametrize("g", [chain(5), ring(5)])
def test_no_starvation_on_degree_two(g):
    assert find_starvation_lasso(g, (0,), 4, STRONG) is None


def test_weak_fairness_witness_on_y_network():
    v = find_starvation_lasso(y_network(1), (0,), 4, WEAK)
    assert v is not None and v.validated
    t = v.trace
    assert classify_lasso(t.graph, t, t.lasso_start).weakly_fair_admissible


def test_raw_validation_rejects_doctored_lasso():
    v = find_starvation_lasso(y_network(1), (0,), 4, STRONG)
    t = v.trace
    t.lasso_start = len(t.steps)
    assert not validate_lasso_raw(t)


def test_convergence_clean():
    assert check_convergence_reachability(chain(4), (), 3) == []
    assert check_convergence_reachability(ring(4), (0,), 3) == []


def test_convergence_reports_two_crash_freeze():
    start = Configuration.of((0, 1, 2, 3, 4), {0, 4})
    found = check_convergence_reachability(chain(5), (0, 4), 4, initial=[start])
    assert [v.kind for v in found] == ["freeze"]
    v = found[0]
    assert v.validated and v.trace.status == "terminal" and not v.trace.steps
    assert replays_exactly(v.trace)


def test_report_summary_fields():
    rep = check_closure(chain(3), (), 2)
    s = rep.summary()
    assert s["violations"] == 0 and s["states"] > 0 and s["span"] == 2


def test_state_space_rejects_outside_initial():
    with pytest.raises(ValueError):
        StateSpace(chain(3), (), 2).explore([Configuration.of((0, 5, 9))])
    with pytest.raises(ValueError):
        StateSpace(chain(3), (), 0)
