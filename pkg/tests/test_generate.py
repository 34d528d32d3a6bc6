import pytest

from wf2powl.behavior import check_safe, check_sound
from wf2powl.generate import (
    GenParams,
    bench_csv,
    bench_run,
    generate_separable_net,
    random_powl,
)
from wf2powl.powl import ChoiceGraph, Leaf, leaves, validate_powl
from wf2powl.powl_io import serialize_powl


def test_params_validation():
    with pytest.raises(ValueError):
        GenParams(seed=1, target_transitions=0)
    with pytest.raises(ValueError):
        GenParams(seed=1, max_children=1)
    with pytest.raises(ValueError):
        GenParams(seed=1, silent_prob=1.5)
    with pytest.raises(ValueError):
        GenParams(seed=1, leaf_weight=0, po_weight=0, cg_weight=0)


def test_seed_determinism():
    p = GenParams(seed=11, target_transitions=15)
    assert serialize_powl(random_powl(p)) == serialize_powl(random_powl(p))


def test_different_seeds_differ():
    a = serialize_powl(random_powl(GenParams(seed=1, target_transitions=15)))
    b = serialize_powl(random_powl(GenParams(seed=2, target_transitions=15)))
    assert a != b


def test_leaf_only_weights_give_single_leaf():
    p = GenParams(seed=3, target_transitions=1,
                  leaf_weight=1, po_weight=0, cg_weight=0)
    assert isinstance(random_powl(p), Leaf)


@pytest.mark.parametrize("seed", [1, 5, 9])
def test_leaf_count_near_target(seed):
    target = 25
    model = random_powl(GenParams(seed=seed, target_transitions=target))
    count = len(leaves(model))
    assert 0.8 * target <= count <= 1.2 * target


def test_cycle_probability_zero_gives_acyclic_graphs():
    model = random_powl(GenParams(seed=4, target_transitions=30,
                                  cg_weight=1.0, leaf_weight=0.3,
                                  po_weight=0, cycle_prob=0.0))

    def acyclic(node) -> bool:
        if isinstance(node, ChoiceGraph):
            edges = {(u, v) for u, v in node.graph.edges
                     if isinstance(u, int) and isinstance(v, int)}
            seen, done = set(), set()

            def dfs(x, stack):
                if x in stack:
                    return False
                if x in done:
                    return True
                return all(dfs(v, stack | {x}) for u, v in edges if u == x)

            if not all(dfs(i, frozenset()) for i in range(node.graph.child_count)):
                return False
        if isinstance(node, Leaf):
            return True
        return all(acyclic(c) for c in node.children)

    assert acyclic(model)


@pytest.mark.parametrize("seed", range(1, 11))
def test_generated_nets_are_safe_and_sound(seed):
    wf, model = generate_separable_net(GenParams(seed, target_transitions=12))
    assert validate_powl(model) is None
    assert check_safe(wf).is_safe
    assert check_sound(wf).is_sound


def test_bench_run_and_csv():
    rows = bench_run([5, 10], per_size=2)
    assert len(rows) == 4
    assert all(r.success for r in rows)
    text = bench_csv(rows)
    lines = text.strip().splitlines()
    assert lines[0] == "size,seed,transitions,places,wall_ms,success,po_nodes,cg_nodes"
    assert len(lines) == 5
    # identical modulo the timing column
    rows2 = bench_run([5, 10], per_size=2)
    strip = lambda t: [",".join(c for i, c in enumerate(l.split(",")) if i != 4)
                       for l in t.strip().splitlines()]
    assert strip(text) == strip(bench_csv(rows2))
