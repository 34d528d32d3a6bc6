import pytest

from wf2powl.behavior import bounded_equal, enumerate_language
from wf2powl.convert import (
    ConversionOptions,
    PROGRESS_GUARD,
    convert,
    convert_and_verify,
    is_base_case,
)
from wf2powl.nets import PetriNet, require_wf_net
from wf2powl.powl import ChoiceGraph, Leaf, PartialOrder, language_bounded

from fixture_nets import (
    asymmetric_choice_net,
    base_case_net,
    choice_net,
    crossed_entry_loops_net,
    hidden_choice_net,
    longterm_dependency_net,
    loop_net,
    nonseparable_free_choice_net,
    overlapping_loops_net,
    parallel_net,
    retailer_net,
    sequence_net,
    xor_in_parallel_net,
)

NO_PRE = ConversionOptions(preprocess=False)


def test_is_base_case():
    assert is_base_case(base_case_net()) == "a"
    assert is_base_case(sequence_net()) is None
    extra_place = require_wf_net(PetriNet.build(
        ["src", "mid", "snk"], {"a": "a", "b": "b"},
        [("src", "a"), ("a", "mid"), ("mid", "b"), ("b", "snk")]))
    assert is_base_case(extra_place) is None


def test_convert_base_case_to_leaf():
    report = convert(base_case_net())
    assert isinstance(report.result, Leaf)
    assert report.result.label == "a"


def test_convert_sequence_prefers_partial_order():
    report = convert(sequence_net())
    assert isinstance(report.result, PartialOrder)
    assert all(isinstance(c, Leaf) for c in report.result.children)


def test_convert_parallel():
    report = convert_and_verify(parallel_net(), max_len=6)
    assert isinstance(report.result, PartialOrder)
    assert report.equivalence


def test_convert_choice():
    report = convert_and_verify(choice_net(), max_len=6)
    assert report.ok and report.equivalence
    # root is sequential (a before the choice before d)
    assert isinstance(report.result, PartialOrder)
    kinds = sorted(type(c).__name__ for c in report.result.children)
    assert kinds == ["ChoiceGraph", "Leaf", "Leaf"]


def test_convert_loop_produces_cyclic_graph():
    report = convert_and_verify(loop_net(), max_len=8)
    assert report.ok and report.equivalence


def test_convert_xor_in_parallel():
    report = convert_and_verify(xor_in_parallel_net(), max_len=8)
    assert report.ok and report.equivalence


def test_strict_reachability_fails_on_nested_choice():
    report = convert(xor_in_parallel_net(),
                     ConversionOptions(preprocess=False, reflexive_reach=False))
    assert not report.ok


def test_convert_retailer():
    report = convert_and_verify(retailer_net(), max_len=12)
    assert report.ok and report.equivalence
    assert isinstance(report.result, ChoiceGraph)
    nested = [c for c in report.result.children if isinstance(c, PartialOrder)]
    assert len(nested) == 1


@pytest.mark.parametrize("builder,po_reason_contains", [
    (longterm_dependency_net, "single-exit"),
    (asymmetric_choice_net, "single-exit"),
    (overlapping_loops_net, "single-entry"),
    (crossed_entry_loops_net, "single-entry"),
])
def test_convert_irreducible_nets_fail_with_diagnostics(builder, po_reason_contains):
    report = convert(builder(), NO_PRE)
    assert not report.ok
    assert po_reason_contains in report.failure.po_reason


def test_progress_guard_fires_on_overlapping_loops():
    report = convert(overlapping_loops_net(), NO_PRE)
    assert report.failure.cg_reason == PROGRESS_GUARD


def test_nonseparable_net_fails_without_preprocessing():
    report = convert(nonseparable_free_choice_net(), NO_PRE)
    assert not report.ok
    assert report.failure.fragment.transitions


def test_preprocessing_rescues_hidden_choice():
    assert not convert(hidden_choice_net(), NO_PRE).ok
    report = convert_and_verify(hidden_choice_net(), max_len=8)
    assert report.ok and report.equivalence


def test_failure_report_carries_both_partitions():
    report = convert(longterm_dependency_net(), NO_PRE)
    f = report.failure
    assert set().union(*f.po_parts) == longterm_dependency_net().transitions
    assert set().union(*f.cg_parts) == longterm_dependency_net().transitions
    assert f.po_reason and f.cg_reason


def test_verify_projections_option():
    report = convert(retailer_net(),
                     ConversionOptions(verify_projections=True))
    assert report.ok


def test_conversion_is_deterministic():
    from wf2powl.powl_io import serialize_powl
    a = serialize_powl(convert(retailer_net()).result)
    b = serialize_powl(convert(retailer_net()).result)
    assert a == b


def test_sequential_net_both_constructions_agree_on_language():
    # the partial-order branch wins, but a choice-graph reading of a pure
    # sequence has the same bounded language
    wf = sequence_net()
    report = convert(wf)
    assert isinstance(report.result, PartialOrder)
    from wf2powl.decompose import cg_partition, cg_project, execution_flow, is_concurrency_hiding
    g = cg_partition(wf)
    assert is_concurrency_hiding(wf, g)
    children = tuple(convert(cg_project(wf, part), NO_PRE).result for part in g)
    alt = ChoiceGraph(execution_flow(wf, g), children)
    assert bounded_equal(language_bounded(report.result, 6),
                         language_bounded(alt, 6))
    assert bounded_equal(enumerate_language(wf, 6), language_bounded(alt, 6))
