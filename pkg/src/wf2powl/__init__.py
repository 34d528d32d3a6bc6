"""Transform safe and sound workflow nets into POWL 2.0 models."""

from .behavior import (
    EqualityVerdict,
    SafenessVerdict,
    SoundnessVerdict,
    TraceSet,
    bounded_equal,
    check_safe,
    check_sound,
    enumerate_language,
    reachability_graph,
)
from .convert import (
    ConversionOptions,
    ConversionReport,
    Failure,
    convert,
    convert_and_verify,
    is_base_case,
)
from .generate import GenParams, bench_csv, bench_run, generate_separable_net, random_powl
from .nets import (
    Marking,
    NetStructureError,
    PetriNet,
    TransitionPartition,
    WorkflowNet,
    isomorphic,
    require_wf_net,
    substitute,
    validate_wf_net,
)
from .powl import (
    ChoiceGraph,
    ChoiceGraphStruct,
    Leaf,
    OrderStruct,
    PartialOrder,
    PowlNode,
    language_bounded,
    powl_to_net,
    shuffle,
    validate_powl,
)
from .powl_io import parse_powl, serialize_powl
from .pnml import parse_pnml, write_pnml
from .preprocess import RuleFlags, preprocess

__version__ = "0.1.0"

__all__ = [
    "ChoiceGraph", "ChoiceGraphStruct", "ConversionOptions", "ConversionReport",
    "EqualityVerdict", "Failure", "GenParams", "Leaf", "Marking",
    "NetStructureError", "OrderStruct", "PartialOrder", "PetriNet", "PowlNode",
    "RuleFlags", "SafenessVerdict", "SoundnessVerdict", "TraceSet",
    "TransitionPartition", "WorkflowNet", "bench_csv", "bench_run",
    "bounded_equal", "check_safe", "check_sound", "convert",
    "convert_and_verify", "enumerate_language", "generate_separable_net",
    "is_base_case", "isomorphic", "language_bounded", "parse_pnml",
    "parse_powl", "powl_to_net", "preprocess", "random_powl",
    "reachability_graph", "require_wf_net", "serialize_powl", "shuffle",
    "substitute", "validate_powl", "validate_wf_net", "write_pnml",
]
