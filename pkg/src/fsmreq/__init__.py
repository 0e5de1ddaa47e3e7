"""Requirements-based test generation for deterministic finite state machines."""

from fsmreq.fsm import (
    DFSM,
    FSM,
    Alphabet,
    IOTrace,
    ModelFormatError,
    after,
    check_properties,
    distinguishing_trace,
    language_equivalent,
    minimize,
    omega_trace,
    parse_fsm,
    serialize_fsm,
    state_cover,
)
from fsmreq.requirements import (
    CompositeRequirement,
    ElementaryRequirement,
    build_m1,
    build_m1_prime,
    build_m2,
    is_requirement_trace,
    parse_requirements,
    satisfies_oracle,
    validate_requirement,
)
from fsmreq.suite import TestSuite, expected_results
from fsmreq.exhaustive import compute_pair_sets, exhaustive_req_suite, h_suite
from fsmreq.complete import filter_requirement_suite, reduction_suite
from fsmreq.harness import (
    coverage_experiment,
    enumerate_machines,
    mutate,
    run_suite_equiv,
    run_suite_reduction,
)
from fsmreq.kernels import BACKEND

__version__ = "0.1.0"
