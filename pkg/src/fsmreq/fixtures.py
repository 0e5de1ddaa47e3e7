"""Bundled example models and requirements."""

from __future__ import annotations

from importlib import resources

from fsmreq.fsm import DFSM, parse_fsm, relabel
from fsmreq.requirements import CompositeRequirement, parse_requirements

__all__ = ["fixture_path", "fixture_text", "load_model", "load_requirement", "NAMES"]

NAMES = (
    "fsbrts.csv",
    "fsbrts_r1.req",
    "fsbrts_r2.req",
    "example_m.csv",
    "example_s.csv",
    "example_s_prime.csv",
    "example_r.req",
)


def fixture_path(name: str):
    return resources.files("fsmreq") / "data" / name


def fixture_text(name: str) -> str:
    return fixture_path(name).read_text(encoding="utf-8")


def load_model(name: str, like: DFSM | None = None) -> DFSM:
    """Parse a bundled model; with ``like``, re-index it onto that model's alphabets."""
    m = parse_fsm(fixture_text(name))
    if like is not None:
        m = relabel(m, inputs=like.inputs, outputs=like.outputs)
    return m


def load_requirement(name: str, m: DFSM) -> CompositeRequirement:
    return parse_requirements(fixture_text(name), m)
