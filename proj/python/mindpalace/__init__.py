"""Python access to the mind palace engine.

Scenario documents and configs are plain dicts; results come back as dicts.
"""

import json

from . import _core
from ._core import BudgetError, Error, OracleTransportError, ValidationError, correctness, exploration_efficiency

__all__ = [
    "BudgetError",
    "Error",
    "OracleTransportError",
    "ValidationError",
    "correctness",
    "exploration_efficiency",
    "generate_scenario",
    "plan_area_sequence",
    "run_question",
    "run_suite",
    "validate_scenario",
]


def _text(doc):
    return doc if isinstance(doc, str) else json.dumps(doc)


def generate_scenario(**spec):
    return json.loads(_core.generate_scenario(**spec))


def validate_scenario(scenario):
    return _core.validate_scenario(_text(scenario))


def run_question(scenario, question_id, agent="mindpalace", **config):
    return json.loads(_core.run_question(_text(scenario), question_id, agent, json.dumps(config)))


def run_suite(scenarios, **config):
    return json.loads(_core.run_suite([_text(s) for s in scenarios], json.dumps(config)))


def plan_area_sequence(probabilities, entry, between=None, depth=3, mode="present", retrieval_cost=1.0):
    """Returns (sequence, expected_cost). `probabilities` maps area -> probability."""
    probs = sorted(dict(probabilities).items(), key=lambda kv: (-kv[1], kv[0]))
    pairs = {tuple(k): v for k, v in (between or {}).items()}
    return _core.plan_area_sequence(probs, dict(entry), pairs, depth, mode, retrieval_cost)
