import json
from pathlib import Path

import pytest

import mindpalace as mp

DATA = Path(__file__).resolve().parents[1] / "data"


@pytest.fixture(scope="module")
def small():
    return mp.generate_scenario(areas=4, episodes=3, questions_per_type=2, seed=3)


def test_generated_scenario_is_valid(small):
    assert mp.validate_scenario(small) == []
    assert len(small["questions"]) == 10
    assert mp.generate_scenario(areas=4, episodes=3, questions_per_type=2, seed=3) == small


def test_validation_lists_problems():
    assert mp.validate_scenario({})
    with pytest.raises(mp.ValidationError):
        mp.generate_scenario(areas=1)


def test_package_walkthrough():
    doc = json.loads((DATA / "example2.json").read_text())
    res = mp.run_question(doc, "package-delivery")
    assert res["strategy"] == "PAST_ONLY"
    assert [(i["instance"], i["found"]) for i in res["instances"]] == [
        ("friday afternoon", True),
        ("thursday afternoon", True),
        ("wednesday afternoon", False),
    ]
    assert res["record"]["sigma"] == 5
    assert res["record"]["p"] == 0.0


def test_budgets_and_agents(small):
    qid = small["questions"][0]["id"]
    for agent in ["mindpalace", "mindpalace_stopping", "full_retrieval", "socratic_captions", "full_exploration"]:
        rec = mp.run_question(small, qid, agent, budget_images=3, budget_viewpoints=2, oracle="heuristic")["record"]
        assert rec["retrieved_images"] <= 3
        assert rec["explored_viewpoints"] <= 2
    with pytest.raises(mp.ValidationError):
        mp.run_question(small, qid, bogus=1)
    with pytest.raises(mp.ValidationError):
        mp.run_question(small, "no-such-question")


def test_suite(small):
    out = mp.run_suite([small], agents=["mindpalace", "mindpalace_stopping"], workers=2)
    assert len(out["records"]) == 20
    assert "mindpalace" in out["report"]
    assert out["condition2_violations"] == 0


def test_planner_and_metrics():
    seq, cost = mp.plan_area_sequence({"den": 0.5, "hall": 0.3}, {"den": 10.0, "hall": 1.0},
                                      {("den", "hall"): 9.0}, depth=2)
    # den first: 10 + 9 * 0.5 = 14.5; hall first: 1 + 9 * 0.7 = 7.3
    assert seq == ["hall", "den"]
    assert cost == pytest.approx(7.3)
    # Past mode: every step costs 2, so the likelier area goes first (2 + 2 * 0.4).
    seq, cost = mp.plan_area_sequence({"a": 0.2, "b": 0.6}, {}, depth=2, mode="past", retrieval_cost=2.0)
    assert seq == ["b", "a"] and cost == pytest.approx(2.8)
    seq, _ = mp.plan_area_sequence({"a": 0.2, "b": 0.6}, {}, depth=1, mode="past")
    assert seq == ["a"]  # first steps are never discounted, so depth 1 ties and falls back to name order
    assert mp.correctness(4) == 75.0
    assert mp.exploration_efficiency(5, 16.0, 8.0) == 0.5
    assert mp.exploration_efficiency(5, 0.0, 0.0) == 1.0
    with pytest.raises(mp.ValidationError):
        mp.correctness(6)
