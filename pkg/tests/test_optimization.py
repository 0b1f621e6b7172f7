import math
import random

import pytest
from hypothesis import given, strategies as st

from capweave import formulation as f
from capweave import optimization as opt
from capweave.errors import MemberExceedsBudgetError, NoFeasibleSelectionError, NoValidCandidateError
from capweave.graph import build_graph
from capweave.metrics import ScoreWeights
from capweave.samples import demo_graph

from graphgen import random_fd_nodes_edges

ALL_ONES = {f"d{i}": 1.0 for i in range(1, 15)}


def ranked(graph, weights=ScoreWeights()):
    return f.rank_candidates(f.enumerate_candidates(graph), weights)


class TestFeasibility:
    def test_all_feasible_with_uniform_trl(self):
        graph = demo_graph(tech_readiness=9)
        candidate = f.make_candidate(graph, {"n1", "n7", "n3"})
        verdicts = opt.feasibility(graph, candidate, opt.Constraints(min_tech_readiness=5))
        assert all(v.feasible for v in verdicts.values())

    def test_single_low_trl_directive_defers_its_member(self):
        low = demo_graph(tech_readiness={"d12": 3})
        candidate = f.make_candidate(low, {"n1", "n7", "n3"})
        verdicts = opt.feasibility(low, candidate, opt.Constraints(min_tech_readiness=5))
        assert verdicts["n1"].feasible and verdicts["n7"].feasible
        assert not verdicts["n3"].feasible
        assert verdicts["n3"].blocked_by == ("d12",)

    def test_min_trl_one_is_vacuous(self):
        graph = demo_graph(tech_readiness=1)
        candidate = f.make_candidate(graph, {"n1", "n2", "n3"})
        verdicts = opt.feasibility(graph, candidate, opt.Constraints(min_tech_readiness=1))
        assert all(v.feasible for v in verdicts.values())


class TestOptimize:
    def test_everything_fits_one_increment(self):
        graph = demo_graph(relevance=ALL_ONES, effort=10.0, tech_readiness=9)
        selection = opt.optimize(graph, ranked(graph), opt.Constraints(schedule_budget=1000))
        assert set(selection.chosen.members) == {"n1", "n2", "n3"}
        assert len(selection.increments) == 1
        inc = selection.increments[0]
        assert inc.index == 1
        assert set(inc.members) == {"n1", "n2", "n3"}
        assert inc.total_effort == pytest.approx(140.0)

    def test_member_too_big_for_budget(self):
        graph = demo_graph(effort=10.0)  # n1 carries 5 directives -> 50 effort units
        with pytest.raises(MemberExceedsBudgetError):
            opt.optimize(graph, ranked(graph), opt.Constraints(schedule_budget=30))

    def test_no_feasible_selection(self):
        graph = demo_graph(tech_readiness=1)
        with pytest.raises(NoFeasibleSelectionError):
            opt.optimize(graph, ranked(graph), opt.Constraints(min_tech_readiness=9))

    def test_vacuous_constraints_return_top_ranked(self):
        graph = demo_graph()
        top = ranked(graph)[0]
        selection = opt.optimize(graph, ranked(graph), opt.Constraints())
        assert selection.chosen == top
        assert len(selection.increments) == 1
        assert selection.increments[0].members == top.members

    def test_infinite_budget_matches_zero_budget(self):
        graph = demo_graph()
        a = opt.optimize(graph, ranked(graph), opt.Constraints(schedule_budget=0))
        b = opt.optimize(graph, ranked(graph), opt.Constraints(schedule_budget=math.inf))
        assert a.increments[0].members == b.increments[0].members

    def test_deferred_members_go_last_without_index(self):
        low = demo_graph(tech_readiness={"d13": 2, "d14": 2})
        selection = opt.optimize(
            low, ranked(low), opt.Constraints(schedule_budget=200, min_tech_readiness=5)
        )
        # n9 owns d13/d14 in the best candidate that still has feasible members.
        deferred = selection.increments[-1]
        assert deferred.index is None
        assert "n9" in deferred.members or "n3" in deferred.members
        indexed = [inc for inc in selection.increments if inc.index is not None]
        assert all(inc.total_effort <= 200 for inc in indexed)

    def test_empty_candidate_list_rejected(self):
        with pytest.raises(ValueError):
            opt.optimize(demo_graph(), [], opt.Constraints())


class TestOptimizationLaws:
    @given(st.integers(min_value=0, max_value=200))
    def test_packing_respects_budget_and_partitions_members(self, seed):
        rng = random.Random(seed)
        nodes, edges = random_fd_nodes_edges(rng, max_internal=6)
        graph = build_graph(nodes, edges)
        try:
            candidates = ranked(graph)
        except NoValidCandidateError:
            return
        budget = float(rng.choice([0, 40, 80, 200]))
        min_trl = rng.randint(1, 9)
        try:
            selection = opt.optimize(graph, candidates, opt.Constraints(budget, min_trl))
        except (NoFeasibleSelectionError, MemberExceedsBudgetError):
            return
        placed: list[str] = []
        for inc in selection.increments:
            placed.extend(inc.members)
            if inc.index is not None and budget > 0:
                assert inc.total_effort <= budget + 1e-9
        assert sorted(placed) == sorted(selection.chosen.members)
        assert sorted(
            m for inc in selection.increments if inc.index is not None for m in inc.members
        ) == sorted(selection.feasible_members)

    @given(st.integers(min_value=0, max_value=200))
    def test_relaxing_constraints_never_worsens_composite(self, seed):
        rng = random.Random(seed)
        nodes, edges = random_fd_nodes_edges(rng, max_internal=6)
        graph = build_graph(nodes, edges)
        try:
            candidates = ranked(graph)
        except NoValidCandidateError:
            return
        tight = opt.Constraints(schedule_budget=0, min_tech_readiness=rng.randint(2, 9))
        loose = opt.Constraints(schedule_budget=0, min_tech_readiness=1)
        try:
            chosen_tight = opt.optimize(graph, candidates, tight)
        except NoFeasibleSelectionError:
            return
        chosen_loose = opt.optimize(graph, candidates, loose)
        assert chosen_loose.chosen.score.composite >= chosen_tight.chosen.score.composite - 1e-12
