#!/usr/bin/env python3
"""End-to-end walk through the pipeline on the bundled dispatch sample.

Formulates candidates, optimizes under mild constraints, transforms one
capability, then prints a change-impact report and the trace matrix.
"""

from capweave.formulation import enumerate_candidates, rank_candidates
from capweave.optimization import Constraints, optimize
from capweave.samples import demo_project
from capweave.store import apply_mutation, export_matrix, selection_document
from capweave.trace import impact_of_node_change
from capweave.transformation import transform_capability


def main() -> None:
    project = demo_project()
    ranked = rank_candidates(enumerate_candidates(project.graph), project.weights)
    print(f"{len(ranked)} candidate capability sets:")
    for candidate in ranked:
        score = candidate.score
        print(
            f"  {', '.join(candidate.members):24s}"
            f" cohesion={score.cohesion:.3f} coupling={score.coupling:.3f}"
            f" imbalance={score.abstraction_imbalance:.3f} composite={score.composite:.3f}"
        )

    constraints = Constraints(schedule_budget=60.0, min_tech_readiness=5)
    selection = optimize(project.graph, ranked, constraints)
    print(f"\nchosen set: {', '.join(selection.chosen.members)}")
    for increment in selection.increments:
        label = "deferred" if increment.index is None else f"increment {increment.index}"
        print(f"  {label}: {', '.join(increment.members)} ({increment.total_effort} effort units)")

    project = apply_mutation(
        project, {"kind": "recordSelection", "selection": selection_document(selection)}
    )
    drafts = {
        d: [f"System shall satisfy: {project.graph.node(d).label.lower()}"]
        for d in selection.chosen.assignment[selection.chosen.members[0]]
    }
    project, created = transform_capability(project, selection.chosen.members[0], drafts)
    print(f"\ntransformed {len(created)} requirements under {selection.chosen.members[0]}")

    report = impact_of_node_change(project, "n3", "down")
    print(f"\nimpact of changing n3 (down): nodes {', '.join(report.affected_nodes)};"
          f" directives {', '.join(sorted(report.affected_directives))}")

    print("\ntrace matrix:")
    print(export_matrix(project))


if __name__ == "__main__":
    main()
