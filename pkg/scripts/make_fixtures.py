#!/usr/bin/env python3
"""Regenerate the bundled project files in fixtures/ from the sample builders."""

from pathlib import Path

from capweave.samples import course_project, demo_project, demo_project_selected, overlap_project
from capweave.store import save_project

FIXTURES = {
    "demo.capweave.json": demo_project,
    "demo_selected.capweave.json": demo_project_selected,
    "demo_overlap.capweave.json": overlap_project,
    "course_management.capweave.json": course_project,
}


def main() -> None:
    out_dir = Path(__file__).resolve().parent.parent / "fixtures"
    out_dir.mkdir(exist_ok=True)
    for name, factory in FIXTURES.items():
        path = out_dir / name
        path.write_bytes(save_project(factory()))
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
