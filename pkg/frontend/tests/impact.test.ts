import { describe, expect, it } from "vitest";

import { overlayFromImpact } from "../src/impact.js";
import { impactOfA } from "./fixtures.js";

describe("overlayFromImpact", () => {
  it("takes the entity set from the payload verbatim", () => {
    const report = impactOfA();
    const overlay = overlayFromImpact(report);
    const expected = new Set([
      ...report.affectedNodes,
      ...Object.keys(report.affectedDirectives),
      ...Object.keys(report.affectedCapabilities),
      ...report.affectedRequirements,
    ]);
    expect(overlay.entities).toEqual(expected);
    expect(overlay.trigger).toBe("a");
  });

  it("carries severities and weights through unchanged", () => {
    const overlay = overlayFromImpact(impactOfA());
    expect(overlay.severity.get("d1")).toBe("affected");
    expect(overlay.weights.get("d1")).toBe(1.0);
    expect(overlay.weights.get("d2")).toBe(0.4);
  });

  it("defaults severity to affected when rationale is missing", () => {
    const report = impactOfA();
    delete report.rationale["d2"];
    const overlay = overlayFromImpact(report);
    expect(overlay.severity.get("d2")).toBe("affected");
  });
});
