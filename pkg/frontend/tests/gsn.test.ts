import { describe, expect, it } from "vitest";

import {
  canTargetRebuttal,
  effectiveStage,
  openRebuttalsInPhase,
  parseGsn,
  phaseGoals,
} from "../src/gsn.js";

const SAMPLE = `* G1
Top claim for the service
@author: owner

** C1.1
Assumption: low traffic
@author: owner

** S1
Argue over the lifecycle stages
@author: owner

*** G3
Development claims hold
@author: developer
@stage: development

**** E3.1
Test report
@author: developer

***** C3.2
 @looks like metadata but is body
@author: operator
@rebuttal: true

*** G4
Operation claims hold
@author: operator
@stage: operation
@x-runbook: ops/handbook.md
`;

describe("parseGsn", () => {
  it("builds the tree with kinds, authors and flags", () => {
    const doc = parseGsn(SAMPLE);
    expect(doc.rootId).toBe("G1");
    expect(doc.order).toEqual(["G1", "C1.1", "S1", "G3", "E3.1", "C3.2", "G4"]);
    expect(doc.elements.get("G1")!.kind).toBe("goal");
    expect(doc.elements.get("C1.1")!.parent).toBe("G1");
    expect(doc.elements.get("E3.1")!.parent).toBe("G3");
    expect(doc.elements.get("G4")!.metadata["x-runbook"]).toBe("ops/handbook.md");
  });

  it("reads rebuttal flags with the open default and shielded body text", () => {
    const doc = parseGsn(SAMPLE);
    const rebuttal = doc.elements.get("C3.2")!;
    expect(rebuttal.isRebuttal).toBe(true);
    expect(rebuttal.status).toBe("open");
    expect(rebuttal.text).toBe("@looks like metadata but is body");
    expect(rebuttal.author).toBe("operator");
  });

  it("rejects malformed input", () => {
    expect(() => parseGsn("")).toThrow();
    expect(() => parseGsn("no heading")).toThrow();
    expect(() => parseGsn("* G1 extra words")).toThrow();
  });
});

describe("stage logic", () => {
  it("inherits stages downward", () => {
    const doc = parseGsn(SAMPLE);
    expect(effectiveStage(doc, "E3.1")).toBe("development");
    expect(effectiveStage(doc, "C3.2")).toBe("development");
    expect(effectiveStage(doc, "C1.1")).toBeNull();
  });

  it("scopes goals and open rebuttals by phase", () => {
    const doc = parseGsn(SAMPLE);
    expect(phaseGoals(doc, "development")).toEqual(["G3"]);
    expect(phaseGoals(doc, "operation")).toEqual(["G4"]);
    expect(openRebuttalsInPhase(doc, "development")).toEqual(["C3.2"]);
    expect(openRebuttalsInPhase(doc, "operation")).toEqual([]);
  });
});

describe("rebuttal targeting", () => {
  it("only goals and evidence take rebuttals", () => {
    const doc = parseGsn(SAMPLE);
    expect(canTargetRebuttal(doc, "G3")).toBe(true);
    expect(canTargetRebuttal(doc, "E3.1")).toBe(true);
    expect(canTargetRebuttal(doc, "S1")).toBe(false);
    expect(canTargetRebuttal(doc, "C1.1")).toBe(false);
    expect(canTargetRebuttal(doc, null)).toBe(false);
  });
});
