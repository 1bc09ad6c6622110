import { describe, expect, it } from "vitest";
import problemFixture from "./fixtures/problem.json";
import reportFixture from "./fixtures/report.json";
import whatifFixture from "./fixtures/whatif_gamma.json";
import {
  applyWhatIf,
  clearOverrides,
  initialState,
  possibilityLabels,
  scoreLabels,
  upsertOverride,
  validateOverrideValue,
} from "../src/state.js";
import type { ProblemDocument, Report, WhatIfResponse } from "../src/types.js";

const doc = problemFixture.document as unknown as ProblemDocument;
const report = reportFixture as unknown as Report;
const whatif = whatifFixture as unknown as WhatIfResponse;

function freshState() {
  return initialState("hiring", problemFixture.problem_hash, doc, report, "K");
}

describe("session state", () => {
  it("starts pinned to the snapshot with no overrides", () => {
    const s = freshState();
    expect(s.baseHash).toBe(problemFixture.problem_hash);
    expect(s.overrides).toEqual([]);
    expect(s.overlaidReport).toBe(s.baseReport);
    expect(s.stale).toBe(false);
  });

  it("replaces an override for the same coordinate", () => {
    let overrides = upsertOverride([], { target: "beta:Com", value: "e" });
    overrides = upsertOverride(overrides, { target: "gamma:K:Dec:HR", value: "1" });
    overrides = upsertOverride(overrides, { target: "beta:Com", value: "g" });
    expect(overrides).toHaveLength(2);
    expect(overrides.find((o) => o.target === "beta:Com")?.value).toBe("g");
  });

  it("applies a what-if response for the pinned snapshot", () => {
    const s = applyWhatIf(freshState(), whatif);
    expect(s.stale).toBe(false);
    expect(s.overlaidReport.candidates.K.qpt?.final).toEqual(
      ["b", "1", "1", "b", "0"],
    );
    expect(s.deltas.length).toBeGreaterThan(0);
  });

  it("flags a stale snapshot instead of applying it", () => {
    const s = applyWhatIf(freshState(), {
      ...whatif,
      problem_hash: "sha256:other",
    });
    expect(s.stale).toBe(true);
    expect(s.overlaidReport).toBe(s.baseReport);
  });

  it("clearing overrides restores the exact base view", () => {
    let s = applyWhatIf(freshState(), whatif);
    s = { ...s, overrides: [{ target: "gamma:K:Dec:HR", value: "1" }] };
    const cleared = clearOverrides(s);
    expect(cleared.overrides).toEqual([]);
    expect(cleared.overlaidReport).toBe(cleared.baseReport);
    expect(cleared.deltas).toEqual([]);
  });

  it("reads scale labels through the declared roles", () => {
    expect(scoreLabels(doc)).toEqual(["1", "2", "3", "4", "5"]);
    expect(possibilityLabels(doc)).toEqual(["0", "a", "b", "1"]);
  });
});

describe("local validation of edits", () => {
  it("accepts a proper interval", () => {
    expect(validateOverrideValue(doc, "interval:K:Com:Mkt", ["2", "4"])).toBeNull();
  });

  it("rejects an empty interval before any request is sent", () => {
    const msg = validateOverrideValue(doc, "interval:K:Com:Mkt", ["5", "2"]);
    expect(msg).toMatch(/empty/);
  });

  it("rejects bounds outside the score scale", () => {
    const msg = validateOverrideValue(doc, "interval:K:Com:Mkt", ["2", "9"]);
    expect(msg).toMatch(/score levels/);
  });

  it("accepts a blank statement", () => {
    expect(validateOverrideValue(doc, "interval:K:Com:Mkt", null)).toBeNull();
  });

  it("checks level edits against the right scale", () => {
    expect(validateOverrideValue(doc, "gamma:K:Dec:HR", "1")).toBeNull();
    expect(validateOverrideValue(doc, "gamma:K:Dec:HR", "zz")).toMatch(
      /confidence/,
    );
    expect(validateOverrideValue(doc, "beta:Com", "e")).toBeNull();
    expect(validateOverrideValue(doc, "alpha:Fin", "g")).toMatch(/reliability/);
  });

  it("rejects unknown coordinate kinds", () => {
    expect(validateOverrideValue(doc, "spin:K", "x")).toMatch(/unknown/);
  });
});
