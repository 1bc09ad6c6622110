/** Payload shapes of the assessment service; the console never derives
 * numbers itself, it only re-arranges what these carry. */

export interface MassEntry {
  set: string[];
  mass: number;
}

export interface QptSection {
  final: string[];
  match_certainty: string;
  match_possibility: string;
}

export interface TbmSection {
  masses: MassEntry[];
  conflict: number;
  betp: number[];
  expected: number;
}

export interface CandidateReport {
  qpt?: QptSection;
  tbm?: TbmSection;
  trace?: Record<string, Record<string, unknown>>;
}

export interface Report {
  engine_version: string;
  problem_name: string;
  problem_hash: string;
  methods: string[];
  score_labels: string[];
  candidates: Record<string, CandidateReport>;
}

export interface Delta {
  path: string;
  before: unknown;
  after: unknown;
}

export interface WhatIfResponse {
  engine_version: string;
  problem_hash: string;
  base: Report;
  overlaid: Report;
  deltas: Delta[];
}

export interface SweepRow {
  value: unknown;
  deltas: { output: string; before: unknown; after: unknown }[];
  changed_tables: string[];
  decision_changed: boolean;
  errors: { method: string; message: string }[];
}

export interface SensitivityResponse {
  problem_hash: string;
  candidate: string;
  target: string;
  rows: SweepRow[];
}

export interface ScaleDoc {
  name: string;
  labels: string[];
}

export interface ProblemDocument {
  name: string;
  scales: ScaleDoc[];
  roles: Record<string, string>;
  experts: { name: string; reliability: string }[];
  criteria: { name: string; importance: string }[];
  candidates: {
    name: string;
    opinions: Record<string, Record<string, OpinionCell>>;
  }[];
  [key: string]: unknown;
}

export interface OpinionCell {
  interval: [string, string] | null;
  confidence: string;
  note?: string;
}

export interface Override {
  target: string;
  value: unknown;
}

export interface ServiceError {
  error: { code: string; message: string; [key: string]: unknown };
}
