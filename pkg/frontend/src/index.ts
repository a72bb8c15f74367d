/* Group scoring for knowledge-graph search rollouts, mirroring the kgquest
 * reward module: raw waypoint coverage, group max-normalization, the
 * partial-credit reward law, group-relative advantages, and the
 * difficulty-seeking proposer reward. All arithmetic runs inside the
 * shared C kernel, so results are bit-identical to the Python package. */

import { Kernel, kernel, kernelPath } from "./kernel.js";

export { Kernel, kernel, kernelPath };
export type { AdvantageStats, GroupRewards, RawGroupScore } from "./kernel.js";

export const DEFAULT_ALPHA = 0.3;
export const DEFAULT_EPSILON = 1e-6;

export interface CoverageResult {
  /** Waypoint titles found in the text, in waypoint order. */
  matched: string[];
  /** Raw coverage: matched count / waypoint count. */
  g: number;
}

export interface GroupInput {
  waypoints: string[];
  /** Concatenated reasoning text per rollout (think spans joined by newline). */
  thinkTexts: string[];
  /** External 0/1 correctness flags; takes precedence over answers. */
  correct?: (number | boolean)[];
  /** Final answers, compared against correctAnswer (trimmed, case-insensitive). */
  answers?: (string | null)[];
  correctAnswer?: string;
  /** Well-formedness flags. Defaults to answer presence when answers are
   *  given, otherwise every rollout counts as valid. */
  valid?: (number | boolean)[];
  alpha?: number;
  epsilon?: number;
}

export interface GroupScore {
  coverages: number[];
  coverageNorms: number[];
  correct: number[];
  valid: number[];
  rewards: number[];
  advantages: number[];
  mu: number;
  sigma: number;
  proposerReward: number;
}

function checkAlpha(alpha: number): void {
  if (!(alpha > 0 && alpha < 1)) {
    throw new RangeError("alpha must lie in (0, 1)");
  }
}

function checkEpsilon(epsilon: number): void {
  if (!(epsilon > 0)) {
    throw new RangeError("epsilon must be positive");
  }
}

/** Trimmed, case-insensitive answer equality.
 *
 *  Uses toLowerCase, which agrees with Python's casefold on ASCII but not on
 *  characters like U+00DF or dotted/dotless I; pass explicit correct flags
 *  when answers can contain those. */
export function answersMatch(
  predicted: string | null | undefined,
  expected: string
): boolean {
  if (predicted == null) {
    return false;
  }
  return predicted.trim().toLowerCase() === expected.trim().toLowerCase();
}

/** Raw waypoint coverage of one reasoning text. */
export function coverage(waypoints: string[], thinkText: string): CoverageResult {
  if (waypoints.length === 0) {
    throw new RangeError("waypoint set must be nonempty");
  }
  const mask = kernel().matchMask(thinkText, waypoints);
  const matched: string[] = [];
  let hits = 0;
  for (let i = 0; i < waypoints.length; i++) {
    if (mask[i]) {
      matched.push(waypoints[i]);
      hits++;
    }
  }
  return { matched, g: hits / waypoints.length };
}

/** Divide each coverage by the group maximum; an all-zero group stays zero. */
export function normalizeGroup(coverages: number[]): number[] {
  if (coverages.length === 0) {
    throw new RangeError("group must be nonempty");
  }
  const zeros = new Array<number>(coverages.length).fill(0);
  return kernel().groupRewards(coverages, zeros, zeros, 0.0).norm;
}

/** Scalar reward law for one rollout: 1 if correct, alpha * gNorm if merely
 *  well-formed, 0 otherwise. */
export function wcrReward(
  correct: number | boolean,
  valid: number | boolean,
  gNorm: number,
  alpha: number = DEFAULT_ALPHA
): number {
  if (correct) {
    return 1.0;
  }
  if (valid) {
    return alpha * gNorm;
  }
  return 0.0;
}

/** Correctness-only rewards (the unshaped baseline). */
export function binaryReward(correct: (number | boolean)[]): number[] {
  return correct.map((c) => (c ? 1.0 : 0.0));
}

/** Group-relative advantages for arbitrary reward vectors. */
export function advantages(
  rewards: number[],
  epsilon: number = DEFAULT_EPSILON
): number[] {
  return kernel().advantageStats(rewards, epsilon).advantages;
}

/** Difficulty-seeking proposer reward: 1 - mean(correct). */
export function proposerReward(correct: (number | boolean)[]): number {
  return kernel().proposerReward(correct);
}

function resolveCorrect(input: GroupInput, g: number): number[] {
  if (input.correct !== undefined) {
    if (input.correct.length !== g) {
      throw new RangeError("correctness length must match the group size");
    }
    return input.correct.map((c) => (c ? 1 : 0));
  }
  if (input.answers !== undefined) {
    if (input.answers.length !== g) {
      throw new RangeError("answers length must match the group size");
    }
    const expected = input.correctAnswer;
    if (expected === undefined) {
      throw new RangeError("answers need correctAnswer to compare against");
    }
    return input.answers.map((a) => (answersMatch(a, expected) ? 1 : 0));
  }
  throw new RangeError("need correct flags or answers with correctAnswer");
}

function resolveValid(input: GroupInput, g: number): number[] {
  if (input.valid !== undefined) {
    if (input.valid.length !== g) {
      throw new RangeError("valid length must match the group size");
    }
    return input.valid.map((v) => (v ? 1 : 0));
  }
  if (input.answers !== undefined) {
    return input.answers.map((a) => (a != null && a.trim() !== "" ? 1 : 0));
  }
  return new Array<number>(g).fill(1);
}

/** Score one rollout group end to end through the shared kernel. */
export function scoreGroup(input: GroupInput): GroupScore {
  if (!input.waypoints || input.waypoints.length === 0) {
    throw new RangeError("waypoint set must be nonempty");
  }
  if (!input.thinkTexts || input.thinkTexts.length === 0) {
    throw new RangeError("group must be nonempty");
  }
  const alpha = input.alpha ?? DEFAULT_ALPHA;
  const epsilon = input.epsilon ?? DEFAULT_EPSILON;
  checkAlpha(alpha);
  checkEpsilon(epsilon);

  const g = input.thinkTexts.length;
  const correct = resolveCorrect(input, g);
  const valid = resolveValid(input, g);

  const raw = kernel().scoreGroup(
    input.thinkTexts,
    input.waypoints,
    correct,
    valid,
    alpha,
    epsilon
  );
  return {
    coverages: raw.coverage,
    coverageNorms: raw.coverageNorm,
    correct,
    valid,
    rewards: raw.reward,
    advantages: raw.advantage,
    mu: raw.mu,
    sigma: raw.sigma,
    proposerReward: raw.proposerReward,
  };
}
