/* Low-level bindings to libwcrkernel.so, the scoring kernel shipped inside
 * the kgquest Python package. The kernel operates on raw UTF-8 bytes with
 * explicit lengths; these wrappers encode JS strings, size the output
 * buffers, and nothing else, so every float that comes back was computed
 * by the exact code the Python package runs. */

import { execFileSync } from "node:child_process";
import koffi from "koffi";

export interface GroupRewards {
  norm: number[];
  reward: number[];
}

export interface AdvantageStats {
  advantages: number[];
  mu: number;
  sigma: number;
}

export interface RawGroupScore {
  coverage: number[];
  coverageNorm: number[];
  reward: number[];
  advantage: number[];
  mu: number;
  sigma: number;
  proposerReward: number;
}

/** Locate the shared library: KGQUEST_KERNEL_PATH wins, otherwise ask the
 *  installed Python package where the kernel it was built with lives. */
export function kernelPath(): string {
  const fromEnv = process.env.KGQUEST_KERNEL_PATH;
  if (fromEnv) return fromEnv;
  const out = execFileSync("python3", ["-m", "kgquest.ffi"], { encoding: "utf8" });
  const found = out.trim();
  if (!found) {
    throw new Error("python3 -m kgquest.ffi printed no library path");
  }
  return found;
}

// Kernel calls pass explicit byte lengths, but koffi marshals JS strings as
// NUL-terminated UTF-8, so an embedded NUL would silently truncate.
function utf8Lengths(items: readonly string[], what: string): BigInt64Array {
  const lens = new BigInt64Array(items.length);
  for (let i = 0; i < items.length; i++) {
    if (items[i].includes("\0")) {
      throw new RangeError(`${what}[${i}] contains a NUL byte`);
    }
    lens[i] = BigInt(Buffer.byteLength(items[i], "utf8"));
  }
  return lens;
}

function asFlagBytes(flags: readonly (number | boolean)[]): Uint8Array {
  const out = new Uint8Array(flags.length);
  for (let i = 0; i < flags.length; i++) {
    out[i] = flags[i] ? 1 : 0;
  }
  return out;
}

type NativeFn = (...args: unknown[]) => unknown;

export class Kernel {
  readonly libraryPath: string;

  private readonly matchMaskFn: NativeFn;
  private readonly groupRewardsFn: NativeFn;
  private readonly advantageStatsFn: NativeFn;
  private readonly proposerRewardFn: NativeFn;
  private readonly scoreGroupFn: NativeFn;

  constructor(libraryPath: string) {
    this.libraryPath = libraryPath;
    const lib = koffi.load(libraryPath);
    this.matchMaskFn = lib.func(
      "int wcr_match_mask(const char *text, int64_t text_len, " +
        "const char **patterns, const int64_t *pattern_lens, " +
        "int n_patterns, _Out_ uint8_t *mask_out)"
    );
    this.groupRewardsFn = lib.func(
      "void wcr_group_rewards(const double *coverage, const uint8_t *correct, " +
        "const uint8_t *valid, int g_count, double alpha, " +
        "_Out_ double *norm_out, _Out_ double *reward_out)"
    );
    this.advantageStatsFn = lib.func(
      "void wcr_advantage_stats(const double *reward, int g_count, double epsilon, " +
        "_Out_ double *adv_out, _Out_ double *mean_out, _Out_ double *std_out)"
    );
    this.proposerRewardFn = lib.func(
      "double wcr_proposer_reward(const uint8_t *correct, int g_count)"
    );
    this.scoreGroupFn = lib.func(
      "int wcr_score_group(const char **think_texts, const int64_t *text_lens, " +
        "int g_count, const char **waypoints, const int64_t *waypoint_lens, " +
        "int n_waypoints, const uint8_t *correct, const uint8_t *valid, " +
        "double alpha, double epsilon, " +
        "_Out_ double *coverage_out, _Out_ double *norm_out, _Out_ double *reward_out, " +
        "_Out_ double *adv_out, _Out_ double *mean_out, _Out_ double *std_out, " +
        "_Out_ double *proposer_out)"
    );
  }

  /** 0/1 mask of which patterns occur as byte substrings of text. */
  matchMask(text: string, patterns: readonly string[]): Uint8Array {
    const textLens = utf8Lengths([text], "text");
    const patLens = utf8Lengths(patterns, "patterns");
    const mask = new Uint8Array(patterns.length);
    this.matchMaskFn(
      text,
      textLens[0],
      patterns,
      patLens,
      patterns.length,
      mask
    );
    return mask;
  }

  /** Group max-normalization plus the shaped reward law. */
  groupRewards(
    coverage: readonly number[],
    correct: readonly (number | boolean)[],
    valid: readonly (number | boolean)[],
    alpha: number
  ): GroupRewards {
    const g = coverage.length;
    if (correct.length !== g || valid.length !== g) {
      throw new RangeError("coverage, correct and valid must have equal length");
    }
    const norm = new Float64Array(g);
    const reward = new Float64Array(g);
    this.groupRewardsFn(
      Float64Array.from(coverage),
      asFlagBytes(correct),
      asFlagBytes(valid),
      g,
      alpha,
      norm,
      reward
    );
    return { norm: Array.from(norm), reward: Array.from(reward) };
  }

  /** Group-relative advantages with mean and population std. */
  advantageStats(reward: readonly number[], epsilon: number): AdvantageStats {
    const g = reward.length;
    if (g === 0) {
      throw new RangeError("group must be nonempty");
    }
    const adv = new Float64Array(g);
    const mu = new Float64Array(1);
    const sigma = new Float64Array(1);
    this.advantageStatsFn(Float64Array.from(reward), g, epsilon, adv, mu, sigma);
    return { advantages: Array.from(adv), mu: mu[0], sigma: sigma[0] };
  }

  /** Difficulty-seeking proposer reward: 1 - mean(correct). */
  proposerReward(correct: readonly (number | boolean)[]): number {
    if (correct.length === 0) {
      throw new RangeError("group must be nonempty");
    }
    return this.proposerRewardFn(asFlagBytes(correct), correct.length) as number;
  }

  /** Full group scoring from think texts; the composite kernel entry point. */
  scoreGroup(
    thinkTexts: readonly string[],
    waypoints: readonly string[],
    correct: readonly (number | boolean)[],
    valid: readonly (number | boolean)[],
    alpha: number,
    epsilon: number
  ): RawGroupScore {
    const g = thinkTexts.length;
    if (correct.length !== g || valid.length !== g) {
      throw new RangeError("correct and valid must match the group size");
    }
    const textLens = utf8Lengths(thinkTexts, "thinkTexts");
    const wpLens = utf8Lengths(waypoints, "waypoints");
    const coverage = new Float64Array(g);
    const norm = new Float64Array(g);
    const reward = new Float64Array(g);
    const adv = new Float64Array(g);
    const mu = new Float64Array(1);
    const sigma = new Float64Array(1);
    const proposer = new Float64Array(1);
    const rc = this.scoreGroupFn(
      thinkTexts,
      textLens,
      g,
      waypoints,
      wpLens,
      waypoints.length,
      asFlagBytes(correct),
      asFlagBytes(valid),
      alpha,
      epsilon,
      coverage,
      norm,
      reward,
      adv,
      mu,
      sigma,
      proposer
    ) as number;
    if (rc !== 0) {
      throw new RangeError("group and waypoint set must be nonempty");
    }
    return {
      coverage: Array.from(coverage),
      coverageNorm: Array.from(norm),
      reward: Array.from(reward),
      advantage: Array.from(adv),
      mu: mu[0],
      sigma: sigma[0],
      proposerReward: proposer[0],
    };
  }
}

let defaultKernel: Kernel | null = null;

/** Lazily loaded shared kernel instance. */
export function kernel(): Kernel {
  if (defaultKernel === null) {
    defaultKernel = new Kernel(kernelPath());
  }
  return defaultKernel;
}
