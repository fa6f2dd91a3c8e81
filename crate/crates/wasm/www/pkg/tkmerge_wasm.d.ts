/* tslint:disable */
/* eslint-disable */

export class Dataset {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    points(): Float64Array;
    truth(): Uint32Array;
    /**
     * Suggested trimming level for the generated contamination.
     */
    readonly alpha: number;
    /**
     * Number of true groups.
     */
    readonly groups: number;
}

export class Trace {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    alphas(): Float64Array;
    /**
     * Labels at the selected level.
     */
    labels(): Uint32Array;
    /**
     * Stability score of each adjacent pair of levels (`NaN` if a level failed).
     */
    scores(): Float64Array;
    readonly bestAlpha: number;
}

/**
 * Final labels (0 = trimmed) of a two-step fit on 2-D points.
 */
export function fitMerge(points: Float64Array, big_k: number, k: number, alpha: number, method: string, r: number, linkage: string, seed: bigint): Uint32Array;

/**
 * Synthetic scenario `s1`, `s2`, `s3a`, `s3b` or `s3c` at size `scale`.
 */
export function generate(scenario: string, scale: number, seed: bigint): Dataset;

/**
 * Sweeps the default trimming grid with `k` components.
 */
export function monitor(points: Float64Array, k: number, method: string, seed: bigint): Trace;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_dataset_free: (a: number, b: number) => void;
    readonly __wbg_trace_free: (a: number, b: number) => void;
    readonly dataset_alpha: (a: number) => number;
    readonly dataset_groups: (a: number) => number;
    readonly dataset_points: (a: number) => [number, number];
    readonly dataset_truth: (a: number) => [number, number];
    readonly fitMerge: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number, j: number, k: bigint) => [number, number, number, number];
    readonly generate: (a: number, b: number, c: number, d: bigint) => [number, number, number];
    readonly monitor: (a: number, b: number, c: number, d: number, e: number, f: bigint) => [number, number, number];
    readonly trace_alphas: (a: number) => [number, number];
    readonly trace_bestAlpha: (a: number) => number;
    readonly trace_labels: (a: number) => [number, number];
    readonly trace_scores: (a: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
