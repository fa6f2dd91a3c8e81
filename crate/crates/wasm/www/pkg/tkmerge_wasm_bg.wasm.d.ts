/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_dataset_free: (a: number, b: number) => void;
export const __wbg_trace_free: (a: number, b: number) => void;
export const dataset_alpha: (a: number) => number;
export const dataset_groups: (a: number) => number;
export const dataset_points: (a: number) => [number, number];
export const dataset_truth: (a: number) => [number, number];
export const fitMerge: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number, j: number, k: bigint) => [number, number, number, number];
export const generate: (a: number, b: number, c: number, d: bigint) => [number, number, number];
export const monitor: (a: number, b: number, c: number, d: number, e: number, f: bigint) => [number, number, number];
export const trace_alphas: (a: number) => [number, number];
export const trace_bestAlpha: (a: number) => number;
export const trace_labels: (a: number) => [number, number];
export const trace_scores: (a: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_start: () => void;
