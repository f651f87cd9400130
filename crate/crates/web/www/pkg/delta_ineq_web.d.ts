/* tslint:disable */
/* eslint-disable */

/**
 * Both variants of every bound for one trial (`g` defaults to `f`).
 */
export function evaluate_bounds(trial_json: string, tol: number): string;

/**
 * `P(x, t)` over `[a, b)`: every scale point on discrete scales, `samples`
 * evenly spaced points (plus `x`) on a real interval.
 */
export function kernel_profile(spec_json: string, samples: number): string;

/**
 * Runs the sharpness search and returns the ratio trajectory with the
 * witness `f^Delta` next to `P` at every point of `[a, b)`.
 */
export function sharpness(theorem: string, spec_json: string, seed: number, iterations: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly evaluate_bounds: (a: number, b: number, c: number) => [number, number, number, number];
    readonly kernel_profile: (a: number, b: number, c: number) => [number, number, number, number];
    readonly sharpness: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
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
