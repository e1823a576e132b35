/* tslint:disable */
/* eslint-disable */

/**
 * `[x, y, label]` triples of a fresh point cloud.
 */
export function blobs(seed: number, majority: number, minority: number): Float64Array;

/**
 * Class of each grid cell under an OPF trained on `[x, y, label]` triples.
 */
export function decision_grid(points: Float64Array, width: number, height: number, x_min: number, x_max: number, y_min: number, y_max: number): Uint8Array;

/**
 * Method names accepted by [`resample`], comma separated.
 */
export function methods(): string;

/**
 * Resamples `[x, y, label]` triples; returns `[x, y, label, synthetic]`.
 */
export function resample(points: Float64Array, method: string, param: number, seed: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly blobs: (a: number, b: number, c: number) => [number, number];
    readonly decision_grid: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number, number];
    readonly methods: () => [number, number];
    readonly resample: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
