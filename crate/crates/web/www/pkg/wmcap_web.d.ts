/* tslint:disable */
/* eslint-disable */

/**
 * PSNR-only capacity at the mid-gray and corner covers for `τ` from `start`
 * to `stop`, plus the heuristic bound under `transform` unless it is
 * `"none"`. Returns a JSON array of points.
 */
export function capacity_curve(channels: number, width: number, height: number, bit_depth: number, start: number, stop: number, step: number, transform: string, param: number): string;

/**
 * Fraction of lattice points in the disk of `radius` that stay distinct
 * after `[[a, b], [c, d]]` and rounding, next to the spectral prediction.
 */
export function empirical_xi(a: number, b: number, c: number, d: number, radius: number): string;

/**
 * Applies a transform to canvas pixels (RGBA, row-major) and returns RGBA
 * of the same size. Alpha is ignored on input and opaque on output.
 */
export function transform_preview(name: string, param: number, width: number, height: number, rgba: Uint8Array): Uint8Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly capacity_curve: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number, j: number) => [number, number, number, number];
    readonly empirical_xi: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly transform_preview: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number, number];
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
