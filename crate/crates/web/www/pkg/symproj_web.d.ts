/* tslint:disable */
/* eslint-disable */

/**
 * Row-major fidelities over `zw_steps` values of |z_w| in [0.05, 1] and
 * `phi_steps` phases in [0, pi].
 */
export function fidelity_surface(target: string, z_dc: number, zw_steps: number, phi_steps: number, eta: number, six_photons: boolean): Float64Array;

/**
 * Projects qubit 5 of Delta5(alpha, eps) onto (alpha_bar, eps_bar).
 * Returns JSON `{probability, state, fidelity:{...}}`.
 */
export function project_delta5(alpha: number, eps: number, alpha_bar: number, eps_bar: number): string;

/**
 * Flat `[theta0, tau0, theta1, tau1, ...]` for the projected D4^(2) family.
 */
export function tangle_curve(samples: number, filtered: boolean): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly fidelity_surface: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number, number];
    readonly project_delta5: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly tangle_curve: (a: number, b: number) => [number, number, number, number];
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
