/* tslint:disable */
/* eslint-disable */

export class DemoParams {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Defaults of the `(g, T_H)` heatmap.
     */
    constructor();
    /**
     * One of `off`, `general`, `ideal`, `u_inf`.
     */
    set_feedback(mode: string): void;
    bosonic: boolean;
    g: number;
    gamma_c: number;
    gamma_det: number;
    gamma_h: number;
    /**
     * Negative means infinite.
     */
    lam: number;
    t_c: number;
    t_h: number;
    /**
     * Negative means infinite.
     */
    u: number;
}

export function detectorDensity(p: DemoParams, points: number): Float64Array;

export function heatmap(base: DemoParams, side: number, g_min: number, g_max: number, th_min: number, th_max: number): Float64Array;

export function steadyPoint(p: DemoParams): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_demoparams_free: (a: number, b: number) => void;
    readonly __wbg_get_demoparams_bosonic: (a: number) => number;
    readonly __wbg_get_demoparams_g: (a: number) => number;
    readonly __wbg_get_demoparams_gamma_c: (a: number) => number;
    readonly __wbg_get_demoparams_gamma_det: (a: number) => number;
    readonly __wbg_get_demoparams_gamma_h: (a: number) => number;
    readonly __wbg_get_demoparams_lam: (a: number) => number;
    readonly __wbg_get_demoparams_t_c: (a: number) => number;
    readonly __wbg_get_demoparams_t_h: (a: number) => number;
    readonly __wbg_get_demoparams_u: (a: number) => number;
    readonly __wbg_set_demoparams_bosonic: (a: number, b: number) => void;
    readonly __wbg_set_demoparams_g: (a: number, b: number) => void;
    readonly __wbg_set_demoparams_gamma_c: (a: number, b: number) => void;
    readonly __wbg_set_demoparams_gamma_det: (a: number, b: number) => void;
    readonly __wbg_set_demoparams_gamma_h: (a: number, b: number) => void;
    readonly __wbg_set_demoparams_lam: (a: number, b: number) => void;
    readonly __wbg_set_demoparams_t_c: (a: number, b: number) => void;
    readonly __wbg_set_demoparams_t_h: (a: number, b: number) => void;
    readonly __wbg_set_demoparams_u: (a: number, b: number) => void;
    readonly demoparams_new: () => number;
    readonly demoparams_set_feedback: (a: number, b: number, c: number) => [number, number];
    readonly detectorDensity: (a: number, b: number) => [number, number, number, number];
    readonly heatmap: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly steadyPoint: (a: number) => [number, number, number, number];
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
