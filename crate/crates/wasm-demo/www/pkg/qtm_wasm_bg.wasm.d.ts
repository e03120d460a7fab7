/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_demoparams_free: (a: number, b: number) => void;
export const __wbg_get_demoparams_bosonic: (a: number) => number;
export const __wbg_get_demoparams_g: (a: number) => number;
export const __wbg_get_demoparams_gamma_c: (a: number) => number;
export const __wbg_get_demoparams_gamma_det: (a: number) => number;
export const __wbg_get_demoparams_gamma_h: (a: number) => number;
export const __wbg_get_demoparams_lam: (a: number) => number;
export const __wbg_get_demoparams_t_c: (a: number) => number;
export const __wbg_get_demoparams_t_h: (a: number) => number;
export const __wbg_get_demoparams_u: (a: number) => number;
export const __wbg_set_demoparams_bosonic: (a: number, b: number) => void;
export const __wbg_set_demoparams_g: (a: number, b: number) => void;
export const __wbg_set_demoparams_gamma_c: (a: number, b: number) => void;
export const __wbg_set_demoparams_gamma_det: (a: number, b: number) => void;
export const __wbg_set_demoparams_gamma_h: (a: number, b: number) => void;
export const __wbg_set_demoparams_lam: (a: number, b: number) => void;
export const __wbg_set_demoparams_t_c: (a: number, b: number) => void;
export const __wbg_set_demoparams_t_h: (a: number, b: number) => void;
export const __wbg_set_demoparams_u: (a: number, b: number) => void;
export const demoparams_new: () => number;
export const demoparams_set_feedback: (a: number, b: number, c: number) => [number, number];
export const detectorDensity: (a: number, b: number) => [number, number, number, number];
export const heatmap: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
export const steadyPoint: (a: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
