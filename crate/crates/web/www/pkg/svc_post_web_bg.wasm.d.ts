/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_crossoverresponse_free: (a: number, b: number) => void;
export const __wbg_supplementdemo_free: (a: number, b: number) => void;
export const crossover_response: (a: number, b: number, c: number) => [number, number, number];
export const crossoverresponse_freqs_hz: (a: number) => [number, number];
export const crossoverresponse_highpass_db: (a: number) => [number, number];
export const crossoverresponse_lowpass_db: (a: number) => [number, number];
export const crossoverresponse_sum_db: (a: number) => [number, number];
export const shift_contour: (a: number, b: number, c: number) => [number, number, number, number];
export const supplement_demo: (a: number, b: number, c: number, d: number) => [number, number, number];
export const supplementdemo_converted_db: (a: number) => [number, number];
export const supplementdemo_diff: (a: number) => number;
export const supplementdemo_freqs_hz: (a: number) => [number, number];
export const supplementdemo_output_db: (a: number) => [number, number];
export const supplementdemo_source_db: (a: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_start: () => void;
