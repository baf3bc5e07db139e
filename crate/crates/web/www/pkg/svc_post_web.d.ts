/* tslint:disable */
/* eslint-disable */

/**
 * Magnitude responses of the complementary crossover pair.
 */
export class CrossoverResponse {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly freqs_hz: Float64Array;
    readonly highpass_db: Float64Array;
    readonly lowpass_db: Float64Array;
    /**
     * Response of lowpass + highpass, flat at 0 dB for a complementary pair.
     */
    readonly sum_db: Float64Array;
}

/**
 * Average log-magnitude spectra of the demo signals, all on the same bin grid.
 */
export class SupplementDemo {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Converted voice after upsampling to 48 kHz, before gain correction.
     */
    readonly converted_db: Float64Array;
    readonly diff: number;
    readonly freqs_hz: Float64Array;
    readonly output_db: Float64Array;
    readonly source_db: Float64Array;
}

/**
 * Designs the pair at 48 kHz and samples its response at `points` frequencies from 0 to Nyquist.
 */
export function crossover_response(crossover_hz: number, taps: number, points: number): CrossoverResponse;

/**
 * Transposes an F0 contour (Hz, 0 = unvoiced) by `keys` semitones.
 */
export function shift_contour(f0_hz: Float64Array, keys: number): Float64Array;

/**
 * Runs the supplement on a synthetic pair: a breathy 48 kHz "source" and a
 * band-limited 24 kHz "converted" voice scaled by `converted_gain`.
 */
export function supplement_demo(seed: number, f0_hz: number, crossover_hz: number, converted_gain: number): SupplementDemo;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_crossoverresponse_free: (a: number, b: number) => void;
    readonly __wbg_supplementdemo_free: (a: number, b: number) => void;
    readonly crossover_response: (a: number, b: number, c: number) => [number, number, number];
    readonly crossoverresponse_freqs_hz: (a: number) => [number, number];
    readonly crossoverresponse_highpass_db: (a: number) => [number, number];
    readonly crossoverresponse_lowpass_db: (a: number) => [number, number];
    readonly crossoverresponse_sum_db: (a: number) => [number, number];
    readonly shift_contour: (a: number, b: number, c: number) => [number, number, number, number];
    readonly supplement_demo: (a: number, b: number, c: number, d: number) => [number, number, number];
    readonly supplementdemo_converted_db: (a: number) => [number, number];
    readonly supplementdemo_diff: (a: number) => number;
    readonly supplementdemo_freqs_hz: (a: number) => [number, number];
    readonly supplementdemo_output_db: (a: number) => [number, number];
    readonly supplementdemo_source_db: (a: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
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
