/* tslint:disable */
/* eslint-disable */

export class Planner {
    free(): void;
    [Symbol.dispose](): void;
    candidates(query_json: string): number;
    compare(query_json: string): string;
    map(): string;
    constructor(map_json: string);
    plan(query_json: string, algorithm: string): string;
    /**
     * The six-POI example map.
     */
    static sample(): Planner;
}

export function generateMap(seed: bigint, pois: number, density: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_planner_free: (a: number, b: number) => void;
    readonly generateMap: (a: bigint, b: number, c: number) => [number, number, number, number];
    readonly planner_candidates: (a: number, b: number, c: number) => [number, number, number];
    readonly planner_compare: (a: number, b: number, c: number) => [number, number, number, number];
    readonly planner_map: (a: number) => [number, number, number, number];
    readonly planner_new: (a: number, b: number) => [number, number, number];
    readonly planner_plan: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly planner_sample: () => number;
    readonly __externref_table_alloc: () => number;
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
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
