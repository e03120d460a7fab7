/* @ts-self-types="./qtm_wasm.d.ts" */

export class DemoParams {
    __destroy_into_raw() {
        const ptr = this.__wbg_ptr;
        this.__wbg_ptr = 0;
        DemoParamsFinalization.unregister(this);
        return ptr;
    }
    free() {
        const ptr = this.__destroy_into_raw();
        wasm.__wbg_demoparams_free(ptr, 0);
    }
    /**
     * Defaults of the `(g, T_H)` heatmap.
     */
    constructor() {
        const ret = wasm.demoparams_new();
        this.__wbg_ptr = ret;
        DemoParamsFinalization.register(this, this.__wbg_ptr, this);
        return this;
    }
    /**
     * One of `off`, `general`, `ideal`, `u_inf`.
     * @param {string} mode
     */
    set_feedback(mode) {
        const ptr0 = passStringToWasm0(mode, wasm.__wbindgen_malloc, wasm.__wbindgen_realloc);
        const len0 = WASM_VECTOR_LEN;
        const ret = wasm.demoparams_set_feedback(this.__wbg_ptr, ptr0, len0);
        if (ret[1]) {
            throw takeFromExternrefTable0(ret[0]);
        }
    }
    /**
     * @returns {boolean}
     */
    get bosonic() {
        const ret = wasm.__wbg_get_demoparams_bosonic(this.__wbg_ptr);
        return ret !== 0;
    }
    /**
     * @returns {number}
     */
    get g() {
        const ret = wasm.__wbg_get_demoparams_g(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get gamma_c() {
        const ret = wasm.__wbg_get_demoparams_gamma_c(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get gamma_det() {
        const ret = wasm.__wbg_get_demoparams_gamma_det(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get gamma_h() {
        const ret = wasm.__wbg_get_demoparams_gamma_h(this.__wbg_ptr);
        return ret;
    }
    /**
     * Negative means infinite.
     * @returns {number}
     */
    get lam() {
        const ret = wasm.__wbg_get_demoparams_lam(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get t_c() {
        const ret = wasm.__wbg_get_demoparams_t_c(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get t_h() {
        const ret = wasm.__wbg_get_demoparams_t_h(this.__wbg_ptr);
        return ret;
    }
    /**
     * Negative means infinite.
     * @returns {number}
     */
    get u() {
        const ret = wasm.__wbg_get_demoparams_u(this.__wbg_ptr);
        return ret;
    }
    /**
     * @param {boolean} arg0
     */
    set bosonic(arg0) {
        wasm.__wbg_set_demoparams_bosonic(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set g(arg0) {
        wasm.__wbg_set_demoparams_g(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set gamma_c(arg0) {
        wasm.__wbg_set_demoparams_gamma_c(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set gamma_det(arg0) {
        wasm.__wbg_set_demoparams_gamma_det(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set gamma_h(arg0) {
        wasm.__wbg_set_demoparams_gamma_h(this.__wbg_ptr, arg0);
    }
    /**
     * Negative means infinite.
     * @param {number} arg0
     */
    set lam(arg0) {
        wasm.__wbg_set_demoparams_lam(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set t_c(arg0) {
        wasm.__wbg_set_demoparams_t_c(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set t_h(arg0) {
        wasm.__wbg_set_demoparams_t_h(this.__wbg_ptr, arg0);
    }
    /**
     * Negative means infinite.
     * @param {number} arg0
     */
    set u(arg0) {
        wasm.__wbg_set_demoparams_u(this.__wbg_ptr, arg0);
    }
}
if (Symbol.dispose) DemoParams.prototype[Symbol.dispose] = DemoParams.prototype.free;

/**
 * @param {DemoParams} p
 * @param {number} points
 * @returns {Float64Array}
 */
export function detectorDensity(p, points) {
    _assertClass(p, DemoParams);
    const ret = wasm.detectorDensity(p.__wbg_ptr, points);
    if (ret[3]) {
        throw takeFromExternrefTable0(ret[2]);
    }
    var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
    wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
    return v1;
}

/**
 * @param {DemoParams} base
 * @param {number} side
 * @param {number} g_min
 * @param {number} g_max
 * @param {number} th_min
 * @param {number} th_max
 * @returns {Float64Array}
 */
export function heatmap(base, side, g_min, g_max, th_min, th_max) {
    _assertClass(base, DemoParams);
    const ret = wasm.heatmap(base.__wbg_ptr, side, g_min, g_max, th_min, th_max);
    if (ret[3]) {
        throw takeFromExternrefTable0(ret[2]);
    }
    var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
    wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
    return v1;
}

/**
 * @param {DemoParams} p
 * @returns {Float64Array}
 */
export function steadyPoint(p) {
    _assertClass(p, DemoParams);
    const ret = wasm.steadyPoint(p.__wbg_ptr);
    if (ret[3]) {
        throw takeFromExternrefTable0(ret[2]);
    }
    var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
    wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
    return v1;
}
function __wbg_get_imports() {
    const import0 = {
        __proto__: null,
        __wbg_Error_30c8987f7c2ed4e2: function(arg0, arg1) {
            const ret = Error(getStringFromWasm0(arg0, arg1));
            return ret;
        },
        __wbg___wbindgen_throw_41e9ee4f547fc59a: function(arg0, arg1) {
            throw new Error(getStringFromWasm0(arg0, arg1));
        },
        __wbindgen_init_externref_table: function() {
            const table = wasm.__wbindgen_externrefs;
            const offset = table.grow(4);
            table.set(0, undefined);
            table.set(offset + 0, undefined);
            table.set(offset + 1, null);
            table.set(offset + 2, true);
            table.set(offset + 3, false);
        },
    };
    return {
        __proto__: null,
        "./qtm_wasm_bg.js": import0,
    };
}

const DemoParamsFinalization = (typeof FinalizationRegistry === 'undefined')
    ? { register: () => {}, unregister: () => {} }
    : new FinalizationRegistry(ptr => wasm.__wbg_demoparams_free(ptr, 1));

function _assertClass(instance, klass) {
    if (!(instance instanceof klass)) {
        throw new Error(`expected instance of ${klass.name}`);
    }
}

function getArrayF64FromWasm0(ptr, len) {
    ptr = ptr >>> 0;
    return getFloat64ArrayMemory0().subarray(ptr / 8, ptr / 8 + len);
}

let cachedFloat64ArrayMemory0 = null;
function getFloat64ArrayMemory0() {
    if (cachedFloat64ArrayMemory0 === null || cachedFloat64ArrayMemory0.byteLength === 0) {
        cachedFloat64ArrayMemory0 = new Float64Array(wasm.memory.buffer);
    }
    return cachedFloat64ArrayMemory0;
}

function getStringFromWasm0(ptr, len) {
    return decodeText(ptr >>> 0, len);
}

let cachedUint8ArrayMemory0 = null;
function getUint8ArrayMemory0() {
    if (cachedUint8ArrayMemory0 === null || cachedUint8ArrayMemory0.byteLength === 0) {
        cachedUint8ArrayMemory0 = new Uint8Array(wasm.memory.buffer);
    }
    return cachedUint8ArrayMemory0;
}

function passStringToWasm0(arg, malloc, realloc) {
    if (realloc === undefined) {
        const buf = cachedTextEncoder.encode(arg);
        const ptr = malloc(buf.length, 1) >>> 0;
        getUint8ArrayMemory0().subarray(ptr, ptr + buf.length).set(buf);
        WASM_VECTOR_LEN = buf.length;
        return ptr;
    }

    let len = arg.length;
    let ptr = malloc(len, 1) >>> 0;

    const mem = getUint8ArrayMemory0();

    let offset = 0;

    for (; offset < len; offset++) {
        const code = arg.charCodeAt(offset);
        if (code > 0x7F) break;
        mem[ptr + offset] = code;
    }
    if (offset !== len) {
        if (offset !== 0) {
            arg = arg.slice(offset);
        }
        ptr = realloc(ptr, len, len = offset + arg.length * 3, 1) >>> 0;
        const view = getUint8ArrayMemory0().subarray(ptr + offset, ptr + len);
        const ret = cachedTextEncoder.encodeInto(arg, view);

        offset += ret.written;
        ptr = realloc(ptr, len, offset, 1) >>> 0;
    }

    WASM_VECTOR_LEN = offset;
    return ptr;
}

function takeFromExternrefTable0(idx) {
    const value = wasm.__wbindgen_externrefs.get(idx);
    wasm.__externref_table_dealloc(idx);
    return value;
}

let cachedTextDecoder = new TextDecoder('utf-8', { ignoreBOM: true, fatal: true });
cachedTextDecoder.decode();
const MAX_SAFARI_DECODE_BYTES = 2146435072;
let numBytesDecoded = 0;
function decodeText(ptr, len) {
    numBytesDecoded += len;
    if (numBytesDecoded >= MAX_SAFARI_DECODE_BYTES) {
        cachedTextDecoder = new TextDecoder('utf-8', { ignoreBOM: true, fatal: true });
        cachedTextDecoder.decode();
        numBytesDecoded = len;
    }
    return cachedTextDecoder.decode(getUint8ArrayMemory0().subarray(ptr, ptr + len));
}

const cachedTextEncoder = new TextEncoder();

if (!('encodeInto' in cachedTextEncoder)) {
    cachedTextEncoder.encodeInto = function (arg, view) {
        const buf = cachedTextEncoder.encode(arg);
        view.set(buf);
        return {
            read: arg.length,
            written: buf.length
        };
    };
}

let WASM_VECTOR_LEN = 0;

let wasmModule, wasmInstance, wasm;
function __wbg_finalize_init(instance, module) {
    wasmInstance = instance;
    wasm = instance.exports;
    wasmModule = module;
    cachedFloat64ArrayMemory0 = null;
    cachedUint8ArrayMemory0 = null;
    wasm.__wbindgen_start();
    return wasm;
}

async function __wbg_load(module, imports) {
    if (typeof Response === 'function' && module instanceof Response) {
        if (!module.ok) {
            throw new Error(`failed to fetch Wasm: ${module.status} ${module.statusText} fetching '${module.url}'`);
        }

        if (typeof WebAssembly.instantiateStreaming === 'function') {
            try {
                return await WebAssembly.instantiateStreaming(module, imports);
            } catch (e) {
                const validResponse = expectedResponseType(module.type);

                if (validResponse && module.headers.get('Content-Type') !== 'application/wasm') {
                    console.warn("`WebAssembly.instantiateStreaming` failed because your server does not serve Wasm with `application/wasm` MIME type. Falling back to `WebAssembly.instantiate` which is slower. Original error:\n", e);

                } else { throw e; }
            }
        }

        const bytes = await module.arrayBuffer();
        return await WebAssembly.instantiate(bytes, imports);
    } else {
        const instance = await WebAssembly.instantiate(module, imports);

        if (instance instanceof WebAssembly.Instance) {
            return { instance, module };
        } else {
            return instance;
        }
    }

    function expectedResponseType(type) {
        switch (type) {
            case 'basic': case 'cors': case 'default': return true;
        }
        return false;
    }
}

function initSync(module) {
    if (wasm !== undefined) return wasm;


    if (module !== undefined) {
        if (Object.getPrototypeOf(module) === Object.prototype) {
            ({module} = module)
        } else {
            console.warn('using deprecated parameters for `initSync()`; pass a single object instead')
        }
    }

    const imports = __wbg_get_imports();
    if (!(module instanceof WebAssembly.Module)) {
        module = new WebAssembly.Module(module);
    }
    const instance = new WebAssembly.Instance(module, imports);
    return __wbg_finalize_init(instance, module);
}

async function __wbg_init(module_or_path) {
    if (wasm !== undefined) return wasm;


    if (module_or_path !== undefined) {
        if (Object.getPrototypeOf(module_or_path) === Object.prototype) {
            ({module_or_path} = module_or_path)
        } else {
            console.warn('using deprecated parameters for the initialization function; pass a single object instead')
        }
    }

    if (module_or_path === undefined) {
        module_or_path = new URL('qtm_wasm_bg.wasm', import.meta.url);
    }
    const imports = __wbg_get_imports();

    if (typeof module_or_path === 'string' || (typeof Request === 'function' && module_or_path instanceof Request) || (typeof URL === 'function' && module_or_path instanceof URL)) {
        module_or_path = fetch(module_or_path);
    }

    const { instance, module } = await __wbg_load(await module_or_path, imports);

    return __wbg_finalize_init(instance, module);
}

export { initSync, __wbg_init as default };
