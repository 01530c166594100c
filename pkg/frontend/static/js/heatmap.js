// Spectrogram heatmap rendering. The server sends raw log-mel grids;
// this module turns them into RGBA pixel buffers with a color scale
// that is fixed per session, so frames stay comparable across alpha.
// Lower anchor of the color scale: the codec floors log-mel values at
// log(1e-5), so no payload value sits below this.
export const LOG_EPS = Math.log(1e-5);
// Accepts the wire payload shape only: positive integer dimensions and
// a flat row-major values array of exactly t*b finite numbers.
export function validatePayload(payload) {
    if (typeof payload !== 'object' || payload === null) {
        return null;
    }
    const p = payload;
    if (!Number.isInteger(p.t) || !Number.isInteger(p.b)) {
        return null;
    }
    const t = p.t;
    const b = p.b;
    if (t <= 0 || b <= 0) {
        return null;
    }
    if (!Array.isArray(p.values) || p.values.length !== t * b) {
        return null;
    }
    for (const v of p.values) {
        if (typeof v !== 'number' || !Number.isFinite(v)) {
            return null;
        }
    }
    return { t, b, values: p.values };
}
export function payloadMax(payload) {
    let max = -Infinity;
    for (const v of payload.values) {
        if (v > max) {
            max = v;
        }
    }
    return max;
}
// Session-anchored scale: [log eps, max over the two endpoint grids].
// Rebuilt only when a session is created, never when alpha moves.
export function sessionScale(endpointA, endpointB) {
    const hi = Math.max(payloadMax(endpointA), payloadMax(endpointB));
    // degenerate sessions (pure silence) still need a nonzero span
    return { lo: LOG_EPS, hi: hi > LOG_EPS ? hi : LOG_EPS + 1 };
}
// Dark-to-bright ramp, interpolated between fixed stops.
const COLOR_STOPS = [
    [0, 0, 4],
    [81, 18, 124],
    [183, 55, 121],
    [252, 137, 97],
    [252, 253, 191],
];
export function colorAt(norm) {
    const x = Math.min(1, Math.max(0, norm)) * (COLOR_STOPS.length - 1);
    const i = Math.min(COLOR_STOPS.length - 2, Math.floor(x));
    const frac = x - i;
    const lo = COLOR_STOPS[i];
    const hi = COLOR_STOPS[i + 1];
    return [
        Math.round(lo[0] + (hi[0] - lo[0]) * frac),
        Math.round(lo[1] + (hi[1] - lo[1]) * frac),
        Math.round(lo[2] + (hi[2] - lo[2]) * frac),
    ];
}
// Render a payload to pixels: time on x, mel band on y with band 0 at
// the bottom. Returns null for malformed payloads so the caller can
// blank the panel and show an error note.
export function renderHeatmap(payload, scale) {
    const p = validatePayload(payload);
    if (p === null) {
        return null;
    }
    const span = scale.hi - scale.lo;
    const pixels = new Uint8ClampedArray(p.t * p.b * 4);
    for (let band = 0; band < p.b; band++) {
        const y = p.b - 1 - band;
        for (let frame = 0; frame < p.t; frame++) {
            const v = p.values[frame * p.b + band];
            const [r, g, bl] = colorAt((v - scale.lo) / span);
            const off = (y * p.t + frame) * 4;
            pixels[off] = r;
            pixels[off + 1] = g;
            pixels[off + 2] = bl;
            pixels[off + 3] = 255;
        }
    }
    return { width: p.t, height: p.b, pixels };
}
