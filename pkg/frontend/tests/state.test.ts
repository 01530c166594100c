import { afterEach, beforeEach, describe, expect, it, vi } from 'vitest';

import { ApiError, Diagnostics, MorphBundle, SessionInfo, SpectrogramPayload } from '../src/api.js';
import {
    DEBOUNCE_MS,
    MorphController,
    diagnosticsLines,
    initialState,
    radToDeg,
    sliderAnnotation,
} from '../src/state.js';

const THETA0 = 0.8;

function makeDiagnostics(alpha: number, theta0 = THETA0): Diagnostics {
    return {
        angle_to_a: alpha * theta0,
        angle_to_b: (1 - alpha) * theta0,
        expected_a: alpha * theta0,
        sc_to_a: alpha === 0 ? 0 : 0.1,
        sc_to_b: 0.2,
    };
}

function makeBundle(alpha: number, theta0 = THETA0): MorphBundle {
    return {
        alpha,
        audio: new Uint8Array([1, 2, 3]).buffer,
        diagnostics: makeDiagnostics(alpha, theta0),
        spectrogram: { t: 2, b: 2, values: [alpha, 0, 0, 0] },
    };
}

interface Deferred {
    alpha: number;
    adain: string;
    resolve: (b: MorphBundle) => void;
    reject: (e: unknown) => void;
}

// Hand-controlled stand-in for the HTTP client.
class FakeApi {
    theta0 = THETA0;
    auto = true;                 // resolve morph fetches immediately
    sessionError: unknown = null;
    bundleCalls: Array<{ alpha: number; adain: string }> = [];
    pending: Deferred[] = [];

    async createSession(): Promise<SessionInfo> {
        if (this.sessionError !== null) {
            throw this.sessionError;
        }
        return { session_id: 's1', frames: 8, bands: 4, theta0: this.theta0, duration_s: 0.5 };
    }

    async fetchSpectrogram(_sid: string, alpha: number): Promise<SpectrogramPayload> {
        return { t: 2, b: 2, values: [alpha, 0, 0, 1] };
    }

    fetchMorphBundle(_sid: string, alpha: number, adain: 'on' | 'off' = 'off'): Promise<MorphBundle> {
        this.bundleCalls.push({ alpha, adain });
        if (this.auto) {
            return Promise.resolve(makeBundle(alpha, this.theta0));
        }
        return new Promise((resolve, reject) => {
            this.pending.push({ alpha, adain, resolve, reject });
        });
    }
}

async function flush(): Promise<void> {
    for (let i = 0; i < 10; i++) {
        await Promise.resolve();
    }
}

interface Harness {
    api: FakeApi;
    controller: MorphController;
    audio: Array<{ alpha: number }>;
    spect: number[];
    ok: boolean;
}

async function makeSession(api = new FakeApi()): Promise<Harness> {
    const audio: Array<{ alpha: number }> = [];
    const spect: number[] = [];
    const controller = new MorphController(api, {
        onAudio: (alpha) => audio.push({ alpha }),
        onSpectrogram: (alpha) => spect.push(alpha),
    });
    const ok = await controller.createSession(new Blob(['a']), new Blob(['b']));
    await flush();
    return { api, controller, audio, spect, ok };
}

beforeEach(() => {
    vi.useFakeTimers();
});

afterEach(() => {
    vi.useRealTimers();
});

describe('initial state', () => {
    it('starts without a session and with the slider centered', () => {
        const controller = new MorphController(new FakeApi());
        expect(controller.hasSession).toBe(false);
        expect(controller.state.currentAlpha).toBe(0.5);
        expect(controller.state.playback.status).toBe('stopped');
        expect(controller.state.lastDiagnostics).toBeNull();
    });

    it('ignores slider input until a session exists', () => {
        const api = new FakeApi();
        const controller = new MorphController(api);
        controller.onAlphaChange(0.3);
        vi.advanceTimersByTime(DEBOUNCE_MS * 2);
        expect(api.bundleCalls).toHaveLength(0);
        expect(controller.state.currentAlpha).toBe(0.5);
    });
});

describe('createSession', () => {
    it('initializes state from the server reply and primes the panels', async () => {
        const { api, controller, audio, ok } = await makeSession();
        expect(ok).toBe(true);
        expect(controller.state.sessionId).toBe('s1');
        expect(controller.state.theta0).toBe(THETA0);
        expect(controller.state.durationS).toBe(0.5);
        expect(controller.state.currentAlpha).toBe(0.5);
        expect(controller.state.notice).toBeNull();
        expect(api.bundleCalls).toEqual([{ alpha: 0.5, adain: 'off' }]);
        expect(controller.state.lastDiagnostics?.expected_a).toBeCloseTo(0.5 * THETA0, 12);
        expect(controller.endpointSpectrogramA).not.toBeNull();
        expect(controller.endpointSpectrogramB).not.toBeNull();
        expect(audio.map((a) => a.alpha)).toEqual([0.5]);
    });

    it('notices identical tones', async () => {
        const api = new FakeApi();
        api.theta0 = 0;
        const { controller } = await makeSession(api);
        expect(controller.state.notice).toBe('tones are identical');
    });

    it('surfaces an oversized upload inline without touching state', async () => {
        const api = new FakeApi();
        api.sessionError = new ApiError(413, 'ClipTooLong');
        const { controller, ok } = await makeSession(api);
        expect(ok).toBe(false);
        expect(controller.state.notice).toContain('clip too long');
        const { notice: _n1, ...rest } = controller.state;
        const { notice: _n2, ...fresh } = initialState();
        expect(rest).toEqual(fresh);
        expect(api.bundleCalls).toHaveLength(0);
    });

    it('surfaces capacity and decode errors inline', async () => {
        const api = new FakeApi();
        api.sessionError = new ApiError(429, 'TooManySessions');
        let h = await makeSession(api);
        expect(h.controller.state.notice).toContain('capacity');

        api.sessionError = new ApiError(400, 'CorruptHeader');
        h = await makeSession(api);
        expect(h.controller.state.notice).toContain('CorruptHeader');

        api.sessionError = new TypeError('fetch failed');
        h = await makeSession(api);
        expect(h.controller.state.notice).toContain('network');
    });

    it('replacing a session resets diagnostics and the slider', async () => {
        const { api, controller } = await makeSession();
        controller.onAlphaChange(0.9);
        vi.advanceTimersByTime(DEBOUNCE_MS);
        await flush();
        expect(controller.state.currentAlpha).toBe(0.9);

        api.bundleCalls.length = 0;
        await controller.createSession(new Blob(['c']), new Blob(['d']));
        expect(controller.state.currentAlpha).toBe(0.5);
        expect(api.bundleCalls[0]).toEqual({ alpha: 0.5, adain: 'off' });
    });
});

describe('annotations', () => {
    it('formats alpha and the expected angle in degrees', () => {
        const text = sliderAnnotation(0.25, Math.PI / 2);
        expect(text).toContain('0.250');
        expect(text).toContain('22.50°');
    });

    it('renders diagnostics lines from server values only', () => {
        expect(diagnosticsLines(null)).toEqual(['no diagnostics yet']);
        const lines = diagnosticsLines(makeDiagnostics(0.5));
        expect(lines[0]).toContain(radToDeg(0.5 * THETA0).toFixed(2));
        expect(lines.some((l) => l.includes('sc to A'))).toBe(true);
    });

    it('shows n/a when spectral convergence is undefined', () => {
        const d = { ...makeDiagnostics(0.5), sc_to_a: null };
        expect(diagnosticsLines(d).some((l) => l.includes('n/a'))).toBe(true);
    });
});

describe('onAlphaChange', () => {
    it('updates the annotation value immediately but debounces the fetch', async () => {
        const { api, controller } = await makeSession();
        api.bundleCalls.length = 0;
        controller.onAlphaChange(0.3);
        expect(controller.state.currentAlpha).toBe(0.3);
        expect(api.bundleCalls).toHaveLength(0);
        vi.advanceTimersByTime(DEBOUNCE_MS - 1);
        expect(api.bundleCalls).toHaveLength(0);
        vi.advanceTimersByTime(1);
        expect(api.bundleCalls).toEqual([{ alpha: 0.3, adain: 'off' }]);
    });

    it('collapses ten rapid events into a single fetch for the last value', async () => {
        const { api, controller, audio } = await makeSession();
        api.bundleCalls.length = 0;
        audio.length = 0;
        const alphas = Array.from({ length: 10 }, (_, i) => (i + 1) / 12.5);
        for (const alpha of alphas) {
            controller.onAlphaChange(alpha);
            vi.advanceTimersByTime(10);
        }
        expect(api.bundleCalls).toHaveLength(0);
        vi.advanceTimersByTime(DEBOUNCE_MS);
        await flush();
        expect(api.bundleCalls).toEqual([{ alpha: 0.8, adain: 'off' }]);
        expect(controller.state.lastDiagnostics?.expected_a).toBeCloseTo(0.8 * THETA0, 12);
        expect(audio.map((a) => a.alpha)).toEqual([0.8]);
    });

    it('keeps at most one fetch in flight and chases the latest value', async () => {
        const { api, controller } = await makeSession();
        api.auto = false;
        api.bundleCalls.length = 0;
        controller.onAlphaChange(0.2);
        vi.advanceTimersByTime(DEBOUNCE_MS);
        expect(api.bundleCalls).toHaveLength(1);

        controller.onAlphaChange(0.9);
        vi.advanceTimersByTime(DEBOUNCE_MS);
        expect(api.bundleCalls).toHaveLength(1);  // still only the first one

        api.pending[0].resolve(makeBundle(0.2));
        await flush();
        expect(api.bundleCalls).toHaveLength(2);
        expect(api.bundleCalls[1].alpha).toBe(0.9);

        api.pending[1].resolve(makeBundle(0.9));
        await flush();
        expect(controller.state.lastDiagnostics?.expected_a).toBeCloseTo(0.9 * THETA0, 12);
    });

    it('discards responses that arrive out of sequence', async () => {
        const { controller, audio } = await makeSession();
        const before = controller.state.lastDiagnostics;
        audio.length = 0;
        // simulate a late landing from an already superseded request
        (controller as any).land(0, 0.1, false, makeBundle(0.1));
        expect(controller.state.lastDiagnostics).toBe(before);
        expect(audio).toHaveLength(0);
    });

    it('ignores out-of-range values', async () => {
        const { api, controller } = await makeSession();
        api.bundleCalls.length = 0;
        controller.onAlphaChange(1.5);
        controller.onAlphaChange(-0.1);
        controller.onAlphaChange(NaN);
        vi.advanceTimersByTime(DEBOUNCE_MS * 2);
        expect(api.bundleCalls).toHaveLength(0);
        expect(controller.state.currentAlpha).toBe(0.5);
    });
});

describe('failure handling', () => {
    it('shows a retry toast on network failure and retries on demand', async () => {
        const { api, controller } = await makeSession();
        api.auto = false;
        api.bundleCalls.length = 0;
        controller.onAlphaChange(0.3);
        vi.advanceTimersByTime(DEBOUNCE_MS);
        api.pending[0].reject(new TypeError('fetch failed'));
        await flush();
        expect(controller.state.toast).toContain('retry');

        api.auto = true;
        controller.retryFetch();
        expect(controller.state.toast).toBeNull();
        await flush();
        expect(api.bundleCalls).toHaveLength(2);
        expect(controller.state.lastDiagnostics?.expected_a).toBeCloseTo(0.3 * THETA0, 12);
    });

    it('does not toast for failures of superseded values', async () => {
        const { api, controller } = await makeSession();
        api.auto = false;
        api.bundleCalls.length = 0;
        controller.onAlphaChange(0.3);
        vi.advanceTimersByTime(DEBOUNCE_MS);
        controller.onAlphaChange(0.7);          // debounce pending
        api.pending[0].reject(new TypeError('fetch failed'));
        await flush();
        expect(controller.state.toast).toBeNull();

        vi.advanceTimersByTime(DEBOUNCE_MS);
        expect(api.bundleCalls).toHaveLength(2);
        expect(api.bundleCalls[1].alpha).toBe(0.7);
        api.pending[1].resolve(makeBundle(0.7));
        await flush();
        expect(controller.state.lastDiagnostics?.expected_a).toBeCloseTo(0.7 * THETA0, 12);
    });
});

describe('adain and playback', () => {
    it('refetches with the style flag when toggled', async () => {
        const { api, controller } = await makeSession();
        api.bundleCalls.length = 0;
        controller.setAdain(true);
        expect(controller.state.adain).toBe(true);
        vi.advanceTimersByTime(DEBOUNCE_MS);
        expect(api.bundleCalls).toEqual([{ alpha: 0.5, adain: 'on' }]);
    });

    it('tracks playback only once a session exists', async () => {
        const bare = new MorphController(new FakeApi());
        bare.setPlayback('playing', 'a', 1.0);
        expect(bare.state.playback.status).toBe('stopped');

        const { controller } = await makeSession();
        controller.setPlayback('playing', 'morph', 0.25);
        expect(controller.state.playback).toEqual({
            status: 'playing', target: 'morph', positionS: 0.25,
        });
    });
});
