// Typed client for the tonemorph HTTP API. Every number shown in the UI
// comes from these payloads; the client does no audio math of its own.

export interface SessionInfo {
    session_id: string;
    frames: number;
    bands: number;
    theta0: number;      // radians; the UI converts to degrees for display only
    duration_s: number;
}

export interface Diagnostics {
    angle_to_a: number;
    angle_to_b: number;
    expected_a: number;  // alpha * theta0, computed server-side
    sc_to_a: number | null;
    sc_to_b: number | null;
}

// Row-major frames x bands grid, flattened.
export interface SpectrogramPayload {
    t: number;
    b: number;
    values: number[];
}

// One consistent snapshot for a single alpha value. The three endpoint
// responses are bundled so panels never mix data from different alphas.
export interface MorphBundle {
    alpha: number;
    audio: ArrayBuffer;
    diagnostics: Diagnostics;
    spectrogram: SpectrogramPayload;
}

export interface SessionOptions {
    sampleRate?: number;
    nMels?: number;
    glIterations?: number;
}

export type AdainFlag = 'on' | 'off';

export class ApiError extends Error {
    status: number;
    errorName: string;

    constructor(status: number, errorName: string) {
        super(`${status} ${errorName}`);
        this.status = status;
        this.errorName = errorName;
    }
}

async function rejectWith(res: Response): Promise<never> {
    let name = res.statusText || 'RequestFailed';
    try {
        const body = await res.json();
        if (body && typeof body.error === 'string') {
            name = body.error;
        } else if (body && body.detail !== undefined) {
            name = 'ValidationError';
        }
    } catch {
        // non-JSON body: keep the status text
    }
    throw new ApiError(res.status, name);
}

export class ApiClient {
    baseUrl: string;

    constructor(baseUrl: string = '') {
        this.baseUrl = baseUrl.replace(/\/$/, '');
    }

    async health(): Promise<{ status: string; version: string }> {
        const res = await fetch(`${this.baseUrl}/api/health`);
        if (!res.ok) {
            await rejectWith(res);
        }
        return res.json();
    }

    async createSession(fileA: Blob, fileB: Blob, opts: SessionOptions = {}): Promise<SessionInfo> {
        const form = new FormData();
        form.append('file_a', fileA, 'a.wav');
        form.append('file_b', fileB, 'b.wav');
        if (opts.sampleRate !== undefined) {
            form.append('sample_rate', String(opts.sampleRate));
        }
        if (opts.nMels !== undefined) {
            form.append('n_mels', String(opts.nMels));
        }
        if (opts.glIterations !== undefined) {
            form.append('gl_iterations', String(opts.glIterations));
        }
        const res = await fetch(`${this.baseUrl}/api/session`, { method: 'POST', body: form });
        if (!res.ok) {
            await rejectWith(res);
        }
        return res.json();
    }

    morphUrl(sessionId: string, alpha: number, adain: AdainFlag = 'off'): string {
        return `${this.baseUrl}/api/session/${sessionId}/morph?alpha=${alpha}&adain=${adain}`;
    }

    async fetchMorphAudio(sessionId: string, alpha: number, adain: AdainFlag = 'off'): Promise<ArrayBuffer> {
        const res = await fetch(this.morphUrl(sessionId, alpha, adain));
        if (!res.ok) {
            await rejectWith(res);
        }
        return res.arrayBuffer();
    }

    async fetchDiagnostics(sessionId: string, alpha: number, adain: AdainFlag = 'off'): Promise<Diagnostics> {
        const res = await fetch(
            `${this.baseUrl}/api/session/${sessionId}/diagnostics?alpha=${alpha}&adain=${adain}`);
        if (!res.ok) {
            await rejectWith(res);
        }
        return res.json();
    }

    async fetchSpectrogram(sessionId: string, alpha: number, adain: AdainFlag = 'off'): Promise<SpectrogramPayload> {
        const res = await fetch(
            `${this.baseUrl}/api/session/${sessionId}/spectrogram?alpha=${alpha}&adain=${adain}`);
        if (!res.ok) {
            await rejectWith(res);
        }
        return res.json();
    }

    // All three views of one alpha, fetched together so the caller can
    // apply them atomically.
    async fetchMorphBundle(sessionId: string, alpha: number, adain: AdainFlag = 'off'): Promise<MorphBundle> {
        const [audio, diagnostics, spectrogram] = await Promise.all([
            this.fetchMorphAudio(sessionId, alpha, adain),
            this.fetchDiagnostics(sessionId, alpha, adain),
            this.fetchSpectrogram(sessionId, alpha, adain),
        ]);
        return { alpha, audio, diagnostics, spectrogram };
    }
}
