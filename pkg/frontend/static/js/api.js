// Typed client for the tonemorph HTTP API. Every number shown in the UI
// comes from these payloads; the client does no audio math of its own.
export class ApiError extends Error {
    constructor(status, errorName) {
        super(`${status} ${errorName}`);
        this.status = status;
        this.errorName = errorName;
    }
}
async function rejectWith(res) {
    let name = res.statusText || 'RequestFailed';
    try {
        const body = await res.json();
        if (body && typeof body.error === 'string') {
            name = body.error;
        }
        else if (body && body.detail !== undefined) {
            name = 'ValidationError';
        }
    }
    catch {
        // non-JSON body: keep the status text
    }
    throw new ApiError(res.status, name);
}
export class ApiClient {
    constructor(baseUrl = '') {
        this.baseUrl = baseUrl.replace(/\/$/, '');
    }
    async health() {
        const res = await fetch(`${this.baseUrl}/api/health`);
        if (!res.ok) {
            await rejectWith(res);
        }
        return res.json();
    }
    async createSession(fileA, fileB, opts = {}) {
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
    morphUrl(sessionId, alpha, adain = 'off') {
        return `${this.baseUrl}/api/session/${sessionId}/morph?alpha=${alpha}&adain=${adain}`;
    }
    async fetchMorphAudio(sessionId, alpha, adain = 'off') {
        const res = await fetch(this.morphUrl(sessionId, alpha, adain));
        if (!res.ok) {
            await rejectWith(res);
        }
        return res.arrayBuffer();
    }
    async fetchDiagnostics(sessionId, alpha, adain = 'off') {
        const res = await fetch(`${this.baseUrl}/api/session/${sessionId}/diagnostics?alpha=${alpha}&adain=${adain}`);
        if (!res.ok) {
            await rejectWith(res);
        }
        return res.json();
    }
    async fetchSpectrogram(sessionId, alpha, adain = 'off') {
        const res = await fetch(`${this.baseUrl}/api/session/${sessionId}/spectrogram?alpha=${alpha}&adain=${adain}`);
        if (!res.ok) {
            await rejectWith(res);
        }
        return res.json();
    }
    // All three views of one alpha, fetched together so the caller can
    // apply them atomically.
    async fetchMorphBundle(sessionId, alpha, adain = 'off') {
        const [audio, diagnostics, spectrogram] = await Promise.all([
            this.fetchMorphAudio(sessionId, alpha, adain),
            this.fetchDiagnostics(sessionId, alpha, adain),
            this.fetchSpectrogram(sessionId, alpha, adain),
        ]);
        return { alpha, audio, diagnostics, spectrogram };
    }
}
