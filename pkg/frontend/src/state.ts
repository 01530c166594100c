// UI session state and the controller that keeps it in sync with the
// server. All displayed quantities originate from server responses; the
// controller only schedules fetches and applies them in order.

import {
    ApiClient,
    ApiError,
    Diagnostics,
    MorphBundle,
    SessionOptions,
    SpectrogramPayload,
} from './api.js';

export const DEBOUNCE_MS = 150;

// The slice of the client the controller actually uses; tests can
// substitute a fake with just these three methods.
export type MorphApi = Pick<ApiClient, 'createSession' | 'fetchSpectrogram' | 'fetchMorphBundle'>;

export type PlaybackTarget = 'a' | 'b' | 'morph';

export interface PlaybackState {
    status: 'stopped' | 'playing';
    target: PlaybackTarget;
    positionS: number;
}

export interface UiSessionState {
    sessionId: string | null;
    theta0: number;          // radians, as reported by the server
    durationS: number;
    currentAlpha: number;
    adain: boolean;
    playback: PlaybackState;
    lastDiagnostics: Diagnostics | null;
    notice: string | null;   // inline message near the upload form
    toast: string | null;    // transient fetch-failure message with retry
}

export function initialState(): UiSessionState {
    return {
        sessionId: null,
        theta0: 0,
        durationS: 0,
        currentAlpha: 0.5,
        adain: false,
        playback: { status: 'stopped', target: 'morph', positionS: 0 },
        lastDiagnostics: null,
        notice: null,
        toast: null,
    };
}

export function radToDeg(radians: number): number {
    return (radians * 180) / Math.PI;
}

// Slider caption: the alpha value plus the expected geodesic angle
// alpha * theta0, shown in degrees.
export function sliderAnnotation(alpha: number, theta0: number): string {
    const deg = radToDeg(alpha * theta0);
    return `α = ${alpha.toFixed(3)} · expected angle ${deg.toFixed(2)}°`;
}

export function diagnosticsLines(d: Diagnostics | null): string[] {
    if (d === null) {
        return ['no diagnostics yet'];
    }
    const fmtSc = (v: number | null) => (v === null ? 'n/a' : v.toFixed(4));
    return [
        `expected α·θ₀ ${radToDeg(d.expected_a).toFixed(2)}°`,
        `angle to A ${radToDeg(d.angle_to_a).toFixed(2)}°`,
        `angle to B ${radToDeg(d.angle_to_b).toFixed(2)}°`,
        `sc to A ${fmtSc(d.sc_to_a)}`,
        `sc to B ${fmtSc(d.sc_to_b)}`,
    ];
}

export interface ControllerEvents {
    // Fired after any state mutation.
    onState?: (state: UiSessionState) => void;
    // Fired when a fresh morph render should replace the audible buffer.
    onAudio?: (alpha: number, audio: ArrayBuffer) => void;
    // Fired together with onAudio; payload matches the same alpha.
    onSpectrogram?: (alpha: number, payload: SpectrogramPayload) => void;
}

export class MorphController {
    state: UiSessionState;
    // Endpoint spectrograms fetched once per session; they anchor the
    // heatmap color scale and serve as the alpha=0/1 reference panels.
    endpointSpectrogramA: SpectrogramPayload | null = null;
    endpointSpectrogramB: SpectrogramPayload | null = null;

    private api: MorphApi;
    private events: ControllerEvents;
    private debounceTimer: ReturnType<typeof setTimeout> | null = null;
    private issuedSeq = 0;
    private appliedSeq = 0;
    private inFlightSeq: number | null = null;
    private wantAlpha = 0.5;
    private wantAdain = false;

    constructor(api: MorphApi, events: ControllerEvents = {}) {
        this.api = api;
        this.events = events;
        this.state = initialState();
    }

    get hasSession(): boolean {
        return this.state.sessionId !== null;
    }

    private emit(): void {
        this.events.onState?.(this.state);
    }

    // Wraps POST /api/session. On success the full state is rebuilt
    // around the new session; on failure only the inline notice changes.
    async createSession(fileA: Blob, fileB: Blob, opts: SessionOptions = {}): Promise<boolean> {
        let info;
        try {
            info = await this.api.createSession(fileA, fileB, opts);
        } catch (err) {
            this.state.notice = describeSessionError(err);
            this.emit();
            return false;
        }
        this.state = {
            ...initialState(),
            sessionId: info.session_id,
            theta0: info.theta0,
            durationS: info.duration_s,
            notice: info.theta0 === 0 ? 'tones are identical' : null,
        };
        this.wantAlpha = this.state.currentAlpha;
        this.wantAdain = this.state.adain;
        this.issuedSeq = 0;
        this.appliedSeq = 0;
        this.inFlightSeq = null;
        if (this.debounceTimer !== null) {
            clearTimeout(this.debounceTimer);
            this.debounceTimer = null;
        }
        this.emit();
        void this.fetchEndpointSpectrograms(info.session_id);
        this.launch(this.wantAlpha, this.wantAdain);
        return true;
    }

    private async fetchEndpointSpectrograms(sessionId: string): Promise<void> {
        try {
            const [a, b] = await Promise.all([
                this.api.fetchSpectrogram(sessionId, 0),
                this.api.fetchSpectrogram(sessionId, 1),
            ]);
            if (this.state.sessionId === sessionId) {
                this.endpointSpectrogramA = a;
                this.endpointSpectrogramB = b;
                this.emit();
            }
        } catch {
            // scale anchors are a display nicety; morph fetches surface
            // their own failures
        }
    }

    // Slider handler. Updates the annotation immediately, then schedules
    // a debounced fetch of the morph audio + diagnostics + spectrogram.
    onAlphaChange(alpha: number): void {
        if (!this.hasSession) {
            return;
        }
        if (!(alpha >= 0 && alpha <= 1)) {
            return;
        }
        this.state.currentAlpha = alpha;
        this.wantAlpha = alpha;
        this.emit();
        this.scheduleFetch();
    }

    setAdain(on: boolean): void {
        this.state.adain = on;
        this.wantAdain = on;
        this.emit();
        if (this.hasSession) {
            this.scheduleFetch();
        }
    }

    setPlayback(status: 'stopped' | 'playing', target: PlaybackTarget, positionS: number = 0): void {
        if (!this.hasSession) {
            return;
        }
        this.state.playback = { status, target, positionS };
        this.emit();
    }

    // Relaunch after a failed fetch; wired to the toast's retry action.
    retryFetch(): void {
        if (!this.hasSession || this.inFlightSeq !== null) {
            return;
        }
        this.state.toast = null;
        this.emit();
        this.launch(this.wantAlpha, this.wantAdain);
    }

    private scheduleFetch(): void {
        if (this.debounceTimer !== null) {
            clearTimeout(this.debounceTimer);
        }
        this.debounceTimer = setTimeout(() => {
            this.debounceTimer = null;
            if (this.inFlightSeq === null) {
                this.launch(this.wantAlpha, this.wantAdain);
            }
            // else: the landing handler chases the latest value
        }, DEBOUNCE_MS);
    }

    private launch(alpha: number, adain: boolean): void {
        const sessionId = this.state.sessionId;
        if (sessionId === null) {
            return;
        }
        const seq = ++this.issuedSeq;
        this.inFlightSeq = seq;
        this.api.fetchMorphBundle(sessionId, alpha, adain ? 'on' : 'off').then(
            (bundle) => this.land(seq, alpha, adain, bundle),
            (err) => this.fail(seq, alpha, adain, err),
        );
    }

    // Responses are applied in sequence order; anything superseded by a
    // newer request is discarded so panels never show mismatched alphas.
    private land(seq: number, alpha: number, adain: boolean, bundle: MorphBundle): void {
        if (this.inFlightSeq === seq) {
            this.inFlightSeq = null;
        }
        if (seq > this.appliedSeq && seq === this.issuedSeq) {
            this.appliedSeq = seq;
            this.state.lastDiagnostics = bundle.diagnostics;
            this.state.toast = null;
            this.emit();
            this.events.onAudio?.(alpha, bundle.audio);
            this.events.onSpectrogram?.(alpha, bundle.spectrogram);
        }
        this.chase(alpha, adain);
    }

    private fail(seq: number, alpha: number, adain: boolean, err: unknown): void {
        if (this.inFlightSeq === seq) {
            this.inFlightSeq = null;
        }
        if (this.wantAlpha !== alpha || this.wantAdain !== adain) {
            // a newer value is pending; chase it instead of surfacing a
            // toast for a fetch the user already superseded
            this.chase(alpha, adain);
            return;
        }
        const name = err instanceof ApiError ? err.errorName : 'network error';
        this.state.toast = `morph fetch failed (${name}), retry?`;
        this.emit();
    }

    private chase(alpha: number, adain: boolean): void {
        if (
            (this.wantAlpha !== alpha || this.wantAdain !== adain) &&
            this.debounceTimer === null &&
            this.inFlightSeq === null
        ) {
            this.launch(this.wantAlpha, this.wantAdain);
        }
    }
}

function describeSessionError(err: unknown): string {
    if (err instanceof ApiError) {
        if (err.status === 413) {
            return 'clip too long (30 s maximum)';
        }
        if (err.status === 429) {
            return 'server is at capacity, try again shortly';
        }
        return `upload rejected (${err.errorName})`;
    }
    return 'network error, check the server and try again';
}
