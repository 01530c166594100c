// UI session state and the controller that keeps it in sync with the
// server. All displayed quantities originate from server responses; the
// controller only schedules fetches and applies them in order.
import { ApiError, } from './api.js';
export const DEBOUNCE_MS = 150;
export function initialState() {
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
export function radToDeg(radians) {
    return (radians * 180) / Math.PI;
}
// Slider caption: the alpha value plus the expected geodesic angle
// alpha * theta0, shown in degrees.
export function sliderAnnotation(alpha, theta0) {
    const deg = radToDeg(alpha * theta0);
    return `α = ${alpha.toFixed(3)} · expected angle ${deg.toFixed(2)}°`;
}
export function diagnosticsLines(d) {
    if (d === null) {
        return ['no diagnostics yet'];
    }
    const fmtSc = (v) => (v === null ? 'n/a' : v.toFixed(4));
    return [
        `expected α·θ₀ ${radToDeg(d.expected_a).toFixed(2)}°`,
        `angle to A ${radToDeg(d.angle_to_a).toFixed(2)}°`,
        `angle to B ${radToDeg(d.angle_to_b).toFixed(2)}°`,
        `sc to A ${fmtSc(d.sc_to_a)}`,
        `sc to B ${fmtSc(d.sc_to_b)}`,
    ];
}
export class MorphController {
    constructor(api, events = {}) {
        // Endpoint spectrograms fetched once per session; they anchor the
        // heatmap color scale and serve as the alpha=0/1 reference panels.
        this.endpointSpectrogramA = null;
        this.endpointSpectrogramB = null;
        this.debounceTimer = null;
        this.issuedSeq = 0;
        this.appliedSeq = 0;
        this.inFlightSeq = null;
        this.wantAlpha = 0.5;
        this.wantAdain = false;
        this.api = api;
        this.events = events;
        this.state = initialState();
    }
    get hasSession() {
        return this.state.sessionId !== null;
    }
    emit() {
        this.events.onState?.(this.state);
    }
    // Wraps POST /api/session. On success the full state is rebuilt
    // around the new session; on failure only the inline notice changes.
    async createSession(fileA, fileB, opts = {}) {
        let info;
        try {
            info = await this.api.createSession(fileA, fileB, opts);
        }
        catch (err) {
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
    async fetchEndpointSpectrograms(sessionId) {
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
        }
        catch {
            // scale anchors are a display nicety; morph fetches surface
            // their own failures
        }
    }
    // Slider handler. Updates the annotation immediately, then schedules
    // a debounced fetch of the morph audio + diagnostics + spectrogram.
    onAlphaChange(alpha) {
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
    setAdain(on) {
        this.state.adain = on;
        this.wantAdain = on;
        this.emit();
        if (this.hasSession) {
            this.scheduleFetch();
        }
    }
    setPlayback(status, target, positionS = 0) {
        if (!this.hasSession) {
            return;
        }
        this.state.playback = { status, target, positionS };
        this.emit();
    }
    // Relaunch after a failed fetch; wired to the toast's retry action.
    retryFetch() {
        if (!this.hasSession || this.inFlightSeq !== null) {
            return;
        }
        this.state.toast = null;
        this.emit();
        this.launch(this.wantAlpha, this.wantAdain);
    }
    scheduleFetch() {
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
    launch(alpha, adain) {
        const sessionId = this.state.sessionId;
        if (sessionId === null) {
            return;
        }
        const seq = ++this.issuedSeq;
        this.inFlightSeq = seq;
        this.api.fetchMorphBundle(sessionId, alpha, adain ? 'on' : 'off').then((bundle) => this.land(seq, alpha, adain, bundle), (err) => this.fail(seq, alpha, adain, err));
    }
    // Responses are applied in sequence order; anything superseded by a
    // newer request is discarded so panels never show mismatched alphas.
    land(seq, alpha, adain, bundle) {
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
    fail(seq, alpha, adain, err) {
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
    chase(alpha, adain) {
        if ((this.wantAlpha !== alpha || this.wantAdain !== adain) &&
            this.debounceTimer === null &&
            this.inFlightSeq === null) {
            this.launch(this.wantAlpha, this.wantAdain);
        }
    }
}
function describeSessionError(err) {
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
