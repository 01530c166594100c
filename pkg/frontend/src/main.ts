// Browser wiring: connects DOM controls to the morph controller and
// draws server payloads. No audio or spectral math happens here.

import { ApiClient, SpectrogramPayload } from './api.js';
import { HeatmapScale, renderHeatmap, sessionScale } from './heatmap.js';
import { MorphController, PlaybackTarget, UiSessionState, diagnosticsLines, radToDeg, sliderAnnotation } from './state.js';

function byId<T extends HTMLElement>(id: string): T {
    const el = document.getElementById(id);
    if (el === null) {
        throw new Error(`missing element #${id}`);
    }
    return el as T;
}

const fileA = byId<HTMLInputElement>('file-a');
const fileB = byId<HTMLInputElement>('file-b');
const createBtn = byId<HTMLButtonElement>('create-session');
const notice = byId<HTMLDivElement>('notice');
const toast = byId<HTMLDivElement>('toast');
const retryBtn = byId<HTMLButtonElement>('retry');
const slider = byId<HTMLInputElement>('alpha');
const sliderLabel = byId<HTMLDivElement>('alpha-label');
const adainBox = byId<HTMLInputElement>('adain');
const thetaLabel = byId<HTMLSpanElement>('theta0');
const diagPanel = byId<HTMLUListElement>('diagnostics');
const canvas = byId<HTMLCanvasElement>('spectrogram');
const spectroNote = byId<HTMLDivElement>('spectrogram-note');
const playA = byId<HTMLButtonElement>('play-a');
const playB = byId<HTMLButtonElement>('play-b');
const playMorph = byId<HTMLButtonElement>('play-morph');
const stopBtn = byId<HTMLButtonElement>('stop');
const player = byId<HTMLAudioElement>('player');

const api = new ApiClient('');

let morphAudioUrl: string | null = null;
let pendingSwapUrl: string | null = null;
let scale: HeatmapScale | null = null;
let lastSpectrogram: SpectrogramPayload | null = null;

function setControlsEnabled(on: boolean): void {
    for (const el of [slider, adainBox, playA, playB, playMorph, stopBtn]) {
        el.disabled = !on;
    }
}

function renderState(state: UiSessionState): void {
    setControlsEnabled(state.sessionId !== null);
    notice.textContent = state.notice ?? '';
    toast.textContent = state.toast ?? '';
    toast.classList.toggle('hidden', state.toast === null);
    retryBtn.classList.toggle('hidden', state.toast === null);
    sliderLabel.textContent = sliderAnnotation(state.currentAlpha, state.theta0);
    thetaLabel.textContent = state.sessionId === null
        ? ''
        : `θ₀ = ${radToDeg(state.theta0).toFixed(2)}°`;
    diagPanel.replaceChildren(...diagnosticsLines(state.lastDiagnostics).map((line) => {
        const li = document.createElement('li');
        li.textContent = line;
        return li;
    }));
    maybeBuildScale();
}

// The color scale anchors to the session endpoints; build it as soon as
// both endpoint grids have arrived, then redraw whatever is cached.
function maybeBuildScale(): void {
    if (scale === null && controller.endpointSpectrogramA !== null && controller.endpointSpectrogramB !== null) {
        scale = sessionScale(controller.endpointSpectrogramA, controller.endpointSpectrogramB);
        if (lastSpectrogram !== null) {
            drawSpectrogram(lastSpectrogram);
        }
    }
}

function drawSpectrogram(payload: SpectrogramPayload): void {
    lastSpectrogram = payload;
    if (scale === null) {
        return;
    }
    const img = renderHeatmap(payload, scale);
    const ctx = canvas.getContext('2d');
    if (ctx === null) {
        return;
    }
    if (img === null) {
        ctx.clearRect(0, 0, canvas.width, canvas.height);
        spectroNote.textContent = 'spectrogram payload malformed';
        return;
    }
    spectroNote.textContent = '';
    const raw = document.createElement('canvas');
    raw.width = img.width;
    raw.height = img.height;
    raw.getContext('2d')!.putImageData(new ImageData(img.pixels, img.width, img.height), 0, 0);
    ctx.imageSmoothingEnabled = false;
    ctx.clearRect(0, 0, canvas.width, canvas.height);
    ctx.drawImage(raw, 0, 0, canvas.width, canvas.height);
}

// Swap the audible buffer. If the morph is playing, apply at the next
// natural boundary (current position carried over) instead of cutting
// playback mid-frame.
function swapMorphAudio(audio: ArrayBuffer): void {
    const url = URL.createObjectURL(new Blob([audio], { type: 'audio/wav' }));
    if (morphAudioUrl !== null) {
        URL.revokeObjectURL(morphAudioUrl);
    }
    morphAudioUrl = url;
    const playing = controller.state.playback;
    if (playing.status === 'playing' && playing.target === 'morph') {
        pendingSwapUrl = url;
    } else if (playing.target === 'morph') {
        player.src = url;
    }
}

player.addEventListener('ended', () => {
    if (pendingSwapUrl !== null) {
        player.src = pendingSwapUrl;
        pendingSwapUrl = null;
        void player.play();
        return;
    }
    controller.setPlayback('stopped', controller.state.playback.target, 0);
});

player.addEventListener('timeupdate', () => {
    const pb = controller.state.playback;
    if (pb.status === 'playing') {
        controller.setPlayback('playing', pb.target, player.currentTime);
    }
});

const controller = new MorphController(api, {
    onState: renderState,
    onAudio: (_alpha, audio) => swapMorphAudio(audio),
    onSpectrogram: (_alpha, payload) => drawSpectrogram(payload),
});

function playTarget(target: PlaybackTarget): void {
    const sessionId = controller.state.sessionId;
    if (sessionId === null) {
        return;
    }
    // keep the playback position when flipping between A, B and morph
    const keepPosition = controller.state.playback.status === 'playing'
        ? player.currentTime
        : 0;
    let src: string | null;
    if (target === 'a') {
        src = api.morphUrl(sessionId, 0);
    } else if (target === 'b') {
        src = api.morphUrl(sessionId, 1);
    } else {
        src = morphAudioUrl;
    }
    if (src === null) {
        return;
    }
    player.src = src;
    player.currentTime = keepPosition;
    void player.play();
    controller.setPlayback('playing', target, keepPosition);
}

playA.addEventListener('click', () => playTarget('a'));
playB.addEventListener('click', () => playTarget('b'));
playMorph.addEventListener('click', () => playTarget('morph'));
stopBtn.addEventListener('click', () => {
    player.pause();
    player.currentTime = 0;
    controller.setPlayback('stopped', controller.state.playback.target, 0);
});

createBtn.addEventListener('click', () => {
    const a = fileA.files?.[0];
    const b = fileB.files?.[0];
    if (a === undefined || b === undefined) {
        notice.textContent = 'select two WAV files first';
        return;
    }
    createBtn.disabled = true;
    // reset session-scoped rendering state before the new anchors land
    scale = null;
    lastSpectrogram = null;
    pendingSwapUrl = null;
    void controller.createSession(a, b).finally(() => {
        createBtn.disabled = false;
    });
});

slider.addEventListener('input', () => {
    controller.onAlphaChange(Number(slider.value) / 1000);
});

adainBox.addEventListener('change', () => {
    controller.setAdain(adainBox.checked);
});

retryBtn.addEventListener('click', () => controller.retryFetch());

setControlsEnabled(false);
renderState(controller.state);
