/** DOM wiring: the only module that touches the document. */

import { ApiClient } from './api.js';
import { RankingRequester, StatusPoller, launchRun } from './controller.js';
import { renderBanner, renderRanking, renderRunStatus, renderTargets, renderWeightLabels } from './render.js';
import { UiState, canSubmit, initialState, runActive, setWeight } from './state.js';

const POLL_MS = 2000;

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
}

function start(): void {
  const api = new ApiClient();
  let state: UiState = initialState();

  const banner = byId<HTMLDivElement>('banner');
  const targetsPane = byId<HTMLDivElement>('targets');
  const rankingPane = byId<HTMLDivElement>('ranking');
  const runPane = byId<HTMLDivElement>('run-status');
  const sliders = [0, 1, 2, 3].map((i) => byId<HTMLInputElement>(`weight-${i}`));
  const sliderLabels = [0, 1, 2, 3].map((i) => byId<HTMLSpanElement>(`weight-label-${i}`));
  const methodSelect = byId<HTMLSelectElement>('method');
  const memSelect = byId<HTMLSelectElement>('mem');
  const rankButton = byId<HTMLButtonElement>('rank-now');
  const launchButton = byId<HTMLButtonElement>('launch');
  const launchMem = byId<HTMLInputElement>('launch-mem');
  const launchCores = byId<HTMLInputElement>('launch-cores');

  function render(): void {
    banner.innerHTML = renderBanner(state.offline);
    targetsPane.innerHTML = renderTargets(state.targetsView, state.offline);
    rankingPane.innerHTML = renderRanking(state);
    runPane.innerHTML = renderRunStatus(state.runView, state.runMessage);
    renderWeightLabels(state.weights).forEach((text, i) => {
      sliderLabels[i].textContent = text;
    });
    rankButton.disabled = !canSubmit(state);
    launchButton.disabled = runActive(state);
  }

  const sink = (next: UiState) => {
    state = next;
    render();
  };

  const requester = new RankingRequester(api);
  const poller = new StatusPoller(api, () => state, sink);

  sliders.forEach((slider, i) => {
    slider.addEventListener('input', () => {
      sink(setWeight(state, i, Number(slider.value)));
    });
    // re-rank on release, not on every drag step
    slider.addEventListener('change', () => {
      void requester.submit(state, sink);
    });
  });

  methodSelect.addEventListener('change', () => {
    state = { ...state, method: methodSelect.value as UiState['method'] };
    void requester.submit(state, sink);
  });
  memSelect.addEventListener('change', () => {
    state = { ...state, memMb: Number(memSelect.value) };
    void requester.submit(state, sink);
  });
  rankButton.addEventListener('click', () => {
    void requester.submit(state, sink);
  });
  launchButton.addEventListener('click', () => {
    void launchRun(api, state, sink, Number(launchMem.value), Number(launchCores.value));
  });

  render();
  void poller.tick();
  setInterval(() => void poller.tick(), POLL_MS);
}

document.addEventListener('DOMContentLoaded', start);
