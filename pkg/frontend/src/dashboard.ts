/** Browser entry point: wires the filter form to the panel renderer. */

import { fetchPatientTree, fetchScores } from "./api.js";
import { drillDownRows, findNode, renderRowsHtml, stagePanel } from "./panel.js";
import type { ScoreNode } from "./types.js";
import { validateRange } from "./validate.js";

const API_BASE = "";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`missing #${id}`);
  return node as T;
}

let currentTree: ScoreNode | null = null;

function showError(message: string): void {
  el<HTMLDivElement>("error").textContent = message;
}

function renderOverview(tree: ScoreNode): void {
  currentTree = tree;
  const windowText = tree.window ? `${tree.window.from} .. ${tree.window.to}` : "";
  el<HTMLDivElement>("summary").textContent =
    `overall ${tree.display_percent === null ? "N/A" : tree.display_percent + "%"} ` +
    `over ${tree.population?.length ?? 0} patients ${windowText}`;
  el<HTMLDivElement>("panel").innerHTML = renderRowsHtml(stagePanel(tree));
}

async function refresh(): Promise<void> {
  const from = el<HTMLInputElement>("from").value;
  const to = el<HTMLInputElement>("to").value;
  // client-side gate: an invalid range never produces a request
  const problem = validateRange(from, to);
  if (problem !== null) {
    showError(problem);
    return;
  }
  showError("");
  try {
    renderOverview(await fetchScores(API_BASE, { from, to }));
  } catch (err) {
    showError(err instanceof Error ? err.message : String(err));
  }
}

async function drill(): Promise<void> {
  const stage = el<HTMLInputElement>("stage").value;
  const patient = el<HTMLInputElement>("patient").value;
  try {
    let tree: ScoreNode | null;
    if (patient !== "") {
      tree = await fetchPatientTree(API_BASE, patient);
    } else {
      tree = currentTree;
    }
    if (tree !== null && stage !== "") {
      tree = findNode(tree, [stage]);
    }
    if (tree === null) {
      showError(`no such node: ${stage}`);
      return;
    }
    showError("");
    el<HTMLDivElement>("panel").innerHTML = renderRowsHtml(drillDownRows(tree));
  } catch (err) {
    showError(err instanceof Error ? err.message : String(err));
  }
}

export function init(): void {
  el<HTMLButtonElement>("refresh").addEventListener("click", () => void refresh());
  el<HTMLButtonElement>("drill").addEventListener("click", () => void drill());
  void refresh();
}

if (typeof document !== "undefined" && document.getElementById("panel") !== null) {
  init();
}
