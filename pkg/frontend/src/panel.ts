/** Pure presentation logic: JSON tree in, rendered rows/markup out.
 *
 * Scores are never recomputed client-side; the panel shows the server's
 * `display_percent` verbatim and renders Undefined values as "N/A".
 */

import type { ScoreNode } from "./types.js";

export function formatScore(node: Pick<ScoreNode, "display_percent">): string {
  return node.display_percent === null ? "N/A" : `${node.display_percent}%`;
}

export interface PanelRow {
  label: string;
  depth: number;
  kind: ScoreNode["kind"];
  display: string;
  reason?: string;
}

/** One row per stage of the group tree (the top-level dashboard panel). */
export function stagePanel(tree: ScoreNode): PanelRow[] {
  return tree.children.map((stage) => ({
    label: stage.label,
    depth: 0,
    kind: stage.kind,
    display: formatScore(stage),
    reason: stage.reason,
  }));
}

/** Depth-first rows for a drill-down view of a subtree. */
export function drillDownRows(node: ScoreNode, depth = 0): PanelRow[] {
  const rows: PanelRow[] = [
    { label: node.label, depth, kind: node.kind, display: formatScore(node), reason: node.reason },
  ];
  for (const child of node.children) {
    rows.push(...drillDownRows(child, depth + 1));
  }
  return rows;
}

/** Find a descendant by label path, e.g. ["follow_up", "pain_once_a_day"]. */
export function findNode(tree: ScoreNode, path: string[]): ScoreNode | null {
  let node: ScoreNode = tree;
  for (const label of path) {
    const next = node.children.find((c) => c.label === label);
    if (next === undefined) return null;
    node = next;
  }
  return node;
}

function escapeHtml(text: string): string {
  return text.replace(/[&<>"]/g, (ch) =>
    ch === "&" ? "&amp;" : ch === "<" ? "&lt;" : ch === ">" ? "&gt;" : "&quot;",
  );
}

export function renderRowsHtml(rows: PanelRow[]): string {
  const body = rows
    .map((row) => {
      const na = row.display === "N/A" ? ' class="na"' : "";
      const reason = row.reason ? ` title="${escapeHtml(row.reason)}"` : "";
      return (
        `<tr${reason}><td style="padding-left:${row.depth}em">` +
        `${escapeHtml(row.label)}</td><td${na}>${row.display}</td></tr>`
      );
    })
    .join("\n");
  return `<table class="scores"><tbody>\n${body}\n</tbody></table>`;
}
