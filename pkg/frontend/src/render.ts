// HTML builders, kept free of DOM access so they are testable anywhere.
// Every number interpolated here is read straight off a wire payload.

import type { CellView, PendingQuery, RunDetail, RunSummary } from './types'

export function escapeHtml(raw: string): string {
  return raw
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;')
    .replace(/'/g, '&#39;')
}

const fmt = (x: number | null | undefined, digits = 3): string =>
  x === null || x === undefined ? '–' : Number(x).toFixed(digits)

function prefixText(prefix: Record<string, number>): string {
  const parts = Object.entries(prefix).map(([name, bit]) => `${name}=${bit}`)
  return parts.length ? parts.join(', ') : '(root)'
}

export function renderOfflineBanner(retryInMs: number): string {
  return `<div class="banner offline">bridge unreachable; retrying in ${Math.round(retryInMs / 1000)}s</div>`
}

export function renderEmptyQueue(): string {
  return '<p class="empty">No pending prior queries. The search is either computing or finished.</p>'
}

export function renderQueryCard(q: PendingQuery, notice = ''): string {
  const s = q.stats
  const stats =
    s.count === 0
      ? 'no evaluations in this cell yet'
      : `${s.count} evaluations: min ${fmt(s.min)}, max ${fmt(s.max)}, mean ${fmt(s.mean)}`
  const sibling = q.sibling ? `sibling cell [${q.sibling.lo}, ${q.sibling.hi}]` : 'no sibling'
  const noticeHtml = notice ? `<p class="notice">${escapeHtml(notice)}</p>` : ''
  return `
<article class="card" data-query-id="${escapeHtml(q.query_id)}">
  <header>
    <strong>${escapeHtml(q.query_id)}</strong>
    <span class="run">run ${escapeHtml(q.run_id)}</span>
  </header>
  <p>cell [${q.cell.lo}, ${q.cell.hi}] · ${q.cell.size} points · prefix ${escapeHtml(prefixText(q.prefix))}</p>
  <p class="stats">${escapeHtml(stats)} · ${escapeHtml(sibling)}</p>
  ${noticeHtml}
  <form class="prior-form">
    <label>kernel
      <select name="kernel">
        <option value="wiener">Wiener</option>
        <option value="se">squared exponential</option>
        <option value="matern52">Matérn 5/2</option>
      </select>
    </label>
    <label>variance <input name="variance" value="1.0" inputmode="decimal"></label>
    <label>lengthscale <input name="lengthscale" placeholder="stationary only" inputmode="decimal"></label>
    <label>mean <input name="mean" value="0" inputmode="decimal"></label>
    <label>annotation <input name="annotation" placeholder="optional note"></label>
    <button type="submit">submit prior</button>
    <span class="form-errors"></span>
  </form>
</article>`
}

export function renderRunList(runs: RunSummary[], selected: string | null): string {
  if (runs.length === 0) return '<p class="empty">No runs yet.</p>'
  const rows = runs
    .map((r) => {
      const cls = r.run_id === selected ? 'selected' : ''
      return `<tr class="${cls}" data-run-id="${escapeHtml(r.run_id)}">
        <td>${escapeHtml(r.run_id)}</td><td>${escapeHtml(r.status)}</td>
        <td>${fmt(r.best_value)}</td><td>${r.expansions}</td>
        <td>${r.total_evaluations}</td><td>${r.expert_queries}</td></tr>`
    })
    .join('')
  return `<table class="runs"><thead>
    <tr><th>run</th><th>status</th><th>best</th><th>expansions</th><th>evaluations</th><th>queries</th></tr>
  </thead><tbody>${rows}</tbody></table>`
}

function cellRow(c: CellView): string {
  return `<tr class="cell-${c.status}">
    <td>[${c.lo}, ${c.hi}]</td><td>${c.size}</td><td>${escapeHtml(c.status)}</td>
    <td>${fmt(c.val)}</td><td>${fmt(c.ub)}</td>
    <td>${escapeHtml(prefixText(c.prefix))}</td></tr>`
}

export function renderRunDetail(detail: RunDetail): string {
  const inc = detail.incumbent
  const incumbent = inc
    ? `best ${fmt(inc.value)} at point ${inc.point} (assignment ${inc.assignment.join('')})`
    : 'no incumbent yet'
  const cells = detail.cells.map(cellRow).join('')
  return `
<section class="run-detail">
  <h3>${escapeHtml(detail.run_id)} · ${escapeHtml(detail.status)}</h3>
  <p>${escapeHtml(incumbent)} · ${detail.total_evaluations} evaluations · ${detail.expert_queries} expert queries</p>
  <table class="cells"><thead>
    <tr><th>bounds</th><th>size</th><th>status</th><th>val</th><th>ub</th><th>prefix</th></tr>
  </thead><tbody>${cells}</tbody></table>
</section>`
}
