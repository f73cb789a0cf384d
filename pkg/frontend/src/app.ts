import { ApiError, BridgeClient } from './api'
import {
  DEFAULT_INTERVAL_MS,
  initialPollState,
  isOffline,
  nextDelay,
  recordFailure,
  recordSuccess,
  type PollState,
} from './poller'
import {
  renderEmptyQueue,
  renderOfflineBanner,
  renderQueryCard,
  renderRunDetail,
  renderRunList,
} from './render'
import type { PendingQuery, PriorForm, RunSummary } from './types'
import { validatePriorForm } from './validation'

type Elements = {
  banner: HTMLElement
  queue: HTMLElement
  runs: HTMLElement
  detail: HTMLElement
}

export class ConsoleApp {
  private poll: PollState = initialPollState
  private pending: PendingQuery[] = []
  private runs: RunSummary[] = []
  private selectedRun: string | null = null
  private notices = new Map<string, string>()
  private timer: number | undefined

  constructor(
    private readonly client: BridgeClient,
    private readonly el: Elements,
    private readonly intervalMs: number = DEFAULT_INTERVAL_MS,
  ) {}

  start(): void {
    this.el.queue.addEventListener('submit', (ev) => this.onSubmit(ev))
    this.el.runs.addEventListener('click', (ev) => this.onSelectRun(ev))
    void this.tick()
  }

  private schedule(): void {
    const delay = nextDelay(this.poll, this.intervalMs)
    this.el.banner.innerHTML = isOffline(this.poll) ? renderOfflineBanner(delay) : ''
    window.clearTimeout(this.timer)
    this.timer = window.setTimeout(() => void this.tick(), delay)
  }

  private async tick(): Promise<void> {
    try {
      this.pending = await this.client.listPending()
      this.runs = await this.client.listRuns()
      if (this.selectedRun === null && this.runs.length > 0) {
        this.selectedRun = this.runs[0].run_id
      }
      this.poll = recordSuccess(this.poll)
      this.renderQueue()
      this.renderRuns()
      if (this.selectedRun !== null) {
        this.el.detail.innerHTML = renderRunDetail(
          await this.client.runDetail(this.selectedRun),
        )
      }
    } catch (err) {
      if (!(err instanceof ApiError)) throw err
      this.poll = recordFailure(this.poll)
    }
    this.schedule()
  }

  private renderQueue(): void {
    if (this.pending.length === 0) {
      this.el.queue.innerHTML = renderEmptyQueue()
      return
    }
    // newest-last, as delivered; keep any per-card diagnostic
    this.el.queue.innerHTML = this.pending
      .map((q) => renderQueryCard(q, this.notices.get(q.query_id) ?? ''))
      .join('\n')
  }

  private renderRuns(): void {
    this.el.runs.innerHTML = renderRunList(this.runs, this.selectedRun)
  }

  private onSelectRun(ev: Event): void {
    const row = (ev.target as HTMLElement).closest('tr[data-run-id]')
    if (!(row instanceof HTMLElement)) return
    this.selectedRun = row.dataset.runId ?? null
    this.renderRuns()
    void this.tick()
  }

  private async onSubmit(ev: Event): Promise<void> {
    ev.preventDefault()
    const formEl = ev.target as HTMLFormElement
    const card = formEl.closest('article[data-query-id]') as HTMLElement | null
    if (!card) return
    const queryId = card.dataset.queryId as string
    const read = (name: string): string =>
      (formEl.elements.namedItem(name) as HTMLInputElement | HTMLSelectElement).value
    const form: PriorForm = {
      kernel: read('kernel') as PriorForm['kernel'],
      variance: read('variance'),
      lengthscale: read('lengthscale'),
      mean: read('mean'),
      annotation: read('annotation'),
    }
    const errorsEl = formEl.querySelector('.form-errors') as HTMLElement
    const checked = validatePriorForm(form)
    if (!checked.ok) {
      // invalid forms never reach the network
      errorsEl.textContent = checked.errors.join('; ')
      return
    }
    errorsEl.textContent = ''
    try {
      const outcome = await this.client.submitPrior(queryId, checked.payload)
      switch (outcome.kind) {
        case 'accepted':
          this.notices.delete(queryId)
          break
        case 'rejected':
          // ledger diagnostic shown verbatim; the card stays pending
          this.notices.set(queryId, outcome.diagnostic)
          break
        case 'stale':
          this.notices.delete(queryId)
          break
        case 'invalid':
          this.notices.set(queryId, `bridge rejected the form: ${outcome.detail}`)
          break
      }
    } catch (err) {
      if (!(err instanceof ApiError)) throw err
      this.poll = recordFailure(this.poll)
    }
    void this.tick()
  }
}
