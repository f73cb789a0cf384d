import type { PendingQuery, PriorPayload, RunDetail, RunSummary } from './types'

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>

// Submission outcomes the UI distinguishes: accepted clears the card,
// rejected keeps it and shows the ledger diagnostic verbatim, stale means
// the query id is gone (answered elsewhere) and the list should refresh.
export type SubmitOutcome =
  | { kind: 'accepted' }
  | { kind: 'rejected'; diagnostic: string }
  | { kind: 'stale' }
  | { kind: 'invalid'; detail: string }

export class ApiError extends Error {
  constructor(message: string, readonly status?: number) {
    super(message)
  }
}

export class BridgeClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (...args) => fetch(...args),
  ) {}

  private async getJson<T>(path: string): Promise<T> {
    let response: Response
    try {
      response = await this.fetchFn(`${this.baseUrl}${path}`)
    } catch (err) {
      throw new ApiError(`bridge unreachable: ${String(err)}`)
    }
    if (!response.ok) {
      throw new ApiError(`GET ${path} -> ${response.status}`, response.status)
    }
    return (await response.json()) as T
  }

  listPending(): Promise<PendingQuery[]> {
    return this.getJson<PendingQuery[]>('/api/v1/queries?state=pending')
  }

  listRuns(): Promise<RunSummary[]> {
    return this.getJson<RunSummary[]>('/api/v1/runs')
  }

  runDetail(runId: string): Promise<RunDetail> {
    return this.getJson<RunDetail>(`/api/v1/runs/${encodeURIComponent(runId)}`)
  }

  async submitPrior(queryId: string, payload: PriorPayload): Promise<SubmitOutcome> {
    let response: Response
    try {
      response = await this.fetchFn(
        `${this.baseUrl}/api/v1/queries/${encodeURIComponent(queryId)}/response`,
        {
          method: 'POST',
          headers: { 'Content-Type': 'application/json' },
          body: JSON.stringify(payload),
        },
      )
    } catch (err) {
      throw new ApiError(`bridge unreachable: ${String(err)}`)
    }
    if (response.ok) return { kind: 'accepted' }
    const body = await response.json().catch(() => ({}) as Record<string, unknown>)
    const detail = typeof body.detail === 'string' ? body.detail : JSON.stringify(body)
    if (response.status === 409) return { kind: 'rejected', diagnostic: detail }
    if (response.status === 404) return { kind: 'stale' }
    if (response.status === 422) return { kind: 'invalid', detail }
    throw new ApiError(`POST response -> ${response.status}`, response.status)
  }
}
