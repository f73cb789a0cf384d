import { describe, expect, it } from 'vitest'
import { ApiError, BridgeClient } from './api'
import type { FetchLike, SubmitOutcome } from './api'

const jsonResponse = (status: number, body: unknown): Response =>
  new Response(JSON.stringify(body), {
    status,
    headers: { 'Content-Type': 'application/json' },
  })

const PAYLOAD = { kernel: 'wiener' as const, variance: 1, mean: 0, annotation: '' }

describe('BridgeClient', () => {
  it('lists pending queries from the wire', async () => {
    const queries = [
      {
        query_id: 'r:q0',
        run_id: 'r',
        cell: { lo: 1, hi: 8, size: 8 },
        prefix: {},
        stats: { count: 0, min: null, max: null, mean: null },
        sibling: null,
        deadline: null,
      },
    ]
    const calls: string[] = []
    const fetchFn: FetchLike = async (url) => {
      calls.push(url as string)
      return jsonResponse(200, queries)
    }
    const client = new BridgeClient('http://x', fetchFn)
    expect(await client.listPending()).toEqual(queries)
    expect(calls).toEqual(['http://x/api/v1/queries?state=pending'])
  })

  it('maps 200 to accepted', async () => {
    const client = new BridgeClient('', async () => jsonResponse(200, { status: 'ok' }))
    expect(await client.submitPrior('q', PAYLOAD)).toEqual({ kind: 'accepted' })
  })

  it('surfaces the 409 ledger diagnostic verbatim', async () => {
    const diagnostic = 'region [1, 8] vs [1, 16]: variance 5 contradicts earlier 1'
    const client = new BridgeClient('', async () => jsonResponse(409, { detail: diagnostic }))
    const outcome = (await client.submitPrior('q', PAYLOAD)) as Extract<
      SubmitOutcome,
      { kind: 'rejected' }
    >
    expect(outcome.kind).toBe('rejected')
    expect(outcome.diagnostic).toBe(diagnostic)
  })

  it('maps 404 to stale and 422 to invalid', async () => {
    const gone = new BridgeClient('', async () => jsonResponse(404, { detail: 'unknown' }))
    expect(await gone.submitPrior('q', PAYLOAD)).toEqual({ kind: 'stale' })
    const bad = new BridgeClient('', async () => jsonResponse(422, { detail: 'nope' }))
    expect(await bad.submitPrior('q', PAYLOAD)).toEqual({ kind: 'invalid', detail: 'nope' })
  })

  it('wraps network failures in ApiError', async () => {
    const client = new BridgeClient('', async () => {
      throw new Error('ECONNREFUSED')
    })
    await expect(client.listPending()).rejects.toBeInstanceOf(ApiError)
    await expect(client.submitPrior('q', PAYLOAD)).rejects.toBeInstanceOf(ApiError)
  })

  it('sends the payload as JSON to the right endpoint', async () => {
    let seen: { url: string; body: string } | null = null
    const client = new BridgeClient('http://x', async (url, init) => {
      seen = { url: url as string, body: String(init?.body) }
      return jsonResponse(200, { status: 'ok' })
    })
    await client.submitPrior('r:q1', { ...PAYLOAD, annotation: 'note' })
    expect(seen!.url).toBe('http://x/api/v1/queries/r%3Aq1/response')
    expect(JSON.parse(seen!.body)).toEqual({ ...PAYLOAD, annotation: 'note' })
  })
})
