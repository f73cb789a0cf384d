import { describe, expect, it } from 'vitest'
import {
  DEFAULT_INTERVAL_MS,
  MAX_BACKOFF_MS,
  initialPollState,
  isOffline,
  nextDelay,
  recordFailure,
  recordSuccess,
} from './poller'

describe('poll scheduling', () => {
  it('uses the steady interval while online', () => {
    expect(nextDelay(initialPollState)).toBe(DEFAULT_INTERVAL_MS)
    expect(isOffline(initialPollState)).toBe(false)
  })

  it('doubles the delay per failure up to the cap', () => {
    let state = initialPollState
    const delays: number[] = []
    for (let i = 0; i < 8; i++) {
      state = recordFailure(state)
      delays.push(nextDelay(state))
    }
    expect(delays.slice(0, 4)).toEqual([2000, 4000, 8000, 16000])
    expect(delays.at(-1)).toBe(MAX_BACKOFF_MS)
    expect(isOffline(state)).toBe(true)
  })

  it('a single success resets the backoff', () => {
    let state = initialPollState
    state = recordFailure(recordFailure(state))
    state = recordSuccess(state)
    expect(nextDelay(state)).toBe(DEFAULT_INTERVAL_MS)
    expect(isOffline(state)).toBe(false)
  })
})
