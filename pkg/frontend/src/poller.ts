// Polling cadence: a steady interval while the bridge answers, doubling
// backoff (capped) while it is offline so a dead server is not hammered.

export const DEFAULT_INTERVAL_MS = 2000
export const MAX_BACKOFF_MS = 30000

export type PollState = { failures: number }

export const initialPollState: PollState = { failures: 0 }

export function recordSuccess(_state: PollState): PollState {
  return { failures: 0 }
}

export function recordFailure(state: PollState): PollState {
  return { failures: state.failures + 1 }
}

export function isOffline(state: PollState): boolean {
  return state.failures > 0
}

export function nextDelay(state: PollState, baseMs: number = DEFAULT_INTERVAL_MS): number {
  if (state.failures === 0) return baseMs
  return Math.min(baseMs * 2 ** (state.failures - 1), MAX_BACKOFF_MS)
}
