import { describe, expect, it } from 'vitest'
import { emptyForm, validatePriorForm } from './validation'
import type { PriorForm } from './types'

const form = (overrides: Partial<PriorForm>): PriorForm => ({
  ...emptyForm(),
  ...overrides,
})

describe('validatePriorForm', () => {
  it('accepts a plain Wiener prior', () => {
    const res = validatePriorForm(form({ variance: '2.5', mean: '0.5' }))
    expect(res).toEqual({
      ok: true,
      payload: { kernel: 'wiener', variance: 2.5, mean: 0.5, annotation: '' },
    })
  })

  it('rejects non-positive variance', () => {
    for (const variance of ['0', '-1', 'abc', '']) {
      const res = validatePriorForm(form({ variance }))
      expect(res.ok).toBe(false)
      if (!res.ok) expect(res.errors.join(' ')).toMatch(/variance/)
    }
  })

  it('requires a lengthscale for stationary kernels', () => {
    const missing = validatePriorForm(form({ kernel: 'se' }))
    expect(missing.ok).toBe(false)
    const good = validatePriorForm(form({ kernel: 'matern52', lengthscale: '8' }))
    expect(good.ok).toBe(true)
    if (good.ok) expect(good.payload.lengthscale).toBe(8)
  })

  it('forbids a lengthscale on the Wiener preset', () => {
    const res = validatePriorForm(form({ lengthscale: '3' }))
    expect(res.ok).toBe(false)
    if (!res.ok) expect(res.errors.join(' ')).toMatch(/Wiener/)
  })

  it('defaults an empty mean to zero and rejects junk', () => {
    const empty = validatePriorForm(form({ mean: '' }))
    expect(empty.ok && empty.payload.mean === 0).toBe(true)
    expect(validatePriorForm(form({ mean: 'x' })).ok).toBe(false)
  })

  it('every accepted payload satisfies the server schema subset', () => {
    // fuzz a grid of forms; whatever passes must have variance > 0,
    // a positive lengthscale only for stationary kernels, finite mean
    const kernels = ['wiener', 'se', 'matern52'] as const
    const values = ['', '0', '-2', '1e-3', '1', '7.5', 'NaN', 'oops']
    for (const kernel of kernels) {
      for (const variance of values) {
        for (const lengthscale of values) {
          const res = validatePriorForm(form({ kernel, variance, lengthscale }))
          if (!res.ok) continue
          expect(res.payload.variance).toBeGreaterThan(0)
          expect(Number.isFinite(res.payload.mean)).toBe(true)
          if (kernel === 'wiener') {
            expect(res.payload.lengthscale).toBeUndefined()
          } else {
            expect(res.payload.lengthscale).toBeGreaterThan(0)
          }
        }
      }
    }
  })
})
