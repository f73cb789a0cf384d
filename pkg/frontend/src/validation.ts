import type { PriorForm, PriorPayload } from './types'

export type ValidationResult =
  | { ok: true; payload: PriorPayload }
  | { ok: false; errors: string[] }

const KERNELS = ['wiener', 'se', 'matern52'] as const

function parseFinite(raw: string): number | null {
  if (raw.trim() === '') return null
  const value = Number(raw)
  return Number.isFinite(value) ? value : null
}

// Client-side validation is a strict subset of what the server accepts:
// anything passing here satisfies the wire schema (variance > 0, positive
// lengthscale only for stationary kernels, finite mean). The consistency
// ledger can still reject a valid form with a 409.
export function validatePriorForm(form: PriorForm): ValidationResult {
  const errors: string[] = []
  if (!(KERNELS as readonly string[]).includes(form.kernel)) {
    errors.push(`unknown kernel preset '${form.kernel}'`)
  }
  const variance = parseFinite(form.variance)
  if (variance === null || variance <= 0) {
    errors.push('variance must be a positive number')
  }
  const lengthscale = parseFinite(form.lengthscale)
  if (form.kernel === 'wiener') {
    if (form.lengthscale.trim() !== '') {
      errors.push('the Wiener kernel takes no lengthscale')
    }
  } else if (lengthscale === null || lengthscale <= 0) {
    errors.push(`the ${form.kernel} kernel needs a positive lengthscale`)
  }
  const mean = form.mean.trim() === '' ? 0 : parseFinite(form.mean)
  if (mean === null) {
    errors.push('mean must be a number (empty means 0)')
  }
  if (errors.length > 0) return { ok: false, errors }
  const payload: PriorPayload = {
    kernel: form.kernel,
    variance: variance as number,
    mean: mean as number,
    annotation: form.annotation.trim(),
  }
  if (form.kernel !== 'wiener') payload.lengthscale = lengthscale as number
  return { ok: true, payload }
}

export function emptyForm(kernel: PriorForm['kernel'] = 'wiener'): PriorForm {
  return { kernel, variance: '1.0', lengthscale: '', mean: '0', annotation: '' }
}
