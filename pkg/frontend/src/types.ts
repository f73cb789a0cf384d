// Wire types mirrored from the bridge API. Every rendered number comes
// from one of these fields; the console never derives or invents values.

export type KernelName = 'wiener' | 'se' | 'matern52'

export type CellStats = {
  count: number
  min: number | null
  max: number | null
  mean: number | null
}

export type PendingQuery = {
  query_id: string
  run_id: string
  cell: { lo: number; hi: number; size: number }
  prefix: Record<string, number>
  stats: CellStats
  sibling: { lo: number; hi: number } | null
  deadline: string | null
}

export type RunSummary = {
  run_id: string
  status: string
  created_at: string
  best_value: number | null
  expansions: number
  total_evaluations: number
  expert_queries: number
}

export type CellView = {
  lo: number
  hi: number
  size: number
  seq: number
  status: 'active' | 'expanded' | 'exhausted'
  prefix: Record<string, number>
  samples: number[]
  val: number | null
  ub: number | null
}

export type RunDetail = RunSummary & {
  cells: CellView[]
  incumbent: { value: number; point: number; assignment: number[] } | null
  config: Record<string, unknown>
  result?: Record<string, unknown>
}

// form state as typed by the human; strings until validated
export type PriorForm = {
  kernel: KernelName
  variance: string
  lengthscale: string
  mean: string
  annotation: string
}

// what actually goes over the wire after validation
export type PriorPayload = {
  kernel: KernelName
  variance: number
  lengthscale?: number
  mean: number
  annotation: string
}
