/** Typed client for the annotation service HTTP+JSON API. */

export type Verdict = 'entailment' | 'neutral' | 'contradiction' | 'ungrammatical'
export type Label = Exclude<Verdict, 'ungrammatical'>

export interface Coordination {
  target: 'premise' | 'hypothesis'
  left_chars: [number, number]
  right_chars: [number, number]
  conj_chars: [number, number]
}

export interface PairPayload {
  id: string
  premise: string
  hypothesis: string
  operation?: string
  conj_word?: string
  coordination?: Coordination
  [extra: string]: unknown
}

export interface NextResponse {
  done: boolean
  round: 'one' | 'two' | 'closed'
  index?: number
  progress?: { done: number; total: number } | { pending: number; total: number }
  pair?: PairPayload
  round_one_labels?: Record<string, Verdict>
}

export interface WarmupPair {
  premise: string
  hypothesis: string
  label: Label
  explanation: string
}

export interface AgreementReport {
  kappa: number | null
  p_o: number | null
  counts: { agreed: number; disagreed: number; grammatical: number; [k: string]: unknown }
  disagreed_ids: string[]
}

export class ApiError extends Error {
  constructor(public status: number, public code: string, message: string) {
    super(message)
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const resp = await fetch(url, {
    headers: { 'content-type': 'application/json' },
    ...init,
  })
  const body = await resp.json().catch(() => ({}))
  if (!resp.ok) {
    throw new ApiError(resp.status, body.code ?? 'unknown', body.message ?? resp.statusText)
  }
  return body as T
}

export class AnnotationApi {
  constructor(private base: string, private sessionId: string) {}

  private url(path: string): string {
    return `${this.base}/sessions/${encodeURIComponent(this.sessionId)}${path}`
  }

  next(annotator: string): Promise<NextResponse> {
    return request(this.url(`/next?annotator=${encodeURIComponent(annotator)}`))
  }

  submitLabel(annotator: string, pairId: string, verdict: Verdict): Promise<{ ok: boolean }> {
    return request(this.url('/labels'), {
      method: 'POST',
      body: JSON.stringify({ annotator, pair_id: pairId, verdict }),
    })
  }

  warmup(): Promise<{ pairs: WarmupPair[] }> {
    return request(this.url('/warmup'))
  }

  ackWarmup(annotator: string): Promise<{ ok: boolean }> {
    return request(this.url('/warmup-ack'), {
      method: 'POST',
      body: JSON.stringify({ annotator }),
    })
  }

  report(): Promise<AgreementReport> {
    return request(this.url('/report'))
  }

  resolve(pairId: string, action: 'label' | 'discard', label?: Label): Promise<{ ok: boolean }> {
    return request(this.url('/resolutions'), {
      method: 'POST',
      body: JSON.stringify({ pair_id: pairId, action, label }),
    })
  }
}
