/** Annotator flow: warm-up gate, round-one labeling, round-two resolution.
 *
 * The server is the single source of truth; the client holds no state beyond
 * the verdict currently in flight, which is kept and retried on network
 * failure. Refreshing mid-session therefore resumes at the pending pair.
 */
import { AnnotationApi, ApiError, NextResponse, Verdict, WarmupPair } from './api.js'
import { renderDone, renderError, renderPair, renderWarmup } from './view.js'

type Phase = 'loading' | 'warmup' | 'pair' | 'done' | 'error'

export class AnnotatorApp {
  phase: Phase = 'loading'
  current: NextResponse | null = null
  private warmupPairs: WarmupPair[] = []
  private warmupIndex = 0
  private unsent: { pairId: string; verdict: Verdict; round: 'one' | 'two' } | null = null
  private chain: Promise<void> = Promise.resolve()

  private readonly keyListener: (event: KeyboardEvent) => void

  constructor(
    private api: AnnotationApi,
    private annotator: string,
    private root: HTMLElement,
  ) {
    this.keyListener = (event) => this.handleKeydown(event)
    document.addEventListener('keydown', this.keyListener)
  }

  destroy(): void {
    document.removeEventListener('keydown', this.keyListener)
  }

  /** Serialized task queue so tests (and rapid keys) cannot interleave requests. */
  private enqueue(work: () => Promise<void>): Promise<void> {
    this.chain = this.chain.then(work, work)
    return this.chain
  }

  settle(): Promise<void> {
    return this.chain
  }

  start(): Promise<void> {
    return this.enqueue(() => this.advance())
  }

  private async advance(): Promise<void> {
    try {
      if (this.unsent) {
        const { pairId, verdict, round } = this.unsent
        await this.send(pairId, verdict, round)
        this.unsent = null
      }
      const next = await this.api.next(this.annotator)
      this.current = next
      if (next.done) {
        this.phase = 'done'
        let agreement
        if (next.round !== 'one') {
          const report = await this.api.report().catch(() => null)
          if (report) {
            agreement = { kappa: report.kappa, disagreed: report.counts.disagreed as number }
          }
        }
        renderDone(this.root, next.round, agreement)
        return
      }
      this.phase = 'pair'
      renderPair(this.root, next, { onVerdict: (verdict) => void this.submit(verdict) })
    } catch (err) {
      if (err instanceof ApiError && err.code === 'warmup-incomplete') {
        await this.enterWarmup()
        return
      }
      this.phase = 'error'
      renderError(this.root, String(err), () => void this.start())
    }
  }

  private async enterWarmup(): Promise<void> {
    this.phase = 'warmup'
    const { pairs } = await this.api.warmup()
    this.warmupPairs = pairs
    this.warmupIndex = 0
    this.renderWarmupPage()
  }

  private renderWarmupPage(): void {
    renderWarmup(
      this.root,
      this.warmupPairs[this.warmupIndex],
      this.warmupIndex,
      this.warmupPairs.length,
      () => void this.nextWarmup(),
    )
  }

  nextWarmup(): Promise<void> {
    return this.enqueue(async () => {
      if (this.phase !== 'warmup') return
      this.warmupIndex += 1
      if (this.warmupIndex < this.warmupPairs.length) {
        this.renderWarmupPage()
        return
      }
      await this.api.ackWarmup(this.annotator)  // round one unlocks here
      await this.advance()
    })
  }

  submit(verdict: Verdict): Promise<void> {
    return this.enqueue(async () => {
      if (this.phase !== 'pair' || !this.current?.pair) return
      const round = this.current.round as 'one' | 'two'
      const pairId = this.current.pair.id
      this.unsent = { pairId, verdict, round }
      try {
        await this.send(pairId, verdict, round)
        this.unsent = null
      } catch (err) {
        if (err instanceof ApiError) {
          // server-side rejection (conflict, out-of-round): drop, surface, move on
          this.unsent = null
          renderError(this.root, `${err.code}: ${err.message}`, () => void this.start())
          this.phase = 'error'
          return
        }
        // network failure: keep the verdict and let the user retry
        this.phase = 'error'
        renderError(this.root, `network failure, verdict kept locally (${String(err)})`,
          () => void this.start())
        return
      }
      await this.advance()
    })
  }

  private async send(pairId: string, verdict: Verdict, round: 'one' | 'two'): Promise<void> {
    if (round === 'two') {
      // round two records one agreed resolution per disagreement
      if (verdict === 'ungrammatical') {
        await this.api.resolve(pairId, 'discard')
      } else {
        await this.api.resolve(pairId, 'label', verdict)
      }
      return
    }
    await this.api.submitLabel(this.annotator, pairId, verdict)
  }

  private handleKeydown(event: KeyboardEvent): void {
    const target = event.target as HTMLElement | null
    if (target && (target.tagName === 'INPUT' || target.tagName === 'TEXTAREA')) return
    const verdict = KEYMAP[event.key.toLowerCase()]
    if (this.phase === 'pair' && verdict) {
      event.preventDefault()
      void this.submit(verdict)
    } else if (this.phase === 'warmup' && (event.key === ' ' || event.key === 'Enter')) {
      event.preventDefault()
      void this.nextWarmup()
    }
  }
}

const KEYMAP: Record<string, Verdict> = {
  e: 'entailment',
  n: 'neutral',
  c: 'contradiction',
  u: 'ungrammatical',
}

export function mount(root: HTMLElement, base: string, sessionId: string,
                      annotator: string): AnnotatorApp {
  const app = new AnnotatorApp(new AnnotationApi(base, sessionId), annotator, root)
  void app.start()
  return app
}
