/** DOM rendering for the annotator screens.
 *
 * Conjunct highlighting slices the sentence by the char spans delivered in
 * the pair's coordination metadata; nothing is re-derived from the text.
 */
import type { Coordination, NextResponse, PairPayload, Verdict, WarmupPair } from './api.js'

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K, className?: string, text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag)
  if (className) node.className = className
  if (text !== undefined) node.textContent = text
  return node
}

export function highlightSentence(text: string, coord: Coordination | undefined,
                                  which: 'premise' | 'hypothesis'): HTMLElement {
  const holder = el('span', 'sentence')
  if (!coord || coord.target !== which) {
    holder.textContent = text
    return holder
  }
  const spans: Array<[number, number, string]> = [
    [coord.left_chars[0], coord.left_chars[1], 'conjunct conjunct-left'],
    [coord.conj_chars[0], coord.conj_chars[1], 'conjunction-word'],
    [coord.right_chars[0], coord.right_chars[1], 'conjunct conjunct-right'],
  ]
  let cursor = 0
  for (const [start, end, cls] of spans) {
    if (start > cursor) holder.appendChild(document.createTextNode(text.slice(cursor, start)))
    const mark = el('mark', cls, text.slice(start, end))
    mark.dataset.chars = `${start}:${end}`
    holder.appendChild(mark)
    cursor = end
  }
  if (cursor < text.length) holder.appendChild(document.createTextNode(text.slice(cursor)))
  return holder
}

const ROUND_ONE_KEYS = '[e] entailment   [n] neutral   [c] contradiction   [u] ungrammatical'
const ROUND_TWO_KEYS = '[e] entailment   [n] neutral   [c] contradiction   [u] discard pair'

export interface PairViewHandlers {
  onVerdict: (verdict: Verdict) => void
}

export function renderPair(root: HTMLElement, next: NextResponse,
                           handlers: PairViewHandlers): void {
  const pair = next.pair as PairPayload
  root.replaceChildren()
  const card = el('div', 'pair-card')
  card.dataset.pairId = pair.id

  const header = el('div', 'pair-header')
  header.appendChild(el('span', 'round-indicator', `round ${next.round}`))
  if (pair.operation) header.appendChild(el('span', 'operation-badge', pair.operation))
  if (next.progress && 'done' in next.progress) {
    header.appendChild(el('span', 'progress',
      `${next.progress.done + 1} / ${next.progress.total}`))
  } else if (next.progress) {
    header.appendChild(el('span', 'progress',
      `${next.progress.pending} disagreement(s) left`))
  }
  card.appendChild(header)

  const premiseRow = el('div', 'premise-row')
  premiseRow.appendChild(el('b', undefined, 'premise: '))
  premiseRow.appendChild(highlightSentence(pair.premise, pair.coordination, 'premise'))
  card.appendChild(premiseRow)

  const hypothesisRow = el('div', 'hypothesis-row')
  hypothesisRow.appendChild(el('b', undefined, 'hypothesis: '))
  hypothesisRow.appendChild(highlightSentence(pair.hypothesis, pair.coordination, 'hypothesis'))
  card.appendChild(hypothesisRow)

  if (next.round === 'two' && next.round_one_labels) {
    const prior = el('div', 'round-one-labels')
    prior.appendChild(el('b', undefined, 'round-one labels: '))
    for (const [annotator, verdict] of Object.entries(next.round_one_labels)) {
      prior.appendChild(el('span', 'prior-label', `${annotator}: ${verdict}  `))
    }
    card.appendChild(prior)
  }

  const buttons = el('div', 'verdict-buttons')
  const verdicts: Verdict[] = ['entailment', 'neutral', 'contradiction', 'ungrammatical']
  for (const verdict of verdicts) {
    const label = next.round === 'two' && verdict === 'ungrammatical' ? 'discard' : verdict
    const button = el('button', `verdict-${verdict}`, label)
    button.dataset.verdict = verdict
    button.addEventListener('click', () => handlers.onVerdict(verdict))
    buttons.appendChild(button)
  }
  card.appendChild(buttons)
  card.appendChild(el('div', 'keyboard-hint',
    next.round === 'two' ? ROUND_TWO_KEYS : ROUND_ONE_KEYS))
  root.appendChild(card)
}

export function renderWarmup(root: HTMLElement, pair: WarmupPair, index: number,
                             total: number, onNext: () => void): void {
  root.replaceChildren()
  const card = el('div', 'warmup-card')
  card.appendChild(el('div', 'round-indicator', `warm-up ${index + 1} / ${total}`))
  const premise = el('div', 'premise-row')
  premise.appendChild(el('b', undefined, 'premise: '))
  premise.appendChild(el('span', 'sentence', pair.premise))
  card.appendChild(premise)
  const hypothesis = el('div', 'hypothesis-row')
  hypothesis.appendChild(el('b', undefined, 'hypothesis: '))
  hypothesis.appendChild(el('span', 'sentence', pair.hypothesis))
  card.appendChild(hypothesis)
  card.appendChild(el('div', 'gold-label', `gold label: ${pair.label}`))
  card.appendChild(el('div', 'explanation', pair.explanation))
  const button = el('button', 'warmup-next', index + 1 < total ? 'next example' : 'start round one')
  button.addEventListener('click', onNext)
  card.appendChild(button)
  root.appendChild(card)
}

export function renderDone(root: HTMLElement, round: string,
                           agreement?: { kappa: number | null; disagreed: number }): void {
  root.replaceChildren()
  const card = el('div', 'done-card')
  card.appendChild(el('div', 'round-indicator', `round ${round}`))
  card.appendChild(el('div', 'done-message', 'nothing pending for you right now'))
  if (agreement) {
    const kappa = agreement.kappa === null ? 'n/a' : agreement.kappa.toFixed(3)
    card.appendChild(el('div', 'agreement-stats',
      `round-one agreement kappa ${kappa}, ${agreement.disagreed} disagreement(s)`))
  }
  root.appendChild(card)
}

export function renderError(root: HTMLElement, message: string, onRetry: () => void): void {
  root.replaceChildren()
  const card = el('div', 'error-card')
  card.appendChild(el('div', 'error-message', message))
  const button = el('button', 'retry-button', 'retry')
  button.addEventListener('click', onRetry)
  card.appendChild(button)
  root.appendChild(card)
}
