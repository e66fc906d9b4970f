/** Entry point: reads ?session=...&annotator=... and mounts the app. */
import { mount } from './app.js'

function param(name: string): string {
  const value = new URLSearchParams(window.location.search).get(name)
  if (!value) {
    document.body.textContent =
      'missing query parameters: open as /index.html?session=<id>&annotator=<id>'
    throw new Error(`missing ${name}`)
  }
  return value
}

const root = document.getElementById('app')
if (root) {
  mount(root, '', param('session'), param('annotator'))
}
