import { BridgeClient } from './api'
import { ConsoleApp } from './app'

// Same-origin by default; override with ?api=http://host:port when the
// console is served separately from the bridge.
const base = new URLSearchParams(window.location.search).get('api') ?? ''

const el = {
  banner: document.getElementById('banner') as HTMLElement,
  queue: document.getElementById('queue') as HTMLElement,
  runs: document.getElementById('runs') as HTMLElement,
  detail: document.getElementById('detail') as HTMLElement,
}

new ConsoleApp(new BridgeClient(base), el).start()
