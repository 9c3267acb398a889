import { ConsoleApp } from './app.js';

const root = document.querySelector<HTMLElement>('#app');
if (root) {
  // Same-origin API by default; override for a dev server on another port.
  const base = root.dataset.apiBase ?? '';
  new ConsoleApp(base).mount(root);
}
