import { readFileSync } from "node:fs";
import { resolve } from "node:path";

// vitest runs with cwd = frontend/, and jsdom rewrites import.meta.url,
// so resolve static assets relative to the working directory.
const shell = readFileSync(resolve(process.cwd(), "index.html"), "utf-8");

/** Mount the real index.html body (minus the bootstrap script) into jsdom. */
export function mountShell(): void {
  const body = /<body>([\s\S]*)<\/body>/.exec(shell)![1]!;
  document.body.innerHTML = body.replace(/<script[\s\S]*?<\/script>/, "");
}

export function jsonResponse(status: number, data: unknown): Response {
  return new Response(JSON.stringify(data), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

export function svgResponse(svg: string): Response {
  return new Response(svg, { status: 200, headers: { "Content-Type": "image/svg+xml" } });
}

export function setInput(selector: string, value: string): void {
  const input = document.querySelector(selector) as HTMLInputElement;
  input.value = value;
  input.dispatchEvent(new Event("change", { bubbles: true }));
}

export function click(selector: string): void {
  (document.querySelector(selector) as HTMLElement).dispatchEvent(
    new Event("click", { bubbles: true }),
  );
}

export function text(selector: string): string {
  return (document.querySelector(selector) as HTMLElement).textContent ?? "";
}
