// Minimal reader for the canonical .gsn wire payload: enough structure to
// drive the review UI (kinds, authors, stages, rebuttal states, the tree).

export type Kind = "goal" | "strategy" | "evidence" | "context";
export type StageName = "planning" | "development" | "operation" | "evolution";
export type RebuttalState = "open" | "fixed" | "withdrawn" | "residual-risk";

export interface GsnElement {
  id: string;
  kind: Kind;
  depth: number;
  parent: string | null;
  children: string[];
  text: string;
  author: string;
  stage: StageName | null;
  isRebuttal: boolean;
  status: RebuttalState | null;
  metadata: Record<string, string>;
}

export interface GsnDocument {
  rootId: string;
  order: string[]; // pre-order, as serialized
  elements: Map<string, GsnElement>;
}

const KIND_BY_PREFIX: Record<string, Kind> = {
  G: "goal",
  S: "strategy",
  E: "evidence",
  C: "context",
};

const STAGES: StageName[] = ["planning", "development", "operation", "evolution"];
const STATES: RebuttalState[] = ["open", "fixed", "withdrawn", "residual-risk"];

export function parseGsn(text: string): GsnDocument {
  const elements = new Map<string, GsnElement>();
  const order: string[] = [];
  const stack: GsnElement[] = [];
  let current: GsnElement | null = null;

  for (const raw of text.replace(/\r\n?/g, "\n").split("\n")) {
    const line = raw.trimEnd();
    if (!line.trim()) continue;
    if (line.startsWith("*")) {
      const match = /^(\*+)[ \t]*(\S+)[ \t]*$/.exec(line);
      if (!match) throw new Error(`malformed heading: ${line}`);
      const depth = match[1]!.length;
      const id = match[2]!;
      const kind = KIND_BY_PREFIX[id[0] ?? ""];
      if (!kind) throw new Error(`unknown element kind for id ${id}`);
      while (stack.length && stack[stack.length - 1]!.depth >= depth) stack.pop();
      const parent = stack.length ? stack[stack.length - 1]!.id : null;
      current = {
        id, kind, depth, parent, children: [],
        text: "", author: "", stage: null,
        isRebuttal: false, status: null, metadata: {},
      };
      if (parent) elements.get(parent)!.children.push(id);
      elements.set(id, current);
      order.push(id);
      stack.push(current);
      continue;
    }
    if (!current) throw new Error(`content before first heading: ${line}`);
    if (line.startsWith("@")) {
      const match = /^@([A-Za-z][A-Za-z0-9._-]*):[ \t]*(.*)$/.exec(line);
      if (!match) throw new Error(`malformed metadata line: ${line}`);
      const key = match[1]!;
      const value = match[2]!.trim();
      if (key === "author") current.author = value;
      else if (key === "stage" && STAGES.includes(value as StageName)) current.stage = value as StageName;
      else if (key === "rebuttal") current.isRebuttal = value === "true";
      else if (key === "status" && STATES.includes(value as RebuttalState)) current.status = value as RebuttalState;
      else current.metadata[key] = value;
      continue;
    }
    current.text = current.text ? `${current.text} ${line.trim()}` : line.trim();
  }
  if (!order.length) throw new Error("empty document");
  for (const element of elements.values()) {
    if (element.isRebuttal && !element.status) element.status = "open";
  }
  return { rootId: order[0]!, order, elements };
}

export function effectiveStage(doc: GsnDocument, id: string): StageName | null {
  let cursor: string | null = id;
  while (cursor) {
    const element = doc.elements.get(cursor);
    if (!element) return null;
    if (element.stage) return element.stage;
    cursor = element.parent;
  }
  return null;
}

function subtreeIds(doc: GsnDocument, id: string): string[] {
  const out: string[] = [];
  const stack = [id];
  while (stack.length) {
    const cursor = stack.pop()!;
    const element = doc.elements.get(cursor);
    if (!element) continue;
    out.push(cursor);
    for (let i = element.children.length - 1; i >= 0; i--) stack.push(element.children[i]!);
  }
  return out;
}

/** Goals whose effective (inherited) stage equals the phase, in document order. */
export function phaseGoals(doc: GsnDocument, phase: StageName): string[] {
  return doc.order.filter(
    (id) => doc.elements.get(id)!.kind === "goal" && effectiveStage(doc, id) === phase,
  );
}

/** Open rebuttals inside the subtrees of all phase goals, deduplicated. */
export function openRebuttalsInPhase(doc: GsnDocument, phase: StageName): string[] {
  const seen = new Set<string>();
  const out: string[] = [];
  for (const goal of phaseGoals(doc, phase)) {
    for (const id of subtreeIds(doc, goal)) {
      const element = doc.elements.get(id)!;
      if (element.isRebuttal && element.status === "open" && !seen.has(id)) {
        seen.add(id);
        out.push(id);
      }
    }
  }
  return out;
}

/** True when the element may carry a new rebuttal (goal or evidence). */
export function canTargetRebuttal(doc: GsnDocument, id: string | null): boolean {
  if (!id) return false;
  const element = doc.elements.get(id);
  return !!element && (element.kind === "goal" || element.kind === "evidence");
}
