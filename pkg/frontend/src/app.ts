// Controller wiring the view state to the DOM shell in index.html.
// The UI holds no authoritative state: everything shown is re-derived from
// API responses (revision text, SVG, growth, per-goal status).

import { ApiClient, ApiError, GrowthPoint } from "./api.js";
import {
  GsnDocument,
  StageName,
  canTargetRebuttal,
  openRebuttalsInPhase,
  parseGsn,
  phaseGoals,
} from "./gsn.js";

export interface ChecklistItem {
  id: string;
  text: string;
  author: string;
}

export interface ViewState {
  head: number;
  revision: number;
  doc: GsnDocument | null;
  growth: GrowthPoint[];
  selected: string | null;
  wording: "risk" | "rebuttal";
  reviewName: string;
  reviewPhase: StageName;
  checklist: ChecklistItem[] | null;
}

const STAGES: StageName[] = ["planning", "development", "operation", "evolution"];

export class App {
  readonly state: ViewState = {
    head: 0,
    revision: 0,
    doc: null,
    growth: [],
    selected: null,
    wording: "risk",
    reviewName: "",
    reviewPhase: "development",
    checklist: null,
  };

  constructor(
    private readonly dom: Document,
    readonly api: ApiClient,
  ) {
    this.bind();
  }

  private $(selector: string): HTMLElement {
    const node = this.dom.querySelector(selector);
    if (!node) throw new Error(`missing element ${selector}`);
    return node as HTMLElement;
  }

  private bind(): void {
    const phaseSelect = this.$("#review-phase") as HTMLSelectElement;
    phaseSelect.innerHTML = STAGES.map((s) => `<option value="${s}">${s}</option>`).join("");
    phaseSelect.value = this.state.reviewPhase;

    (this.$("#token") as HTMLInputElement).addEventListener("change", (event) => {
      this.api.token = (event.target as HTMLInputElement).value.trim() || null;
      this.renderActionAvailability();
    });
    (this.$("#wording") as HTMLInputElement).addEventListener("change", (event) => {
      this.state.wording = (event.target as HTMLInputElement).checked ? "risk" : "rebuttal";
      void this.load(this.state.revision);
    });
    (this.$("#slider") as HTMLInputElement).addEventListener("change", (event) => {
      void this.load(Number((event.target as HTMLInputElement).value));
    });
    this.$("#risk-submit").addEventListener("click", () => void this.submitRisk());
    this.$("#checklist-open").addEventListener("click", () => void this.openChecklist());
    this.$("#review-close").addEventListener("click", () => void this.closeReview());
    (this.$("#review-name") as HTMLInputElement).addEventListener("change", (event) => {
      this.state.reviewName = (event.target as HTMLInputElement).value;
    });
    phaseSelect.addEventListener("change", (event) => {
      this.state.reviewPhase = (event.target as HTMLSelectElement).value as StageName;
    });
  }

  /** Fetch a revision (head when omitted) and redraw everything from it. */
  async load(revision?: number): Promise<void> {
    try {
      const revisions = await this.api.listRevisions();
      this.state.head = revisions.length;
      const target = revision && revision >= 1 && revision <= this.state.head
        ? revision
        : this.state.head;
      const [detail, svg, growth] = await Promise.all([
        this.api.getRevision(target),
        this.api.renderSvg(target, this.state.wording === "risk"),
        this.api.growth(),
      ]);
      this.state.revision = target;
      this.state.doc = parseGsn(detail.gsn);
      this.state.growth = growth;
      this.$("#offline").hidden = true;
      this.renderRevisionBar(detail.author, detail.message);
      this.renderTree(svg);
      this.renderDetails();
      this.renderActionAvailability();
    } catch (error) {
      if (error instanceof ApiError) {
        this.showBanner(`server error ${error.status}: ${error.body.message}`);
      } else {
        this.showBanner("service unreachable — check the connection and reload");
      }
    }
  }

  private showBanner(message: string): void {
    const banner = this.$("#offline");
    banner.textContent = message;
    banner.hidden = false;
  }

  private renderRevisionBar(author: string, message: string): void {
    const slider = this.$("#slider") as HTMLInputElement;
    slider.min = "1";
    slider.max = String(this.state.head);
    slider.value = String(this.state.revision);
    this.$("#revlabel").textContent =
      `#${this.state.revision} of ${this.state.head} — ${author}: ${message}`;
    const count = this.state.doc ? this.state.doc.order.length : 0;
    this.$("#statusbar").textContent = `${count} elements`;
    this.renderSparkline();
  }

  private renderSparkline(): void {
    const width = 160;
    const height = 28;
    const totals = this.state.growth.map((p) => p.total);
    const peak = Math.max(...totals, 1);
    const step = totals.length > 1 ? width / (totals.length - 1) : width;
    const points = totals
      .map((total, i) => `${(i * step).toFixed(1)},${(height - (total / peak) * height).toFixed(1)}`)
      .join(" ");
    this.$("#sparkline").innerHTML =
      `<polyline fill="none" stroke="#36c" stroke-width="1.5" points="${points}"/>`;
  }

  private renderTree(svg: string): void {
    const tree = this.$("#tree");
    tree.innerHTML = svg;
    for (const node of tree.querySelectorAll("[data-element-id]")) {
      node.addEventListener("click", () => {
        this.select((node as SVGElement).getAttribute("data-element-id"));
      });
    }
  }

  select(id: string | null): void {
    this.state.selected = id;
    this.renderDetails();
    this.renderActionAvailability();
  }

  private renderDetails(): void {
    const details = this.$("#details");
    const doc = this.state.doc;
    const element = this.state.selected && doc ? doc.elements.get(this.state.selected) : null;
    if (!element) {
      details.innerHTML = "<p>Select an element in the tree.</p>";
      return;
    }
    const marker = element.isRebuttal
      ? ` <em>*${this.state.wording === "risk" ? "Risk" : "Rebuttal"}* (${element.status})</em>`
      : "";
    const meta = Object.entries(element.metadata)
      .map(([k, v]) => `<li><code>${k}</code>: ${escapeHtml(v)}</li>`)
      .join("");
    details.innerHTML = `
      <h2>${element.id}${marker}</h2>
      <p class="kind">${element.kind}${element.stage ? ` · stage: ${element.stage}` : ""}</p>
      <p>${escapeHtml(element.text)}</p>
      <p class="accountability">recorded by <strong id="element-author">${escapeHtml(element.author)}</strong></p>
      ${meta ? `<ul class="meta">${meta}</ul>` : ""}`;
  }

  private renderActionAvailability(): void {
    const submit = this.$("#risk-submit") as HTMLButtonElement;
    const targetable =
      !!this.api.token &&
      !!this.state.doc &&
      canTargetRebuttal(this.state.doc, this.state.selected);
    submit.disabled = !targetable;
    this.$("#risk-target").textContent = this.state.selected
      ? `on ${this.state.selected}`
      : "select a goal or evidence";
    this.$("#risk-title").textContent =
      this.state.wording === "risk" ? "Raise a risk" : "Raise a rebuttal";
  }

  async submitRisk(): Promise<void> {
    const textarea = this.$("#risk-text") as HTMLTextAreaElement;
    const errorBox = this.$("#risk-error");
    errorBox.textContent = "";
    const text = textarea.value.trim();
    if (!this.state.selected || !this.state.doc) return;
    if (!text) {
      errorBox.textContent = "describe the concern before submitting";
      return;
    }
    try {
      await this.api.submitRebuttal(this.state.selected, text);
      textarea.value = "";
      await this.load(); // the new node appears at the new head
    } catch (error) {
      // form content stays put so nothing typed is lost
      if (error instanceof ApiError && error.status === 409) {
        errorBox.textContent = "someone else changed the case — reload and retry";
      } else if (error instanceof ApiError) {
        errorBox.textContent = `rejected (${error.status}): ${error.body.message}`;
      } else {
        errorBox.textContent = "service unreachable";
      }
    }
  }

  /** Build the agreement checklist for the named round's phase. */
  async openChecklist(): Promise<void> {
    await this.load(); // the checklist must reflect the head
    const doc = this.state.doc;
    if (!doc) return;
    const items = openRebuttalsInPhase(doc, this.state.reviewPhase).map((id) => {
      const element = doc.elements.get(id)!;
      return { id, text: element.text, author: element.author };
    });
    this.state.checklist = items;
    this.renderChecklist();
  }

  private renderChecklist(): void {
    const list = this.$("#checklist");
    const close = this.$("#review-close") as HTMLButtonElement;
    const items = this.state.checklist;
    list.innerHTML = "";
    if (items === null) {
      close.disabled = true;
      return;
    }
    for (const item of items) {
      const li = this.dom.createElement("li");
      li.dataset.rebuttal = item.id;
      li.innerHTML = `
        <span class="item-id">${item.id}</span>
        <span class="item-text">${escapeHtml(item.text)}</span>
        <span class="item-author">(${escapeHtml(item.author)})</span>
        <select class="decision">
          <option value="fixed">fixed</option>
          <option value="withdrawn">withdrawn</option>
          <option value="residual-risk" selected>residual risk</option>
        </select>
        <input class="note" placeholder="agreement note">
        <button class="resolve">Resolve</button>`;
      const button = li.querySelector("button.resolve") as HTMLButtonElement;
      button.disabled = !this.api.token;
      button.addEventListener("click", () => {
        const decision = (li.querySelector("select.decision") as HTMLSelectElement)
          .value as "fixed" | "withdrawn" | "residual-risk";
        const note = (li.querySelector("input.note") as HTMLInputElement).value;
        void this.resolveItem(item.id, decision, note);
      });
      list.appendChild(li);
    }
    close.disabled = items.length > 0 || !this.api.token || !this.state.reviewName;
  }

  async resolveItem(
    id: string,
    decision: "fixed" | "withdrawn" | "residual-risk",
    note: string,
  ): Promise<void> {
    const errorBox = this.$("#review-error");
    errorBox.textContent = "";
    try {
      await this.api.resolveRebuttal(id, decision, note);
      await this.openChecklist(); // recompute from the new head
    } catch (error) {
      errorBox.textContent =
        error instanceof ApiError
          ? `${id}: ${error.body.message}`
          : "service unreachable";
    }
  }

  async closeReview(): Promise<void> {
    const errorBox = this.$("#review-error");
    errorBox.textContent = "";
    try {
      const review = await this.api.closeReview(this.state.reviewName);
      errorBox.textContent = "";
      this.$("#review-outcome").textContent =
        `${review.name} closed at revision ${review.closed_at}`;
      await this.refreshBadges();
    } catch (error) {
      if (error instanceof ApiError && error.body.open_rebuttals) {
        // the open-conflicts list, verbatim
        errorBox.textContent = error.body.open_rebuttals.join(", ");
      } else if (error instanceof ApiError) {
        errorBox.textContent = `${error.status}: ${error.body.message}`;
      } else {
        errorBox.textContent = "service unreachable";
      }
    }
  }

  /** One badge per phase goal, straight from the status endpoint. */
  async refreshBadges(): Promise<void> {
    await this.load();
    const doc = this.state.doc;
    if (!doc) return;
    const badges = this.$("#badges");
    badges.innerHTML = "";
    for (const goalId of phaseGoals(doc, this.state.reviewPhase)) {
      const status = await this.api.goalStatus(goalId);
      const li = this.dom.createElement("li");
      li.dataset.goal = goalId;
      li.className = `badge status-${status.status}`;
      li.textContent = `${goalId}: ${status.status}`;
      badges.appendChild(li);
    }
  }
}

function escapeHtml(value: string): string {
  return value
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
