// Controller behavior against a stubbed service: validation short-circuits,
// error surfacing, and form preservation on conflict.

import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { App } from "../src/app.js";
import { click, jsonResponse, mountShell, setInput, svgResponse, text } from "./helpers.js";

const GSN = `* G1
Top claim
@author: owner
@stage: development

** E1.1
Some evidence
@author: developer
`;

const SVG = `<svg xmlns="http://www.w3.org/2000/svg" width="10" height="10">
<g data-element-id="G1"><rect/></g><g data-element-id="E1.1"><rect/></g></svg>`;

interface Call {
  path: string;
  init?: RequestInit;
}

function stubService(overrides: Record<string, (init?: RequestInit) => Response> = {}) {
  const calls: Call[] = [];
  const fetchImpl = async (input: string, init?: RequestInit): Promise<Response> => {
    const path = input.replace(/^https?:\/\/[^/]+/, "");
    calls.push({ path, init });
    for (const [prefix, responder] of Object.entries(overrides)) {
      if (path.startsWith(prefix)) return responder(init);
    }
    if (path === "/api/doc/revisions") {
      return jsonResponse(200, [{ number: 1, author: "owner", message: "m", timestamp: "t", content_hash: "h" }]);
    }
    if (path.startsWith("/api/doc/revisions/")) {
      return jsonResponse(200, { number: 1, author: "owner", message: "m", timestamp: "t", content_hash: "h", gsn: GSN });
    }
    if (path.startsWith("/api/doc/render/")) return svgResponse(SVG);
    if (path.startsWith("/api/doc/metrics/growth")) {
      return jsonResponse(200, [{ revision: 1, goals: 1, strategies: 0, evidences: 1, contexts: 0, rebuttals: 0, total: 2 }]);
    }
    throw new Error(`unstubbed ${path}`);
  };
  return { fetchImpl, calls };
}

async function mountApp(stub = stubService()) {
  mountShell();
  const api = new ApiClient("http://stub", null, stub.fetchImpl);
  const app = new App(document, api);
  await app.load();
  return { app, api, stub };
}

describe("load", () => {
  it("renders slider bounds, status bar and clickable tree", async () => {
    const { app } = await mountApp();
    const slider = document.querySelector("#slider") as HTMLInputElement;
    expect(slider.max).toBe("1");
    expect(text("#statusbar")).toBe("2 elements");
    (document.querySelector('#tree [data-element-id="E1.1"]') as HTMLElement)
      .dispatchEvent(new Event("click"));
    expect(app.state.selected).toBe("E1.1");
    expect(text("#element-author")).toBe("developer");
  });

  it("shows the offline banner when the service is unreachable", async () => {
    mountShell();
    const api = new ApiClient("http://stub", null, async () => {
      throw new TypeError("network down");
    });
    const app = new App(document, api);
    await app.load();
    const banner = document.querySelector("#offline") as HTMLElement;
    expect(banner.hidden).toBe(false);
    expect(banner.textContent).toContain("unreachable");
  });
});

describe("risk form", () => {
  it("stays disabled without a token and for non-targets", async () => {
    const { app } = await mountApp();
    const submit = document.querySelector("#risk-submit") as HTMLButtonElement;
    app.select("E1.1");
    expect(submit.disabled).toBe(true); // no token yet
    setInput("#token", "tok-operator");
    expect(submit.disabled).toBe(false);
    app.select("G1");
    expect(submit.disabled).toBe(false);
    app.select(null);
    expect(submit.disabled).toBe(true);
  });

  it("rejects empty text client-side without any request", async () => {
    const { app, stub } = await mountApp();
    setInput("#token", "tok-operator");
    app.select("E1.1");
    const before = stub.calls.length;
    click("#risk-submit");
    expect(text("#risk-error")).toContain("describe the concern");
    expect(stub.calls.length).toBe(before);
  });

  it("surfaces 409 as a stale notice and preserves the draft", async () => {
    const stub = stubService({
      "/api/doc/rebuttals": () =>
        jsonResponse(409, { error: "stale-base", message: "base revision 1 is stale" }),
    });
    const { app } = await mountApp(stub);
    setInput("#token", "tok-operator");
    app.select("E1.1");
    const textarea = document.querySelector("#risk-text") as HTMLTextAreaElement;
    textarea.value = "still my draft";
    await app.submitRisk();
    expect(text("#risk-error")).toContain("reload and retry");
    expect(textarea.value).toBe("still my draft");
  });

  it("surfaces 401 and 422 messages inline", async () => {
    const stub = stubService({
      "/api/doc/rebuttals": () =>
        jsonResponse(401, { error: "unknown-token", message: "a valid token is required" }),
    });
    const { app } = await mountApp(stub);
    setInput("#token", "tok-wrong");
    app.select("G1");
    (document.querySelector("#risk-text") as HTMLTextAreaElement).value = "concern";
    await app.submitRisk();
    expect(text("#risk-error")).toContain("rejected (401)");
  });
});

describe("checklist", () => {
  it("close stays disabled while items remain and renders the 409 list verbatim", async () => {
    const stub = stubService({
      "/api/doc/reviews/": () =>
        jsonResponse(409, {
          error: "open-conflicts",
          message: "unresolved rebuttals block closing",
          open_rebuttals: ["C9.1", "C9.2"],
        }),
    });
    const { app } = await mountApp(stub);
    setInput("#token", "tok-owner");
    setInput("#review-name", "Some Round");
    await app.openChecklist(); // the stub document has no rebuttals
    const close = document.querySelector("#review-close") as HTMLButtonElement;
    expect(close.disabled).toBe(false);
    await app.closeReview();
    expect(text("#review-error")).toBe("C9.1, C9.2");
  });
});
