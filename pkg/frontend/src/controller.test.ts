import { afterEach, describe, expect, it, vi } from "vitest";

import { AgentApi } from "./api.js";
import { ACCEPT_TEXT, REFUSE_TEXT, ChatController } from "./controller.js";

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

function mockService() {
  let turn = 0;
  const turns: Array<{ user_text: string; response_text: string }> = [];
  return vi.fn(async (url: any, init?: RequestInit) => {
    const path = String(url);
    if (path.endsWith("/sessions") && init?.method === "POST") {
      return jsonResponse({ session_id: "s1" });
    }
    if (path.includes("/utterances")) {
      const { text } = JSON.parse(String(init?.body));
      turn += 1;
      const reply = {
        session_id: "s1",
        turn_index: turn,
        text: `reply ${turn} to ${text}`,
        state_top: "SmallTalk",
        state_sub: null,
        component: "smalltalk",
        suggestion: turn === 1 ? "Celebrity" : null,
        latency_ms: 1,
      };
      turns.push({ user_text: text, response_text: reply.text });
      return jsonResponse(reply);
    }
    if (path.includes("/rating")) {
      return jsonResponse({ session_id: "s1", turn_count: turn, rating: 4, feedback: null });
    }
    if (path.includes("/log")) {
      return jsonResponse({
        session_id: "s1",
        turns: turns.map((t, i) => ({
          turn_index: i + 1,
          ...t,
          component: "smalltalk",
          suggestion: null,
        })),
        rating: null,
        feedback: null,
        finalized: false,
      });
    }
    throw new Error(`unexpected request ${path}`);
  });
}

afterEach(() => vi.unstubAllGlobals());

function makeController() {
  const fetchMock = mockService();
  vi.stubGlobal("fetch", fetchMock);
  return { controller: new ChatController(new AgentApi("http://svc")), fetchMock };
}

describe("ChatController", () => {
  it("starts a session and sends messages in order", async () => {
    const { controller } = makeController();
    await controller.start();
    expect(controller.state.sessionId).toBe("s1");
    await controller.send("hello");
    await controller.send("how are you");
    expect(controller.state.messages.map((m) => m.speaker)).toEqual([
      "user", "agent", "user", "agent",
    ]);
    expect(controller.state.messages[1].suggestion).toBe("Celebrity");
    expect(controller.state.pending).toBe(false);
  });

  it("never reorders messages and transcript matches the service log", async () => {
    const { controller } = makeController();
    await controller.start();
    for (const text of ["hello", "tell me a joke", "no thanks"]) {
      await controller.send(text);
    }
    expect(await controller.matchesServiceLog()).toBe(true);
    const texts = controller.state.messages.map((m) => m.text);
    expect(texts[0]).toBe("hello");
    expect(texts[2]).toBe("tell me a joke");
    expect(texts[4]).toBe("no thanks");
  });

  it("suggestion chips send the literal phrases", async () => {
    const { controller, fetchMock } = makeController();
    await controller.start();
    await controller.send("hello");
    await controller.acceptSuggestion();
    await controller.refuseSuggestion();
    const sent = fetchMock.mock.calls
      .filter(([url]) => String(url).includes("/utterances"))
      .map(([, init]) => JSON.parse(String((init as RequestInit).body)).text);
    expect(sent).toEqual(["hello", ACCEPT_TEXT, REFUSE_TEXT]);
    // older chips are disabled once the conversation moves on
    expect(controller.state.messages[1].chipsEnabled).toBe(false);
  });

  it("preserves input and shows a banner on network failure", async () => {
    const { controller } = makeController();
    await controller.start();
    vi.stubGlobal("fetch", vi.fn(async () => {
      throw new TypeError("network down");
    }));
    await controller.send("important words");
    expect(controller.state.errorBanner).toMatch(/retry/i);
    expect(controller.state.retryText).toBe("important words");
    expect(controller.state.messages).toHaveLength(0); // optimistic bubble removed
    expect(controller.state.finalized).toBe(false);
  });

  it("enforces the 1-5 rating range client-side", async () => {
    const { controller, fetchMock } = makeController();
    await controller.start();
    await controller.rate(6);
    await controller.rate(0);
    expect(controller.state.ratingSubmitted).toBeNull();
    const ratingCalls = fetchMock.mock.calls.filter(([url]) =>
      String(url).includes("/rating"),
    );
    expect(ratingCalls).toHaveLength(0);
  });

  it("rating submits once and locks the session", async () => {
    const { controller, fetchMock } = makeController();
    await controller.start();
    await controller.send("hello");
    controller.setFeedback("nice bot");
    await controller.rate(4);
    expect(controller.state.ratingSubmitted).toBe(4);
    expect(controller.state.finalized).toBe(true);
    expect(controller.canSend()).toBe(false);
    await controller.rate(2); // ignored: rating is submittable once
    const ratingCalls = fetchMock.mock.calls.filter(([url]) =>
      String(url).includes("/rating"),
    );
    expect(ratingCalls).toHaveLength(1);
    expect(JSON.parse(String((ratingCalls[0][1] as RequestInit).body))).toEqual({
      rating: 4,
      feedback: "nice bot",
    });
  });

  it("disables input when the service reports the session finalized", async () => {
    const { controller } = makeController();
    await controller.start();
    vi.stubGlobal("fetch", vi.fn(async () => jsonResponse({ detail: "done" }, 409)));
    await controller.send("hello again");
    expect(controller.state.finalized).toBe(true);
    expect(controller.canSend()).toBe(false);
  });
});
