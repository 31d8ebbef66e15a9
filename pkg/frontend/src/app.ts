// DOM bindings: renders the controller state into the page and wires the
// input box, suggestion chips, and the rating widget.

import { AgentApi } from "./api.js";
import { ChatController, ChatViewState } from "./controller.js";

const params = new URLSearchParams(window.location.search);
const baseUrl = params.get("service") ?? "http://127.0.0.1:8000";

const api = new AgentApi(baseUrl);
const controller = new ChatController(api);

const messagesEl = document.getElementById("messages") as HTMLDivElement;
const inputEl = document.getElementById("input") as HTMLInputElement;
const sendEl = document.getElementById("send") as HTMLButtonElement;
const bannerEl = document.getElementById("banner") as HTMLDivElement;
const endEl = document.getElementById("end") as HTMLButtonElement;
const ratingEl = document.getElementById("rating") as HTMLDivElement;

function render(state: ChatViewState): void {
  messagesEl.innerHTML = "";
  state.messages.forEach((message, index) => {
    const bubble = document.createElement("div");
    bubble.className = `msg ${message.speaker}`;
    bubble.textContent = message.text;
    messagesEl.appendChild(bubble);
    if (message.suggestion && message.chipsEnabled) {
      const chips = document.createElement("div");
      chips.className = "chips";
      const yes = document.createElement("button");
      yes.textContent = `Yes, tell me about ${message.suggestion}`;
      yes.onclick = () => void controller.acceptSuggestion();
      const no = document.createElement("button");
      no.textContent = "No thanks";
      no.onclick = () => void controller.refuseSuggestion();
      chips.append(yes, no);
      messagesEl.appendChild(chips);
    }
    void index;
  });
  messagesEl.scrollTop = messagesEl.scrollHeight;

  bannerEl.textContent = state.errorBanner ?? "";
  bannerEl.style.display = state.errorBanner ? "block" : "none";
  if (state.retryText != null) inputEl.value = state.retryText;

  const locked = state.finalized || state.pending || !state.sessionId;
  inputEl.disabled = locked;
  sendEl.disabled = locked;
  endEl.style.display = state.finalized || !state.sessionId ? "none" : "inline-block";

  ratingEl.style.display = state.ratingOpen ? "block" : "none";
  if (state.ratingSubmitted != null) {
    ratingEl.style.display = "block";
    ratingEl.innerHTML = `<p>Thanks! You rated this conversation ${state.ratingSubmitted}/5.</p>`;
  }
}

function buildRatingWidget(): void {
  ratingEl.innerHTML = "";
  const label = document.createElement("p");
  label.textContent = "How was the conversation? (1 = poor, 5 = excellent)";
  ratingEl.appendChild(label);
  const stars = document.createElement("div");
  for (let value = 1; value <= 5; value++) {
    const star = document.createElement("button");
    star.textContent = String(value);
    star.onclick = () => void controller.rate(value);
    stars.appendChild(star);
  }
  ratingEl.appendChild(stars);
  const feedback = document.createElement("textarea");
  feedback.placeholder = "Any feedback? (optional)";
  feedback.oninput = () => controller.setFeedback(feedback.value);
  ratingEl.appendChild(feedback);
}

function sendFromInput(): void {
  const text = inputEl.value;
  inputEl.value = "";
  void controller.send(text);
}

sendEl.onclick = sendFromInput;
inputEl.onkeydown = (event) => {
  if (event.key === "Enter") {
    event.preventDefault();
    sendFromInput();
  }
};
endEl.onclick = () => controller.openRating();

controller.onChange(render);
buildRatingWidget();
void controller.start();
