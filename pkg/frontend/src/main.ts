import { ApiClient, ApiError } from "./api.js";
import { apply, initialModel, overridesPayload, type ViewModel } from "./state.js";
import { render, type Handlers } from "./view.js";

const api = new ApiClient("");
let model: ViewModel = initialModel();
const root = document.getElementById("app") as HTMLElement;

function update(next: ViewModel): void {
  model = next;
  render(root, model, handlers);
}

async function guarded(work: () => Promise<ViewModel>): Promise<void> {
  try {
    update(await work());
  } catch (error) {
    if (error instanceof ApiError) {
      update(apply(model, { kind: "api_error", status: error.status, message: error.message }));
    } else {
      update(apply(model, { kind: "api_error", status: 0, message: String(error) }));
    }
  }
}

const handlers: Handlers = {
  onSend(text: string): void {
    if (model.inFlight || !model.sessionId) {
      return;
    }
    const sessionId = model.sessionId;
    update(apply(model, { kind: "user_message", text }));
    void guarded(async () => {
      const turn = await api.sendMessage(sessionId, text, overridesPayload(model));
      return apply(model, { kind: "turn", turn });
    });
  },
  onConfirm(candidateId: string): void {
    if (!model.sessionId || !model.pendingCandidates) {
      return; // picker already cleared
    }
    const sessionId = model.sessionId;
    void guarded(async () => {
      const turn = await api.confirmCandidate(sessionId, candidateId);
      return apply(model, { kind: "turn", turn });
    });
  },
  onStrategyChange(strategy: string): void {
    update(apply(model, { kind: "set_overrides", strategy }));
  },
  onKChange(k: number): void {
    update(apply(model, { kind: "set_overrides", k }));
  },
};

void guarded(async () => {
  const sessionId = await api.createSession();
  return apply(model, { kind: "session", sessionId });
});
