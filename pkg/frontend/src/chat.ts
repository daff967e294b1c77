// Chat transcript: user commands and the service's responses in one column.

export type Role = "user" | "reply" | "help" | "error" | "system";

export class Transcript {
  constructor(readonly el: HTMLElement) {}

  add(role: Role, text: string): HTMLElement {
    const bubble = document.createElement("div");
    bubble.className = `bubble bubble-${role}`;
    bubble.textContent = text;
    this.el.appendChild(bubble);
    this.el.scrollTop = this.el.scrollHeight;
    return bubble;
  }

  /** Grammar help after a rejected command; preformatted. */
  addHelp(helpText: string): HTMLElement {
    const bubble = this.add("help", "");
    const pre = document.createElement("pre");
    pre.textContent = helpText;
    bubble.appendChild(pre);
    return bubble;
  }

  /** Error bubble with a retry affordance; the transcript is preserved. */
  addRetry(text: string, onRetry: () => void): HTMLElement {
    const bubble = this.add("error", text + " ");
    const button = document.createElement("button");
    button.type = "button";
    button.className = "retry";
    button.textContent = "Retry";
    button.addEventListener("click", onRetry, { once: true });
    bubble.appendChild(button);
    return bubble;
  }
}

/**
 * Wire a command form to an async handler with at most one in-flight
 * command; further submissions are ignored until the current one settles.
 */
export function wireCommandBox(
  form: HTMLFormElement,
  input: HTMLInputElement,
  handler: (text: string) => Promise<void>,
): void {
  let busy = false;
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const text = input.value.trim();
    if (!text || busy) return;
    busy = true;
    input.value = "";
    void handler(text).finally(() => {
      busy = false;
    });
  });
}
