/**
 * Editor UI wiring: textarea editor with a completion dropdown, the current
 * pattern panel, the pattern tables with voting / add / import / export,
 * and inspection highlighting rendered in an underlay behind the text.
 */

import { SessionClient, ApiError } from "./api.js";
import type { CompletionsResponse, TargetKind, WireCondition } from "./api.js";
import {
  applyCompletion,
  decorationsFor,
  dropdownRows,
  highlightedHtml,
  patternTables,
  positionAt,
  RequestGate,
  validateAddForm,
} from "./viewmodel.js";

const STARTER_DOC = `<html>
<head>
<meta content="Graphics Design Co">
</head>
<body>
<section class="content">
<div class="intro"><p>Welcome</p></div>
</section>
<figure>
<img src="a.png">
<figcaption>Chart</figcaption>
</figure>
</body>
</html>
`;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

/** Characters the user is mid-way through typing for the current token. */
function typedPrefixLength(text: string, cursor: number): number {
  let n = 0;
  while (n < cursor && /[\w.-]/.test(text[cursor - n - 1])) n += 1;
  return n;
}

class EditorApp {
  private client = new SessionClient();
  private sessionId = "";
  private gate = new RequestGate();
  private abort: AbortController | null = null;
  private currentPatternId: string | null = null;
  private selectedKind: TargetKind = "tag";

  private editor = el<HTMLTextAreaElement>("editor");
  private underlay = el<HTMLPreElement>("underlay");
  private dropdown = el<HTMLUListElement>("dropdown");
  private currentPanel = el<HTMLDivElement>("current-pattern");
  private status = el<HTMLDivElement>("status");

  async start(): Promise<void> {
    this.editor.value = STARTER_DOC;
    const opened = await this.client.openSession(this.editor.value);
    this.sessionId = opened.session_id;

    this.editor.addEventListener("input", () => void this.onEdit());
    this.editor.addEventListener("keyup", (event) => {
      if (!["ArrowUp", "ArrowDown", "Escape"].includes(event.key)) {
        void this.requestCompletions();
      }
    });
    this.editor.addEventListener("scroll", () => this.syncScroll());
    this.editor.addEventListener("blur", () => {
      // let a dropdown click land before hiding it
      setTimeout(() => this.hideDropdown(), 150);
    });

    el<HTMLSelectElement>("kind-select").addEventListener("change", (event) => {
      this.selectedKind = (event.target as HTMLSelectElement).value as TargetKind;
      void this.refreshPatterns();
    });
    el<HTMLButtonElement>("add-pattern").addEventListener("click", () => this.openAddDialog());
    el<HTMLButtonElement>("add-submit").addEventListener("click", () => void this.submitAdd());
    el<HTMLButtonElement>("add-cancel").addEventListener("click", () => this.closeAddDialog());
    el<HTMLButtonElement>("add-condition").addEventListener("click", () => this.addConditionRow());
    el<HTMLButtonElement>("export-btn").addEventListener("click", () => void this.exportPatterns());
    el<HTMLInputElement>("import-file").addEventListener("change", (event) => {
      void this.importPatterns(event.target as HTMLInputElement);
    });

    await this.refreshPatterns();
    this.renderUnderlay([]);
  }

  private async onEdit(): Promise<void> {
    this.renderUnderlay([]); // spans are stale the moment the text changes
    try {
      await this.client.replaceText(this.sessionId, this.editor.value);
    } catch (error) {
      this.report(error);
    }
  }

  private async requestCompletions(): Promise<void> {
    const cursor = this.editor.selectionStart;
    const { line, col } = positionAt(this.editor.value, cursor);
    const ticket = this.gate.next();
    this.abort?.abort();
    this.abort = new AbortController();
    let response: CompletionsResponse;
    try {
      response = await this.client.completions(this.sessionId, line, col, this.abort.signal);
    } catch (error) {
      if ((error as DOMException).name !== "AbortError") this.report(error);
      return;
    }
    if (!this.gate.isCurrent(ticket)) return; // superseded while in flight
    this.renderDropdown(response, cursor);
    this.renderCurrentPattern(response);
  }

  private renderDropdown(response: CompletionsResponse, cursor: number): void {
    const rows = dropdownRows(response);
    this.dropdown.replaceChildren();
    if (rows.length === 0) {
      this.hideDropdown();
      return;
    }
    const prefixLen = typedPrefixLength(this.editor.value, cursor);
    for (const row of rows) {
      const item = document.createElement("li");
      item.className = row.prioritized ? "item prioritized" : "item";
      item.textContent = `${row.prioritized ? "★ " : ""}${row.label}`;
      const pct = document.createElement("span");
      pct.className = "pct";
      pct.textContent = row.confidencePct;
      item.append(pct);
      item.addEventListener("mousedown", (event) => {
        event.preventDefault();
        const applied = applyCompletion(this.editor.value, cursor, prefixLen, row.label);
        this.editor.value = applied.text;
        this.editor.setSelectionRange(applied.cursor, applied.cursor);
        this.hideDropdown();
        void this.onEdit();
      });
      this.dropdown.append(item);
    }
    this.dropdown.hidden = false;
  }

  private hideDropdown(): void {
    this.dropdown.hidden = true;
  }

  private renderCurrentPattern(response: CompletionsResponse): void {
    const pattern = response.current_pattern;
    this.currentPatternId = pattern ? pattern.id : null;
    this.currentPanel.textContent = pattern
      ? pattern.description
      : "No pattern applies at the cursor.";
  }

  private async refreshPatterns(): Promise<void> {
    try {
      const listing = await this.client.patterns(this.sessionId, this.selectedKind);
      const tables = patternTables(listing, this.currentPatternId);
      this.renderTable("prioritized-table", tables.prioritized);
      this.renderTable("standard-table", tables.standard);
      this.renderTable("blacklisted-table", tables.blacklisted);
    } catch (error) {
      this.report(error);
    }
  }

  private renderTable(
    id: string,
    rows: ReturnType<typeof patternTables>["standard"],
  ): void {
    const body = el<HTMLTableSectionElement>(id);
    body.replaceChildren();
    for (const row of rows) {
      const tr = document.createElement("tr");
      if (row.deEmphasized) tr.className = "alternative";
      if (row.isCurrent) tr.classList.add("current");

      const rule = document.createElement("td");
      rule.textContent = row.description;
      const conf = document.createElement("td");
      conf.textContent = row.confidencePct;
      const actions = document.createElement("td");
      for (const [label, direction] of [["▲", "up"], ["▼", "down"]] as const) {
        const button = document.createElement("button");
        button.textContent = label;
        button.addEventListener("click", () => void this.vote(row.patternId, direction));
        actions.append(button);
      }
      const inspect = document.createElement("button");
      inspect.textContent = "\u{1f50d}";
      inspect.title = "Inspect in document";
      inspect.addEventListener("click", () => void this.inspect(row.patternId));
      actions.append(inspect);

      tr.append(rule, conf, actions);
      body.append(tr);
    }
  }

  private async vote(patternId: string, direction: "up" | "down"): Promise<void> {
    try {
      await this.client.vote(this.sessionId, patternId, direction);
      await this.refreshPatterns();
      await this.requestCompletions();
    } catch (error) {
      this.report(error);
    }
  }

  private async inspect(patternId: string): Promise<void> {
    try {
      const result = await this.client.inspect(this.sessionId, patternId);
      this.renderUnderlay(decorationsFor(this.editor.value, result.sites));
    } catch (error) {
      this.report(error);
    }
  }

  private renderUnderlay(decorations: ReturnType<typeof decorationsFor>): void {
    this.underlay.innerHTML = highlightedHtml(this.editor.value, decorations);
    this.syncScroll();
  }

  private syncScroll(): void {
    this.underlay.scrollTop = this.editor.scrollTop;
    this.underlay.scrollLeft = this.editor.scrollLeft;
  }

  // -- add dialog

  private openAddDialog(): void {
    el<HTMLDivElement>("add-dialog").hidden = false;
    el<HTMLDivElement>("add-error").textContent = "";
    el<HTMLTableSectionElement>("condition-rows").replaceChildren();
    this.addConditionRow();
  }

  private closeAddDialog(): void {
    el<HTMLDivElement>("add-dialog").hidden = true;
  }

  private addConditionRow(): void {
    const tr = document.createElement("tr");
    tr.innerHTML = `
      <td><select class="cond-key">
        <option value="parent_tag">parent tag</option>
        <option value="parent_attr">parent attribute</option>
        <option value="current_tag">current tag</option>
        <option value="preceding_attribute">preceding attribute</option>
      </select></td>
      <td><input class="cond-attr" placeholder="attr name"></td>
      <td><input class="cond-value" placeholder="value"></td>`;
    el<HTMLTableSectionElement>("condition-rows").append(tr);
  }

  private collectAddForm() {
    const conditions: WireCondition[] = [];
    for (const tr of el<HTMLTableSectionElement>("condition-rows").rows) {
      const key = (tr.querySelector(".cond-key") as HTMLSelectElement).value as WireCondition["key"];
      const attrName = (tr.querySelector(".cond-attr") as HTMLInputElement).value;
      const value = (tr.querySelector(".cond-value") as HTMLInputElement).value;
      if (!value && !attrName) continue; // blank row
      conditions.push({ key, attr_name: attrName || null, value });
    }
    return {
      kind: el<HTMLSelectElement>("add-kind").value,
      conditions,
      target: el<HTMLInputElement>("add-target").value,
    };
  }

  private async submitAdd(): Promise<void> {
    const form = this.collectAddForm();
    const error = validateAddForm(form);
    if (error) {
      el<HTMLDivElement>("add-error").textContent = error;
      return;
    }
    try {
      await this.client.addPattern(
        this.sessionId,
        form.kind as TargetKind,
        form.conditions,
        form.target,
      );
      this.closeAddDialog();
      await this.refreshPatterns();
    } catch (err) {
      el<HTMLDivElement>("add-error").textContent =
        err instanceof ApiError ? err.message : String(err);
    }
  }

  // -- export / import

  private async exportPatterns(): Promise<void> {
    const payload = await this.client.exportPatterns(this.sessionId);
    const blob = new Blob([JSON.stringify(payload, null, 2)], { type: "application/json" });
    const link = document.createElement("a");
    link.href = URL.createObjectURL(blob);
    link.download = "patterns.json";
    link.click();
    URL.revokeObjectURL(link.href);
  }

  private async importPatterns(input: HTMLInputElement): Promise<void> {
    const file = input.files?.[0];
    if (!file) return;
    try {
      const payload = JSON.parse(await file.text());
      await this.client.importPatterns(this.sessionId, payload);
      await this.refreshPatterns();
    } catch (error) {
      this.report(error);
    } finally {
      input.value = "";
    }
  }

  private report(error: unknown): void {
    this.status.textContent =
      error instanceof ApiError ? `${error.status}: ${error.message}` : String(error);
  }
}

new EditorApp().start().catch((error) => {
  document.body.textContent = `failed to start: ${error}`;
});
