/**
 * Pure view-model logic for the editor UI.
 *
 * Everything here is DOM-free and unit tested: translating cursor offsets,
 * shaping service responses into renderable rows, mapping inspection spans
 * onto text decorations, and validating the Add Pattern form. The invariant
 * throughout is that service-supplied orderings are never changed.
 */

import type {
  CompletionsResponse,
  InspectionSite,
  PatternGroup,
  PatternListing,
  WireCondition,
  WirePattern,
  WireSpan,
} from "./api.js";

export interface Position {
  line: number; // 1-based
  col: number; // 1-based
}

/** Cursor offset in a textarea -> 1-based line/col. */
export function positionAt(text: string, offset: number): Position {
  const clamped = Math.max(0, Math.min(offset, text.length));
  let line = 1;
  let lineStart = 0;
  for (let i = 0; i < clamped; i++) {
    if (text[i] === "\n") {
      line += 1;
      lineStart = i + 1;
    }
  }
  return { line, col: clamped - lineStart + 1 };
}

/** 1-based line/col -> character offset; clamps to the line's end. */
export function offsetAt(text: string, line: number, col: number): number {
  let current = 1;
  let start = 0;
  while (current < line) {
    const nl = text.indexOf("\n", start);
    if (nl === -1) return text.length;
    start = nl + 1;
    current += 1;
  }
  const lineEnd = (() => {
    const nl = text.indexOf("\n", start);
    return nl === -1 ? text.length : nl;
  })();
  return Math.min(start + col - 1, lineEnd + 1);
}

export interface DropdownRow {
  label: string;
  origin: "prioritized" | "learned";
  prioritized: boolean;
  confidencePct: string;
  patternId: string | null;
}

/** Dropdown rows in exactly the service's order; prioritized rows marked. */
export function dropdownRows(response: CompletionsResponse): DropdownRow[] {
  return response.items.map((item) => ({
    label: item.label,
    origin: item.origin,
    prioritized: item.origin === "prioritized",
    confidencePct: `${Math.round(item.confidence * 100)}%`,
    patternId: item.pattern_id,
  }));
}

export function conditionLabel(condition: WireCondition): string {
  switch (condition.key) {
    case "parent_tag":
      return `parent is <${condition.value}>`;
    case "parent_attr":
      return `parent ${condition.attr_name}="${condition.value}"`;
    case "current_tag":
      return `element is <${condition.value}>`;
    case "preceding_attribute":
      return `attribute is ${condition.value}`;
  }
}

export interface PatternRow {
  patternId: string;
  description: string;
  conditionChips: string[];
  target: string;
  state: string;
  confidencePct: string;
  /** Conflict-group alternatives render de-emphasized under their primary. */
  deEmphasized: boolean;
  /** Row backing the current top completion, shown with an accent. */
  isCurrent: boolean;
}

function toRow(
  pattern: WirePattern,
  deEmphasized: boolean,
  currentPatternId: string | null,
): PatternRow {
  return {
    patternId: pattern.id,
    description: pattern.description,
    conditionChips: pattern.conditions.map(conditionLabel),
    target: pattern.target,
    state: pattern.state,
    confidencePct: `${Math.round(pattern.confidence * 100)}%`,
    deEmphasized,
    isCurrent: pattern.id === currentPatternId,
  };
}

function groupRows(group: PatternGroup, currentPatternId: string | null): PatternRow[] {
  return group.members.map((member, index) =>
    toRow(member, index > 0, currentPatternId),
  );
}

export interface PatternTables {
  prioritized: PatternRow[];
  standard: PatternRow[];
  blacklisted: PatternRow[];
}

/** Flatten a listing into the three tables, keeping the service order. */
export function patternTables(
  listing: PatternListing,
  currentPatternId: string | null = null,
): PatternTables {
  return {
    prioritized: listing.prioritized.map((p) => toRow(p, false, currentPatternId)),
    standard: listing.standard_groups.flatMap((g) => groupRows(g, currentPatternId)),
    blacklisted: listing.blacklisted.map((p) => toRow(p, false, currentPatternId)),
  };
}

export interface Decoration {
  start: number; // character offsets into the document text
  end: number;
  className: "hl-positive" | "hl-similar" | "hl-violation";
  witness: string;
}

const CLASS_BY_KIND = {
  positive: "hl-positive",
  similar: "hl-similar",
  violation: "hl-violation",
} as const;

function spanToOffsets(text: string, span: WireSpan): { start: number; end: number } {
  return {
    start: offsetAt(text, span.start_line, span.start_col),
    end: offsetAt(text, span.end_line, span.end_col),
  };
}

/**
 * Inspection sites -> text decorations. Sites that no longer fit the text
 * (version race between edit and inspect) are dropped; the caller refetches.
 */
export function decorationsFor(text: string, sites: InspectionSite[]): Decoration[] {
  const out: Decoration[] = [];
  for (const site of sites) {
    const { start, end } = spanToOffsets(text, site.span);
    if (start >= end || end > text.length) continue;
    out.push({ start, end, className: CLASS_BY_KIND[site.classification], witness: site.witness });
  }
  return out;
}

/** Render decorations as escaped HTML for the highlight underlay. */
export function highlightedHtml(text: string, decorations: Decoration[]): string {
  const escape = (s: string) =>
    s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
  const sorted = [...decorations].sort((a, b) => a.start - b.start);
  let html = "";
  let cursor = 0;
  for (const deco of sorted) {
    if (deco.start < cursor) continue; // overlaps keep the earlier site
    html += escape(text.slice(cursor, deco.start));
    html += `<mark class="${deco.className}" title="${escape(deco.witness)}">`;
    html += escape(text.slice(deco.start, deco.end));
    html += "</mark>";
    cursor = deco.end;
  }
  html += escape(text.slice(cursor));
  return html;
}

export interface AddFormState {
  kind: string;
  conditions: WireCondition[];
  target: string;
}

/** Client-side mirror of the service's add-pattern validation. */
export function validateAddForm(form: AddFormState): string | null {
  if (!form.target.trim()) return "A target is required.";
  if (form.conditions.length === 0) return "At least one condition is required.";
  for (const condition of form.conditions) {
    if (!condition.value.trim()) return "Every condition needs a value.";
    if (condition.key === "parent_attr" && !condition.attr_name?.trim()) {
      return "Parent-attribute conditions need an attribute name.";
    }
  }
  return null;
}

/** Insert a chosen completion, replacing the partially typed token. */
export function applyCompletion(
  text: string,
  cursor: number,
  typedPrefixLength: number,
  label: string,
): { text: string; cursor: number } {
  const start = cursor - typedPrefixLength;
  const next = text.slice(0, start) + label + text.slice(cursor);
  return { text: next, cursor: start + label.length };
}

/**
 * Latest-wins guard for async responses: a response is rendered only when
 * no newer request has been issued since it left.
 */
export class RequestGate {
  private issued = 0;

  next(): number {
    this.issued += 1;
    return this.issued;
  }

  isCurrent(ticket: number): boolean {
    return ticket === this.issued;
  }
}
