/** Incremental trigger-log panel: appends entries as they arrive and keeps
 * the tick cursor for /log?since= polling. */

import { logLineText } from "./format.js";
import type { LogEntry } from "./types.js";

export class LogPanel {
  private cursor: number | undefined = undefined;

  constructor(private readonly list: HTMLElement) {}

  /** Tick to pass as ?since= on the next poll (undefined on first fetch). */
  get since(): number | undefined {
    return this.cursor;
  }

  append(entries: LogEntry[]): void {
    for (const entry of entries) {
      const item = document.createElement("li");
      item.textContent = logLineText(entry);
      item.title = JSON.stringify(entry.binding);
      this.list.appendChild(item);
      this.cursor = entry.tick;
    }
    if (entries.length > 0) {
      this.list.scrollTop = this.list.scrollHeight;
    }
  }

  clear(): void {
    this.list.replaceChildren();
    this.cursor = undefined;
  }
}
