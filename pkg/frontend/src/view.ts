/** DOM rendering. Everything stateful lives in the controller; this module
 * redraws from scratch on every change (task sizes are tiny). */

import { TaskController } from "./controller.js";
import { categoriesFor, Level, LEVEL_NAMES, TaskPair } from "./model.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className = "",
  text = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text) node.textContent = text;
  return node;
}

function words(list: string[]): string {
  return list.length ? list.join(" ") : "∅";
}

function pairRow(ctl: TaskController, pair: TaskPair): HTMLElement {
  const state = ctl.state!;
  const row = el("div", "pair" + (pair.locked ? " locked" : " mismatch"));
  row.dataset.index = String(pair.index);
  if (ctl.selected === pair.index) row.classList.add("selected");

  const refCell = el("span", "ref", words(pair.ref_words));
  const hypCell = el("span", "hyp", words(pair.hyp_words));
  const opCell = el("span", "op", pair.op + (pair.k > 1 ? ` (k=${pair.k})` : ""));
  row.append(refCell, hypCell, opCell);

  if (pair.locked) {
    row.append(el("span", "level-tag identical", "identical"));
    return row;
  }

  row.addEventListener("click", () => ctl.select(pair.index));

  const label = state.labelFor(pair.index);
  const controls = el("span", "controls");

  for (const level of [1, 2, 3, 0] as Level[]) {
    const button = el(
      "button",
      "level" + (label?.level === level ? " active" : ""),
      `${level}: ${LEVEL_NAMES[level]}`,
    );
    button.addEventListener("click", (event) => {
      event.stopPropagation();
      ctl.select(pair.index);
      ctl.labelSelected(level);
    });
    controls.append(button);
  }

  if (label) {
    const category = el("select", "category");
    // the menu only ever offers categories consistent with the chosen level
    for (const name of categoriesFor(label.level)) {
      const option = el("option", "", name);
      option.value = name;
      if (name === label.category) option.selected = true;
      category.append(option);
    }
    category.addEventListener("change", () => {
      ctl.select(pair.index);
      ctl.labelSelected(label.level, category.value);
    });
    category.addEventListener("click", (event) => event.stopPropagation());
    controls.append(category);

    const reason = el("input", "reason");
    reason.placeholder = "reason";
    reason.value = label.reason;
    reason.addEventListener("change", () => {
      ctl.select(pair.index);
      ctl.setReason(reason.value);
    });
    reason.addEventListener("click", (event) => event.stopPropagation());
    controls.append(reason);
  }

  row.append(controls);
  return row;
}

export function render(root: HTMLElement, ctl: TaskController): void {
  root.replaceChildren();

  if (ctl.phase === "loading") {
    root.append(el("p", "status", "loading…"));
    return;
  }
  if (ctl.phase === "done") {
    const done = el("div", "done-screen");
    done.append(el("h2", "", "Queue empty — all tasks are annotated."));
    if (ctl.lastScore !== null) {
      done.append(el("p", "", `last stored score: ${ctl.lastScore.toFixed(4)}`));
    }
    root.append(done);
    return;
  }
  if (ctl.phase === "error") {
    root.append(el("p", "status error", ctl.message));
    return;
  }

  const state = ctl.state!;
  const task = state.task;
  const header = el("div", "task-header");
  header.append(el("h2", "", `sentence ${task.id} (${task.lang}, N=${task.n_ref})`));
  header.append(el("p", "sentence", `reference: ${task.ref_text}`));
  header.append(el("p", "sentence", `hypothesis: ${task.hyp_text}`));
  root.append(header);

  const list = el("div", "pairs");
  for (const pair of task.pairs) list.append(pairRow(ctl, pair));
  root.append(list);

  const totals = state.totals();
  const bar = el("div", "totals");
  bar.append(
    el("span", "", `no-penalty: ${totals.noPenalty}`),
    el("span", "", `minor: ${totals.minor}`),
    el("span", "", `major: ${totals.major}`),
    el("span", "", `penalty: ${totals.penalty.toFixed(1)}`),
    el("span", "score", `provisional score: ${totals.score.toFixed(4)}`),
  );
  root.append(bar);

  const submit = el("button", "submit", "submit");
  submit.disabled = !ctl.canSubmit() || ctl.phase === "submitting";
  if (!state.isComplete()) {
    submit.append(el("span", "badge", String(state.missingCount())));
  }
  submit.addEventListener("click", () => void ctl.submit());
  root.append(submit);

  if (ctl.message) root.append(el("p", "status error", ctl.message));
  root.append(
    el(
      "p",
      "hint",
      "keys: 1 no-penalty, 2 minor, 3 major, 0 identical; ↑/↓ move; enter submits",
    ),
  );
}
