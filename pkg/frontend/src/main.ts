import { ApiClient } from "./api.js";
import { TaskController } from "./controller.js";
import { Level } from "./model.js";
import { render } from "./view.js";

function annotatorId(): string {
  const key = "annotator-id";
  let id = window.localStorage.getItem(key);
  if (!id) {
    id = window.prompt("annotator id?") || `anon-${Math.random().toString(36).slice(2, 8)}`;
    window.localStorage.setItem(key, id);
  }
  return id;
}

function bindKeyboard(ctl: TaskController): void {
  document.addEventListener("keydown", (event) => {
    const target = event.target as HTMLElement | null;
    if (target && (target.tagName === "INPUT" || target.tagName === "SELECT")) return;
    if (event.key >= "0" && event.key <= "3") {
      ctl.labelSelected(Number(event.key) as Level);
      event.preventDefault();
    } else if (event.key === "ArrowDown" || event.key === "j") {
      ctl.move(1);
      event.preventDefault();
    } else if (event.key === "ArrowUp" || event.key === "k") {
      ctl.move(-1);
      event.preventDefault();
    } else if (event.key === "Enter") {
      void ctl.submit();
      event.preventDefault();
    }
  });
}

function start(): void {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app element");
  const ctl = new TaskController(new ApiClient(""), annotatorId());
  ctl.onChange(() => render(root, ctl));
  bindKeyboard(ctl);
  void ctl.loadNext();
}

start();
