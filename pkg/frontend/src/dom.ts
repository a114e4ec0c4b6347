/** Tiny DOM helpers; the app renders by replacing a view container. */

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  children: (Node | string)[] = [],
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  for (const child of children) {
    node.append(child);
  }
  return node;
}

export function table(headers: string[], rows: (string | Node)[][], className = "data"): HTMLTableElement {
  const head = el("tr", {}, headers.map((h) => el("th", {}, [h])));
  const body = rows.map((cells) => el("tr", {}, cells.map((c) => el("td", {}, [c]))));
  return el("table", { class: className }, [el("thead", {}, [head]), el("tbody", {}, body)]);
}

export function errorBox(message: string): HTMLElement {
  return el("div", { class: "error-box", role: "alert" }, [message]);
}

export function deniedBox(view: string): HTMLElement {
  return el("div", { class: "denied-box", "data-denied": view }, [
    `Access denied: the ${view} view is not available for this role.`,
  ]);
}
