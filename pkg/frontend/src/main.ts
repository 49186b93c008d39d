// Page bootstrap: resolve the DOM, build the console, bind the keyboard.

import { ApiClient } from "./api";
import { Console } from "./console";
import { initConsoleDom, render } from "./render";

function boot(): void {
  const els = initConsoleDom(document);
  const api = new ApiClient("");
  const console_ = new Console(api, (vm) => render(vm, els));
  console_.keys.attach(window);
  void console_.start();
}

if (document.readyState === "loading") {
  document.addEventListener("DOMContentLoaded", boot);
} else {
  boot();
}
