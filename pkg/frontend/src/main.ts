/** Browser entry point: mount the studio against the service. */

import { ApiClient } from "./api.js";
import { StudioApp } from "./app.js";

declare global {
  interface Window {
    HC_SERVICE_URL?: string;
    studio?: StudioApp;
  }
}

const base =
  window.HC_SERVICE_URL ??
  `${window.location.protocol}//${window.location.hostname}:8787`;

const root = document.getElementById("app");
if (!root) throw new Error("missing #app mount point");

const app = new StudioApp(root, new ApiClient(base));
window.studio = app;
void app.init();
