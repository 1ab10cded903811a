// Browser bootstrap: the service serves this bundle under /ui/, so the API
// lives on the same origin.

import { ApiClient } from "./api.js";
import { App } from "./app.js";

const api = new ApiClient(window.location.origin);
const app = new App(document, api);
void app.load();

declare global {
  interface Window {
    caselift: App;
  }
}
window.caselift = app;
