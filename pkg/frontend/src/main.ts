/**
 * Entry point: wire the API client, session store, and DOM app together.
 * The backend address can be overridden with ?api=<base-url>.
 */

import { ApiClient } from './api';
import { App } from './editor';
import { UiSession } from './session';

const params = new URLSearchParams(window.location.search);
const baseUrl = params.get('api') ?? 'http://127.0.0.1:8000';

const session = new UiSession(new ApiClient(baseUrl));
const mount = document.getElementById('app');
if (!mount) throw new Error('missing #app mount point');

const app = new App(session, mount);
void app.start();
