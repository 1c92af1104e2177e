import init, { Planner, generateMap } from "./pkg/toproute_web.js";

const $ = (id) => document.getElementById(id);
const canvas = $("canvas");
const ctx = canvas.getContext("2d");
const output = $("output");
const COLORS = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"];

let planner = null;
let map = null;
let routes = [];
let layout = new Map();

function showError(e) {
  output.innerHTML = "";
  const p = document.createElement("p");
  p.className = "error";
  p.textContent = String(e.message ?? e);
  output.append(p);
}

function loadPlanner(next, preset) {
  planner?.free();
  planner = next;
  map = JSON.parse(planner.map());
  routes = [];
  output.innerHTML = "";
  $("map-info").textContent = `${map.pois.length} POIs, ${map.edges.length} edges, features: ${map.features.join(", ")}`;
  for (const id of ["x", "y"]) {
    const select = $(id);
    select.innerHTML = "";
    for (const poi of map.pois) select.add(new Option(`POI ${poi.id}`, poi.id));
  }
  const weights = $("weights");
  weights.innerHTML = "";
  map.features.forEach((f, i) => {
    const label = document.createElement("label");
    label.textContent = `w(${f})`;
    const input = document.createElement("input");
    input.type = "number";
    input.step = "0.1";
    input.min = "0";
    input.dataset.feature = f;
    input.value = preset?.weights?.[f] ?? (i < 2 ? 1 : 0);
    label.append(input);
    weights.append(label);
  });
  $("x").value = preset?.x ?? map.pois[0].id;
  $("y").value = preset?.y ?? map.pois[Math.min(1, map.pois.length - 1)].id;
  for (const key of ["b", "theta", "alpha", "k"]) {
    if (preset?.[key] !== undefined) $(key).value = preset[key];
  }
  draw();
  updateCandidates();
}

function queryJson() {
  const weights = {};
  let total = 0;
  for (const input of $("weights").querySelectorAll("input")) {
    const w = Math.max(0, Number(input.value) || 0);
    if (w > 0) {
      weights[input.dataset.feature] = w;
      total += w;
    }
  }
  if (total === 0) throw new Error("give at least one feature a positive weight");
  for (const f in weights) weights[f] /= total;
  const aggregation = { type: $("aggregation").value };
  if (aggregation.type === "power_law") aggregation.alpha = Number($("alpha").value);
  return JSON.stringify({
    x: Number($("x").value),
    y: Number($("y").value),
    b: Number($("b").value),
    weights,
    theta: Number($("theta").value),
    aggregation,
    k: Number($("k").value),
    count_endpoint_stay: $("endpoint").checked,
  });
}

function updateCandidates() {
  try {
    $("cands").textContent = `${planner.candidates(queryJson())} candidate POIs`;
  } catch (e) {
    $("cands").textContent = String(e.message ?? e);
  }
}

function resize() {
  const rect = canvas.getBoundingClientRect();
  const dpr = window.devicePixelRatio || 1;
  canvas.width = Math.round(rect.width * dpr);
  canvas.height = Math.round(rect.height * dpr);
  ctx.setTransform(dpr, 0, 0, dpr, 0, 0);
  draw();
}

function project() {
  const rect = canvas.getBoundingClientRect();
  const pad = 30;
  const pts = map.pois.map((p, i) => [p.lon ?? Math.cos(i), p.lat ?? Math.sin(i)]);
  const xs = pts.map((p) => p[0]);
  const ys = pts.map((p) => p[1]);
  const [x0, x1, y0, y1] = [Math.min(...xs), Math.max(...xs), Math.min(...ys), Math.max(...ys)];
  const scale = Math.min((rect.width - 2 * pad) / (x1 - x0 || 1), (rect.height - 2 * pad) / (y1 - y0 || 1));
  layout = new Map();
  map.pois.forEach((poi, i) => {
    layout.set(poi.id, [pad + (pts[i][0] - x0) * scale, rect.height - pad - (pts[i][1] - y0) * scale]);
  });
}

function draw() {
  if (!map) return;
  const rect = canvas.getBoundingClientRect();
  ctx.clearRect(0, 0, rect.width, rect.height);
  project();
  ctx.strokeStyle = "#ddd";
  ctx.lineWidth = 1;
  for (const e of map.edges) {
    const [a, b] = [layout.get(e.from), layout.get(e.to)];
    ctx.beginPath();
    ctx.moveTo(...a);
    ctx.lineTo(...b);
    ctx.stroke();
  }
  // Later routes first so the best one ends up on top.
  routes.slice().reverse().forEach((route, r) => {
    const rank = routes.length - 1 - r;
    const offset = (rank - (routes.length - 1) / 2) * 3;
    ctx.strokeStyle = COLORS[rank % COLORS.length];
    ctx.lineWidth = rank === 0 ? 4 : 2.5;
    ctx.beginPath();
    route.pois.forEach((id, i) => {
      const [px, py] = layout.get(id);
      if (i === 0) ctx.moveTo(px + offset, py + offset);
      else ctx.lineTo(px + offset, py + offset);
    });
    ctx.stroke();
  });
  const x = Number($("x").value);
  const y = Number($("y").value);
  ctx.font = "11px system-ui, sans-serif";
  for (const poi of map.pois) {
    const [px, py] = layout.get(poi.id);
    const endpoint = poi.id === x || poi.id === y;
    ctx.fillStyle = poi.id === x ? "#2ca02c" : poi.id === y ? "#d62728" : "#555";
    ctx.beginPath();
    ctx.arc(px, py, endpoint ? 7 : 4, 0, 2 * Math.PI);
    ctx.fill();
    if (endpoint || map.pois.length <= 40) {
      ctx.fillStyle = "#222";
      ctx.fillText(poi.id, px + 8, py - 6);
    }
  }
}

function statsLine(stats) {
  return `${stats.examined_open_routes} open routes examined, ${stats.states_created} states, ` +
    `${stats.pruned_by_bound} pruned by bound, ${stats.wall_time_ms.toFixed(1)} ms`;
}

function plan() {
  try {
    const result = JSON.parse(planner.plan(queryJson(), $("algo").value));
    routes = result.routes;
    output.innerHTML = "";
    const summary = document.createElement("p");
    summary.textContent = `${result.algorithm}: ${statsLine(result.stats)}`;
    const table = document.createElement("table");
    table.innerHTML = "<tr><th>route</th><th>gain</th><th>cost</th></tr>";
    routes.forEach((route, i) => {
      const row = table.insertRow();
      const swatch = `<span class="swatch" style="background:${COLORS[i % COLORS.length]}"></span>`;
      row.innerHTML = `<td>${swatch}${route.pois.join(" → ")}</td><td>${route.gain.toFixed(4)}</td><td>${route.cost}</td>`;
    });
    output.append(summary, table);
    draw();
  } catch (e) {
    showError(e);
  }
}

function compare() {
  try {
    const rows = JSON.parse(planner.compare(queryJson()));
    routes = rows.filter((r) => r.algorithm === "pacer2" && r.pois).map((r) => ({ pois: r.pois }));
    output.innerHTML = "";
    const table = document.createElement("table");
    table.innerHTML = "<tr><th>algorithm</th><th>status</th><th>gain</th><th>cost</th><th>examined</th><th>states</th><th>ms</th></tr>";
    for (const r of rows) {
      const row = table.insertRow();
      row.innerHTML = `<td>${r.algorithm}</td><td>${r.status}</td><td>${r.gain?.toFixed(4) ?? ""}</td>` +
        `<td>${r.cost ?? ""}</td><td>${r.examined}</td><td>${r.states}</td><td>${r.wall_time_ms.toFixed(1)}</td>`;
    }
    output.append(table);
    draw();
  } catch (e) {
    showError(e);
  }
}

function nearestPoi(event) {
  const rect = canvas.getBoundingClientRect();
  const [cx, cy] = [event.clientX - rect.left, event.clientY - rect.top];
  let best = null;
  let bestDist = 15 * 15;
  for (const [id, [px, py]] of layout) {
    const d = (px - cx) ** 2 + (py - cy) ** 2;
    if (d < bestDist) [best, bestDist] = [id, d];
  }
  return best;
}

async function main() {
  await init();
  $("generate").onclick = () => {
    try {
      const json = generateMap(BigInt($("seed").value), Number($("pois").value), Number($("density").value));
      loadPlanner(new Planner(json), { b: 480, theta: 0, alpha: 0.5 });
    } catch (e) {
      showError(e);
    }
  };
  $("sample").onclick = () =>
    loadPlanner(Planner.sample(), { x: 6, y: 2, b: 13, theta: 0.6, alpha: 1, k: 3, weights: { park: 1, museum: 1, food: 0 } });
  $("plan").onclick = plan;
  $("compare").onclick = compare;
  canvas.onclick = (event) => {
    const id = nearestPoi(event);
    if (id === null) return;
    $(event.shiftKey ? "y" : "x").value = id;
    routes = [];
    draw();
    updateCandidates();
  };
  // Delegated, since the weight inputs are rebuilt for every map.
  document.querySelector("aside").addEventListener("change", (event) => {
    if (["x", "y"].includes(event.target.id)) {
      routes = [];
      draw();
    }
    if (planner) updateCandidates();
  });
  window.addEventListener("resize", resize);
  $("sample").onclick();
  resize();
}

main().catch(showError);
