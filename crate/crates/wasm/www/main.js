import init, { generate, fitMerge, monitor } from "./pkg/tkmerge_wasm.js";

const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
  "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f"];
const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

let points = null;
let truth = null;

function status(msg) {
  $("status").textContent = msg;
}

function color(label) {
  return label === 0 ? "#bbbbbb" : PALETTE[(label - 1) % PALETTE.length];
}

function drawScatter(labels) {
  const cv = $("scatter");
  const ctx = cv.getContext("2d");
  ctx.clearRect(0, 0, cv.width, cv.height);
  if (!points) return;
  const n = points.length / 2;
  let [x0, x1, y0, y1] = [Infinity, -Infinity, Infinity, -Infinity];
  for (let i = 0; i < n; i++) {
    x0 = Math.min(x0, points[2 * i]); x1 = Math.max(x1, points[2 * i]);
    y0 = Math.min(y0, points[2 * i + 1]); y1 = Math.max(y1, points[2 * i + 1]);
  }
  const pad = 12;
  const sx = (x) => pad + (x - x0) / (x1 - x0 || 1) * (cv.width - 2 * pad);
  const sy = (y) => cv.height - pad - (y - y0) / (y1 - y0 || 1) * (cv.height - 2 * pad);
  // trimmed points underneath
  for (const pass of [0, 1]) {
    for (let i = 0; i < n; i++) {
      const l = labels[i];
      if ((l !== 0) !== (pass === 1)) continue;
      ctx.fillStyle = color(l);
      ctx.beginPath();
      ctx.arc(sx(points[2 * i]), sy(points[2 * i + 1]), 2, 0, 2 * Math.PI);
      ctx.fill();
    }
  }
}

function drawTrace(alphas, scores, best) {
  const cv = $("trace");
  const ctx = cv.getContext("2d");
  ctx.clearRect(0, 0, cv.width, cv.height);
  const pad = 28;
  const lo = Math.min(...alphas), hi = Math.max(...alphas);
  const sx = (a) => pad + (a - lo) / (hi - lo || 1) * (cv.width - 2 * pad);
  const sy = (s) => cv.height - pad - s * (cv.height - 2 * pad);
  ctx.strokeStyle = "#444";
  ctx.strokeRect(pad, pad, cv.width - 2 * pad, cv.height - 2 * pad);
  ctx.fillStyle = "#000";
  ctx.font = "10px sans-serif";
  ctx.fillText("1", 8, sy(1) + 3);
  ctx.fillText("0", 8, sy(0) + 3);
  ctx.strokeStyle = "#1f77b4";
  ctx.beginPath();
  let down = false;
  scores.forEach((s, j) => {
    // score j compares levels j and j + 1; plot it at the first
    if (!Number.isFinite(s)) { down = false; return; }
    const x = sx(alphas[j]), y = sy(s);
    if (down) ctx.lineTo(x, y); else ctx.moveTo(x, y);
    down = true;
  });
  ctx.stroke();
  alphas.forEach((a) => ctx.fillText(a.toFixed(2), sx(a) - 10, cv.height - 10));
  ctx.strokeStyle = "#d62728";
  ctx.beginPath();
  ctx.moveTo(sx(best), pad);
  ctx.lineTo(sx(best), cv.height - pad);
  ctx.stroke();
}

function run(label, f) {
  status(label + " ...");
  // let the status paint before blocking
  setTimeout(() => {
    const t0 = performance.now();
    try {
      const msg = f();
      status(`${msg} (${((performance.now() - t0) / 1000).toFixed(2)} s)`);
    } catch (e) {
      status(`error: ${e.message ?? e}`);
    }
  }, 10);
}

function onGenerate() {
  run("generating", () => {
    const ds = generate($("scenario").value, num("scale"), BigInt(num("seed")));
    points = ds.points();
    truth = ds.truth();
    $("bigk").value = ds.groups;
    $("alpha").value = ds.alpha.toFixed(3);
    ds.free();
    drawScatter(truth);
    return `${points.length / 2} points, true labels shown`;
  });
}

function onFit() {
  if (!points) return status("generate data first");
  run("fitting", () => {
    const labels = fitMerge(points, num("bigk"), num("k"), num("alpha"), $("method").value,
      num("r"), $("linkage").value, BigInt(num("seed")));
    drawScatter(labels);
    const groups = new Set(labels); groups.delete(0);
    const trimmed = labels.filter((l) => l === 0).length;
    return `${groups.size} groups, ${trimmed} trimmed`;
  });
}

function onMonitor() {
  if (!points) return status("generate data first");
  run("monitoring", () => {
    const n = points.length / 2;
    let k = num("k");
    if (k === 0) k = Math.max(1, Math.round(2 * num("bigk") * Math.log(n)));
    const t = monitor(points, k, $("method").value, BigInt(num("seed")));
    const alphas = t.alphas(), scores = t.scores(), best = t.bestAlpha;
    drawTrace(alphas, scores, best);
    drawScatter(t.labels());
    t.free();
    $("alpha").value = best.toFixed(2);
    return `best alpha ${best.toFixed(2)} with k = ${k}`;
  });
}

await init();
$("generate").onclick = onGenerate;
$("fit").onclick = onFit;
$("monitor").onclick = onMonitor;
onGenerate();
