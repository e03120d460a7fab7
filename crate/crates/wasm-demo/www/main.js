import init, { DemoParams, heatmap, steadyPoint, detectorDensity } from "./pkg/qtm_wasm.js";

const $ = (id) => document.getElementById(id);
const num = (id) => parseFloat($(id).value);
const status = (msg) => { $("status").textContent = msg; };

let grid = null;

function params() {
  const p = new DemoParams();
  for (const k of ["u", "gamma_c", "gamma_h", "t_c", "gamma_det", "lam"]) p[k] = num(k);
  p.bosonic = $("bosonic").checked;
  p.set_feedback($("feedback").value);
  return p;
}

// viridis-like ramp on [0, 1/sqrt2]
function colour(c) {
  if (!Number.isFinite(c)) return [200, 0, 0];
  const t = Math.min(Math.max(c / Math.SQRT1_2, 0), 1);
  return [68 + t * 185, 1 + t * 230, 84 + t * (t < 0.5 ? 100 : -60)].map(Math.round);
}

function drawHeatmap(values, side) {
  const ctx = $("heatmap").getContext("2d");
  const img = ctx.createImageData(side, side);
  for (let iy = 0; iy < side; iy++) {
    for (let ix = 0; ix < side; ix++) {
      const [r, g, b] = colour(values[iy * side + ix]);
      const o = ((side - 1 - iy) * side + ix) * 4;
      img.data.set([r, g, b, 255], o);
    }
  }
  const off = new OffscreenCanvas(side, side);
  off.getContext("2d").putImageData(img, 0, 0);
  ctx.imageSmoothingEnabled = false;
  ctx.drawImage(off, 0, 0, ctx.canvas.width, ctx.canvas.height);
}

function logAt(min, max, t) {
  return Math.exp(Math.log(min) + t * (Math.log(max) - Math.log(min)));
}

function showPoint(g, tH) {
  const p = params();
  p.g = g;
  p.t_h = tH;
  const v = steadyPoint(p);
  const names = ["concurrence", "CHSH", "fidelity", "Q&#775;<sub>C</sub>", "p00", "p01", "p10", "p11", "|&alpha;|"];
  const rows = [["g", g], ["T<sub>H</sub>", tH], ...names.map((n, i) => [n, v[i]])];
  $("point").innerHTML = rows.map(([n, x]) => `<tr><td>${n}</td><td>${x.toPrecision(5)}</td></tr>`).join("");
  if (p.lam < 0 || $("feedback").value === "ideal") {
    drawDetector(null);
  } else {
    drawDetector(detectorDensity(p, 401));
  }
}

function drawDetector(data) {
  const ctx = $("detector").getContext("2d");
  const { width: w, height: h } = ctx.canvas;
  ctx.clearRect(0, 0, w, h);
  if (!data) {
    ctx.fillText("projective limit: no detector coordinate", 10, 20);
    return;
  }
  const n = data.length / 2;
  const d = data.subarray(0, n);
  const p = data.subarray(n);
  const pMax = Math.max(...p);
  const x = (v) => ((v - d[0]) / (d[n - 1] - d[0])) * (w - 20) + 10;
  const y = (v) => h - 20 - (v / pMax) * (h - 30);
  ctx.strokeStyle = "#999";
  ctx.beginPath();
  ctx.moveTo(x(0), 0);
  ctx.lineTo(x(0), h - 20);
  ctx.stroke();
  ctx.fillStyle = "#222";
  for (const t of [-1, 0, 1]) ctx.fillText(String(t), x(t) - 3, h - 5);
  ctx.strokeStyle = "#2a6";
  ctx.beginPath();
  d.forEach((v, i) => (i ? ctx.lineTo(x(v), y(p[i])) : ctx.moveTo(x(v), y(p[i]))));
  ctx.stroke();
}

function compute(ev) {
  ev?.preventDefault();
  const side = Math.round(num("side"));
  try {
    const t0 = performance.now();
    const values = heatmap(params(), side, num("g_min"), num("g_max"), num("th_min"), num("th_max"));
    drawHeatmap(values, side);
    grid = { side, values };
    let best = 0;
    values.forEach((c, i) => { if (c > values[best] || !Number.isFinite(values[best])) best = i; });
    const ix = best % side;
    const iy = Math.floor(best / side);
    status(`${side * side} points in ${(performance.now() - t0).toFixed(0)} ms; max concurrence ${values[best].toFixed(4)}`);
    showPoint(logAt(num("g_min"), num("g_max"), ix / (side - 1)), logAt(num("th_min"), num("th_max"), iy / (side - 1)));
  } catch (e) {
    status(e.message ?? String(e));
  }
}

$("heatmap").addEventListener("click", (ev) => {
  if (!grid) return;
  const r = ev.target.getBoundingClientRect();
  const ix = Math.min(grid.side - 1, Math.floor(((ev.clientX - r.left) / r.width) * grid.side));
  const iy = Math.min(grid.side - 1, Math.floor(((r.bottom - ev.clientY) / r.height) * grid.side));
  try {
    showPoint(logAt(num("g_min"), num("g_max"), ix / (grid.side - 1)), logAt(num("th_min"), num("th_max"), iy / (grid.side - 1)));
  } catch (e) {
    status(e.message ?? String(e));
  }
});
$("controls").addEventListener("submit", compute);

await init();
compute();
