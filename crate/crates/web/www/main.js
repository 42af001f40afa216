import init, { loopSpectrum, realityMap, alphaCurve, alphaBounds } from "./pkg/qgraph_web.js";

const MAP_STEPS = 121;
const MAP_EXTENT = 1.5;
const ALPHA_RANGE = [-1.5, 4];
const CURVE_STEPS = 600;

const ids = ["k", "l", "g", "h", "z"];
const inputs = Object.fromEntries(ids.map((id) => [id, document.getElementById(id)]));
const status = document.getElementById("status");

function params() {
  const p = Object.fromEntries(ids.map((id) => [id, Number(inputs[id].value)]));
  for (const id of ids) inputs[id].nextElementSibling.textContent = inputs[id].value;
  return p;
}

function frame(ctx, xr, yr) {
  const { width: w, height: hgt } = ctx.canvas;
  const pad = 30;
  const sx = (x) => pad + ((x - xr[0]) / (xr[1] - xr[0])) * (w - 2 * pad);
  const sy = (y) => hgt - pad - ((y - yr[0]) / (yr[1] - yr[0])) * (hgt - 2 * pad);
  ctx.clearRect(0, 0, w, hgt);
  ctx.strokeStyle = "#ccc";
  ctx.beginPath();
  if (yr[0] < 0 && yr[1] > 0) { ctx.moveTo(sx(xr[0]), sy(0)); ctx.lineTo(sx(xr[1]), sy(0)); }
  if (xr[0] < 0 && xr[1] > 0) { ctx.moveTo(sx(0), sy(yr[0])); ctx.lineTo(sx(0), sy(yr[1])); }
  ctx.stroke();
  ctx.fillStyle = "#555";
  ctx.fillText(xr[0].toFixed(1), pad, hgt - 10);
  ctx.fillText(xr[1].toFixed(1), w - pad - 16, hgt - 10);
  ctx.fillText(yr[1].toFixed(1), 2, pad);
  ctx.fillText(yr[0].toFixed(1), 2, hgt - pad);
  return { sx, sy };
}

function drawSpectrum(p) {
  const ctx = document.getElementById("spectrum").getContext("2d");
  const flat = loopSpectrum(p.k, p.l, p.g, p.h, p.z);
  let ymax = 1;
  for (let i = 1; i < flat.length; i += 2) ymax = Math.max(ymax, Math.abs(flat[i]) * 1.2);
  const { sx, sy } = frame(ctx, [-1, 6], [-ymax, ymax]);
  for (let i = 0; i < flat.length; i += 2) {
    const real = Math.abs(flat[i + 1]) < 1e-9;
    ctx.fillStyle = real ? "#1565c0" : "#c62828";
    ctx.beginPath();
    ctx.arc(sx(flat[i]), sy(flat[i + 1]), 4, 0, 2 * Math.PI);
    ctx.fill();
  }
}

let mapKey = "";
function drawMap(p) {
  const canvas = document.getElementById("map");
  const ctx = canvas.getContext("2d");
  const key = `${p.k},${p.l},${p.z}`;
  if (key !== mapKey) {
    const data = realityMap(p.k, p.l, p.z, MAP_EXTENT, MAP_STEPS);
    let peak = 0;
    for (const v of data) peak = Math.max(peak, v);
    const img = ctx.createImageData(MAP_STEPS, MAP_STEPS);
    data.forEach((v, i) => {
      const t = peak > 0 ? Math.sqrt(v / peak) : 0;
      const o = 4 * i;
      if (v === 0) { img.data[o] = 200; img.data[o + 1] = 225; img.data[o + 2] = 250; }
      else { img.data[o] = 255; img.data[o + 1] = 220 * (1 - t); img.data[o + 2] = 200 * (1 - t); }
      img.data[o + 3] = 255;
    });
    const off = new OffscreenCanvas(MAP_STEPS, MAP_STEPS);
    off.getContext("2d").putImageData(img, 0, 0);
    canvas.cached = off;
    mapKey = key;
  }
  ctx.imageSmoothingEnabled = false;
  ctx.drawImage(canvas.cached, 0, 0, canvas.width, canvas.height);
  const gamma = (p.g + p.h) / 2;
  const delta = (p.g - p.h) / 2;
  const x = ((gamma + MAP_EXTENT) / (2 * MAP_EXTENT)) * canvas.width;
  const y = ((MAP_EXTENT - delta) / (2 * MAP_EXTENT)) * canvas.height;
  ctx.strokeStyle = "#000";
  ctx.beginPath();
  ctx.arc(x, y, 5, 0, 2 * Math.PI);
  ctx.stroke();
}

function drawAlpha(p) {
  const ctx = document.getElementById("alpha").getContext("2d");
  if (Math.abs(p.g) >= 1 || Math.abs(p.z) >= 1) {
    frame(ctx, ALPHA_RANGE, [-1, 1]);
    ctx.fillStyle = "#a00";
    ctx.fillText("needs |g| < 1 and |z| < 1", 120, 40);
    return;
  }
  const curve = alphaCurve(p.g, p.z, ALPHA_RANGE[0], ALPHA_RANGE[1], CURVE_STEPS);
  const [lo, hi] = alphaBounds(p.g);
  let ymin = 0, ymax = 0;
  for (const v of curve) { ymin = Math.min(ymin, v); ymax = Math.max(ymax, v); }
  const { sx, sy } = frame(ctx, ALPHA_RANGE, [ymin * 1.1 - 0.05, ymax * 1.1 + 0.05]);
  ctx.fillStyle = "rgba(21, 101, 192, 0.1)";
  const right = Math.min(hi, ALPHA_RANGE[1]);
  ctx.fillRect(sx(lo), 0, sx(right) - sx(lo), ctx.canvas.height);
  ctx.strokeStyle = "#1565c0";
  ctx.beginPath();
  curve.forEach((v, i) => {
    const a = ALPHA_RANGE[0] + ((ALPHA_RANGE[1] - ALPHA_RANGE[0]) * i) / (CURVE_STEPS - 1);
    if (i === 0) ctx.moveTo(sx(a), sy(v)); else ctx.lineTo(sx(a), sy(v));
  });
  ctx.stroke();
  ctx.fillStyle = "#333";
  ctx.fillText(`positive for ${lo.toFixed(3)} < alpha < ${Number.isFinite(hi) ? hi.toFixed(3) : "inf"}`, 40, 16);
}

function redraw() {
  const p = params();
  status.textContent = "";
  for (const draw of [drawSpectrum, drawMap, drawAlpha]) {
    try { draw(p); } catch (e) { status.textContent = String(e); }
  }
}

await init();
for (const id of ids) inputs[id].addEventListener("input", redraw);
redraw();
