import init, { densityCurve, hermiteCurves, momentsTable } from "./pkg/awq_wasm.js";

const $ = (id) => document.getElementById(id);
const num = (id) => parseFloat($(id).value);

function plot(canvas, x, series, colors) {
  const ctx = canvas.getContext("2d");
  const w = canvas.width, h = canvas.height, pad = 36;
  ctx.clearRect(0, 0, w, h);
  const finite = series.flat().filter(Number.isFinite);
  let lo = Math.min(0, ...finite), hi = Math.max(...finite);
  if (hi - lo < 1e-12) hi = lo + 1;
  const span = hi - lo;
  lo -= 0.05 * span; hi += 0.05 * span;
  const sx = (v) => pad + (v - x[0]) / (x[x.length - 1] - x[0]) * (w - 2 * pad);
  const sy = (v) => h - pad - (v - lo) / (hi - lo) * (h - 2 * pad);
  ctx.strokeStyle = "#bbb"; ctx.lineWidth = 1;
  ctx.beginPath(); ctx.moveTo(pad, sy(0)); ctx.lineTo(w - pad, sy(0)); ctx.stroke();
  ctx.fillStyle = "#555"; ctx.font = "12px system-ui";
  ctx.fillText(x[0].toFixed(2), pad - 10, h - 12);
  ctx.fillText(x[x.length - 1].toFixed(2), w - pad - 20, h - 12);
  ctx.fillText(hi.toPrecision(3), 2, pad - 6);
  ctx.fillText(lo.toPrecision(3), 2, h - pad + 14);
  series.forEach((ys, k) => {
    ctx.strokeStyle = colors[k % colors.length]; ctx.lineWidth = 1.6;
    ctx.beginPath();
    ys.forEach((y, i) => (i ? ctx.lineTo(sx(x[i]), sy(y)) : ctx.moveTo(sx(x[i]), sy(y))));
    ctx.stroke();
  });
}

function guarded(errId, f) {
  try { $(errId).textContent = ""; f(); }
  catch (e) { $(errId).textContent = String(e); }
}

function drawDensity() {
  guarded("d-err", () => {
    const terms = parseInt($("d-terms").value, 10);
    $("d-terms-out").textContent = terms;
    const r = JSON.parse(densityCurve(num("d-q"), num("d-y"), num("d-z"), num("d-r1"), num("d-r2"), terms, 401));
    plot($("d-canvas"), r.x, [r.f_n, r.phi, r.partial], ["#999", "#1f5fbf", "#d9480f"]);
    $("d-info").textContent = `sup |density - partial sum| = ${r.sup_error.toExponential(3)} with ${terms} terms`;
  });
}

const palette = ["#1f5fbf", "#d9480f", "#2b8a3e", "#862e9c", "#e67700", "#0b7285", "#c2255c", "#5c940d"];

function drawHermite() {
  guarded("h-err", () => {
    const q = num("h-q");
    $("h-q-out").textContent = q.toFixed(2);
    const r = JSON.parse(hermiteCurves(q, parseInt($("h-n").value, 10), 401));
    plot($("h-canvas"), r.x, r.curves, palette);
    const n = r.curves.length - 1;
    $("h-info").textContent = Number.isFinite(r.bound[n])
      ? `degree ${n}: sup |H_n| = ${Math.max(...r.curves[n].map(Math.abs)).toPrecision(5)}, bound s_n(q)(1-q)^(-n/2) = ${r.bound[n].toPrecision(5)}`
      : "q = 1: Hermite polynomials on [-4, 4]";
  });
}

function runMoments() {
  guarded("m-err", () => {
    const rows = JSON.parse(momentsTable(num("m-q"), num("m-y"), num("m-z"), num("m-r1"), num("m-r2"), parseInt($("m-n").value, 10)));
    $("m-table").querySelector("tbody").innerHTML = rows
      .map((r) => `<tr><td>${r.n}</td><td>${r.closed_form.toPrecision(12)}</td><td>${r.quadrature_residual.toExponential(2)}</td><td>${r.pass ? "ok" : "FAIL"}</td></tr>`)
      .join("");
  });
}

await init();
for (const id of ["d-q", "d-y", "d-z", "d-r1", "d-r2", "d-terms"]) $(id).addEventListener("input", drawDensity);
for (const id of ["h-q", "h-n"]) $(id).addEventListener("input", drawHermite);
$("m-run").addEventListener("click", runMoments);
drawDensity();
drawHermite();
runMoments();
