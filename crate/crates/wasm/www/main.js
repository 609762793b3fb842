import init, { quasienergy_scan, excitation_trace, steady_sweep } from "./pkg/floqlab_wasm.js";

const num = (id) => Number(document.getElementById(id).value);
const drive = () => [num("delta"), num("epsilon"), num("amplitude")];

// rows: flat array with `width` values per row; x = column 0, y = column `col`.
function plot(canvasId, rows, width, col, color, logY = false) {
  const c = document.getElementById(canvasId);
  const g = c.getContext("2d");
  g.clearRect(0, 0, c.width, c.height);
  const xs = [], ys = [];
  for (let i = 0; i + width <= rows.length; i += width) {
    const y = logY ? Math.log10(Math.max(rows[i + col], 1e-16)) : rows[i + col];
    if (Number.isFinite(y)) { xs.push(rows[i]); ys.push(y); }
  }
  if (xs.length < 2) return;
  const [x0, x1] = [Math.min(...xs), Math.max(...xs)];
  const [y0, y1] = [Math.min(...ys), Math.max(...ys) || 1];
  const pad = 30;
  const sx = (x) => pad + (c.width - 2 * pad) * (x - x0) / (x1 - x0 || 1);
  const sy = (y) => c.height - pad - (c.height - 2 * pad) * (y - y0) / (y1 - y0 || 1);
  g.strokeStyle = "#999";
  g.strokeRect(pad, pad, c.width - 2 * pad, c.height - 2 * pad);
  g.fillStyle = "#444";
  g.fillText(x0.toPrecision(4), pad, c.height - 10);
  g.fillText(x1.toPrecision(4), c.width - pad - 40, c.height - 10);
  g.fillText((logY ? "1e" : "") + y1.toPrecision(3), 2, pad - 8);
  g.fillText((logY ? "1e" : "") + y0.toPrecision(3), 2, c.height - pad + 14);
  g.strokeStyle = color;
  g.beginPath();
  xs.forEach((x, i) => (i ? g.lineTo(sx(x), sy(ys[i])) : g.moveTo(sx(x), sy(ys[i]))));
  g.stroke();
}

function wire(button, status, task) {
  document.getElementById(button).addEventListener("click", () => {
    const s = document.getElementById(status);
    s.textContent = "computing…";
    // Yield so the status paints before the synchronous computation.
    setTimeout(() => {
      const t0 = performance.now();
      try {
        const note = task();
        s.textContent = `${note} (${((performance.now() - t0) / 1000).toFixed(2)} s)`;
      } catch (e) {
        s.textContent = `error: ${e.message ?? e}`;
      }
    }, 10);
  });
}

await init();

wire("q-run", "q-status", () => {
  const rows = quasienergy_scan(...drive(), num("q-lo"), num("q-hi"), num("q-n"));
  plot("q-plot", rows, 3, 1, "#1f5fbf");
  return "positive folded quasi-energy μ vs ω₀";
});

wire("d-run", "d-status", () => {
  const rows = excitation_trace(...drive(), num("d-omega"), num("d-n"));
  plot("d-plot", rows, 2, 1, "#bf3f1f");
  let max = 0;
  for (let i = 1; i < rows.length; i += 2) max = Math.max(max, rows[i]);
  return `e_ex(t); max ${max.toExponential(3)}`;
});

wire("s-run", "s-status", () => {
  const rows = steady_sweep(...drive(), num("s-temp"), num("s-lo"), num("s-hi"), num("s-n"));
  plot("s-plot", rows, 3, 2, "#2f8f3f", true);
  return "log₁₀ e_ex^per vs ω₀";
});
