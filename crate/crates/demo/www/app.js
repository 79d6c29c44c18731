import init, { error_profile, reduce, sample_bound } from "./pkg/halfspace_demo.js";

const PRESETS = {
  aptt: {
    op: "T", ops: "T,S",
    problem: {
      model: "sequence",
      operators: {
        T: [{ offset: 1, exceptions: { "0": "1" } }, { offset: 3, exceptions: { "-1": "1" } }],
        S: [{ offset: 3, exceptions: { "0": "1" } }],
      },
      subspaces: { Y: { cutoff: 0 } },
    },
  },
  perturbed: {
    op: "B", ops: "B,B3",
    problem: {
      model: "sequence",
      operators: {
        B: [{ offset: -1, left_value: "1", right_value: "1" }],
        B3: [{ offset: -3, left_value: "1", right_value: "1" }],
      },
      subspaces: { Y: { cutoff: -1, window: [{ "0": "1", "5": "1" }] } },
    },
  },
  shift: {
    op: "T", ops: "T",
    problem: {
      model: "sequence",
      operators: { T: [{ offset: 1, left_value: "1", right_value: "1" }] },
      subspaces: { Y: { cutoff: 0 } },
    },
  },
};

const $ = (id) => document.getElementById(id);
const SVG = "http://www.w3.org/2000/svg";

function el(name, attrs, text) {
  const node = document.createElementNS(SVG, name);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  if (text !== undefined) node.textContent = text;
  return node;
}

function clear(svg) {
  while (svg.firstChild) svg.removeChild(svg.firstChild);
}

function show(result) {
  const out = $("out");
  if (result.error) {
    out.className = "error";
    out.textContent = "error: " + result.error;
    return false;
  }
  out.className = "";
  out.textContent = result.text ?? "";
  return true;
}

// Bar chart of a list of counts; `label` names the x axis.
function drawBars(values, label, title) {
  const svg = $("chart");
  clear(svg);
  const w = +svg.getAttribute("width"), h = +svg.getAttribute("height");
  const pad = 28, top = Math.max(1, ...values);
  const step = (w - 2 * pad) / Math.max(1, values.length);
  svg.appendChild(el("text", { x: pad, y: 14, "font-size": 12 }, title));
  svg.appendChild(el("line", { x1: pad, y1: h - pad, x2: w - pad, y2: h - pad, stroke: "#888" }));
  values.forEach((v, i) => {
    const bh = (v / top) * (h - 2 * pad - 10);
    const x = pad + i * step;
    svg.appendChild(el("rect", { x: x + 2, y: h - pad - bh, width: step - 4, height: bh, fill: "#4a78b5" }));
    svg.appendChild(el("text", { x: x + step / 2, y: h - pad - bh - 3, "font-size": 10, "text-anchor": "middle" }, v));
    svg.appendChild(el("text", { x: x + step / 2, y: h - pad + 13, "font-size": 10, "text-anchor": "middle" }, i + 1));
  });
  svg.appendChild(el("text", { x: w - pad, y: h - 4, "font-size": 11, "text-anchor": "end" }, label));
}

// Matrix entries around the cutoff; shaded rows are coordinates inside the tail.
function drawBand(band, cutoff) {
  const svg = $("band");
  clear(svg);
  const n = band.hi - band.lo + 1;
  const size = Math.min(20, (+svg.getAttribute("height") - 30) / n);
  const ox = 30, oy = 20;
  svg.appendChild(el("text", { x: ox, y: 13, "font-size": 12 }, "entries of T (row i, column j), cutoff " + cutoff));
  for (let r = 0; r < n; r++) {
    const i = band.lo + r;
    if (i <= cutoff) {
      svg.appendChild(el("rect", { x: ox, y: oy + r * size, width: n * size, height: size, fill: "#eef3ea" }));
    }
    svg.appendChild(el("text", { x: ox - 4, y: oy + r * size + size * 0.7, "font-size": 9, "text-anchor": "end" }, i));
  }
  const line = oy + (cutoff - band.lo + 1) * size;
  svg.appendChild(el("line", { x1: ox, y1: line, x2: ox + n * size, y2: line, stroke: "#3a7", "stroke-width": 2 }));
  svg.appendChild(el("rect", { x: ox, y: oy, width: n * size, height: n * size, fill: "none", stroke: "#aaa" }));
  for (const e of band.entries) {
    const x = ox + (e.col - band.lo) * size, y = oy + (e.row - band.lo) * size;
    svg.appendChild(el("rect", { x: x + 1, y: y + 1, width: size - 2, height: size - 2, fill: "#d9534f", opacity: 0.8 }));
    if (size >= 14) {
      svg.appendChild(el("text", { x: x + size / 2, y: y + size * 0.7, "font-size": 8, "text-anchor": "middle", fill: "#fff" }, e.value));
    }
  }
}

function problemText() {
  return $("problem").value;
}

function loadPreset(key) {
  const p = PRESETS[key];
  $("problem").value = JSON.stringify(p.problem, null, 2);
  $("op").value = p.op;
  $("ops").value = p.ops;
  $("space").value = "Y";
}

function runProfile() {
  const r = JSON.parse(error_profile(problemText(), $("op").value, $("space").value, +$("m").value));
  if (!show(r)) return;
  $("out").textContent = "d = " + r.d + "\nprofile: " + r.profile.join(" ") + "\nY: " + r.space.text;
  drawBars(r.profile, "m", "d(Y, T^m)");
  drawBand(r.band, r.space.cutoff);
}

function runReduce() {
  const r = JSON.parse(reduce(problemText(), $("op").value, $("space").value, +$("depth").value));
  if (!show(r)) return;
  const ds = [r.initial_d, ...r.moves.map((m) => m.d)];
  drawBars(ds, "step", "d along the trace (step 1 = start)");
}

function runSample() {
  const r = JSON.parse(sample_bound(problemText(), $("ops").value, $("space").value,
    +$("degree").value, +$("samples").value, BigInt($("seed").value || 0)));
  if (!show(r)) return;
  drawBars(r.rows.map((row) => row.max_d), "degree", "max sampled d up to each degree");
}

await init();
$("preset").addEventListener("change", (e) => loadPreset(e.target.value));
$("run-profile").addEventListener("click", runProfile);
$("run-reduce").addEventListener("click", runReduce);
$("run-sample").addEventListener("click", runSample);
loadPreset("aptt");
runProfile();
