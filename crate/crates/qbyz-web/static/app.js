// Wires the static page to the wasm bindings. Build the module next to this
// file first:  wasm-pack build crates/qbyz-web --target web --out-dir static/pkg
import init, {
  efficiency_curves,
  run_broadcast_demo,
  run_clock_sync_demo,
} from "./pkg/qbyz_web.js";

const COLORS = ["#58a6ff", "#d29922", "#f85149"];
const $ = (id) => document.getElementById(id);

function badge(ok, labelOk, labelFail) {
  return `<span class="badge ${ok ? "ok" : "fail"}">${ok ? labelOk : labelFail}</span>`;
}

// ---------------------------------------------------------------------------
// efficiency curves

function drawCurves() {
  const m = Number($("effM").value);
  $("effMLabel").textContent = `= ${m}`;
  const data = JSON.parse(efficiency_curves(m, 96));
  if (data.error) {
    $("effStat").textContent = data.error;
    return;
  }
  const canvas = $("effCanvas");
  const ctx = canvas.getContext("2d");
  const { width: W, height: H } = canvas;
  const pad = { l: 48, r: 14, t: 12, b: 34 };
  ctx.clearRect(0, 0, W, H);

  const x = (eta) => pad.l + eta * (W - pad.l - pad.r);
  const y = (p) => H - pad.b - p * (H - pad.t - pad.b);

  ctx.strokeStyle = "#2c3743";
  ctx.fillStyle = "#8b98a5";
  ctx.font = "12px system-ui";
  ctx.lineWidth = 1;
  for (let i = 0; i <= 10; i++) {
    const v = i / 10;
    ctx.beginPath();
    ctx.moveTo(x(v), H - pad.b);
    ctx.lineTo(x(v), pad.t);
    ctx.globalAlpha = i % 5 === 0 ? 0.7 : 0.25;
    ctx.stroke();
    ctx.globalAlpha = 1;
    if (i % 2 === 0) ctx.fillText(v.toFixed(1), x(v) - 8, H - pad.b + 18);
    ctx.beginPath();
    ctx.moveTo(pad.l, y(v));
    ctx.lineTo(W - pad.r, y(v));
    ctx.globalAlpha = i % 5 === 0 ? 0.7 : 0.25;
    ctx.stroke();
    ctx.globalAlpha = 1;
    if (i % 2 === 0) ctx.fillText(v.toFixed(1), 16, y(v) + 4);
  }
  ctx.fillText("detector efficiency η", W / 2 - 50, H - 6);
  ctx.save();
  ctx.translate(12, H / 2 + 40);
  ctx.rotate(-Math.PI / 2);
  ctx.fillText("success probability", 0, 0);
  ctx.restore();

  data.schemes.forEach((scheme, i) => {
    ctx.strokeStyle = COLORS[i];
    ctx.lineWidth = 2;
    ctx.beginPath();
    scheme.points.forEach((pt, j) => {
      if (j === 0) ctx.moveTo(x(pt.eta), y(pt.p));
      else ctx.lineTo(x(pt.eta), y(pt.p));
    });
    ctx.stroke();
  });

  const det = data.schemes.map(
    (s) => `${s.scheme.replace(/_/g, " ")}: ${s.detections_per_position} detection(s)/position`
  );
  $("effStat").textContent =
    `${det.join(" · ")} — list types needed: ${data.list_types.relay_patterns}` +
    ` (vs ${data.list_types.permutation_lists} permutation lists)`;
}

// ---------------------------------------------------------------------------
// broadcast round

const STRATEGIES = [
  ["honest", "honest"],
  ["crash", "crash (silent)"],
  ["bot", "always ⊥"],
  ["flip-forged", "flip + forged list"],
  ["flip-random", "flip + random list"],
  ["split", "split values"],
];

function rebuildDbaControls() {
  const m = Number($("dbaM").value);
  const holder = $("dbaFaults");
  holder.innerHTML = "";
  for (let p = 0; p < m; p++) {
    const label = document.createElement("label");
    label.textContent = `p${p} strategy`;
    const sel = document.createElement("select");
    sel.id = `dbaStrat${p}`;
    for (const [value, text] of STRATEGIES) {
      const opt = document.createElement("option");
      opt.value = value;
      opt.textContent = text;
      sel.appendChild(opt);
    }
    label.appendChild(sel);
    holder.appendChild(label);
  }
}

function runDba() {
  const m = Number($("dbaM").value);
  const faults = {};
  for (let p = 0; p < m; p++) {
    const s = $(`dbaStrat${p}`).value;
    if (s !== "honest") faults[p] = s;
  }
  const out = JSON.parse(
    run_broadcast_demo(
      m,
      Number($("dbaValue").value),
      Number($("dbaL").value),
      Number($("dbaSeed").value),
      JSON.stringify(faults)
    )
  );
  if (out.error) {
    $("dbaOut").innerHTML = `<span class="badge fail">${out.error}</span>`;
    return;
  }
  const rows = out.verdicts
    .map((v) => {
      const decision =
        v.decision === "abort"
          ? `<span class="badge fail">abort</span>`
          : `<span class="badge ok">value ${v.decision.value}</span>`;
      const suspected = v.suspected.length
        ? v.suspected.map((s) => `p${s}`).join(", ")
        : "—";
      return `<tr>
        <td>p${v.process}${v.honest ? "" : " (faulty)"}${v.advisory ? " (advisory)" : ""}</td>
        <td>${decision}</td>
        <td><span class="badge case">${v.case}</span></td>
        <td>${suspected}</td>
      </tr>`;
    })
    .join("");
  $("dbaOut").innerHTML = `
    <table>
      <thead><tr><th>process</th><th>verdict</th><th>analysis case</th><th>suspects</th></tr></thead>
      <tbody>${rows}</tbody>
    </table>
    <div class="stat">
      ${out.message_count} protocol messages ·
      ${out.channel_rounds} channel rounds to distribute the lists ·
      agreement ${badge(out.agreement, "holds", "violated")} ·
      validity ${badge(out.validity, "holds", "violated")}
    </div>`;
}

// ---------------------------------------------------------------------------
// clock sync

function rebuildLiarOptions() {
  const offsets = parseOffsets();
  const sel = $("csLiar");
  const prev = sel.value;
  sel.innerHTML = "";
  const none = document.createElement("option");
  none.value = "-1";
  none.textContent = "nobody";
  sel.appendChild(none);
  offsets.forEach((_, i) => {
    const opt = document.createElement("option");
    opt.value = String(i);
    opt.textContent = `p${i}`;
    sel.appendChild(opt);
  });
  if ([...sel.options].some((o) => o.value === prev)) sel.value = prev;
}

function parseOffsets() {
  return $("csOffsets")
    .value.split(",")
    .map((s) => Number(s.trim()))
    .filter((v) => Number.isFinite(v));
}

function runClockSync() {
  const offsets = parseOffsets();
  const out = JSON.parse(
    run_clock_sync_demo(
      JSON.stringify(offsets),
      7,
      64,
      Number($("csSeed").value),
      Number($("csLiar").value),
      Number($("csLie").value)
    )
  );
  if (out.error) {
    $("csOut").innerHTML = `<span class="badge fail">${out.error}</span>`;
    return;
  }
  drawClocks(out);
  const rejected = out.rejected_sources.length
    ? out.rejected_sources.map((p) => `p${p}`).join(", ")
    : "none";
  $("csOut").innerHTML =
    `C1 ${badge(out.c1, "holds", "violated")} · C2 ${badge(out.c2, "holds", "violated")}` +
    (out.aborted ? ` · <span class="badge warn">round aborted — clocks unchanged</span>` : "") +
    ` · rejected sources: ${rejected}` +
    ` · adjustments: [${out.adjustments.join(", ")}]`;
}

function drawClocks(out) {
  const canvas = $("csCanvas");
  const ctx = canvas.getContext("2d");
  const { width: W, height: H } = canvas;
  ctx.clearRect(0, 0, W, H);
  const m = out.before.length;
  const all = [...out.before, ...out.after, 0];
  const lo = Math.min(...all) - 2;
  const hi = Math.max(...all) + 2;
  const x = (i, half) => 60 + (i + (half ? 0.42 : 0)) * ((W - 100) / m);
  const y = (v) => 24 + (hi - v) * ((H - 60) / (hi - lo));
  const bw = ((W - 100) / m) * 0.36;

  ctx.strokeStyle = "#2c3743";
  ctx.beginPath();
  ctx.moveTo(40, y(0));
  ctx.lineTo(W - 20, y(0));
  ctx.stroke();
  ctx.fillStyle = "#8b98a5";
  ctx.font = "12px system-ui";
  ctx.fillText("0", 24, y(0) + 4);

  for (let i = 0; i < m; i++) {
    const liar = Number($("csLiar").value) === i;
    ctx.fillStyle = liar ? "#f85149" : "#8b98a5";
    const b = out.before[i];
    ctx.globalAlpha = 0.55;
    ctx.fillRect(x(i, false), Math.min(y(b), y(0)), bw, Math.abs(y(b) - y(0)) || 1);
    ctx.globalAlpha = 1;
    ctx.fillStyle = liar ? "#f85149" : "#3fb950";
    const a = out.after[i];
    ctx.fillRect(x(i, true), Math.min(y(a), y(0)), bw, Math.abs(y(a) - y(0)) || 1);
    ctx.fillStyle = "#8b98a5";
    ctx.fillText(`p${i}${liar ? " (liar)" : ""}`, x(i, false) + 2, H - 12);
    ctx.fillText(`${b}→${a}`, x(i, false) + 2, 16);
  }
}

// ---------------------------------------------------------------------------

async function main() {
  await init();
  for (let m = 2; m <= 10; m++) {
    const opt = document.createElement("option");
    opt.textContent = String(m);
    if (m === 4) opt.selected = true;
    $("dbaM").appendChild(opt);
  }
  rebuildDbaControls();
  rebuildLiarOptions();
  $("effM").addEventListener("input", drawCurves);
  $("dbaM").addEventListener("change", rebuildDbaControls);
  $("dbaRun").addEventListener("click", runDba);
  $("csOffsets").addEventListener("change", rebuildLiarOptions);
  $("csRun").addEventListener("click", runClockSync);
  $("loading").hidden = true;
  $("app").hidden = false;
  drawCurves();
  runDba();
  runClockSync();
}

main();
