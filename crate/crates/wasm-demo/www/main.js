// Expects the output of
//   wasm-bindgen --target web --out-dir www/pkg target/wasm32-unknown-unknown/release/cliffsym_wasm.wasm
import init, { model, symmetries, sectors } from "./pkg/cliffsym_wasm.js";

const $ = (id) => document.getElementById(id);

function show(target, html) {
  $(target).innerHTML = html;
}

function guard(target, f) {
  try {
    f();
  } catch (e) {
    show(target, `<p class="err">${String(e)}</p>`);
  }
}

function table(head, rows) {
  const th = head.map((h) => `<th>${h}</th>`).join("");
  const tr = rows.map((r) => `<tr>${r.map((c) => `<td>${c}</td>`).join("")}</tr>`).join("");
  return `<table><tr>${th}</tr>${tr}</table>`;
}

const fmt = (x) => x.toFixed(6);
const cplx = ([re, im]) => `${re.toFixed(3)}${im < 0 ? "−" : "+"}${Math.abs(im).toFixed(3)}i`;

function generate() {
  guard("symtable", () => {
    $("ham").value = model($("family").value, Number($("size").value), BigInt($("seed").value));
  });
}

function findSymmetries() {
  guard("symtable", () => {
    const out = JSON.parse(symmetries($("ham").value));
    $("raw").textContent = JSON.stringify(out, null, 2);
    if (out.symmetries.length === 0) {
      show("symtable", `<p>No nontrivial symmetry (search ${out.complete ? "complete" : "hit its budget"}).</p>`);
      return;
    }
    const rows = out.symmetries.map((s, i) => [
      i,
      s.moved_terms,
      s.gates,
      s.qubit_cost_before,
      s.qubit_cost,
      s.blocks.map((b) => `{${b.join(",")}}`).join(" "),
    ]);
    show("symtable", table(["#", "terms moved", "gates", "Q before", "Q after", "blocks"], rows));
  });
}

function splitSectors() {
  guard("sectable", () => {
    const out = JSON.parse(sectors($("ham").value));
    $("raw").textContent = JSON.stringify(out, null, 2);
    const rows = out.leaves.map((l) => [
      l.path.join("."),
      l.lambdas.map(cplx).join(", "),
      l.site_dims.join("×") || "1",
      l.terms,
      fmt(l.spectrum[0]),
    ]);
    const head = `<p>${out.leaves.length} sectors; largest spectrum mismatch vs. the full Hamiltonian: ${out.max_spectrum_difference.toExponential(2)}</p>`;
    show("sectable", head + table(["path", "λ", "sites", "terms", "lowest energy"], rows));
  });
}

await init();
$("gen").onclick = generate;
$("find").onclick = findSymmetries;
$("split").onclick = splitSectors;
generate();
