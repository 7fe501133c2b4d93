// Wires the three panels to the wasm exports. Build the pkg/ directory with
//   wasm-pack build crates/hanlink-wasm --target web --out-dir ../../www/pkg
// then serve this directory over HTTP (wasm won't load from file://).

import init, { convert_name, lookup_spellings, impute_tones } from "./pkg/hanlink_wasm.js";

const $ = (id) => document.getElementById(id);

function el(tag, attrs = {}, children = []) {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) {
    if (k === "text") node.textContent = v;
    else if (k === "class") node.className = v;
    else node.setAttribute(k, v);
  }
  for (const child of children) node.appendChild(child);
  return node;
}

function table(headers, rows) {
  const thead = el("thead", {}, [
    el("tr", {}, headers.map((h) => el("th", { text: h }))),
  ]);
  const tbody = el(
    "tbody",
    {},
    rows.map((cells) => el("tr", {}, cells.map((c) =>
      c instanceof Node ? el("td", {}, [c]) : el("td", { text: String(c) })
    )))
  );
  return el("table", {}, [thead, tbody]);
}

function show(target, ...nodes) {
  target.replaceChildren(...nodes);
}

function failed(target, result) {
  if (!result.error) return false;
  show(target, el("p", { class: "error", text: result.error }));
  return true;
}

const SCHEME_LABELS = {
  jyutping: "Jyutping",
  pinyin: "Pinyin (numeric)",
  pinyin_diacritic: "Pinyin (tone marks)",
  pinyin_notone: "Pinyin (toneless)",
  hkg: "Hong Kong spelling",
};

function runConvert() {
  const out = $("convert-out");
  const result = JSON.parse(
    convert_name($("convert-chinese").value, $("convert-english").value)
  );
  if (failed(out, result)) return;

  const tags = el("p", {}, [
    el("span", { class: "tag", text: `surname ${result.surname}` }),
    el("span", { class: "tag", text: `forename ${result.forename}` }),
    el("span", { class: "tag", text: `origin: ${result.origin}` }),
    el("span", { class: "tag", text: `forename kind: ${result.forename_kind}` }),
  ]);
  const rows = Object.entries(result.renderings).map(([scheme, value]) => [
    SCHEME_LABELS[scheme] ?? scheme,
    value,
  ]);
  const nodes = [tags, table(["scheme", "rendering"], rows)];
  if (result.warnings.length > 0) {
    nodes.push(el("p", { class: "muted", text: `note: ${result.warnings.join("; ")}` }));
  }
  show(out, ...nodes);
}

function runSpellings() {
  const out = $("spelling-out");
  const result = JSON.parse(lookup_spellings($("spelling-query").value));
  if (failed(out, result)) return;

  if (result.rows.length === 0) {
    show(out, el("p", { class: "muted", text: "nothing recorded for that query" }));
    return;
  }
  if (result.direction === "character_to_spelling") {
    const rows = result.rows.map((r) => [
      r.character,
      r.canonical ?? "",
      r.variants.join(", "),
    ]);
    show(out, table(["character", "canonical", "all recorded spellings"], rows));
  } else {
    const rows = result.rows.map((r) => [r.character, r.jyutping, r.pinyin]);
    show(out, table([`characters written “${result.token}”`, "jyutping", "pinyin"], rows));
  }
}

function runImpute() {
  const out = $("impute-out");
  const result = JSON.parse(
    impute_tones($("impute-tones").value, $("impute-scheme").value)
  );
  if (failed(out, result)) return;

  const rows = result.candidates.map((c) => {
    const bar = el("span", { class: "bar" });
    bar.style.width = `${Math.round(c.probability * 160)}px`;
    const cell = el("span", {}, [
      bar,
      el("span", { class: "muted", text: ` ${(c.probability * 100).toFixed(1)}%` }),
    ]);
    return [`tone ${c.tone}`, cell];
  });
  show(
    out,
    table(["candidate", "probability"], rows),
    el("p", {
      class: "muted",
      text: `order-${result.order} ${result.scheme} model, bundled corpus`,
    })
  );
}

await init();
$("convert-go").addEventListener("click", runConvert);
$("spelling-go").addEventListener("click", runSpellings);
$("impute-go").addEventListener("click", runImpute);
for (const id of ["convert-chinese", "convert-english", "spelling-query", "impute-tones"]) {
  $(id).addEventListener("keydown", (e) => {
    if (e.key === "Enter") $(`${id.split("-")[0]}-go`).click();
  });
}
runConvert();
runSpellings();
runImpute();
