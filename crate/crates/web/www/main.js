import init, { learn, sampleCount, queryBudget } from "./pkg/choi_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function show(id, fn) {
  try {
    $(id).textContent = fn();
  } catch (e) {
    $(id).textContent = `error: ${e.message ?? e}`;
  }
}

await init();

$("learn").addEventListener("click", () =>
  show("learn-out", () => {
    const report = JSON.parse(learn($("model").value, $("pauli").checked, num("samples"), num("seed")));
    return [
      `terms:     ${report.terms.join(", ")}`,
      `estimates: ${report.coeff_estimates.map((c) => c.toFixed(4)).join(", ")}`,
      `α̂²:        ${report.norm_estimate.toFixed(4)}`,
      `l2 error:  ${report.l2_error.toExponential(3)}`,
    ].join("\n");
  }),
);

$("budget").addEventListener("click", () =>
  show("budget-out", () => {
    const args = [num("m"), num("eps"), num("delta"), num("alpha2"), num("cmax")];
    const clifford = sampleCount(...args, false, 1);
    const pauli = sampleCount(...args, true, 2);
    const unitary = JSON.parse(queryBudget(...args, num("t")));
    return [
      `Clifford snapshots:     ${clifford}`,
      `Pauli snapshots (k=2):  ${pauli}`,
      `block-encoded N_s:      ${unitary.n_s}`,
      `preparation attempts:   ${unitary.n_tilde}`,
    ].join("\n");
  }),
);
