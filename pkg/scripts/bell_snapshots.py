"""Two-qubit state from the product start at the two near-Bell times.

Writes ``bell_snapshots.json`` and a plot of concurrence and purity over
``0 <= omega t <= 600`` with the snapshot times marked.
"""

import json

import matplotlib.pyplot as plt
import numpy as np

from _common import outdir, parser
from parametric_rabi import acceptance, qmat
from parametric_rabi import dynamics as dyn
from parametric_rabi import observables as obs


def main():
    args = parser(__doc__.splitlines()[0], "bell").parse_args()
    out = outdir(args.out)
    state = acceptance.prepare("bell")
    rows = []
    for t in (303.0, 501.0):
        rho = dyn.two_qubit_rdm(dyn.evolve(state, t))
        coeffs, d = obs.bell_reconstruct(rho)
        rows.append({
            "omega_t": t,
            "concurrence": obs.concurrence(rho),
            "purity": qmat.purity(rho),
            "d_min": d,
            "amplitudes": {k: [v.real, v.imag] for k, v in zip(obs.BELL_LABELS, coeffs.as_array())},
        })
        print(f"t={t:g}  C={rows[-1]['concurrence']:.4f}  P={rows[-1]['purity']:.4f}  d_min={d:.4f}  {coeffs.dominant()}")
    (out / "bell_snapshots.json").write_text(json.dumps(rows, indent=2))

    times = np.linspace(0, 600, 1201)
    rdms = dyn.two_qubit_rdm_series(state, times)
    fig, ax = plt.subplots(figsize=(7, 3.5))
    ax.plot(times, [obs.concurrence(r) for r in rdms], label="concurrence")
    ax.plot(times, [qmat.purity(r) for r in rdms], label="purity")
    for r in rows:
        ax.axvline(r["omega_t"], color="0.6", lw=0.8, ls="--")
    ax.set_xlabel(r"$\omega t$")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out / "bell_snapshots.png", dpi=150)


if __name__ == "__main__":
    main()
