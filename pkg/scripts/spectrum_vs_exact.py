"""Adiabatic levels against dense diagonalization while sweeping g."""

import matplotlib.pyplot as plt
import numpy as np

from _common import outdir, parser
from parametric_rabi import oracle
from parametric_rabi.model import ModelParams, adiabatic_spectrum


def main():
    p = parser(__doc__.splitlines()[0], "spectrum")
    p.add_argument("--levels", type=int, default=12)
    p.add_argument("--n-fock", type=int, default=160)
    args = p.parse_args()
    out = outdir(args.out)
    gs = np.linspace(0.0, 0.45, 19)
    approx, exact = [], []
    for g in gs:
        params = ModelParams(delta1=0.1, delta2=0.08, lambda1=0.05, lambda2=0.03, g=g)
        approx.append(adiabatic_spectrum(params, args.levels // 4 + 4)[: args.levels])
        exact.append(oracle.exact_spectrum(oracle.build_full_hamiltonian(params, args.n_fock), args.levels))
    approx, exact = np.array(approx), np.array(exact)
    print(f"max |E_adiabatic - E_exact| = {np.max(np.abs(approx - exact)):.3e}")

    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.plot(gs, exact, color="k", lw=1)
    ax.plot(gs, approx, "o", ms=2.5, color="C1")
    ax.set_xlabel(r"$g/\omega$")
    ax.set_ylabel(r"$E/\omega$")
    fig.tight_layout()
    fig.savefig(out / "spectrum.png", dpi=150)


if __name__ == "__main__":
    main()
