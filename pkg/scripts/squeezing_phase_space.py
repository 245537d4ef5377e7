"""Oscillator Q-function at the two-qubit entropy minimum near omega t = 6600."""

import matplotlib.pyplot as plt

from _common import outdir, parser
from parametric_rabi import acceptance
from parametric_rabi import dynamics as dyn
from parametric_rabi import observables as obs


def main():
    p = parser(__doc__.splitlines()[0], "squeezing")
    p.add_argument("--t-center", type=float, default=6600.0)
    p.add_argument("--window", type=float, default=10.0)
    args = p.parse_args()
    out = outdir(args.out)
    state = acceptance.prepare("squeezing")
    t_min, s_min = acceptance.squeezing_point(state, args.t_center, args.window)
    evo = dyn.evolve(state, t_min)
    rho_o = dyn.oscillator_rdm(evo)
    quad = obs.quadrature_variance(rho_o)
    field = obs.husimi_q(rho_o)
    print(f"t={t_min:g}  S={s_min:.5f}  V_min={quad.v_min:.5f}  peak={field.peak():.4f}")

    fig, ax = plt.subplots(figsize=(5, 4.5))
    ax.contourf(field.re, field.im, field.q, levels=40)
    ax.set_xlabel(r"Re $\beta$")
    ax.set_ylabel(r"Im $\beta$")
    ax.set_aspect("equal")
    fig.tight_layout()
    fig.savefig(out / "husimi.png", dpi=150)


if __name__ == "__main__":
    main()
