"""Population inversion for identical qubits over two revival periods.

Marks the detected revival peaks next to the closed-form estimates.
"""

import matplotlib.pyplot as plt
import numpy as np

from _common import outdir, parser
from parametric_rabi import acceptance
from parametric_rabi.model import revival_time_estimate
from parametric_rabi.observables import detect_revivals


def main():
    p = parser(__doc__.splitlines()[0], "revivals")
    p.add_argument("--t-end", type=float, default=160000.0)
    p.add_argument("--dt", type=float, default=1.0)
    args = p.parse_args()
    out = outdir(args.out)
    state = acceptance.prepare("revival")
    t, w = acceptance.revival_series(state, args.t_end, args.dt)
    peaks = [x for x in detect_revivals(t, w) if x > 0]
    est = [revival_time_estimate(state.params, state.frame, k) for k in (1, 2)]
    print("peaks:", peaks)
    print("estimates:", est)
    np.savetxt(out / "inversion.csv", np.column_stack([t, w]), delimiter=",", header="omega_t,inversion", comments="")

    fig, ax = plt.subplots(figsize=(8, 3.5))
    ax.plot(t, w, lw=0.3)
    for x in est:
        ax.axvline(x, color="C3", lw=0.8, ls="--")
    ax.set_xlabel(r"$\omega t$")
    ax.set_ylabel("inversion")
    fig.tight_layout()
    fig.savefig(out / "revivals.png", dpi=150)


if __name__ == "__main__":
    main()
