"""Two-panel front-trajectory figure: kinetic (BGK) vs quadratic (KPP).

Each panel shows the measured front position against time, the straight
line fitted over the second half of the samples, and the spectral
prediction c* as a dashed reference through the same anchor point.  The
fitted slopes are returned so callers can check the expected ordering
(the quadratic Hamiltonian spreads faster than any bounded-velocity one).
"""

import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .csv_data import BadArtifact, read_table


def fit_speed(t: np.ndarray, x: np.ndarray) -> float:
    """Least-squares slope over the second half of the finite samples."""
    keep = np.isfinite(x) & (t >= 0.5 * t[-1])
    if keep.sum() < 2:
        raise BadArtifact("not enough finite front samples to fit a speed")
    return float(np.polyfit(t[keep], x[keep], 1)[0])


def render(bgk_csv: str, kpp_csv: str, out_path: str) -> dict:
    """Draw the figure; returns {'bgk': slope, 'kpp': slope}."""
    panels = []
    for label, path in (("BGK", bgk_csv), ("KPP", kpp_csv)):
        meta, cols = read_table(path, required=("t", "front_x"))
        panels.append((label, meta, cols["t"], cols["front_x"]))

    fig, axes = plt.subplots(1, 2, figsize=(9.6, 4.0), sharex=False)
    slopes = {}
    for ax, (label, meta, t, x) in zip(axes, panels):
        slope = fit_speed(t, x)
        slopes[label.lower()] = slope
        finite = np.isfinite(x)
        ax.plot(t[finite], x[finite], ".", ms=3.5, color="tab:blue",
                label="front position")
        anchor_t = t[finite][-1]
        anchor_x = x[finite][-1]
        tt = np.array([t[finite][0], anchor_t])
        ax.plot(tt, anchor_x + slope * (tt - anchor_t), "-", lw=1.2,
                color="tab:orange", label=f"fit: {slope:.3f}")
        c_star = meta.get("predicted_c_star")
        if c_star is not None:
            c_star = float(c_star)
            ax.plot(tt, anchor_x + c_star * (tt - anchor_t), "--", lw=1.0,
                    color="tab:green", label=f"c* = {c_star:.3f}")
        ax.set_title(f"{label} Hamiltonian")
        ax.set_xlabel("t")
        ax.set_ylabel("front position")
        ax.legend(loc="upper left", fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path, dpi=130)
    plt.close(fig)
    return slopes


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    if len(argv) != 3:
        print("usage: plot-front-comparison BGK_FRONT_CSV KPP_FRONT_CSV OUT_IMAGE",
              file=sys.stderr)
        return 2
    try:
        slopes = render(*argv)
    except BadArtifact as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {argv[2]} (fitted speeds: bgk {slopes['bgk']:.4f}, "
          f"kpp {slopes['kpp']:.4f})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
