"""Overlaid phase profiles from a snapshot CSV.

Accepts either HJ snapshots (columns t, x, phi) or kinetic snapshots
(t, x, v, f, phi_eps); kinetic data is reduced to the velocity minimum of
the phase per position.  One curve per sampled time; the region where the
latest profile vanishes (the nullset) is shaded.
"""

import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .csv_data import BadArtifact, read_table

ZERO_TOL = 1e-6


def load_profiles(path: str):
    """Return (times, list of (x, phi)) from an HJ or kinetic snapshot CSV."""
    meta, cols = read_table(path, required=("t", "x"))
    if "phi" in cols:
        phi = cols["phi"]
    elif "phi_eps" in cols:
        phi = cols["phi_eps"]
    else:
        raise BadArtifact(f"{path}: need a 'phi' or 'phi_eps' column")
    t, x = cols["t"], cols["x"]
    profiles = []
    for tv in np.unique(t):
        mask = t == tv
        xs = x[mask]
        ps = phi[mask]
        # kinetic files carry one row per (x, v): reduce over v
        ux, inverse = np.unique(xs, return_inverse=True)
        reduced = np.full(ux.size, np.inf)
        np.minimum.at(reduced, inverse, ps)
        profiles.append((tv, ux, reduced))
    return meta, profiles


def render(path: str, out_path: str) -> int:
    meta, profiles = load_profiles(path)
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for tv, xs, ps in profiles:
        ax.plot(xs, ps, lw=1.2, label=f"t = {tv:g}")
    tv, xs, ps = profiles[-1]
    nullset = ps < ZERO_TOL
    if nullset.any():
        ax.axvspan(xs[nullset][0], xs[nullset][-1], color="tab:green",
                   alpha=0.15, label="nullset (latest)")
    ax.set_xlabel("x")
    ax.set_ylabel("phase")
    ax.legend(fontsize=8)
    ax.set_title("phase profiles")
    fig.tight_layout()
    fig.savefig(out_path, dpi=130)
    plt.close(fig)
    return len(profiles)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    if len(argv) != 2:
        print("usage: plot-phase-snapshots SNAPSHOT_CSV OUT_IMAGE", file=sys.stderr)
        return 2
    try:
        count = render(*argv)
    except BadArtifact as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {argv[1]} ({count} profiles)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
