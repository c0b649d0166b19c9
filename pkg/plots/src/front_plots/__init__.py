"""Figure regeneration from kinetic-fronts CSV artifacts.

Two batch scripts, one per figure, path arguments only:

* ``plot-front-comparison BGK_FRONT_CSV KPP_FRONT_CSV OUT_IMAGE`` --
  two panels of front position against time with fitted-speed and
  predicted-speed annotations;
* ``plot-phase-snapshots SNAPSHOT_CSV OUT_IMAGE`` -- phase profiles at the
  sampled times with the nullset shaded.

The scripts only read the documented CSV columns and never touch the solver
package; reruns write byte-identical images (PNG carries no timestamps).
"""

__version__ = "0.1.0"
