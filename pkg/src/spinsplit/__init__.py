"""spinsplit: a symbolic and numerical laboratory for connection-induced
splittings J = L + S of the relativistic angular momentum.

Layers:

* :mod:`spinsplit.scalars`, :mod:`spinsplit.algebra`,
  :mod:`spinsplit.identities` — exact operator algebra over rational
  coefficient functions, with a catalogue of verified identities.
* :mod:`spinsplit.lang` — a small expression language (parser, lowering
  to normal form, round-trip printer).
* :mod:`spinsplit.grid`, :mod:`spinsplit.reps` — momentum-shell grids,
  sections, and discretized generator actions.
* :mod:`spinsplit.connections`, :mod:`spinsplit.splitting` — covariant
  derivatives, curvature, holonomy, Chern numbers, induced splittings,
  the mean position operator and the parallel fiber frame.
* :mod:`spinsplit.report`, :mod:`spinsplit.cli` — suites, reports, CLI.
"""

__version__ = "0.1.0"

__all__ = ["__version__"]
