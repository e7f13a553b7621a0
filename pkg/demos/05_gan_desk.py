"""Train a one-dimensional alpha-divergence GAN and watch the held-out divergence fall.

Run: python demos/05_gan_desk.py [config.json]   (default docs/configs/desk_gaussian.json, about a minute)
"""

import json
import sys
from pathlib import Path

from fgamma.ganlab import config_from_dict, train_gan

path = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "docs" / "configs" / "desk_gaussian.json"
cfg, target = config_from_dict(json.loads(path.read_text()))
print(f"target {target.kind} {target.params}, generator {cfg.gen.spec}, n=m={cfg.n}, {cfg.rounds} rounds")

trace = train_gan(cfg, target)
for rnd, val in zip(trace.heldout_rounds, trace.heldout):
    print(f"round {rnd:4d}  held-out divergence {val:.5f}")
s = trace.summary()
print(f"\ninitial {trace.initial_heldout:.5f} -> final {trace.final_heldout:.5f}"
      f" ({100 * trace.final_heldout / trace.initial_heldout:.1f}% of initial), all finite: {s['all_finite']}")
