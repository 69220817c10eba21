"""Additive guarantee when every probe costs the same.

The scheme promises a gain within eps * (top reward) of optimal.  It
either decides probes are cheap enough to treat as free, or coarsens
values onto a grid and searches short probe backbones.  The printed
certificate shows which branch ran and how much enumeration it bought.
"""

import numpy as np

import probeopt as po

inst = po.generate(
    po.GenSpec(n=5, state_count=4, cost_regime="equal", cost_range=(0.12, 0.13)), 7
)
print(f"instance: n={inst.n}, K={inst.state_count}, "
      f"shared probe cost {inst.costs[0]:.4f}")

opt = po.exact_dp(inst).value
print(f"exact optimum: {opt:.6f}\n")

for eps in (0.3, 0.2, 0.1, 0.05):
    res = po.additive_approx(inst, eps)
    cert = res.certificate
    promise = opt - eps * inst.max_reward
    print(f"eps={eps:<5} branch={cert.branch:<13} "
          f"gain={res.report.gain:.6f}  floor={promise:.6f}  "
          f"candidates={cert.candidates}")
    assert res.report.gain >= promise - 1e-9

print("\nthe loose runs decide the shared cost sits under eps * top reward,")
print("treat probes as free, and accept the cheaper policy that comes out;")
print("the strict runs pay for backbone enumeration and land closer, here")
print("on the optimum itself.")
