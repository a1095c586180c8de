"""One FIMAX round on a d = 3 Bell-diagonal state, step by step.

The input puts 0.56 on Omega_{2,1} and 0.055 on every other Bell state. We
look at the best stabilizer, the coset ratios inside the kept syndrome class,
and the corrected output.

Run: python3 demos/02_worked_iteration.py
"""

import numpy as np

from stabdistill.encoding import coset_action
from stabdistill.protocol import fimax_select, fimax_step, generic_step
from stabdistill.stabilizer import cosets_in
from stabdistill.states import BdsState

probs = [0.055] * 9
probs[5] = 0.56  # k-fastest order: position 5 is (k, l) = (2, 1)
state = BdsState.from_list(probs, 3)
print("input fidelity:", state.fidelity())

choice = fimax_select(state)
print("generator (k1,k2,l1,l2):", choice.stabilizer.generator.flat)
print("kept syndrome:", choice.syndrome, " P(E(s)) =", round(choice.success_probability, 5))
print("best coset representative:", choice.coset.representative.flat)
print("coset action label:", choice.action, " correction:", choice.correction)

print("\ncoset ratios P(C)/P(E(s)) in the kept class:")
for c in cosets_in(choice.stabilizer, choice.syndrome):
    out, _ = generic_step(state, choice.stabilizer, choice.syndrome, c)
    print(f"  rep {c.representative.flat}  label {coset_action(choice.stabilizer, c).label}  ratio {out.fidelity():.4f}")

out, rec = fimax_step(state)
print("\noutput Bell probabilities (k-fastest):", np.round(out.to_list(), 4).tolist())
print(f"fidelity {rec.fidelity_before:.4f} -> {rec.fidelity_after:.4f}")
