"""Cross-check the fast combinatorial update against explicit density matrices.

For every measurement outcome pair (a, b) the dense pipeline projects the
two-copy state onto codespaces, decodes, traces out the first pair and
compares the Bell diagonal with the fast-path prediction.

Run: python3 demos/03_dense_oracle.py
"""

import itertools

import numpy as np

from stabdistill.encoding import canonic_encoding, coset_action
from stabdistill.protocol import fimax_select, generic_step, standard_form_oracle, two_copy_dense
from stabdistill.stabilizer import cosets_in
from stabdistill.states import BdsState, bell_diagonal

rng = np.random.default_rng(1)
d = 3
state = BdsState(d, rng.dirichlet(np.ones(d * d)).reshape(d, d))
choice = fimax_select(state)
stab = choice.stabilizer
enc = canonic_encoding(stab)
rho2 = two_copy_dense(state)

worst = 0.0
for a, b in itertools.product(range(d), repeat=2):
    s = (a - b) % d
    out, prob = standard_form_oracle(rho2, enc, a, b)
    ref = cosets_in(stab, s)[0]
    fast, p_s = generic_step(state, stab, s, ref)
    k, l = coset_action(stab, ref).label
    dense_diag = np.roll(bell_diagonal(out.matrix, d), (-k, -l), axis=(0, 1))
    worst = max(worst, np.abs(dense_diag - fast.probs).max())
    print(f"a={a} b={b}  Prob={prob:.5f}  P(E(s))/d={p_s / d:.5f}")
print("largest deviation between dense and fast path:", worst)
