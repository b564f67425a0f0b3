"""
Post-selection computes the product, rarely
===========================================

Measuring a (x) b with the projector onto span{|ii>} leaves
lambda * sum_i a_i b_i |ii> on success. For the uniform pair the success
probability is 1/N, so it halves with every added qubit.
"""

from qconv import nogo, postselect, qsim

import numpy as np

rng = np.random.default_rng(6)
a, b = qsim.random_state(2, rng), qsim.random_state(2, rng)
print(f"success probability for a random pair: {postselect.success_probability(a, b):.4f}")
while not (out := postselect.attempt(a, b, rng)).success:
    pass
got = postselect.relabel_diagonal(out.post_state)
want = nogo.target_product(a, b).first_register
print(f"post-selected state vs product target: {np.abs(got.amplitudes - want.amplitudes).max():.1e}")

print(postselect.scan_to_csv(postselect.scan(range(1, 11), "uniform", trials=10_000, seed=0)))
