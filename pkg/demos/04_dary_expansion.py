"""Digit chains as Markov chains on [0, 1).

A history of base-D digits is the point x = sum_j x_{-j} D^-j; appending a
digit g moves it to (g + x) / D. A perfect sample of the last l digits is
a perfect sample of the point up to resolution D^-l.
"""

import numpy as np

from regensim import DaryState, FiniteOrderSpec, UniformField, dary_perfect_marginal, dary_trajectory

for state in dary_trajectory([1, 0, 1], base=2, resolution=4):
    print("digits", state.digits, "-> interval", state.interval)

# a sticky binary digit chain: the point clusters near 0 and 1
spec = FiniteOrderSpec((0, 1), 1, [[0.9, 0.1], [0.1, 0.9]])
schedule = spec.schedule()
cells = [dary_perfect_marginal(spec, schedule, 4, UniformField(i)).cell for i in range(20_000)]
hist = np.bincount(cells, minlength=16) / len(cells)
for c, p in enumerate(hist):
    print(f"[{c / 16:.4f}, {(c + 1) / 16:.4f})  {'#' * int(200 * p)}")
