"""Return probabilities of the house-of-cards chain and the bounds they drive.

rho_m is the chance that the chain climbing with probability a*_x from
height x sits at 0 after m steps. The table is exact; a Monte-Carlo run
shows the agreement, and the bounds follow from partial sums of rho.
"""

import numpy as np

from regensim import (
    ThresholdSchedule,
    UniformField,
    impatience_bound,
    return_frequencies,
    rho_table,
    tau_tail_bound,
)

schedules = {
    "constant 0.8": ThresholdSchedule.constant(0.8),
    "1 - 2^-(k+1)": ThresholdSchedule.geometric(0.5),
    "1 - 0.5/(k+1)": ThresholdSchedule.power(1.0, 0.5),
}

runs, horizon = 200_000, 10
for name, sched in schedules.items():
    table = rho_table(sched, horizon)
    mc = return_frequencies(UniformField(1), sched, runs, horizon) / runs
    print(f"{name:>14}: rho  ", np.round(table.rho[1:6], 4))
    print(f"{'':>14}  MC   ", np.round(mc[1:6], 4))

sched = schedules["1 - 2^-(k+1)"]
print("\nP(s - tau[s, s+2] > m) <=", [round(tau_tail_bound(sched, 0, 2, m), 4) for m in (1, 5, 10, 20)])
print("impatience bias at M = 10, 20:", [round(impatience_bound(sched, 0, 0, m), 5) for m in (10, 20)])
