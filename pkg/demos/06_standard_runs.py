"""Two-valued runs with InputSize and a clock.

An ordinary bounded run can end Indeterminate when the budget runs out.  A
standard run gives the program the input size as an ordinal and a
polynomial microstep clock.  When the clock runs out the answer is Reject,
so every input gets Accept or Reject.
"""

import time

from cpt.corpus import CORPUS
from cpt.engine import Budget, RunMode, parse_poly, run, standard_run
from cpt.structio import gen_naked

p = CORPUS["inputsize-parity"].program()
print(CORPUS["inputsize-parity"].text())

clock = parse_poly("30*n+100")
t0 = time.perf_counter()
verdicts = [standard_run(p, gen_naked(n), clock).verdict.value[0] for n in range(41)]
print("n = 0..40:", "".join(verdicts), f"({time.perf_counter() - t0:.2f}s)")

# with a clock that is too small the run rejects rather than giving up
r = standard_run(p, gen_naked(9), parse_poly("5"))
print("n=9 with clock 5:", r.verdict.value, "exhausted" if r.exhausted else "")

# the same program under an ordinary budget that is too small
r = run(p, gen_naked(9), Budget(parse_poly("2"), None), RunMode(True))
print("n=9 with 2 steps and no clock:", r.verdict.value, r.reason)
