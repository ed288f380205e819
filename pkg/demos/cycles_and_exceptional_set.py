"""Finite cycles of the {0, 1/4} system and which of them carry W = 1.

Only the fixed point 0 is a W-cycle unless lam = 1 - 1/(2n), where the
fixed point of the second map joins it.
"""
from ifs_harmonic.cycles import exact_wcycle_divisibility, exceptional_set_check, verify_no_long_wcycles

for lam in ("1/3", "1/2", "3/5", "2/3", "3/4", "4/5", "5/6"):
    rep = verify_no_long_wcycles(lam, 8)
    d = exceptional_set_check(lam)
    words = [c["word"] for c in rep.w_one_cycles]
    print(f"lam={lam:>4}  cycles up to period 8: {sum(rep.cycles_checked.values()):3d}  "
          f"W-1-cycles: {words}  in D: {d.in_d}")

# the certificate behind each verdict is a single rational number
for lam, word in (("2/3", (0, 1)), ("1/2", (1,)), ("3/4", (1,)), ("3/4", (0, 1))):
    r = exact_wcycle_divisibility(lam, word)
    print(f"lam={lam} word={word}: 2x/lam = {r.value}, integer: {r.holds}")
