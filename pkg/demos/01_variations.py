"""Positive, negative and total variation of a signed set function.

Start with three points carrying 2, -3 and 1.  Because the space is discrete
every subset is compact, and the variations split the signs cleanly.  Then
move to a path where two overlapping segments carry +1 and -1: no pair of
disjoint compacts can see both, so the total variation drops below the sum.
"""
from dtmlab import build_example, cell_sum, discrete, variation_identities_suite
from dtmlab.variation import table_for


def show(lam, title):
    t = table_for(lam)
    sp = lam.space
    print(f"\n{title}")
    print(f"{'region':<28}{'plus':>6}{'minus':>7}{'total':>7}")
    for A in sp.admissible_sets():
        p, m, a = t.triple(A)
        print(f"{str(sp.labels(A)):<28}{str(p):>6}{str(m):>7}{str(a):>7}")


lam = cell_sum(discrete(3), {"a": 2, "b": -3, "c": 1})
show(lam, "three weighted points")

gadget, _ = build_example("overlap_gadget")
t = table_for(gadget)
X = gadget.space.full
print(f"\noverlap gadget on the whole path: plus={t.plus(X)} minus={t.minus(X)} total={t.total(X)}")

for name, f in (("points", lam), ("gadget", gadget)):
    rep = variation_identities_suite(f)
    print(f"{name}: {sum(c.passed is True for c in rep.checks)}/{len(rep.checks)} identities hold")
