"""When a DTM is subadditive it is the restriction of a measure.

Counting two marked points on a path is subadditive.  Its outer measure is
built from open and closed supersets, every cell subset turns out to be
measurable, and each cell's weight is forced by the values on two opens,
which makes the extension unique.

Length on the same path is a reminder of what resolution costs: the open
stars of two neighbouring vertices each have length 0 (no compact edge fits
inside), yet their union contains a whole edge.
"""
from dtmlab import (DeficientTM, build_example, caratheodory_test, extend_to_measure, lebesgue,
                    outer_measure, path, subadditivity_test)

lam, nu = build_example("point_counting")
sp = nu.space
m = extend_to_measure(nu)
print("cell weights:", {sp.cells[i].label: w for i, w in m.atoms.items() if w})
print("extension checks:", {c.name: c.passed for c in m.report.checks})
table = outer_measure(nu)
print("all subsets measurable:", all(caratheodory_test(table, nu, E) for E in range(sp.full + 1)))

length = DeficientTM.from_function(lebesgue(path(2)))
d = subadditivity_test(length).data
print("\nlength on P2: subadditive on native opens:", d["open_pairs"],
      "| after one subdivision:", d["refined"]["open_pairs"])
