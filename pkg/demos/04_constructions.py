"""New DTMs from old ones.

Collapsing the marked segment to a point pushes the solid indicator forward
to a point mass, which is a topological measure.  Restricting to open and
closed pieces and taking the open and closed parts all give DTMs again.
"""
from dtmlab import build_example, closed_part, open_part, pushforward, tm_test
from dtmlab.constructions import collapse_first_edge, construction_suite

lam, nu = build_example("solid_indicator")
f = collapse_first_edge(nu.space)
img = pushforward(nu, f)
print("before:", "TM" if tm_test(nu).data["is_tm"] else "not TM",
      "| after collapse:", "TM" if tm_test(img).data["is_tm"] else "not TM",
      "| mass kept:", img(f.target.full) == nu(nu.space.full))

sp = nu.space
V = sp.up_closure(sp.mask(["v0", "v1"]))
F = sp.mask(["v0", "e01", "v1"])
print("open part on", sp.labels(V), "has mass", open_part(nu, V)(sp.full))
print("closed part on", sp.labels(F), "has mass", closed_part(nu, F)(sp.full))

rep = construction_suite(nu)
for c in rep.checks:
    print(f"  {c.name:<30} {c.passed}  ({c.checked} checked)")
