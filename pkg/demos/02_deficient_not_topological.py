"""A deficient topological measure that is not a topological measure.

ν(A) = 1 when A contains the segment [0, 1] of the path [0, 2], else 0.
Splitting the whole path into the point 0 and the rest loses the unit of
mass.  The single-compact criterion finds exactly that split, and the
brute-force additivity scan agrees.  Subadditivity fails too, but only one
subdivision deeper: the two halves of the segment are separate compacts
there.
"""
from dtmlab import build_example, check_dtm_axioms, subadditivity_test, tm_test

lam, nu = build_example("solid_indicator")
sp = nu.space
print("axioms hold:", check_dtm_axioms(sp, nu).passed)
print("ν(X) =", nu(sp.full), " ν({v0}) =", nu(["v0"]),
      " ν(X minus v0) =", nu.value(sp.full & ~sp.mask(["v0"])))

tm = tm_test(nu)
cert = tm.data["certificate"]
print("\ntopological measure:", tm.data["is_tm"], "(criterion and brute force agree:",
      tm.data["agree"], ")")
print(f"certificate: C = {cert['C']['labels']}, gap = {cert['gap']}")

sub = subadditivity_test(nu)
c = sub.data["certificate"]
print("\nsubadditive:", sub.data["subadditive"])
print(f"pair found at {c['resolution']} resolution: {c['C']['labels']} and {c['K']['labels']}")
