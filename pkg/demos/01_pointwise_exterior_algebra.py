"""Tour of the fiberwise exterior calculus of an adapted contact coframe.

Everything here is pointwise linear algebra on the exterior algebra of a
single cotangent fiber: the wedge product, the Reeb contraction, the Hodge
star, the Lefschetz pair (wedging with the Levi 2-form and its metric
adjoint), and the primitive decomposition they generate.
"""

import numpy as np

from ruminlab import exterior as ext

print("=" * 72)
print("1. The adapted coframe and its Levi form (n = 2, a 5-dimensional model)")
print("=" * 72)
n = 2
dth = ext.dtheta(n)
print("Levi 2-form in the complex coframe:", dth)
print("same form through the real coframe: ", ext.from_real(n, {(1, 2): 1, (3, 4): 1}))

print()
print("=" * 72)
print("2. Wedge, contraction, star")
print("=" * 72)
alpha = ext.wedge(ext.eps(n, 1), ext.epsbar(n, 2))
print("alpha                  =", alpha)
print("theta ^ alpha          =", ext.theta_wedge(alpha))
print("iota_T(theta ^ alpha)  =", ext.interior_reeb(ext.theta_wedge(alpha)))
print("star(1)  (volume form) =", ext.hodge_star(ext.scalar(n)))
print("star(star(alpha)) - alpha has norm",
      ext.norm(ext.hodge_star(ext.hodge_star(alpha)) - alpha))

print()
print("=" * 72)
print("3. The Lefschetz pair acts as a finite-dimensional sl2")
print("=" * 72)
print("On a horizontal k-form, [L, trace] multiplies by (k - n):")
for k in range(0, 2 * n + 1):
    mons = [ix for ix in ext.monomials(n, k) if not ix.theta]
    if not mons:
        continue
    a = ext.monomial(n, mons[0])
    comm = ext.lefschetz_wedge(ext.lefschetz_trace(a)) - ext.lefschetz_trace(ext.lefschetz_wedge(a))
    ratio = next(iter(comm.coeffs.values())) if comm.coeffs else 0.0
    print(f"  degree {k}: commutator / identity = {complex(ratio).real: .0f}   (expect {k - n})")

print()
print("=" * 72)
print("4. Primitive decomposition")
print("=" * 72)
rng = np.random.default_rng(0)
mons = [ix for ix in ext.monomials(n, 2) if not ix.theta]
a = ext.PointwiseForm(n, {ix: complex(*rng.integers(-3, 4, 2)) for ix in mons})
p = ext.primitive_projection(a)
rest = a - p
print("a                  =", a)
print("primitive part     =", p)
print("trace of primitive =", ext.lefschetz_trace(p))
print("trace of remainder (a Lefschetz image):", ext.lefschetz_trace(rest))
print("self-adjointness: <Pa, a> - <a, Pa> =",
      ext.inner_product(p, a) - ext.inner_product(a, p))

print()
print("=" * 72)
print("5. Star exchanges primitive forms and theta ^ (ker L)")
print("=" * 72)
prim = ext.primitive_projection(ext.PointwiseForm(1, {ext.CoframeIndex(False, (1,), ()): 1.0}))
img = ext.hodge_star(prim)
print("n = 1 primitive 1-form:", prim)
print("its star image:        ", img)
print("L applied to the horizontal part of the image:",
      ext.lefschetz_wedge(ext.interior_reeb(img)))
