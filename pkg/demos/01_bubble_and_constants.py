"""The standard bubble family and its dimension constants.

Walks through: the closed-form bubble, the constants A, B and the Sobolev
level as radial Beta integrals, the kernel of the linearized operator, and
the dilation pairing that loses exactly one mass unit.
"""

import math

import numpy as np

import spikekit as sk

PI3 = math.pi**3

ctx = sk.make_context(6)
print("dimension constants at n = 6")
print(f"  c_n            = {ctx.c_n:g}")
print(f"  omega_n        = {ctx.omega_n:.12f}   (pi^3 = {PI3:.12f})")
print(f"  A              = {ctx.a_const:.10f}   (96 pi^3)")
print(f"  B              = {ctx.b_const:.10f}   (equal to A only at n = 6)")
print(f"  Sobolev level  = {ctx.sobolev_level:.10f}   (230.4 pi^3)")

p = sk.BubbleParams(np.zeros(6), 1.0)
print("\nbubble values: U(0) =", sk.bubble_eval(ctx, p, np.zeros(6)),
      " U(|y|=1) =", sk.bubble_eval(ctx, p, np.eye(6)[0]))

print("\nlinearized operator L(u) = -Lap u - ((n+2)/(n-2)) U^{4/(n-2)} u")
rng = np.random.default_rng(0)
pts = rng.standard_normal((100, 6)) * 0.8
for i in (0, 1, 6):
    sup = np.max(np.abs(sk.linearized_apply(ctx, sk.kernel_field(ctx, i), pts)))
    print(f"  sup |L(psi_{i})| over 100 points = {sup:.2e}")
sup = np.max(np.abs(sk.linearized_apply(ctx, sk.dilation_field(ctx), pts)))
print(f"  sup |L(y.grad U + 2U)|          = {sup:.2e}")

moment = sk.pohozaev_kernel_moment(ctx)
print(f"\ndilation pairing  int U (y.grad U + 2U) = {moment:.10f}")
print(f"minus the mass constant              -B = {-ctx.b_const:.10f}")

print("\nprojected bubble on the unit ball (leading boundary correction):")
ker = sk.ball_kernel(ctx, np.zeros(6), 1.0)
for mu in (50.0, 100.0, 200.0):
    val = sk.projected_bubble_eval(ctx, ker, sk.BubbleParams(np.zeros(6), mu), np.eye(6)[0])
    print(f"  residual on the boundary at mu = {mu:5g}: {val:+.3e}"
          f"   (order mu^-4: {mu**-4:.1e})")
