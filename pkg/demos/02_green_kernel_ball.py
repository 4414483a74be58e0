"""The ball's Dirichlet kernel by the image method.

Shows the singular/regular splitting G = S - H, the boundary matching that
defines the regular part, the Robin function blowing up toward the
boundary, and the closed-form derivative stack against finite differences.
"""

import numpy as np

import spikekit as sk
from spikekit import fd

ctx = sk.make_context(6)
ker = sk.ball_kernel(ctx, np.zeros(6), 1.0)

x = np.array([0.3, 0.1, 0.0, 0.0, 0.0, 0.0])
y = np.array([-0.2, 0.4, 0.1, 0.0, 0.0, 0.0])
print("splitting at a sample pair:")
print(f"  S(x,y) = {ker.singular(x, y):.8f}")
print(f"  H(x,y) = {ker.regular(x, y):.8f}")
print(f"  G(x,y) = {ker.green(x, y):.8f}  (symmetric: {ker.green(y, x):.8f})")

b = np.array([0.6, 0.8, 0.0, 0.0, 0.0, 0.0])  # boundary point
print(f"\nboundary matching: H - S on the sphere = {ker.regular(x, b) - ker.singular(x, b):.2e}")
print(f"boundary value of G                    = {ker.green(x, b):.2e}")

print("\nRobin function along a ray (blows up at the boundary):")
for r in (0.0, 0.5, 0.9, 0.99):
    print(f"  R({r:4.2f} e1) = {ker.robin(np.array([r, 0, 0, 0, 0, 0])):.6f}")
print(f"  R(0) = 1/(4 pi^3) = {1 / (4 * np.pi**3):.10f}")

print("\nderivative stack vs finite differences at (x, y):")
g1 = ker.green_grad1(x, y)
g1fd = fd.gradient(lambda xs: np.array([ker.green(p, y) for p in np.atleast_2d(xs)]), x)
print(f"  grad_x G   rel error {np.linalg.norm(g1 - g1fd) / np.linalg.norm(g1):.1e}")
h = ker.robin_hess(np.zeros(6))
print(f"  Hess R(0)  = {h[0, 0]:.8f} I   (2 (n-2) kappa = {8 / (4 * np.pi**3):.8f})")
