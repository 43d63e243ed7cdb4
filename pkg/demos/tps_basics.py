"""Thin-plate splines from a handful of control points.

Fit a TPS to four moved points, check that it interpolates them exactly,
look at how it splits into an affine part and a bending part, and compare
bending energies of an affine and a non-affine deformation.

    python demos/tps_basics.py
"""

import numpy as np

from coupled_tps import ControlPointSet, bending_energy, evaluate_tps, solve_tps


def main():
    w, h = 512, 384
    square = np.array([[100.0, 100.0], [400.0, 100.0], [400.0, 300.0], [100.0, 300.0], [250.0, 200.0]])
    pushed = square.copy()
    pushed[4] += [20.0, -15.0]  # drag the middle point

    t = solve_tps(ControlPointSet(square, w, h), ControlPointSet(pushed, w, h))
    print("control points map onto their targets:")
    for p, q, got in zip(square, pushed, evaluate_tps(t, square)):
        print(f"  {p} -> {got.round(6)}  (target {q})")

    # in pixel units the kernel's r^2 log(scale) term is a constant that lands in C,
    # so the offset is large even though the outer points stay put
    print("\naffine part  M =", t.affine_matrix.round(4).tolist(), " C =", t.affine_offset.round(3).tolist())
    print("kernel weights (sum to zero per axis):", t.kernel_weights.sum(axis=0).round(12).tolist())

    halfway = np.array([[175.0, 150.0], [325.0, 250.0]])
    print("\npoints between the controls follow smoothly:", evaluate_tps(t, halfway).round(3).tolist())

    sheared = square @ np.array([[1.0, 0.2], [0.0, 1.0]]).T + [5.0, -3.0]
    affine = solve_tps(ControlPointSet(square, w, h), ControlPointSet(sheared, w, h))
    print(f"\nbending energy, pure shear: {bending_energy(affine):.3e}")
    print(f"bending energy, dragged middle point: {bending_energy(t):.3e}")


if __name__ == "__main__":
    main()
