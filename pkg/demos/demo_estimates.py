"""Measure the constants hidden in the multilinear estimates.

Every bound in the analysis carries an unspecified constant; this script
sweeps the frequency scale N and reports the measured ratios, which should
stay bounded (upper bounds) or stay away from zero (the lower bound).
"""

from gdnls.estimates import (
    BoxSpec,
    box_convolution,
    cardinal_bspline,
    verify_lemma25,
    verify_prop29,
)
from gdnls.spectrum import ParameterSet


def main():
    print("exact 5-fold box convolution (unit boxes, centers cancelling):")
    boxes = [BoxSpec(c, 1.0) for c in (2.0, -2.0, 3.0, -3.0, 0.0)]
    print(f"  value at center 0      : {float(box_convolution(boxes, 0.0)):.9f}  (= 115/192)")
    print(f"  value at block edge 1/2: {float(cardinal_bspline(5, 0.5)):.9f}  (lower-bound constant)")

    print("\nFourier-Lebesgue upper bounds, one cubic generation, R ~ N^(1/2):")
    for N in (128.0, 256.0, 512.0):
        p = ParameterSet(s=-1.0, N=N, A=16.0, R=4.0 * (N / 256.0) ** 0.5, T=0.05 / N**2)
        rep = verify_lemma25(p, 1, 0, points_per_block=16, time_steps=32)
        ratios = ", ".join(f"{k}={v:.3g}" for k, v in rep.ratios.items())
        print(f"  N={int(N):4d}: {ratios}")

    print("\nfirst-iterate lower-bound constant c (should be positive and stable):")
    for N in (128.0, 256.0, 512.0):
        p = ParameterSet(s=-1.0, N=N, A=16.0, R=4.0 * (N / 256.0) ** 0.5, T=0.05 / N**2)
        rep = verify_prop29(p, 5e-7 * (256.0 / N) ** 2)
        print(f"  N={int(N):4d}: c = {rep.ratios['c']:.4e}")


if __name__ == "__main__":
    main()
