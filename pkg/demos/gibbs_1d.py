"""Removing the Gibbs overshoot of a six-jump function.

The plain partial sum of ``h`` rings next to every jump no matter how many
coefficients are kept. Adding ramp functions for the jumps and subtracting
their coefficients from the data leaves a residual whose coefficients decay
like 1/k^2, so the reconstruction converges an order faster. The jumps can
be the true ones or estimates from the same coefficients.

Run from the repository root::

    python3 demos/gibbs_1d.py [out_dir]
"""

import sys
from pathlib import Path

import numpy as np

from gibbsfree import (
    edge_augmented_sum,
    edge_error,
    fourier_coeffs_exact,
    function_h,
    jump_set_of,
    make_estimator,
    partial_sum,
    standard_error,
    uniform_grid,
)
from gibbsfree.plotting import Series, plot


def main(out="demo_out"):
    out = Path(out)
    h = function_h()
    truth = jump_set_of(h)
    print("jumps of h (location, height):")
    for x, a in truth:
        print(f"  {x:+.6f}  {a:+.6f}")

    N = 40
    c = fourier_coeffs_exact(h, N)
    estimate = make_estimator("concentration")(c)
    x = uniform_grid(2048)
    plain = partial_sum(c, x).values
    edge = edge_augmented_sum(c, estimate, x).values

    # overshoot left of the drop at -pi/2, where h = 3/2
    near = (x > -np.pi / 2 - 0.3) & (x < -np.pi / 2)
    print(f"\nN = {N}: largest value left of -pi/2 is {plain[near].max():.4f} for the partial sum "
          f"and {edge[near].max():.4f} with estimated jumps (h = 1.5 there)")

    print("\n   N   partial sum   true jumps   estimated jumps")
    for n in (16, 32, 64, 128, 256):
        cn = fourier_coeffs_exact(h, n)
        est = edge_error(h, n, make_estimator("concentration")(cn), cn)
        print(f"{n:4d}   {standard_error(h, n):.3e}    {edge_error(h, n, truth, cn):.3e}    {est:.3e}")

    plot(
        [Series.of("h", x, h(x)), Series.of("partial sum", x, plain), Series.of("edge-augmented", x, edge)],
        "linear",
        out / "gibbs_1d.svg",
        title=f"h from {2 * N + 1} coefficients",
        xlabel="x",
        ylabel="value",
    )
    print(f"\nplot written to {out / 'gibbs_1d.svg'}")


if __name__ == "__main__":
    main(*sys.argv[1:])
