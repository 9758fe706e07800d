"""Penalty from a phase offset (psi = pi/8) and a frequency offset (delta_f = 0.1)."""

import math

import numpy as np

from _common import base_parser, crossing, curve, print_curve
from dmcss.baselines import DMCSS, LORA
from dmcss.channels import ChannelSpec


def main():
    args = base_parser(__doc__).parse_args()
    grid = np.arange(2.0, 6.01, 0.5)
    for s in (DMCSS, LORA):
        ref = None
        for name, ch in [
            ("ideal", ChannelSpec()),
            ("psi=pi/8", ChannelSpec(psi=math.pi / 8)),
            ("delta_f=0.1", ChannelSpec(delta_f=0.1)),
        ]:
            pts = curve(s, args.lam, ch, grid, args)
            req = crossing(pts)
            ref = req if ref is None else ref
            print_curve(f"{s.name} {name} ({req - ref:+.2f} dB)", pts)


if __name__ == "__main__":
    main()
