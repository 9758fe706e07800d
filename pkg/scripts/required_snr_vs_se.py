"""Spectral efficiency against required Eb/N0 (BER 1e-3, AWGN) for lambda 6..12."""

import numpy as np

from _common import SCHEMES, base_parser, crossing, curve
from dmcss.channels import ChannelSpec
from dmcss.baselines import spectral_efficiency


def main():
    p = base_parser(__doc__)
    p.add_argument("--lams", default="6,7,8,9,10,11,12")
    p.add_argument("--grid", default="0,10,0.5", help="start,stop,step in dB")
    args = p.parse_args()
    start, stop, step = map(float, args.grid.split(","))
    grid = np.round(np.arange(start, stop + step / 2, step), 10)
    print(f"{'scheme':<14}{'lambda':>7}{'SE':>10}{'Eb/N0 [dB]':>12}")
    for s in SCHEMES:
        for lam in map(int, args.lams.split(",")):
            pts = curve(s, lam, ChannelSpec(), grid, args)
            se = float(spectral_efficiency(s, lam))
            print(f"{s.name:<14}{lam:>7}{se:>10.5f}{crossing(pts):>12.3f}", flush=True)


if __name__ == "__main__":
    main()
