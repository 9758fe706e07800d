"""BER curves of all detectable schemes in AWGN and in the 2-tap (rho = 0.3) channel."""

import numpy as np

from _common import SCHEMES, base_parser, crossing, curve, print_curve
from dmcss.channels import ChannelSpec


def main():
    args = base_parser(__doc__).parse_args()
    for name, ch, grid in [
        ("AWGN", ChannelSpec(), np.arange(0.0, 6.01, 1.0)),
        ("fading rho=0.3", ChannelSpec(rho=0.3, fading_enabled=True), np.arange(4.0, 12.01, 1.0)),
    ]:
        print(f"# {name}, Eb/N0 = {list(grid)}")
        for s in SCHEMES:
            pts = curve(s, args.lam, ch, grid, args)
            print_curve(f"{s.name} ({crossing(pts):.2f} dB)", pts)


if __name__ == "__main__":
    main()
