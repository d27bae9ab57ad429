"""Finite-key rate for several block sizes, optimised over (mu, p_x)."""

from _common import distances, parser, save

from ecsqkd import OptimizeSpec, SystemParams, sweep

BLOCKS = (1e10, 1e12, 1e14)


def main():
    p = parser(__doc__, step=50.0)
    p.add_argument("--paper-literal", action="store_true", help="count pulses, not detections, in n_Z")
    args = p.parse_args()
    spec = OptimizeSpec(objective="finite_key")
    for N in BLOCKS:
        params = SystemParams(N_pulses=N, paper_literal=args.paper_literal)
        points = sweep(params, distances(args), spec)
        save(points, args.out_dir, f"fig5_N_{N:.0e}.csv")


if __name__ == "__main__":
    main()
