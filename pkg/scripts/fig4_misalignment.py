"""Ideal-source rate for increasing misalignment error e_d."""

from _common import distances, parser, save

from ecsqkd import OptimizeSpec, SystemParams, sweep

MISALIGNMENT = (0.0, 0.03, 0.08, 0.15)


def main():
    args = parser(__doc__).parse_args()
    spec = OptimizeSpec(objective="asymptotic_ideal")
    for e_d in MISALIGNMENT:
        points = sweep(SystemParams(e_d=e_d), distances(args), spec)
        save(points, args.out_dir, f"fig4_ed_{e_d:g}.csv")


if __name__ == "__main__":
    main()
