"""Mixed-source rate for several (F2, epsilon) pairs."""

from _common import distances, parser, save

from ecsqkd import OptimizeSpec, SystemParams, sweep

CASES = [(1.0, 0.0), (0.95, 1e-9), (0.95, 1e-6), (0.90, 1e-9), (0.90, 1e-3)]


def main():
    args = parser(__doc__).parse_args()
    spec = OptimizeSpec(objective="asymptotic_imperfect")
    for F2, eps in CASES:
        points = sweep(SystemParams(F2=F2, epsilon=eps), distances(args), spec)
        save(points, args.out_dir, f"fig3_F2_{F2:g}_eps_{eps:g}.csv")


if __name__ == "__main__":
    main()
