"""Ideal-source asymptotic rate versus distance, optimised over mu."""

from _common import distances, parser, save

from ecsqkd import OptimizeSpec, SystemParams, sweep


def main():
    args = parser(__doc__).parse_args()
    points = sweep(SystemParams(), distances(args), OptimizeSpec(objective="asymptotic_ideal"))
    save(points, args.out_dir, "fig2_ideal.csv")
    crossing = next((p.L_km for p in points if p.L_km > 0 and p.R > p.R_plob), None)
    print(f"first distance above PLOB: {crossing} km")


if __name__ == "__main__":
    main()
