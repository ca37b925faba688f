"""Construction time against the number of fields.

    python demos/scaling.py
"""

from crossmrf.bench import scaling_exponent, time_construction


def main():
    for scenario in ("geostat-MDAG", "car-MDAG"):
        recs = [time_construction(scenario, 200, p, reps=10) for p in (2, 4, 8, 16)]
        for r in recs:
            print(f"{scenario:13s} p={r.p:2d} mean {1e3 * r.mean:7.1f} ms")
        print(f"{scenario:13s} slope {scaling_exponent(recs):.2f}")


if __name__ == "__main__":
    main()
