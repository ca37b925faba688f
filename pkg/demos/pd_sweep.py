"""Positive definiteness with and without stabilization over 100 kernel settings.

    python demos/pd_sweep.py
"""

from crossmrf.robustness import pd_sweep


def main():
    print(f"{'kernel':9s} {'path':11s} {'Sigma PD':>9s} {'Q PD':>6s} {'max shift':>10s}")
    for version in ("V4", "V5", "V7", "wendland"):
        for r in pd_sweep(version, p=7):
            reg = r.max_regularization
            print(f"{version:9s} {r.path:11s} {r.sigma_pd:6d}/{r.total} {r.precision_pd:3d}/{r.total} "
                  f"{'-' if reg is None else format(reg, '.0e'):>10s}")


if __name__ == "__main__":
    main()
