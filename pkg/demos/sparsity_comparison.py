"""Compare precision sparsity across conditional-block modes and cross kernels.

    python demos/sparsity_comparison.py
"""

from crossmrf.analyze import sparsity_percent
from crossmrf.assemble import build_joint
from crossmrf.fixtures import six_field_spec


def main():
    print(f"{'kernel':10s} {'mode':8s} {'zero %':>7s} {'threshold':>10s} {'shift':>8s}")
    for family in ("triwave", "wendland"):
        for mode in ("geostat", "car", "taper"):
            jp = build_joint(six_field_spec(family, mode))
            pct = sparsity_percent(jp.precision).zero_percent
            print(f"{family:10s} {mode:8s} {pct:7.2f} {jp.applied_threshold:10.0e} "
                  f"{jp.applied_regularization:8.0e}")


if __name__ == "__main__":
    main()
