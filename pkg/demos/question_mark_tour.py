"""Short tour of the Minkowski question-mark machinery.

Evaluates Q at rationals through both the binary-descent and the
continued-fraction route, checks the functional equations, and shows how
fast the measure of a ball around 1/4 collapses: the closed form
2^(3-k-1/k) exp(-log2 / (k^2 eps)) at k = 4 is already accurate to a few
percent at eps = 1e-3.

    python3 demos/question_mark_tour.py
"""

from fractions import Fraction

from fractalevt.qmark import (
    ball_measure_asymptotic,
    ContinuedFraction,
    interval_measure,
    qmark_eval,
    qmark_eval_cf,
)


def main():
    print("dyadic images of the harmonic points: Q(1/n) = 2^(1-n)")
    for n in (2, 3, 5, 8, 13):
        q = qmark_eval(Fraction(1, n))
        print(f"  Q(1/{n:<2}) = {q:.12g}  (2^(1-n) = {2.0 ** (1 - n):.12g})")

    print("\nfunctional equations at x = 3/7:")
    x = Fraction(3, 7)
    qx = qmark_eval(x)
    print(f"  Q(x)         = {qx:.15f}")
    print(f"  1 - Q(1-x)   = {1.0 - qmark_eval(1 - x):.15f}")
    print(f"  2 Q(x/(1+x)) = {2.0 * qmark_eval(x / (1 + x)):.15f}")

    print("\ndescent vs continued-fraction evaluation (worst case q <= 50):")
    worst = 0.0
    for q in range(2, 51):
        for p in range(1, q):
            a = qmark_eval(Fraction(p, q))
            b = qmark_eval_cf(ContinuedFraction.from_rational(p, q))
            worst = max(worst, abs(a - b))
    print(f"  max |descent - cf| = {worst:.3g}")

    print("\nQ-measure of the ball around 1/4 (k = 4):")
    print(f"  {'eps':>8} {'exact':>12} {'asymptotic':>12} {'ratio':>8}")
    for eps in (1e-2, 3e-3, 1e-3):
        exact = interval_measure(0.25 - eps, 0.25 + eps)
        asym = ball_measure_asymptotic(4, eps)
        print(f"  {eps:>8.0e} {exact:>12.4e} {asym:>12.4e} {exact / asym:>8.4f}")
    print("  the double-exponential collapse is why the rare-singleton")
    print("  experiment needs exact tau values rather than formula tau")


if __name__ == "__main__":
    main()
