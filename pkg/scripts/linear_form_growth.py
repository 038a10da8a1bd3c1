"""Size of the integer linear forms and of beta_n against the bounds, n = 0..--n-max."""
import argparse
import math
import time

from zeta5.bounds import delta_bound, epsilon_n
from zeta5.linear_forms import integer_forms
from zeta5.precision import constants_table, eval_zeta_form


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-max", type=int, default=10)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--prec", type=int, default=256)
    args = ap.parse_args()

    table = constants_table(args.prec)
    t = time.perf_counter()
    forms = integer_forms(range(args.n_max + 1), workers=args.workers)
    print(f"# built {len(forms)} forms in {time.perf_counter() - t:.2f}s")
    print("n,lcm,max_bits,ln|d|/n,beta,(-1)^n beta,eps_n,delta^n zeta5")
    z5 = float(table.zeta(5))
    for f in forms:
        beta = eval_zeta_form(f.zeta_form(), table)
        ln_d = math.log(abs(f.d)) / f.n if f.n else float("nan")
        eps = float(epsilon_n(f.n)) if f.n else float("nan")
        print(
            f"{f.n},{f.lcm},{f.max_bits()},{ln_d:.4f},{float(beta):.6e},"
            f"{(-1) ** f.n * float(beta):.6e},{eps:.3e},{float(delta_bound()) ** f.n * z5:.3e}"
        )


if __name__ == "__main__":
    main()
