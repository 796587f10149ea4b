"""Full m-DCI profile of D18 (m = 1..17), compared with the prime-power prediction.

Runs twice: once taking explicit constructions where they exist, once by
pure search, so the two routes can be compared row by row.
"""

import argparse
import time

from dci_forge.ci import verify_theorem_prime_power


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--search-only", action="store_true", help="skip the explicit constructions")
    args = ap.parse_args()
    routes = [False] if args.search_only else [True, False]
    for use in routes:
        t = time.time()
        rep = verify_theorem_prime_power(3, 2, range(1, 18), use_constructions=use)
        print(f"# constructions={'on' if use else 'off'}  consistent={rep.consistent}  {time.time() - t:.1f}s")
        print(f"{'m':>3} {'predicted':>9} {'computed':>8}  source")
        for row in rep.rows:
            print(f"{row.m:>3} {str(row.predicted):>9} {str(row.computed):>8}  {row.source}")


if __name__ == "__main__":
    main()
