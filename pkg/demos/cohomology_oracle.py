"""Compare the square-class formula with H^1(G, Pic X_bar) on random surfaces.

Run:  python demos/cohomology_oracle.py [count] [seed]
"""
import random
import sys
from collections import Counter

from dp4brauer import build_lines, classify_formula, h1_oracle, orbits, picard_model

count = int(sys.argv[1]) if len(sys.argv) > 1 else 200
rng = random.Random(int(sys.argv[2]) if len(sys.argv) > 2 else 0)

agree = 0
by_order = Counter()
profiles = Counter()
done = 0
while done < count:
    a = tuple(rng.randint(-20, 20) for _ in range(5))
    if 0 in a or a[0] * a[1] == a[2] * a[3]:
        continue
    config = build_lines(a)
    formula = classify_formula(a).order
    agree += formula == h1_oracle(picard_model(config))
    by_order[formula] += 1
    profiles[(formula, orbits(config).profile_string)] += 1
    done += 1

print(f"formula = H^1 oracle on {agree}/{count} surfaces")
print("orders:", dict(sorted(by_order.items())))
for (order, profile), n in sorted(profiles.items()):
    print(f"  order {order}  profile {profile:<14} {n}")
