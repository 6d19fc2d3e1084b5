#!/usr/bin/env python3
"""Generate the bundled surrogate benchmark graph.

Layout mirrors the frb30-15-01 instance family: 450 vertices in 30 groups
of 15, with 17,827 distinct cross-group edges sampled uniformly at random
(within-group pairs never get an edge, so each group is an independent
set). The output is DIMACS edge format with 1-based vertex ids.

The sample is drawn with a fixed seed so the committed file is exactly
reproducible from this script.
"""

import argparse
import random
import sys

GROUPS = 30
GROUP_SIZE = 15
EDGES = 17_827
SEED = 20240822


def cross_group_pairs(groups: int, group_size: int):
    n = groups * group_size
    pairs = []
    for u in range(n):
        for v in range(u + 1, n):
            if u // group_size != v // group_size:
                pairs.append((u, v))
    return pairs


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=SEED)
    ap.add_argument("--out", default="-", help="output path ('-' for stdout)")
    args = ap.parse_args()

    pairs = cross_group_pairs(GROUPS, GROUP_SIZE)
    assert len(pairs) == 97_875, len(pairs)
    rng = random.Random(args.seed)
    chosen = sorted(rng.sample(pairs, EDGES))

    n = GROUPS * GROUP_SIZE
    lines = [
        "c synthetic benchmark graph: 30 independent groups of 15 vertices,",
        "c 17827 cross-group edges sampled uniformly (gen_rb_instance.py, "
        f"seed {args.seed})",
        f"p edge {n} {len(chosen)}",
    ]
    lines.extend(f"e {u + 1} {v + 1}" for u, v in chosen)
    text = "\n".join(lines) + "\n"

    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as fh:
            fh.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
