"""Seeded stratified sample of twisting pairs for the desk-scale extension check."""

import random

from partialgroups.core import GroupLike
from partialgroups.corpus import group
from partialgroups.twist import enumerate_twisting_pairs

NAMES = ("z2", "z3", "z4", "klein", "s3")
SAMPLE = 200
SEED = 2024


def all_pairs():
    out = {}
    for f in NAMES:
        for b in NAMES:
            out[(f, b)] = list(enumerate_twisting_pairs(GroupLike(group(f)), GroupLike(group(b))))
    return out


def stratified_sample(pairs, size=SAMPLE, seed=SEED):
    """An equal share per (fibre, base) combination, the remainder drawn from what is left."""
    rng = random.Random(seed)
    share = size // len(pairs)
    chosen, rest = [], []
    for key in sorted(pairs):
        idx = list(range(len(pairs[key])))
        rng.shuffle(idx)
        chosen += [(key, i) for i in idx[:share]]
        rest += [(key, i) for i in idx[share:]]
    chosen += rng.sample(rest, min(size - len(chosen), len(rest)))
    return [(key, pairs[key][i]) for key, i in sorted(chosen)]
