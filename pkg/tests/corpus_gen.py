"""Random instance generators shared by the test modules."""
from __future__ import annotations

import random
from itertools import product

from posmodel.model import make_model
from posmodel.syntax import Signature

SORT_NAMES = ("A", "B", "C")


def random_signature(rng: random.Random, max_sorts=3, max_rels=3, max_arity=2) -> Signature:
    sorts = list(SORT_NAMES[: rng.randint(1, max_sorts)])
    rels = {}
    for k in range(rng.randint(1, max_rels)):
        rels[f"R{k}"] = tuple(rng.choice(sorts) for _ in range(rng.randint(1, max_arity)))
    return Signature(sorts, rels, {})


def random_model(rng: random.Random, sig: Signature, max_carrier=4, density=0.4, min_carrier=1, name=None):
    sizes = {s: rng.randint(min_carrier, max_carrier) for s in sig.sorts}
    rels = {}
    for r, ar in sig.relations.items():
        rels[r] = {t for t in product(*[range(sizes[s]) for s in ar]) if rng.random() < density}
    return make_model(sig, sizes, rels, name=name)
