"""Rule-generated reaction corpora for desk-scale experiments.

Each superclass owns a reactive handle, a few partner molecules, a few
reagents and a product suffix. A reaction attaches the class handle to a
core scaffold; its product is the core with the class suffix, so the label
is a deterministic function of (core, superclass) and is learnable from
character n-grams.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .reaction_data import SUPERCLASS_NAMES, ReactionRecord, normalize_precursors

CORES = (
    "c1ccccc1", "c1ccncc1", "C1CCCCC1", "c1ccc2ccccc2c1", "C1CCNCC1",
    "c1ccoc1", "c1ccsc1", "CC(C)C", "CCCC", "c1cnc2ccccc2c1",
    "C1CCOC1", "c1ccc(F)cc1", "c1ccc(Cl)cc1", "c1ccc(Br)cc1", "CC(C)(C)C",
    "c1cc[nH]c1", "C1CC1", "c1ncncn1", "CCOCC", "c1ccc(OC)cc1",
)

# (handle on the core, partner molecules, reagents, product suffix)
_CLASS_RULES = (
    ("N=[N+]=[N-]", ("O", "CO", "CCO"), ("[Na+]~[Cl-]", "Cl"), "N"),
    ("Br", ("CN", "CCN", "CNC"), ("[K+]~[K+]~[O-]C([O-])=O", "CCN(CC)CC"), "NC"),
    ("N", ("CC(=O)Cl", "CC(=O)OC(C)=O", "O=C(Cl)c1ccccc1"), ("CCN(CC)CC", "c1ccncc1"), "NC(C)=O"),
    ("B(O)O", ("Brc1ccccc1", "Ic1ccccc1", "Brc1ccncc1"), ("[Pd]", "[Cs+]~[F-]"), "-c1ccccc1"),
    ("C(=O)CC(=O)C", ("NN", "CNN", "NNc1ccccc1"), ("CC(=O)O", "CCO"), "c1cc(C)n[nH]1"),
    ("O", ("CC(C)(C)OC(=O)OC(=O)OC(C)(C)C", "C[Si](C)(C)Cl", "ClCc1ccccc1"), ("CN(C)C=O", "[Na+]~[H-]"), "O[Si](C)(C)C"),
    ("OC(=O)OC(C)(C)C", ("O=C(O)C(F)(F)F", "Cl", "[H][H]"), ("ClCCl", "CO"), "O"),
    ("C=O", ("[BH4-]~[Na+]", "[Li+]~[AlH4-]", "[H][H]"), ("CO", "C1CCOC1"), "CO"),
    ("CO", ("O=[Cr](=O)=O", "O=[Mn](=O)(=O)[O-]~[K+]", "CS(C)=O"), ("ClCCl", "CC(C)=O"), "C=O"),
    ("C(=O)O", ("O=S(Cl)Cl", "O=C(Cl)C(=O)Cl", "O=P(Cl)(Cl)Cl"), ("CN(C)C=O", "ClCCl"), "C(=O)Cl"),
    ("C=C", ("BrBr", "ClCl", "OO"), ("ClC(Cl)Cl", "CC#N"), "C(Br)CBr"),
    ("[C@@H](N)C(=O)O", ("O=C(O)[C@H](O)[C@@H](O)C(=O)O", "C[C@@H](N)c1ccccc1", "CO"), ("CCO", "O"), "[C@H](N)C(=O)O"),
)

# rough class populations: Unrecognized dominates, Resolutions is sparse
CLASS_WEIGHTS = (0.22, 0.14, 0.14, 0.09, 0.04, 0.05, 0.09, 0.07, 0.04, 0.06, 0.04, 0.02)


@dataclass(frozen=True)
class ReactionRule:
    superclass: int
    handle: str
    partners: tuple[str, ...]
    reagents: tuple[str, ...]
    suffix: str

    def product(self, core: str) -> str:
        return core + self.suffix

    def precursors(self, core: str, partner: str, reagent: str | None) -> list[str]:
        mols = [core + self.handle, partner]
        if reagent is not None:
            mols.append(reagent)
        return normalize_precursors(mols)


RULES = tuple(
    ReactionRule(c, h, tuple(p), tuple(r), s) for c, (h, p, r, s) in enumerate(_CLASS_RULES)
)


def generate_reactions(
    n: int,
    seed: int,
    cores: Sequence[str] = CORES,
    class_weights: Sequence[float] = CLASS_WEIGHTS,
    start_id: int = 0,
) -> list[ReactionRecord]:
    """``n`` rule-consistent reactions with ids ``start_id .. start_id + n - 1``."""
    rng = np.random.default_rng(seed)
    weights = np.asarray(class_weights, dtype=float)
    weights /= weights.sum()
    classes = rng.choice(len(RULES), size=n, p=weights)
    core_idx = rng.integers(len(cores), size=n)
    partner_draw = rng.integers(1 << 30, size=n)
    reagent_draw = rng.integers(1 << 30, size=n)
    records = []
    for k in range(n):
        rule = RULES[classes[k]]
        core = cores[core_idx[k]]
        partner = rule.partners[partner_draw[k] % len(rule.partners)]
        # one reagent slot, sometimes left empty
        slot = reagent_draw[k] % (len(rule.reagents) + 1)
        reagent = rule.reagents[slot] if slot < len(rule.reagents) else None
        records.append(
            ReactionRecord(
                id=start_id + k,
                precursors=tuple(rule.precursors(core, partner, reagent)),
                product=rule.product(core),
                superclass=rule.superclass,
                superclass_name=SUPERCLASS_NAMES[rule.superclass],
            )
        )
    return records
