"""Reaction parsing, filtering, tokenization and product-exclusive splitting."""
from __future__ import annotations

from collections import defaultdict
from dataclasses import asdict, dataclass, field
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    DataError,
    EmptyInput,
    EmptyPrecursorSet,
    MalformedSmiles,
    TooFewProducts,
)

SUPERCLASS_NAMES = (
    "Unrecognized",
    "Heteroatom alkylation and arylation",
    "Acylation and related processes",
    "C-C bond formation",
    "Heterocycle formation",
    "Protections",
    "Deprotections",
    "Reductions",
    "Oxidations",
    "Functional group interconversion",
    "Functional group addition",
    "Resolutions",
)
N_SUPERCLASSES = len(SUPERCLASS_NAMES)
UNRECOGNIZED = 0
RESOLUTIONS = 11
PURIFICATION = "Purification"

_ORGANIC = {"B", "C", "N", "O", "P", "S", "F", "I"}
_AROMATIC = {"b", "c", "n", "o", "p", "s"}


@dataclass(frozen=True)
class ReactionRecord:
    id: int
    precursors: tuple[str, ...]
    product: str
    superclass: int = UNRECOGNIZED
    superclass_name: str = SUPERCLASS_NAMES[UNRECOGNIZED]

    def __post_init__(self):
        object.__setattr__(self, "precursors", tuple(self.precursors))
        if list(self.precursors) != sorted(set(self.precursors)):
            raise DataError(f"record {self.id}: precursors must be sorted and unique")
        if not self.product or "." in self.product:
            raise DataError(f"record {self.id}: product must be a single fragment")
        if not 0 <= self.superclass < N_SUPERCLASSES:
            raise DataError(f"record {self.id}: superclass {self.superclass} out of range")

    @property
    def source(self) -> str:
        return ".".join(self.precursors)

    @property
    def rxn(self) -> str:
        return f"{self.source}>>{self.product}"

    def to_json(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "rxn": self.rxn,
            "class": self.superclass,
            "class_name": self.superclass_name,
        }

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> "ReactionRecord":
        """Load an already-preprocessed record (the output schema of :func:`filter_dataset`)."""
        precursors, products = parse_reaction(obj["rxn"])
        return cls(
            id=int(obj["id"]),
            precursors=tuple(precursors),
            product=".".join(products),
            superclass=int(obj.get("class", UNRECOGNIZED)),
            superclass_name=obj.get("class_name")
            or SUPERCLASS_NAMES[int(obj.get("class", UNRECOGNIZED))],
        )


@dataclass(frozen=True)
class TokenizedReaction:
    source_tokens: list[str]
    target_tokens: list[str] = field(default_factory=list)
    is_reaction: bool = False

    def detokenize(self) -> str:
        text = "".join(self.source_tokens)
        if self.is_reaction:
            text += ">>" + "".join(self.target_tokens)
        return text


@dataclass(frozen=True)
class DatasetSplit:
    train_ids: frozenset[int]
    valid_ids: frozenset[int]
    test_ids: frozenset[int]
    seed: int

    def to_json(self) -> dict[str, Any]:
        return {
            "seed": self.seed,
            "train": sorted(self.train_ids),
            "valid": sorted(self.valid_ids),
            "test": sorted(self.test_ids),
        }

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> "DatasetSplit":
        return cls(
            frozenset(obj["train"]), frozenset(obj["valid"]), frozenset(obj["test"]), int(obj["seed"])
        )


@dataclass
class FilterReport:
    total: int = 0
    kept: int = 0
    duplicates: int = 0
    multi_product: int = 0
    purification: int = 0
    malformed: int = 0
    duplicate_id: int = 0
    fragments_trimmed: int = 0
    unparsed_class: int = 0

    def to_json(self) -> dict[str, int]:
        return asdict(self)


def tokenize_smiles(s: str) -> TokenizedReaction:
    """Split a molecule or ``precursors>>product`` string into one token per character.

    The fragment-bond marker ``~`` is an ordinary single-character token.
    """
    if not s:
        raise EmptyInput("cannot tokenize an empty string")
    if ">>" in s:
        source, target = s.split(">>", 1)
        return TokenizedReaction(list(source), list(target), is_reaction=True)
    return TokenizedReaction(list(s))


def normalize_precursors(precursors: Iterable[str]) -> list[str]:
    precursors = list(precursors)
    if not precursors:
        raise EmptyPrecursorSet("precursor set is empty")
    return sorted(set(precursors))


def count_heavy_atoms(fragment: str) -> int:
    """Approximate heavy-atom count of a single SMILES fragment.

    Bracket atoms count one each unless the element is hydrogen. Outside
    brackets only the organic subset (with greedy ``Cl``/``Br``) and its
    aromatic lowercase forms count.
    """
    if "." in fragment:
        raise MalformedSmiles(f"expected a single fragment, got {fragment!r}")
    count = 0
    i, n = 0, len(fragment)
    while i < n:
        ch = fragment[i]
        if ch == "[":
            close = fragment.find("]", i + 1)
            if close < 0 or "[" in fragment[i + 1:close]:
                raise MalformedSmiles(f"unbalanced brackets in {fragment!r}")
            if not _is_hydrogen_bracket(fragment[i + 1:close]):
                count += 1
            i = close + 1
            continue
        if ch == "]":
            raise MalformedSmiles(f"unbalanced brackets in {fragment!r}")
        if fragment.startswith(("Cl", "Br"), i):
            count += 1
            i += 2
            continue
        if ch in _ORGANIC or ch in _AROMATIC:
            count += 1
        i += 1
    return count


def _is_hydrogen_bracket(body: str) -> bool:
    body = body.lstrip("0123456789")
    return body[:1] == "H" and not body[1:2].islower()


def largest_fragment(product: str) -> str:
    """Fragment with the most heavy atoms; ties go to the lexicographically smallest."""
    fragments = [f for f in product.split(".") if f]
    if not fragments:
        raise MalformedSmiles("product side is empty")
    return min(fragments, key=lambda f: (-count_heavy_atoms(f), f))


def parse_reaction(rxn: str) -> tuple[list[str], list[str]]:
    """Split ``reactants>reagents>product`` (or ``precursors>>product``) into molecule lists.

    Reactants and reagents are pooled into one precursor list.
    """
    parts = rxn.split(">")
    if len(parts) != 3:
        raise MalformedSmiles(f"not a reaction string: {rxn!r}")
    precursors = [m for side in parts[:2] for m in side.split(".") if m]
    products = [m for m in parts[2].split(".") if m]
    return precursors, products


def _parse_class(raw: Any) -> int | None:
    try:
        value = int(raw)
    except (TypeError, ValueError):
        return None
    if isinstance(raw, float) and raw != value:
        return None
    return value if 0 <= value < N_SUPERCLASSES else None


def filter_dataset(
    raw_records: Iterable[Mapping[str, Any]],
) -> tuple[list[ReactionRecord], FilterReport]:
    """Apply the preprocessing rules to raw ``{id, rxn, class, class_name}`` objects.

    A raw object may also carry an explicit ``products`` list; more than one
    entry there marks a multi-product reaction, which is dropped. Otherwise
    ``.``-separated pieces on the product side are fragments of one product
    and only the largest is kept. Duplicates are detected on the normalized
    ``precursors>>product`` string after fragment selection; the first
    occurrence wins.
    """
    report = FilterReport()
    kept: list[ReactionRecord] = []
    seen_rxn: set[str] = set()
    seen_ids: set[int] = set()

    for raw in raw_records:
        report.total += 1
        if raw.get("class_name") == PURIFICATION:
            report.purification += 1
            continue
        explicit_products = raw.get("products")
        if explicit_products is not None and len(explicit_products) > 1:
            report.multi_product += 1
            continue
        try:
            rec_id = int(raw["id"])
            precursors, products = parse_reaction(str(raw["rxn"]))
            if explicit_products is not None:
                products = [m for p in explicit_products for m in str(p).split(".") if m]
            precursors = normalize_precursors(precursors)
            for p in precursors:
                count_heavy_atoms(p)
            product = largest_fragment(".".join(products))
        except (KeyError, TypeError, ValueError):
            report.malformed += 1
            continue

        if len(products) > 1:
            report.fragments_trimmed += 1
        superclass = _parse_class(raw.get("class"))
        if superclass is None:
            report.unparsed_class += 1
            superclass, name = UNRECOGNIZED, SUPERCLASS_NAMES[UNRECOGNIZED]
        else:
            name = raw.get("class_name") or SUPERCLASS_NAMES[superclass]

        record = ReactionRecord(rec_id, tuple(precursors), product, superclass, str(name))
        if record.rxn in seen_rxn:
            report.duplicates += 1
            continue
        if rec_id in seen_ids:
            report.duplicate_id += 1
            continue
        seen_rxn.add(record.rxn)
        seen_ids.add(rec_id)
        kept.append(record)

    report.kept = len(kept)
    return kept, report


def split_by_product(
    records: Sequence[ReactionRecord],
    fractions: tuple[float, float, float] = (0.90, 0.05, 0.05),
    seed: int = 0,
) -> DatasetSplit:
    """Random train/valid/test split in which every product lives in exactly one split.

    Product groups are visited in a seeded random order. Validation is filled
    first, then test, each until its record-count target is reached, so each
    overshoots by less than one group; everything left goes to training.
    """
    if abs(sum(fractions) - 1.0) > 1e-9 or min(fractions) < 0:
        raise DataError(f"fractions must be non-negative and sum to 1, got {fractions}")
    groups: dict[str, list[int]] = defaultdict(list)
    for r in records:
        groups[r.product].append(r.id)
    if len(groups) < 3:
        raise TooFewProducts(f"need at least 3 distinct products, got {len(groups)}")

    keys = sorted(groups)
    order = np.random.default_rng(seed).permutation(len(keys))
    n = len(records)
    targets = [fractions[1] * n, fractions[2] * n]
    filled: list[list[int]] = [[], []]
    pos = 0
    for which in (0, 1):
        # leave at least one group for each later non-empty split
        reserve = sum(1 for f in fractions[which + 2:] if f > 0) + (fractions[0] > 0)
        while len(filled[which]) < targets[which] and pos < len(keys) - reserve:
            filled[which].extend(groups[keys[order[pos]]])
            pos += 1
    train = [i for k in order[pos:] for i in groups[keys[k]]]
    return DatasetSplit(frozenset(train), frozenset(filled[0]), frozenset(filled[1]), seed)
