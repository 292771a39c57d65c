"""Corpus ingestion, vocabulary construction, and reordering-instance generation.

An instance is built by popping one token out of a sentence and re-inserting
it elsewhere; the detection targets are the landing position of the moved
token and the slot it vacated, both in the reordered sentence's coordinates.
"""

from __future__ import annotations

import json
from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from pathlib import Path

from .errors import DegenerateSentenceError, InputError, InstanceError
from .rng import Rng

PAD_ID = 0
UNK_ID = 1
PAD_TOKEN = "<pad>"
UNK_TOKEN = "<unk>"

DEFAULT_MAX_LEN = 80

# Sentence pools for train/valid/test when one corpus feeds all three splits.
SPLIT_FRACTIONS = (0.8, 0.1, 0.1)


@dataclass
class Vocabulary:
    """Token <-> id map with reserved PAD=0 and UNK=1."""

    token_to_id: dict[str, int]
    id_to_token: list[str]
    max_size: int

    def __len__(self) -> int:
        return len(self.id_to_token)

    def encode(self, tokens: Sequence[str]) -> list[int]:
        get = self.token_to_id.get
        return [get(t, UNK_ID) for t in tokens]

    def decode(self, ids: Sequence[int]) -> list[str]:
        return [self.id_to_token[i] for i in ids]

    def to_dict(self) -> dict:
        return {"id_to_token": list(self.id_to_token), "max_size": self.max_size}

    @classmethod
    def from_dict(cls, payload: dict) -> "Vocabulary":
        id_to_token = list(payload["id_to_token"])
        return cls(
            token_to_id={t: i for i, t in enumerate(id_to_token)},
            id_to_token=id_to_token,
            max_size=int(payload["max_size"]),
        )


def build_vocab(corpus: Iterable[Sequence[str]], max_size: int) -> Vocabulary:
    """Keep the max_size-2 most frequent tokens; ties broken by first occurrence."""
    counts: Counter[str] = Counter()
    first_seen: dict[str, int] = {}
    n_sentences = 0
    for sentence in corpus:
        n_sentences += 1
        for token in sentence:
            counts[token] += 1
            if token not in first_seen:
                first_seen[token] = len(first_seen)
    if n_sentences == 0 or not counts:
        raise InputError("cannot build a vocabulary from an empty corpus")
    if max_size < 3:
        raise InputError(f"vocabulary max_size must be at least 3, got {max_size}")
    ranked = sorted(counts, key=lambda t: (-counts[t], first_seen[t]))
    id_to_token = [PAD_TOKEN, UNK_TOKEN] + ranked[: max_size - 2]
    return Vocabulary(
        token_to_id={t: i for i, t in enumerate(id_to_token)},
        id_to_token=id_to_token,
        max_size=max_size,
    )


@dataclass
class WrdInstance:
    """A reordered sentence with gold insert/original positions (0-based)."""

    tokens: list[str]
    insert_idx: int
    orig_idx: int
    source_line: str

    def __len__(self) -> int:
        return len(self.tokens)

    def original_tokens(self) -> list[str]:
        return self.source_line.split(" ")


def apply_move(sentence: Sequence[str], i: int, j: int) -> list[str]:
    """Pop the token at i and re-insert it so it lands at index j."""
    rest = list(sentence[:i]) + list(sentence[i + 1 :])
    return rest[:j] + [sentence[i]] + rest[j:]


def generate_instance(
    sentence: Sequence[str],
    rng: Rng,
    max_len: int = DEFAULT_MAX_LEN,
) -> WrdInstance:
    """Move one token to a uniformly random other position.

    (i, j) is uniform over ordered pairs with i != j. A move that leaves
    the sequence unchanged (possible with duplicate tokens) is resampled,
    up to 100 times.
    """
    n = len(sentence)
    if n < 2:
        raise InstanceError(f"sentence too short to reorder (length {n})")
    if n > max_len:
        raise InstanceError(f"sentence longer than max_len={max_len} (length {n})")
    sentence = list(sentence)
    for _ in range(101):
        i = rng.integers(0, n)
        j = rng.integers(0, n - 1)
        if j >= i:
            j += 1
        reordered = apply_move(sentence, i, j)
        if reordered != sentence:
            return WrdInstance(
                tokens=reordered,
                insert_idx=j,
                orig_idx=i,
                source_line=" ".join(sentence),
            )
    raise DegenerateSentenceError(
        f"no move changes the sentence after 100 resamples: {' '.join(sentence)}"
    )


def verify_instance(inst: WrdInstance, original: Sequence[str]) -> bool:
    """True iff undoing the recorded move reconstructs ``original`` exactly."""
    n = len(inst.tokens)
    if n != len(original) or n < 2:
        return False
    if not (0 <= inst.insert_idx < n and 0 <= inst.orig_idx < n):
        return False
    if inst.insert_idx == inst.orig_idx:
        return False
    moved = inst.tokens[inst.insert_idx]
    rest = inst.tokens[: inst.insert_idx] + inst.tokens[inst.insert_idx + 1 :]
    rebuilt = rest[: inst.orig_idx] + [moved] + rest[inst.orig_idx :]
    return rebuilt == list(original)


def is_degenerate(sentence: Sequence[str]) -> bool:
    """No single move can change the sentence (all tokens identical)."""
    return all(t == sentence[0] for t in sentence)


def eligible_sentences(
    corpus: Iterable[Sequence[str]], max_len: int
) -> list[list[str]]:
    return [
        list(s)
        for s in corpus
        if 2 <= len(s) <= max_len and not is_degenerate(s)
    ]


# -- dataset files -----------------------------------------------------


def instance_to_json(inst: WrdInstance) -> str:
    return json.dumps(
        {
            "tokens": inst.tokens,
            "insert": inst.insert_idx,
            "orig": inst.orig_idx,
            "src": inst.source_line,
        },
        ensure_ascii=False,
        separators=(",", ":"),
    )


def instance_from_json(line: str) -> WrdInstance:
    obj = json.loads(line)
    return WrdInstance(
        tokens=list(obj["tokens"]),
        insert_idx=int(obj["insert"]),
        orig_idx=int(obj["orig"]),
        source_line=obj["src"],
    )


def load_instances(path: str | Path) -> list[WrdInstance]:
    path = Path(path)
    instances = []
    with path.open("r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                instances.append(instance_from_json(line))
    if not instances:
        raise InputError(f"no instances in {path}")
    return instances


def generate_dataset(
    corpus: Iterable[Sequence[str]],
    counts: dict[str, int],
    max_len: int,
    rng: Rng,
    out_dir: str | Path,
) -> dict[str, Path]:
    """Sample instances per split and write train/valid/test JSONL files.

    Splits draw sentences with replacement from disjoint sentence pools
    (a sentence never appears in two splits). Deterministic under the seed.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    sentences = eligible_sentences(corpus, max_len)
    if not sentences:
        raise InputError("corpus has no usable sentences (length 2..max_len, movable)")

    split_rng, train_rng, valid_rng, test_rng = rng.spawn(4)
    order = split_rng.permutation(len(sentences))
    n = len(sentences)
    n_train = max(1, int(n * SPLIT_FRACTIONS[0]))
    n_valid = max(1, int(n * SPLIT_FRACTIONS[1])) if n > 2 else 1
    pools = {
        "train": [sentences[k] for k in order[:n_train]],
        "valid": [sentences[k] for k in order[n_train : n_train + n_valid]],
        "test": [sentences[k] for k in order[n_train + n_valid :]],
    }
    split_rngs = {"train": train_rng, "valid": valid_rng, "test": test_rng}

    paths: dict[str, Path] = {}
    written: dict[str, int] = {}
    for split in ("train", "valid", "test"):
        count = int(counts.get(split, 0))
        if count <= 0:
            continue
        pool = pools[split]
        if not pool:
            raise InputError(
                f"split '{split}' has an empty sentence pool (corpus too small)"
            )
        srng = split_rngs[split]
        path = out_dir / f"{split}.jsonl"
        with path.open("w", encoding="utf-8", newline="\n") as fh:
            for _ in range(count):
                sentence = pool[srng.integers(0, len(pool))]
                inst = generate_instance(sentence, srng, max_len=max_len)
                fh.write(instance_to_json(inst) + "\n")
        paths[split] = path
        written[split] = count

    manifest = {
        "counts": written,
        "max_len": max_len,
        "seed": rng.seed,
        "pool_sizes": {k: len(v) for k, v in pools.items()},
    }
    manifest_path = out_dir / "manifest.json"
    manifest_path.write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    paths["manifest"] = manifest_path
    return paths


def read_corpus(path: str | Path) -> list[list[str]]:
    """One sentence per line, whitespace-tokenized; blank lines skipped."""
    path = Path(path)
    sentences = []
    with path.open("r", encoding="utf-8") as fh:
        for line in fh:
            tokens = line.split()
            if tokens:
                sentences.append(tokens)
    if not sentences:
        raise InputError(f"corpus {path} is empty")
    return sentences
