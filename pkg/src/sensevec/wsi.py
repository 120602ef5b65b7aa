"""Word-sense-induction evaluation.

Clustering-comparison metrics (adjusted Rand index, V-measure, paired
F-score) over hard label assignments, plus a harness that disambiguates
dataset contexts with a trained model and scores the predicted sense
labels against gold labels, word by word.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .model import SenseModel
from .predict import disambiguate


# ---------------------------------------------------------------------------
# metrics
# ---------------------------------------------------------------------------

def _contingency(gold: Sequence, pred: Sequence) -> np.ndarray:
    if len(gold) != len(pred):
        raise ValueError("label lists must have equal length")
    gold_ids = {g: i for i, g in enumerate(dict.fromkeys(gold))}
    pred_ids = {p: i for i, p in enumerate(dict.fromkeys(pred))}
    table = np.zeros((len(gold_ids), len(pred_ids)), dtype=np.int64)
    for g, p in zip(gold, pred):
        table[gold_ids[g], pred_ids[p]] += 1
    return table


def _pairs(x) -> np.ndarray:
    """Number of unordered pairs, n choose 2, elementwise."""
    x = np.asarray(x, dtype=np.int64)
    return x * (x - 1) // 2


def ari(gold: Sequence, pred: Sequence) -> float:
    """Hubert-Arabie adjusted Rand index in [-1, 1].

    Chance-corrected pair-counting agreement between two partitions; 0 by
    convention when the maximum equals the expected index (both partitions
    degenerate).
    """
    if len(gold) < 2:
        raise ValueError("need at least 2 instances")
    table = _contingency(gold, pred)
    index = int(_pairs(table).sum())
    gold_pairs = int(_pairs(table.sum(axis=1)).sum())
    pred_pairs = int(_pairs(table.sum(axis=0)).sum())
    total_pairs = int(_pairs(len(gold)))
    expected = gold_pairs * pred_pairs / total_pairs
    max_index = (gold_pairs + pred_pairs) / 2.0
    if max_index == expected:
        return 0.0
    return (index - expected) / (max_index - expected)


def _entropy(sizes: np.ndarray, n: int) -> float:
    sizes = sizes[sizes > 0]
    p = sizes / n
    return float(-(p * np.log(p)).sum())


def v_measure(gold: Sequence, pred: Sequence) -> float:
    """Harmonic mean of homogeneity and completeness.

    homogeneity = 1 - H(gold|pred)/H(gold) (1 when H(gold) = 0) and
    symmetrically for completeness; identical partitions score 1.0 and a
    single predicted cluster against a non-trivial gold scores 0.0.
    """
    if len(gold) < 1:
        raise ValueError("need at least 1 instance")
    table = _contingency(gold, pred)
    n = len(gold)
    h_gold = _entropy(table.sum(axis=1), n)
    h_pred = _entropy(table.sum(axis=0), n)
    # conditional entropies from the joint table
    flat = table[table > 0]
    h_joint = _entropy(flat, n)
    h_gold_given_pred = h_joint - h_pred
    h_pred_given_gold = h_joint - h_gold
    homogeneity = 1.0 if h_gold == 0.0 else 1.0 - h_gold_given_pred / h_gold
    completeness = 1.0 if h_pred == 0.0 else 1.0 - h_pred_given_gold / h_pred
    if homogeneity + completeness == 0.0:
        return 0.0
    return 2.0 * homogeneity * completeness / (homogeneity + completeness)


def paired_fscore(gold: Sequence, pred: Sequence) -> float:
    """Pair-counting F-score.

    precision = co-clustered pairs shared by pred and gold over pred's
    co-clustered pairs; recall swaps the roles; F is their harmonic mean.
    Both pair sets empty scores 1.0 by convention, exactly one empty
    scores 0.0.
    """
    if len(gold) < 2:
        raise ValueError("need at least 2 instances")
    table = _contingency(gold, pred)
    both = int(_pairs(table).sum())
    in_gold = int(_pairs(table.sum(axis=1)).sum())
    in_pred = int(_pairs(table.sum(axis=0)).sum())
    if in_gold == 0 and in_pred == 0:
        return 1.0
    if in_gold == 0 or in_pred == 0:
        return 0.0
    precision = both / in_pred
    recall = both / in_gold
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


# ---------------------------------------------------------------------------
# dataset and harness
# ---------------------------------------------------------------------------

@dataclass
class WsiInstance:
    target: str
    instance_id: str
    gold: str
    context: list[str]


@dataclass
class WsiDataset:
    """Target word occurrences with gold sense labels and context tokens."""

    instances: list[WsiInstance]

    def __post_init__(self):
        ids = [inst.instance_id for inst in self.instances]
        if len(set(ids)) != len(ids):
            raise ValueError("instance ids must be unique")
        for inst in self.instances:
            if not inst.context:
                raise ValueError(f"instance {inst.instance_id} has empty context")


@dataclass
class WsiReport:
    """Per-target-word scores plus their unweighted means."""

    per_word: dict[str, tuple[int, float, float, float]]  # n, ari, vm, fs
    skipped: list[str] = field(default_factory=list)

    @property
    def mean_ari(self) -> float:
        return float(np.mean([v[1] for v in self.per_word.values()]))

    @property
    def mean_v_measure(self) -> float:
        return float(np.mean([v[2] for v in self.per_word.values()]))

    @property
    def mean_fscore(self) -> float:
        return float(np.mean([v[3] for v in self.per_word.values()]))


def load_wsi_dataset(path) -> WsiDataset:
    """Read the TSV format: target_word, instance_id, gold_label, context."""
    instances = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            target, instance_id, gold, context = line.rstrip("\n").split("\t")
            instances.append(
                WsiInstance(target, instance_id, gold, context.split())
            )
    return WsiDataset(instances)


def save_wsi_dataset(path, dataset: WsiDataset) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for inst in dataset.instances:
            fh.write(
                f"{inst.target}\t{inst.instance_id}\t{inst.gold}\t"
                f"{' '.join(inst.context)}\n"
            )


def _clip_context(instance: WsiInstance, context_width: int) -> list[str]:
    """Up to context_width words around the target's occurrence.

    If the target token appears in the context list, the window is centered
    on its first occurrence (the token itself excluded); otherwise on the
    middle of the list.
    """
    ctx = instance.context
    half = context_width // 2
    if instance.target in ctx:
        pos = ctx.index(instance.target)
        return ctx[max(0, pos - half) : pos] + ctx[pos + 1 : pos + half + 1]
    pos = len(ctx) // 2
    lo = max(0, pos - half)
    return ctx[lo : lo + context_width]


def evaluate_wsi(
    model: SenseModel, dataset: WsiDataset, context_width: int = 10
) -> WsiReport:
    """Disambiguate every instance and score predictions per target word.

    Each instance's predicted label is the argmax sense of the target given
    its clipped context (out-of-vocabulary context words drop out).
    Targets missing from the model vocabulary are reported as skipped.
    Raises ValueError when no target is scoreable.
    """
    by_word: dict[str, list[WsiInstance]] = {}
    for inst in dataset.instances:
        by_word.setdefault(inst.target, []).append(inst)

    per_word = {}
    skipped = []
    for target in sorted(by_word):
        if target not in model.vocab:
            skipped.append(target)
            continue
        word = model.vocab.id_of[target]
        insts = by_word[target]
        gold = [inst.gold for inst in insts]
        pred = []
        for inst in insts:
            ctx_ids = model.vocab.encode(_clip_context(inst, context_width))
            posterior = disambiguate(model, word, ctx_ids.tolist())
            pred.append(int(np.argmax(posterior)))
        per_word[target] = (
            len(insts),
            ari(gold, pred) if len(insts) >= 2 else 0.0,
            v_measure(gold, pred),
            paired_fscore(gold, pred) if len(insts) >= 2 else 0.0,
        )
    if not per_word:
        raise ValueError("no dataset target word is present in the model vocabulary")
    return WsiReport(per_word=per_word, skipped=skipped)


def write_wsi_report(fh, report: WsiReport) -> None:
    """TSV rows (word, n_instances, ari, vm, fs) plus a final MEAN row."""
    fh.write("word\tn_instances\tari\tvm\tfs\n")
    total = 0
    for word, (n, a, v, f) in report.per_word.items():
        fh.write(f"{word}\t{n}\t{a:.6f}\t{v:.6f}\t{f:.6f}\n")
        total += n
    fh.write(
        f"MEAN\t{total}\t{report.mean_ari:.6f}\t{report.mean_v_measure:.6f}"
        f"\t{report.mean_fscore:.6f}\n"
    )
