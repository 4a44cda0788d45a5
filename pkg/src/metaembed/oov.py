"""Extend embedding sets to the full vocabulary union.

A word missing from one set can be filled three ways:

* ``random``    -- a seeded uniform random vector
* ``average``   -- the mean of the set's known vectors
* ``projected`` -- the element-wise mean of the word's vectors from the
                   sets that know it, each mapped into the target space
                   by a learned linear projection

Projections are trained per (source, target) pair on the two sets'
shared words, minimizing ||M w_src - w_tgt||^2 plus an L2 penalty on M,
with the same mini-batch AdaGrad loop as the meta-embedding trainers.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .io import VALUE_FORMAT, EmbeddingSet
from .optimizer import (
    INIT_RANGE,
    TrainConfig,
    adagrad_update,
    loss_plateaued,
    minibatches,
    seeded_rng,
)
from .vocab import VocabAlignment, align

RANDOM = "random"
AVERAGE = "average"
PROJECTED = "projected"
STRATEGIES = (RANDOM, AVERAGE, PROJECTED)


@dataclass(frozen=True)
class ProjectionMap:
    """A learned linear map between two embedding spaces.

    ``matrix`` has shape (target dim, source dim), so a source vector v
    maps to ``matrix @ v``.
    """

    source_set: str
    target_set: str
    matrix: np.ndarray
    train_loss: float

    def apply(self, vector: np.ndarray) -> np.ndarray:
        return self.matrix @ vector


def projection_loss_grad(
    m: np.ndarray, source_rows: np.ndarray, target_rows: np.ndarray, l2_weight: float
) -> tuple[float, np.ndarray]:
    """Summed squared error of ``source @ m.T`` against targets, plus
    its gradient in ``m`` (including the ``2*l2*m`` penalty term)."""
    residual = source_rows @ m.T - target_rows
    loss = float(np.sum(residual * residual))
    grad = 2.0 * (residual.T @ source_rows) + 2.0 * l2_weight * m
    return loss, grad


def train_projection(
    source: EmbeddingSet, target: EmbeddingSet, config: TrainConfig | None = None
) -> ProjectionMap:
    """Fit a linear map from ``source`` space to ``target`` space on the
    words the two sets share."""
    if config is None:
        config = TrainConfig.projection_defaults()
    shared = sorted(set(source.words) & set(target.words))
    if len(shared) < source.dim:
        raise ValueError(
            f"sets {source.name!r} and {target.name!r} share {len(shared)} words; "
            f"need at least {source.dim} for a meaningful fit"
        )
    x = source.matrix[[source.index[w] for w in shared]]
    y = target.matrix[[target.index[w] for w in shared]]

    m = seeded_rng(config.seed).uniform(
        -INIT_RANGE, INIT_RANGE, (target.dim, source.dim)
    )
    accum = np.zeros_like(m)
    n = len(shared)
    losses: list[float] = []
    for epoch in range(config.epochs):
        epoch_loss = 0.0
        for batch in minibatches(n, config.batch_size, config.seed, epoch):
            loss, grad = projection_loss_grad(m, x[batch], y[batch], config.l2_weight)
            epoch_loss += loss
            m, accum = adagrad_update(
                m, grad, accum, config.learning_rate, config.adagrad_epsilon
            )
        losses.append(epoch_loss / n)
        if loss_plateaued(losses):
            break
    return ProjectionMap(
        source_set=source.name, target_set=target.name, matrix=m,
        train_loss=losses[-1],
    )


def fill_oov(
    target: EmbeddingSet,
    others: list[EmbeddingSet],
    projections: list[ProjectionMap],
    alignment: VocabAlignment,
    strategy: str,
    seed: int = 0,
) -> EmbeddingSet:
    """Extend ``target`` to the union vocabulary.

    Known words keep their vectors bit for bit.  For ``projected``, a
    missing word is filled with the mean of its projections from exactly
    the sets that contain it, so a projection into the target space is
    required for every other set.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}, expected one of {STRATEGIES}")
    by_source = {
        p.source_set: p for p in projections if p.target_set == target.name
    }
    if strategy == PROJECTED:
        missing = [o.name for o in others if o.name not in by_source]
        if missing:
            raise ValueError(
                f"no projection into {target.name!r} from: {missing}"
            )

    union = alignment.union
    out = np.empty((len(union), target.dim))
    average = target.matrix.mean(axis=0)
    rng = seeded_rng(seed)
    for j, word in enumerate(union):
        if word in target.index:
            out[j] = target.matrix[target.index[word]]
        elif strategy == RANDOM:
            out[j] = rng.uniform(-INIT_RANGE, INIT_RANGE, target.dim)
        elif strategy == AVERAGE:
            out[j] = average
        else:
            projected = [
                by_source[o.name].apply(o.row(word)) for o in others if word in o.index
            ]
            if not projected:
                raise ValueError(
                    f"{word!r} is in the union but known to no source set"
                )
            out[j] = np.mean(projected, axis=0)
    return EmbeddingSet(name=target.name, words=union, matrix=out)


def extend_all(
    sets: list[EmbeddingSet],
    config: TrainConfig | None = None,
    strategy: str = PROJECTED,
) -> list[EmbeddingSet]:
    """Extend every set to the vocabulary union.

    For ``projected`` this trains all pairwise projections first; the
    trainings are independent of each other.
    """
    if config is None:
        config = TrainConfig.projection_defaults()
    alignment = align(sets)
    extended = []
    for target in sets:
        others = [s for s in sets if s.name != target.name]
        projections = []
        if strategy == PROJECTED:
            projections = [train_projection(s, target, config) for s in others]
        extended.append(
            fill_oov(target, others, projections, alignment, strategy, config.seed)
        )
    return extended


def save_projection(projection: ProjectionMap, path) -> None:
    """Write a projection as a text matrix with a descriptive header."""
    path = Path(path)
    rows, cols = projection.matrix.shape
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(
            f"{projection.source_set} {projection.target_set} {cols} {rows}\n"
        )
        for row in projection.matrix:
            f.write(" ".join(format(v, VALUE_FORMAT) for v in row) + "\n")


def load_projection(path) -> ProjectionMap:
    """Read a projection written by ``save_projection``."""
    path = Path(path)
    with open(path, encoding="utf-8") as f:
        lines = f.read().splitlines()
    if not lines:
        raise ValueError(f"{path}: empty projection file")
    header = lines[0].split()
    if len(header) != 4:
        raise ValueError(f"{path}: line 1: expected 'source target src_dim tgt_dim'")
    source, target = header[0], header[1]
    try:
        src_dim, tgt_dim = int(header[2]), int(header[3])
    except ValueError:
        raise ValueError(f"{path}: line 1: non-integer dimensions") from None
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != src_dim:
            raise ValueError(f"{path}: line {lineno}: expected {src_dim} values")
        rows.append([float(x) for x in parts])
    matrix = np.array(rows, dtype=np.float64)
    if matrix.shape != (tgt_dim, src_dim):
        raise ValueError(
            f"{path}: header declares {tgt_dim}x{src_dim}, found {matrix.shape}"
        )
    return ProjectionMap(
        source_set=source, target_set=target, matrix=matrix, train_loss=float("nan")
    )
