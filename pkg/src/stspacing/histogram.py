from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass(frozen=True, eq=False)
class Histogram:
    """Binned sample with the model it is compared against.

    ``density`` is count / (total * width), so it integrates to the fraction
    of samples inside the binned range. ``model_prob`` is the model mass of
    each bin (CDF differences); ``overflow`` counts samples above the last
    edge, whose model mass is ``1 - model_prob.sum()``.
    """

    edges: np.ndarray
    counts: np.ndarray
    density: np.ndarray
    reference: np.ndarray
    total: int
    overflow: int = 0
    model_prob: np.ndarray | None = None

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.edges)

    @property
    def midpoints(self) -> np.ndarray:
        return 0.5 * (self.edges[1:] + self.edges[:-1])

    def rows(self):
        for i in range(len(self.counts)):
            yield (
                float(self.edges[i]),
                float(self.edges[i + 1]),
                int(self.counts[i]),
                float(self.density[i]),
                float(self.reference[i]),
            )


def build_histogram(
    values,
    edges,
    reference: Callable[[np.ndarray], np.ndarray],
    cdf: Callable[[np.ndarray], np.ndarray] | None = None,
) -> Histogram:
    values = np.asarray(values, dtype=float)
    edges = np.asarray(edges, dtype=float)
    counts, _ = np.histogram(values, bins=edges)
    total = len(values)
    widths = np.diff(edges)
    density = counts / (total * widths) if total else np.zeros(len(counts))
    mids = 0.5 * (edges[1:] + edges[:-1])
    model_prob = np.diff(cdf(edges)) if cdf is not None else None
    return Histogram(
        edges=edges,
        counts=counts.astype(np.int64),
        density=density,
        reference=np.asarray(reference(mids), dtype=float),
        total=total,
        overflow=int(np.count_nonzero(values > edges[-1])),
        model_prob=model_prob,
    )
