"""Clean-vs-perturbed similarity for the text and vision pipelines."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import ZeroVector
from ..perturb import PerturbationSpec, perturb, record_spec
from .embedding import TextEmbedder, VisualEmbedder, cosine_angle


def _sim(embedder, clean: str, noisy: str) -> float:
    try:
        return cosine_angle(embedder.embed(clean), embedder.embed(noisy))[0]
    except ZeroVector:
        # one side embeds to nothing (e.g. every word deleted): undefined
        return float("nan")


def similarity_under_perturbation(
    text: str,
    spec: PerturbationSpec,
    *,
    text_embedder: TextEmbedder | None = None,
    visual_embedder: VisualEmbedder | None = None,
    perturbed: str | None = None,
    **resources,
) -> tuple[float, float]:
    """``(sim_text, sim_vision)`` between ``text`` and its perturbation."""
    from ..bpe import default_tokenizer

    te = text_embedder or TextEmbedder(default_tokenizer())
    ve = visual_embedder or VisualEmbedder()
    noisy = perturb(text, spec, **resources) if perturbed is None else perturbed
    return _sim(te, text, noisy), _sim(ve, text, noisy)


@dataclass(frozen=True)
class SimilarityRow:
    kind: str
    p: float
    n_samples: int
    mean_sim_text: float
    mean_sim_vision: float
    n_undefined: int

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def similarity_sweep(
    corpus: Sequence[str],
    kinds: Sequence[str],
    ps: Sequence[float],
    *,
    seed: int = 0,
    n: int = 3,
    text_embedder: TextEmbedder | None = None,
    visual_embedder: VisualEmbedder | None = None,
    **resources,
) -> list[SimilarityRow]:
    """Mean similarities per (kind, p); record ``i`` uses ``record_spec(spec, i)``."""
    from ..bpe import default_tokenizer

    te = text_embedder or TextEmbedder(default_tokenizer())
    ve = visual_embedder or VisualEmbedder()
    rows = []
    for kind in kinds:
        for p in ps:
            base = PerturbationSpec(kind=kind, p=p, n=n, seed=seed)
            st, sv = [], []
            for i, text in enumerate(corpus):
                a, b = similarity_under_perturbation(
                    text, record_spec(base, i), text_embedder=te, visual_embedder=ve, **resources)
                st.append(a)
                sv.append(b)
            st_a, sv_a = np.array(st), np.array(sv)
            bad = int(np.sum(np.isnan(st_a) | np.isnan(sv_a)))
            ok = ~(np.isnan(st_a) | np.isnan(sv_a))
            rows.append(SimilarityRow(
                kind, float(p), len(corpus),
                float(st_a[ok].mean()) if ok.any() else float("nan"),
                float(sv_a[ok].mean()) if ok.any() else float("nan"),
                bad))
    return rows
