"""Orthogonal alignment between two representation spaces, and compound words.

    python demos/alignment.py

Part one plants a rotation between two synthetic "layer" matrices, adds
noise that grows with depth, and shows the residual after the best
orthogonal fit climbing with it.  Part two asks whether an embedding of a
compound word sits near the embedding of its parts written apart.
"""

import numpy as np

from vistok.analysis import compositionality_probe, layerwise_procrustes, load_lexicon, random_orthogonal


def main():
    rng = np.random.default_rng(0)
    X = rng.standard_normal((200, 16))
    R = random_orthogonal(16, 1, seed=1)[0]
    pairs = [(X, X @ R + sigma * rng.standard_normal(X.shape)) for sigma in (0.0, 0.05, 0.2, 0.5, 1.0)]
    print("layer  noise  residual  |R_hat - R|max")
    for (sigma, res) in zip((0.0, 0.05, 0.2, 0.5, 1.0), layerwise_procrustes(pairs)):
        print(f"{res.layer_index:5d}  {sigma:5.2f}  {res.residual_norm:8.3f}  {np.abs(res.R - R).max():.2e}")

    lex = load_lexicon()
    print(f"\ncompound probe over {len(lex)} entries (cosine to the whole word):")
    for mode in ("text", "vision"):
        means = compositionality_probe(lex, mode).means
        print(f"{mode:>7}: sum of parts {means['cos_sum']:.3f}   parts written apart {means['cos_space']:.3f}")
    for mode in ("text", "vision"):
        e = compositionality_probe([("offline", ["off", "line"])], mode).entries[0]
        print(f"offline vs 'off line' ({mode}): {e.cos_space:.3f}")


if __name__ == "__main__":
    main()
