"""Multi-objective machine design-candidate generation and low-dimensional maps.

The heavy lifting lives in the compiled `_motormap` extension; this package
re-exports its public surface.
"""

from ._motormap import (
    MotormapError,
    generate,
    isomap,
    joint_affinities,
    kmeans,
    knn_preservation,
    pairwise_sq_distances,
    pca,
    silhouette,
    standardize,
    trustworthiness,
    tsne,
)

__all__ = [
    "MotormapError",
    "generate",
    "isomap",
    "joint_affinities",
    "kmeans",
    "knn_preservation",
    "pairwise_sq_distances",
    "pca",
    "silhouette",
    "standardize",
    "trustworthiness",
    "tsne",
]
