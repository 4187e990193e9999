"""Spectral image segmentation via mixed data/grid random walks.

The package splits into small layers: ``core`` (images, graphs, configs,
I/O), ``graph`` (dense appearance graphs, cuts, and their closed forms),
``sparsify`` (importance-sampled sparse approximations), ``spectral``
(transition operators and eigenpairs), ``cluster`` (k-means on spectral
embeddings), ``features`` (Gabor texture responses), ``pipeline`` (end-to-end
segmentation), ``bench`` (synthetic benchmark harness), and ``cli``.
"""

from .bench import (
    GroundTruthPattern,
    SweepResult,
    compose,
    default_palette,
    format_summary,
    ground_truth_pattern,
    jaccard_accuracy,
    run_sweep,
    synth_texture,
    write_csv,
)
from .cluster import embed_and_label, kmeans
from .core import (
    AppearanceImage,
    Bipartition,
    ImageFormatError,
    ImageSizeError,
    Labeling,
    MixConfig,
    NcutConfig,
    SparseGraph,
    load_image,
    save_image,
)
from .features import gabor_bank, gabor_features
from .graph import (
    DenseGraphSpec,
    UndefinedNcutError,
    build_grid_graph,
    cut_weight,
    dense_cut_bruteforce,
    dense_ncut,
    dense_volume_bruteforce,
    grid_ncut_approximation,
    kde_cut_closed_form,
    kde_inner_product,
    minimize_mixncut_exhaustive,
    mixncut_objective,
    ncut_weight,
    volume,
)
from .pipeline import segment_mixncut, segment_ncut
from .sparsify import (
    cluster_pair_weights,
    sample_baseline_edges,
    sample_data_edges,
    variance_split_partition,
)
from .spectral import (
    EigenPair,
    MixedOperator,
    SolverConvergenceError,
    TransitionOperator,
    build_transition,
    top_eigenpairs,
)

__version__ = "0.1.0"

__all__ = [
    "AppearanceImage",
    "Bipartition",
    "DenseGraphSpec",
    "EigenPair",
    "GroundTruthPattern",
    "ImageFormatError",
    "ImageSizeError",
    "Labeling",
    "MixConfig",
    "MixedOperator",
    "NcutConfig",
    "SolverConvergenceError",
    "SparseGraph",
    "SweepResult",
    "TransitionOperator",
    "UndefinedNcutError",
    "build_grid_graph",
    "build_transition",
    "cluster_pair_weights",
    "compose",
    "cut_weight",
    "default_palette",
    "dense_cut_bruteforce",
    "dense_ncut",
    "dense_volume_bruteforce",
    "embed_and_label",
    "format_summary",
    "gabor_bank",
    "gabor_features",
    "grid_ncut_approximation",
    "ground_truth_pattern",
    "jaccard_accuracy",
    "kde_cut_closed_form",
    "kde_inner_product",
    "kmeans",
    "load_image",
    "minimize_mixncut_exhaustive",
    "mixncut_objective",
    "ncut_weight",
    "run_sweep",
    "sample_baseline_edges",
    "sample_data_edges",
    "save_image",
    "segment_mixncut",
    "segment_ncut",
    "synth_texture",
    "top_eigenpairs",
    "variance_split_partition",
    "volume",
    "write_csv",
]
