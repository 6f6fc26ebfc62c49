"""Diversity-emphasized random-walk node embeddings (div2vec) with DeepWalk and
node2vec baselines, and an offline link-prediction / diversity evaluation."""

import os as _os

# numba's TBB layer is too old in common distro builds; prefer OpenMP quietly
_os.environ.setdefault("NUMBA_THREADING_LAYER", "omp")

from .graph import (  # noqa: E402
    Graph,
    IdMap,
    ItemFeatureMatrix,
    LabeledEdgeSet,
    RatingRecord,
    binarize_ratings,
    build_graph,
    filter_records,
    read_edgelist,
    read_item_features,
    read_ratings,
    split_edges,
    write_edgelist,
)
from .walker import (  # noqa: E402
    DEGREE_FUNCTIONS,
    FrequencyProfile,
    WalkCorpus,
    WalkStrategy,
    frequency_profile,
    generate_corpus,
    transition_distribution,
)
from .embed import (  # noqa: E402
    EmbeddingMatrix,
    SkipGramConfig,
    lookup,
    sgns_step,
    train_embeddings,
    training_pairs,
)
from .edgeops import OPERATORS, apply_operator, edge_feature, edge_features  # noqa: E402
from .predictor import MlpModel, TrainConfig, auc, mlp_forward, train_classifier  # noqa: E402
from .diversity import (  # noqa: E402
    MetricReport,
    RecommendationTable,
    average_ils,
    coverage,
    entropy_diversity,
    intra_list_similarity,
    recommend_topk,
)

__version__ = "0.1.0"
