"""All-paths-and-cycles counting via connected induced subgraphs, and the APC graph kernel."""

from .coding import CodeScheme, decode_exact, decode_power, make_weight_assignment, precision_budget, strip_start_code
from .counting import CountTable, Domain, WeightAssignment, count_all
from .embedding import Embedding, FeatureKey, embed_dataset, embed_graph, feature_cut, gram, knn_classify
from .graph import Dataset, Graph, LabelAlphabet, parse_tu_dataset, remap_labels_topk
from .oracle import dfs_enumerate
from .subgraphs import enumerate_connected_induced_subgraphs

__all__ = [
    "CodeScheme", "CountTable", "Dataset", "Domain", "Embedding", "FeatureKey", "Graph", "LabelAlphabet",
    "WeightAssignment", "count_all", "decode_exact", "decode_power", "dfs_enumerate", "embed_dataset",
    "embed_graph", "enumerate_connected_induced_subgraphs", "feature_cut", "gram", "knn_classify",
    "make_weight_assignment", "parse_tu_dataset", "precision_budget", "remap_labels_topk", "strip_start_code",
]
