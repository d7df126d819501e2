"""Attention-guided visual token pruning toolkit.

Computes per-token significance from vision-encoder attention maps,
selects tokens globally (rank) or by grid row (row), restores spatial
order, and reports attention-concentration diagnostics plus analytical
inference-cost savings.
"""

from .analysis import (
    ConcentrationReport,
    SweepEntry,
    TokenBudgetReport,
    concentration,
    gini,
    layer_sweep,
    token_budget,
)
from .cost_model import CostEstimate, estimate
from .errors import (
    AttnpruneError,
    DegenerateInputError,
    FormatError,
    GridError,
    RowSumWarning,
    ShapeError,
    ValueCheckError,
)
from .pruning import (
    PruneConfig,
    PrunedSelection,
    SelectionMethod,
    SignificanceMode,
    Strategy,
    apply_selection,
    keep_count,
    pool_select,
    rank_select,
    reorder,
    row_select,
)
from .significance import (
    Axis,
    SignificanceScores,
    average_heads,
    axis_means,
    compute_significance,
    compute_significance_ablated,
)
from .tensor_io import AttentionMaps, load_attention, load_vector, read_tensor, save_vector, write_tensor
from .viz import GridImage, heatmap, pgm_bytes, selection_mask, write_pgm

__version__ = "0.1.0"
