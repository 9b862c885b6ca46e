"""Domination numbers of MGEO-P and random geometric graphs."""

from domlab.domination import (
    DominationResult,
    cell_tessellation_set,
    ds_dc,
    greedy,
    oldest_prefix,
    random_baseline,
)
from domlab.errors import (
    BudgetExceededError,
    DomlabError,
    GraphError,
    ParameterError,
    ParseError,
)
from domlab.graph import (
    Graph,
    build_graph,
    exact_domination_number,
    is_dominating_set,
    k_core,
    max_degree,
    min_degree,
)
from domlab.mgeop import MgeopInstance, MgeopParams, generate
from domlab.rgg import RggInstance, RggParams, generate_rgg

__version__ = "0.1.0"
