"""Multiplicator ladders of orders and leveled isogeny graphs of abelian varieties over finite fields."""

from .algebra_core import AlgebraElement, EtaleAlgebra, make_algebra
from .classgroup import ClassChainData, FiniteAbelianGroup, imquad_class_data, load_external_chains
from .errors import IsoLadderError
from .graph import assemble_specs, build_graph, classify_isogeny_class, component_count, compute_d_min
from .ladders import build_ladder, classify_splitting, count_ladders, enumerate_overorders, find_base_order
from .lattices import ZLattice
from .lmfdb_client import decode_label, fetch
from .maximalization import maximal_order
from .orders import Order, maximal_ideals_above, order_from_generators
from .volcano import is_r_volcano, undirect, volcano_verdict

__version__ = "0.1.0"

__all__ = [
    "AlgebraElement", "ClassChainData", "EtaleAlgebra", "FiniteAbelianGroup", "IsoLadderError", "Order",
    "ZLattice", "assemble_specs", "build_graph", "build_ladder", "classify_isogeny_class",
    "classify_splitting", "component_count", "compute_d_min", "count_ladders", "decode_label",
    "enumerate_overorders", "fetch", "find_base_order", "imquad_class_data", "is_r_volcano",
    "load_external_chains", "make_algebra", "maximal_ideals_above", "maximal_order",
    "order_from_generators", "undirect", "volcano_verdict",
]
