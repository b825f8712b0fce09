"""Session-type subtyping: parsing, LTS construction, four decision
algorithms and an empirical complexity benchmark."""

from .errors import (
    DuplicateLabelError, EmptyArityError, NotContractiveError,
    OpenTypeError, ParseError, StcheckError,
)
from .syntax import (
    TypeExpr, parse, render, size, is_contractive, is_closed,
    substitute, unfold, end, var, mu, rec, bvar, inp, out, select, branch,
)
from .subterms import sub_bottom_up, sub_top_down, sub_pair
from .lts import SKIP, Action, TypeLts, build_lts, out_degree, transitions
from .subtyping import (
    ALGORITHMS, ProductNode, SubtypeReport, check, equal_coinductive,
    export_product_dot, is_inconsistent, is_subtype, product_successors,
    subtype_all_pairs, subtype_inductive, subtype_memoized, subtype_product,
)
from .bench import GenConfig, BenchRecord, gen_random, gen_blowup_family, run_bench

__version__ = "0.1.0"
