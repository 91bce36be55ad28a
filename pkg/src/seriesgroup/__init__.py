"""Exact computations in the group of formal power series ``r + c1 r^2 + ...`` under composition."""

from .bpcheck import TupleReport, commutation_free, independence_search, separation_check
from .embed import (
    Certificate,
    CertificateEngine,
    Chain,
    StepRecord,
    amalgam_step,
    centralizer_extension_step,
    eval_word,
    free_pair,
    free_product_step,
    nontrivial_certificate,
    one_param_base,
    replay,
    surface_group,
)
from .errors import *  # noqa: F401,F403
from .field import ONE, ZERO, FieldElem, Rational, Symbol, SymbolRegistry, fresh_symbol
from .liealg import (
    VectorField,
    bracket,
    centralizer_member,
    commute,
    exp,
    exp_formula,
    exp_picard,
    flow,
    log,
    proportional,
)
from .series import Series, commutator, compose, conjugate, identity, inverse, ord, power, specialize, truncate
from .words import Word, parse_word

__version__ = "0.1.0"
