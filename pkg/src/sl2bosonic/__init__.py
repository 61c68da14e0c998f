"""Exact computation of the characters chi_{i,l}(q, z1, z2) of level-k coinvariants.

Four independent routes give the same truncated series:

* ``transfer``: iterate chi^(N+1) = M S chi^(N) to its limit, or solve the
  difference equation order by order in z2;
* ``paths``: count integer points of the constraint polytope directly;
* ``operators``: the extremal operators A..E acting on simple vectors with
  exactly factored scalars;
* ``bosonic``: the sum of the 18 closed-form families of good words.
"""
from .series import (
    Monomial,
    MonomialClass,
    TruncatedSeries,
    TruncationPolicy,
    classify_monomial,
    coeff_at,
    inv_one_minus,
    mono,
    pochhammer,
    series_add,
    series_mul,
    shift_z2,
    substitute_z,
)
from .transfer import (
    CharacterVector,
    build_matrix,
    fixed_point_character,
    limit_character,
    recursion_character,
    transfer_step,
)
from .paths import enumerate_configs, full_character, is_admissible, oracle_character
from .operators import (
    OperatorWord,
    SimpleVector,
    Undefined,
    VectorSum,
    apply_letter,
    apply_word,
    parse_word,
    to_character,
    v_infinity,
    word_on_vinf,
)
from .bosonic import (
    family_term_closed,
    family_term_operator,
    families,
    quad_form,
    theorem_main_character,
)

__version__ = "0.1.0"

__all__ = [
    "Monomial",
    "MonomialClass",
    "TruncatedSeries",
    "TruncationPolicy",
    "classify_monomial",
    "coeff_at",
    "inv_one_minus",
    "mono",
    "pochhammer",
    "series_add",
    "series_mul",
    "shift_z2",
    "substitute_z",
    "CharacterVector",
    "build_matrix",
    "fixed_point_character",
    "limit_character",
    "recursion_character",
    "transfer_step",
    "enumerate_configs",
    "full_character",
    "is_admissible",
    "oracle_character",
    "OperatorWord",
    "SimpleVector",
    "Undefined",
    "VectorSum",
    "apply_letter",
    "apply_word",
    "parse_word",
    "to_character",
    "v_infinity",
    "word_on_vinf",
    "family_term_closed",
    "family_term_operator",
    "families",
    "quad_form",
    "theorem_main_character",
]
