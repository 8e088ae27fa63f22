"""Exact tools for pairwise-independent joinings of subshifts of finite type."""
from .core import (AdjacencyMatrix, Alphabet, Word, char_poly, count_words, full_shift,
                   is_irreducible, is_uniform, language, load_matrix, matrix_power, parse_matrix,
                   period, tensor_product)
from .parry import (MarkovMeasure, PerronData, cylinder_probability, entropy, parry_measure,
                    perron, uniform_measure)
from .battery import PijReport, run_battery, verify_shift_equivalence
from .joining import (LocalRule, check_pij_star, make_bernoulli_rule, make_periodic_rule,
                      preimage_count_check, product_rule, search_rules, verify_pij)
from .indconfig import IndependenceConfig, solve_config, verify_value_uniqueness

__version__ = "0.1.0"
