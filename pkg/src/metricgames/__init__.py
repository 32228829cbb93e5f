"""Approximate Ehrenfeucht-Fraisse games, Scott formulae and distances on finite
metric spaces and normed point configurations, with exact rational arithmetic."""

from .distances import game_distance, gh_bruteforce, glue, lipschitz_bruteforce
from .errors import DomainError
from .games import (
    FunctionGameConfig,
    Menus,
    RelationGameConfig,
    solve_function_game,
    solve_relation_game,
)
from .logic import appr, eval_formula, strong_negation, weak_neg
from .scott import (
    IIWinsAll,
    scott_formula_function,
    scott_formula_relation,
    scott_sentence_relation,
    watershed_function,
    watershed_relation,
)
from .structures import (
    Additive,
    Multiplicative,
    Vocabulary,
    metric_space,
    normed_config,
    validate_structure,
)

__version__ = "0.1.0"
