"""Temporal logic over linear orderings, compiled to transducers with limit transitions."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    AlphabetError, BudgetExceeded, InfiniteTermError, LotlError, NoRunError,
    ParseError, ResourceExceeded, RunError, SerializationError, ShapeError,
    UnknownPropositionError,
)
from .formula import parse, parse_surface, desugar, render  # noqa: E402
from .words import parse_term, render_term, reverse_term, to_finite, zip_terms  # noqa: E402
from .automaton import (  # noqa: E402
    Transducer, load_automaton, load_fixture, loads_automaton, dumps_automaton,
    reverse_automaton,
)
from .runs import (  # noqa: E402
    enumerate_accepting_runs_finite, find_run_term, validate_finite_run,
    validate_run_term,
)
from .construction import (  # noqa: E402
    atom_automaton, compile_formula, compose, const_automaton, not_automaton,
    or_automaton, product, since_automaton, stavi_since_automaton,
    stavi_until_automaton, until_automaton, serialize,
)
from .reach import (  # noqa: E402
    is_empty, is_transition_live, satisfiable, satisfiable_within, saturate,
)
from .oracle import UPWord, differential_suite, eval_finite, eval_up  # noqa: E402
