"""Relative generalized Boolean dynamical systems at desk scale."""

from .boolean import (CallableAction, DualMapAction, Element, FinCofin,
                      FiniteAlgebra, FinSubsets, Principal, ProductAlgebra,
                      RangeIdeal, validate_action)
from .constructions import (LabelledGraph, import_labelled_graph,
                            remark_example, remark_representation,
                            remark_truncation, tilde, tilde_iso_generators)
from .dynamics import (apply_word, delta, finite_system, lam, make_system,
                       range_ideal, regular_ideal, validate_system,
                       word_ideal)
from .errors import GbdsError
from .lattice import (admissible_pairs, compute_BH, enumerate_hsat,
                      ideal_generators, ideal_membership, is_hereditary,
                      is_J_saturated, quotient_system, recover_pair,
                      saturation_closure)
from .words import (AlgElement, NormalTerm, WordCalculus, calculus,
                    eq_modulo_ck)

__version__ = "0.1.0"
