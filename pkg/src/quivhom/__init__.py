"""Quiver mutation with homotopy data: oracles, coverings, surfaces, clusters."""

from .quiver import Arrow, Quiver, LoopPresent, premutate, mutate_matrix
from .walks import (Walk, Step, Membership, compose, inverse, reduce, word_walk,
                    membership, TrivialOracle, FullOracle, GeneratedOracle,
                    AbelianQuotientOracle, DecisionUnknown, NotClosed, NotComposable,
                    IN, NOT_IN, UNKNOWN)
from .mutation import (TrackedQuiver, DeletionRecord, NotReduced, init_tracked,
                       mutate, mutation_sequence, check_involution, explore_pattern)
from .coverings import (Covering, CoveringOracle, NotWeaklyAdmissible, NonTransitive,
                        identity_covering, validate_covering, deck_transformations,
                        is_regular, is_weakly_admissible, is_admissible,
                        orbit_premutate, orbit_mutate, is_k_mutable,
                        sufficient_k_mutable, check_global_bounded,
                        build_regular_cover, check_orbit_compatibility)
from .surfaces import (COLOR_I, COLOR_II, PLAIN, NOTCHED, ColoredSurface,
                       InvalidGluing, SurfaceOracle, TaggedArc,
                       TaggedTriangulation, Triangulation, UnknownConfiguration,
                       UnsupportedSurface, arc_count, canonical_key,
                       cycle_generators, flip, flip_graph, FlipGraph,
                       pi1_report, puncture_cycle, surface_complex,
                       tagged_arcs, transported_generators,
                       triangulation_quiver, TriangulationQuiver, untag,
                       verify_flip_mutation)
from .poly import (MultiPoly, NotDivisible, RationalFn, ResourceLimit,
                   divide_exact, gcd)
from .cluster import (LaurentEntry, LaurentReport, NotHomogeneous, Seed,
                      TrivialSemifield, TropicalSemifield, at_basepoint,
                      explore_laurent, f_polynomial, g_vector, initial_seed,
                      is_laurent, is_principal, mutate_path, principal_seed,
                      seed_mutate, separation_check, y_hat, y_hat_commutes)
from .serialize import (SchemaError, covering_from_json, covering_to_json,
                        dumps_canonical, flip_graph_to_dot, generator_from_json,
                        homotopy_from_json, homotopy_to_json,
                        membership_to_json, monomial_from_string,
                        monomial_to_string, poly_to_string, quiver_from_json,
                        quiver_to_dot, quiver_to_json, rational_to_string,
                        same_quiver, seed_from_json, seed_to_json,
                        seed_variable_names, surface_from_json, surface_to_json,
                        tracked_to_json, triangulation_from_json,
                        triangulation_to_json, walk_to_json)

__all__ = [
    "Arrow", "Quiver", "LoopPresent", "premutate", "mutate_matrix",
    "Walk", "Step", "Membership", "compose", "inverse", "reduce", "word_walk",
    "membership", "TrivialOracle", "FullOracle", "GeneratedOracle",
    "AbelianQuotientOracle", "DecisionUnknown", "NotClosed", "NotComposable",
    "IN", "NOT_IN", "UNKNOWN",
    "TrackedQuiver", "DeletionRecord", "NotReduced", "init_tracked",
    "mutate", "mutation_sequence", "check_involution", "explore_pattern",
    "Covering", "CoveringOracle", "NotWeaklyAdmissible", "NonTransitive",
    "identity_covering", "validate_covering", "deck_transformations",
    "is_regular", "is_weakly_admissible", "is_admissible",
    "orbit_premutate", "orbit_mutate", "is_k_mutable",
    "sufficient_k_mutable", "check_global_bounded",
    "build_regular_cover", "check_orbit_compatibility",
    "COLOR_I", "COLOR_II", "PLAIN", "NOTCHED", "ColoredSurface",
    "InvalidGluing", "SurfaceOracle", "TaggedArc", "TaggedTriangulation",
    "Triangulation", "UnknownConfiguration", "UnsupportedSurface",
    "arc_count", "canonical_key", "cycle_generators", "flip", "flip_graph",
    "FlipGraph", "pi1_report", "puncture_cycle", "surface_complex",
    "tagged_arcs", "transported_generators", "triangulation_quiver",
    "TriangulationQuiver", "untag", "verify_flip_mutation",
    "MultiPoly", "NotDivisible", "RationalFn", "ResourceLimit",
    "divide_exact", "gcd",
    "LaurentEntry", "LaurentReport", "NotHomogeneous", "Seed",
    "TrivialSemifield", "TropicalSemifield", "at_basepoint",
    "explore_laurent", "f_polynomial", "g_vector", "initial_seed",
    "is_laurent", "is_principal", "mutate_path", "principal_seed",
    "seed_mutate", "separation_check", "y_hat", "y_hat_commutes",
    "SchemaError", "covering_from_json", "covering_to_json",
    "dumps_canonical", "flip_graph_to_dot", "generator_from_json",
    "homotopy_from_json", "homotopy_to_json", "membership_to_json",
    "monomial_from_string", "monomial_to_string", "poly_to_string",
    "quiver_from_json", "quiver_to_dot", "quiver_to_json",
    "rational_to_string", "same_quiver", "seed_from_json", "seed_to_json",
    "seed_variable_names", "surface_from_json", "surface_to_json",
    "tracked_to_json", "triangulation_from_json", "triangulation_to_json",
    "walk_to_json",
]
