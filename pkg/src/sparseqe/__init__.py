"""Treewidth-aware quantifier elimination toolkit."""

from .atoms import ConstVerdict, LinearAtom, Relation, Var, atom_vars, eval_atom, normalize_atom
from .benchgen import GenConfig, KTree, gen_formula, gen_instance, gen_ktree, gen_properties_check, ktree_decomposition
from .cad import MDCertificate, NotFound, PolySet, cad_dp, cad_dp_tables, combined_degree, mccallum_proj, md_certificate, projection_sequence
from .errors import (CapExceeded, ConfigError, DegreeTooLow, DegreeZero, DisconnectedGraph,
                     EmptySet, InexactDivision, InvalidDecomposition, MissingAssignment,
                     MixedMode, ParseError, SparseQEError, ValidationError, ZeroPolynomial)
from .fme import (FALSE_SET, ConstraintSet, ValueTables, bounds, fme_dp, fme_dp_tables,
                  fme_order, fme_order_raw, fme_stats, fme_step, fme_step_raw, run_fme)
from .formula import QuantFormula
from .graph import Graph, build_primal, connected_components, read_gr, write_gr
from .ordering import ElimOrder, brown_order, greedy_order, is_peo, natural_order, order_from_td, random_orders
from .parser import format_constraints, format_formula, parse_formula
from .poly import Monomial, Poly, PolyAtom, normalize_poly_atom
from .polyalg import (SylvesterMatrix, coeffs, content_primitive, deg, discriminant,
                      poly_div_exact, poly_gcd, resultant, squarefree_basis)
from .treedecomp import (NiceTreeDecomp, TreeDecomp, Violation, heuristic_td, height,
                         nicify, read_td, restrict_td, validate_nice, validate_td,
                         width, write_td)

__version__ = "0.1.0"
