"""Exact cohomology of real toric spaces and small covers.

Three independent pipelines compute H^*(Y; Z) for the quotient Y of a real
moment-angle complex by the kernel of a GF(2) characteristic matrix: a
brute-force cubical cell oracle, a doubled critical (discrete Morse)
complex, and an assembly from full-subcomplex cohomology plus the h-vector.
All arithmetic is exact.
"""

from .linalg import (AbelianGroup, ChainComplex, CharMatrix, GradedGroup,
                     cohomology, smith_normal_form)
from .simplicial import (SimplicialComplex, f_vector, h_vector,
                         reduced_cohomology, reisner_cm_check)
from .shelling import (ExpandingSequence, Shelling, expanding_sequence,
                       find_shelling, first_containing_facet, verify_shelling)
from .morse import acyclic_matching, doubled_cohomology, morse_complex
from .cells import (CubicalCell, CochainWord, enumerate_cells, boundary_cell,
                    oracle_cohomology, quotient_complex, transfer_divisibility)
from .facering import lsop_check, monomial_basis, quotient_basis_reduce, sq1_matrix
from .toric import (assemble_integral, bockstein_check_thm15, bockstein_pages,
                    claim_check_thm11, coefficient_cohomology, full_check,
                    small_cover_table, subcomplex_cohomology_table,
                    three_way_cohomology)
from .cli import ProblemInstance, load_instance, parse_instance

__version__ = "0.1.0"
