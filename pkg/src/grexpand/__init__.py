"""Algebraic expansivity and algebraic entropy for endomorphisms of abelian groups."""

from __future__ import annotations

from .duality import (annihilator, coannihilator, dual_endo, dual_group, duality_expansivity_check,
                      pairing, verify_identities)
from .dynamics import (FORWARD, TWO_SIDED, EntropyReport, GeneratorCertificate, absorbing_witness,
                       certify, certify_positively_expansive_finite, check_generator_family,
                       combine_sum_generators, conjecture_harness, entropy_report,
                       entropy_with_generator, epi_audit, extension_generator, factor_transport,
                       power_generator, stabilize, trajectory_shift_check, trajectory_sum,
                       trajectory_table)
from .endo import (ComposeEndo, DirectSumEndo, DivisorPatternSubgroup, Endomorphism, IdentityEndo,
                   MatrixEndo, RestrictionEndo, ShiftEndo, ZeroEndo, bernoulli_shift,
                   check_intertwining, compose, copy_subgroup, direct_sum_endo, integer_tail_shift,
                   matrix_endo, power, quotient_endo, restriction_endo, semiconjugacy_q, shift_endo)
from .errors import *  # noqa: F401,F403
from .groups import (INTEGERS, NATURALS, Element, GroupSpec, PeriodicPattern, element_order,
                     is_torsion, modulus_at, torsion_part)
from .kernels import BACKEND
from .subgroup import (FiniteSubgroup, all_subgroups, coordinate_subgroup, full_subgroup, image,
                       intersect, preimage, subgroup_from_generators)

__version__ = "0.1.0"
