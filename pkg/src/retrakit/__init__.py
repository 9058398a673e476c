"""retrakit: retractible extensions of simplices of finite groups.

Builds minimal n-retractible extensions and retra-products of blocks of
groups, their developments and unfoldings, certifies systolic largeness
of the resulting complexes, and verifies mod-p acyclicity of fixed-point
subcomplexes and nerve-style cohomology shifts.
"""

__version__ = "0.1.0"

from .permcore import (BudgetError, GroupHomPerm, Perm, PermGroup, contains,
                       element_to_word, image, is_p_group, is_soluble, kernel,
                       order, parse_group, parse_perm, product_embedding,
                       subgroup_order)
from .fpres import (CosetTable, Presentation, Word, free_reduce,
                    hom_from_images_exists, present_finite_group,
                    todd_coxeter_bounded)
from .scx import (Block, SimplicialComplex, barycentric_subdivision, cone,
                  is_flag, is_k_large, largeness_report, link, parse_complex,
                  require_block, systole_at_least)
from .homcalc import (HellyVerdict, fixed_subcomplex, helly_shift_check,
                      is_mod_p_acyclic, reduced_betti)
from .cog import (EMPTY, BlockOfGroups, DegenerateLink,
                  ExtendedBlockOfGroups, direct_limit_presentation,
                  letter_images_in_top, link_cog, retraction,
                  retraction_family, validate)
from .develop import Development, development, is_n_retractible, unfold
from .minimal import minimal_extension
from .retra import (cyclic_group, dihedral_edge_extension,
                    free_retra_product_presentation, retra_product)

__all__ = [
    "BudgetError", "GroupHomPerm", "Perm", "PermGroup", "contains",
    "element_to_word", "image", "is_p_group", "is_soluble", "kernel",
    "order", "parse_group", "parse_perm", "product_embedding",
    "subgroup_order",
    "CosetTable", "Presentation", "Word", "free_reduce",
    "hom_from_images_exists", "present_finite_group", "todd_coxeter_bounded",
    "Block", "SimplicialComplex", "barycentric_subdivision", "cone",
    "is_flag", "is_k_large", "largeness_report", "link", "parse_complex",
    "require_block", "systole_at_least",
    "HellyVerdict", "fixed_subcomplex", "helly_shift_check",
    "is_mod_p_acyclic", "reduced_betti",
    "EMPTY", "BlockOfGroups", "DegenerateLink", "ExtendedBlockOfGroups",
    "direct_limit_presentation", "letter_images_in_top", "link_cog",
    "retraction", "retraction_family", "validate",
    "Development", "development", "is_n_retractible", "unfold",
    "minimal_extension",
    "cyclic_group", "dihedral_edge_extension",
    "free_retra_product_presentation", "retra_product",
]
