"""Capsets in F_3^n built from algebraic equations over F_{3^m}."""

from .construct import complete_capset, elliptic_quadric, nonsquare_patch, two_parabolas
from .field import GF3m, field, find_irreducible
from .parabolas import CoeffFamily, family_is_capset, family_points
from .trivec import CapSet, read_capset, write_capset
from .verify import greedy_complete, is_capset, is_complete, lower_bound_check

__version__ = "0.1.0"
