"""Strand algebras, type D structures and A-infinity modules over F2."""
from __future__ import annotations

from .errors import StrandError
from .modcat import AInfObject, box, check_structure, dual, reduce
from .pairing import ext_typeD, hochschild_cohomology, koszul_check, mor
from .pmc import PointedMatchedCircle, pmc_new, pmc_standard
from .strandalg import DgAlgebra, algebra, poincare

__version__ = "0.1.0"
