"""
cubeplan: exact cost- and time-optimal motion planning in CAT(0) cube
complexes, driven by their posets with inconsistent pairs.
"""

from cubeplan.arm_model import ArmMove, ArmSpec, RemoteControl
from cubeplan.cube_complex import Certificate, CubeComplex, Refutation, extract_pip, from_pip, is_cat0
from cubeplan.geodesic import GeodesicPlan, geodesic, l1_geodesic, linf_geodesic
from cubeplan.pip_core import Pip, consistent_ideals, validate

__version__ = "0.1.0"

__all__ = [
    "ArmMove",
    "ArmSpec",
    "Certificate",
    "CubeComplex",
    "GeodesicPlan",
    "Pip",
    "Refutation",
    "RemoteControl",
    "consistent_ideals",
    "extract_pip",
    "from_pip",
    "geodesic",
    "is_cat0",
    "l1_geodesic",
    "linf_geodesic",
    "validate",
]
