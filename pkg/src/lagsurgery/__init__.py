"""Numerical constructions of monotone Lagrangian surfaces by surgery in
CP^2 and CP^1 x CP^1.

Modules
-------
ambient
    Charts, Fubini-Study form, moment maps, action-angle coordinates.
surfaces
    Patches, atlases, meshes, Lagrangian defect, topology, line traces.
handle
    Profile curve and the Lagrangian handle resolving a double point.
bundle_surgery
    Fibrewise handles along isotropic circles.
catalog
    The named constructions and their tuning utilities.
invariants
    Disk areas and Maslov indices.
cli
    Scene runner and verification suites.
"""
from .ambient import CP2_SPACE, PRODUCT_SPACE, AmbientSpace
from .catalog import CONSTRUCTIONS, build
from .surfaces import LagrangianAtlas, Patch

__all__ = ["AmbientSpace", "CP2_SPACE", "PRODUCT_SPACE", "CONSTRUCTIONS", "build",
           "LagrangianAtlas", "Patch"]
__version__ = "0.1.0"
