"""
Quasistatic Fracture Module

Discrete quasistatic evolution of brittle cracks in 2D:
- mesh: structured triangulations and their adaptive 4-way subdivisions
- model: bulk, body and surface energy densities with quadrature
- fespace: cracked piecewise-affine fields and jump sets
- crack: crack sets and interpolating curves of initial cracks
- solver: per-step minimisation (exact enumeration and local search)
- evolution: time stepping, energy ledger, checks and refinement studies
- exporters: CSV, JSON and legacy VTK output
- cli: run configs, presets and subcommands
"""

__version__ = "1.0.0"
