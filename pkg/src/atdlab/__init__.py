"""atdlab: a desk-scale numerical laboratory for single-measurement inverse
obstacle scattering on polytope geometries.

Subpackages
-----------
specfun    cylindrical/spherical Bessel and Hankel functions, spherical
           harmonics, Gamma
geometry   polytope scenes, admissibility, Hausdorff-type distances,
           exterior decomposition, visibility paths, test-domain frames
forward2d  exterior Helmholtz solver (generalized impedance BCs) and
           far-field patterns in 2D
cgo        complex-exponential test solutions, dual direction sets,
           closed-form ray integrals
localexp   Fourier-Bessel / spherical local expansions and vanishing order
atd        test-domain coefficient extraction, degeneracy ladders,
           tau schedules, relation checks
smallness  three-sphere inequalities, chain propagation, boundary moduli
harness    CLI, sweep orchestration, CSV/JSON/SVG emission
"""

__version__ = "0.1.0"
