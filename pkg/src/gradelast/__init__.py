"""gradelast: second-order reformulations of static gradient elasticity.

A verified numerical laboratory implementing two second-order reformulations
of the fourth-order equation of strain-gradient elastostatics (a two-stage
pseudo-differential scheme on a periodic strip and an augmented mixed system
in displacement and strain gradient), together with direct fourth-order
reference solvers and convergence studies against the analytic rate bounds.
"""

__version__ = "0.1.0"
