"""fairsel: selection under group-dependent estimation noise.

Analytic (large-population) selection rates, utilities, crossover budgets
and fairness-cost bounds for group-oblivious, Bayesian-optimal and
quota-constrained selection rules, plus a seeded finite-population
simulator and a dataset-driven experiment harness.
"""

__version__ = "0.1.0"
