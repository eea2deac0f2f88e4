"""Parameterized MinSAT dichotomy toolkit: classifier, two FPT pipelines, hardness generators and oracles."""

__version__ = "0.1.0"
