"""Exact nested algebraic Bethe ansatz engine for U_q(gl_m) fundamental chains."""
__version__ = "0.1.0"
