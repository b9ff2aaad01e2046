"""Exact (inf,1) norms of the scaled Walsh-Hadamard matrices and the CHSH-type witness.

    python demos/hadamard_norms.py
"""

import math

import numpy as np

from gkbound import matgt

for m in (1, 2, 3, 4):
    res = matgt.a_had_norm_exact(m)
    print(f"||A^Had_{m}||_(inf,1) = {res.value}   witness p = {res.p}")

w = matgt.bell_witness()
quantum = float(np.trace(matgt.a_had(1).data @ matgt.wht(1).data))
print(f"\ntr(A^Had_1 H_1) = {quantum:.15f}  (sqrt 2 = {math.sqrt(2):.15f})")
print(f"classical maximum over sign vectors = {w['classical_max_exact']}")
