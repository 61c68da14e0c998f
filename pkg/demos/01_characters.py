"""Compute the k=1 characters three ways and show that they agree.

    python3 demos/01_characters.py
"""
from sl2bosonic.bosonic import theorem_main_character
from sl2bosonic.paths import oracle_vector
from sl2bosonic.series import TruncationPolicy, format_series
from sl2bosonic.transfer import build_matrix, limit_character

K = 1
policy = TruncationPolicy(6)

print("transfer matrix for k=1, rows ordered (0,0), (0,1), (1,1):")
for row in build_matrix(K).rows():
    print("   ", row)

recursion = limit_character(K, policy)
oracle = oracle_vector(K, policy)
bosonic = theorem_main_character(K, policy)

for state, series in recursion.items():
    print(f"chi_{state.i},{state.l} = {format_series(series)}")

print("recursion == path oracle == bosonic sum:", recursion == oracle == bosonic)
