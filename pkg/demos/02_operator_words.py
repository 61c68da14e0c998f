"""Apply operator words to the initial vector and to the tail vector v_inf.

Shows a defined word, a word that hits a vanishing denominator, and the same
word rescued by grouping two letters into one step.
"""
from sl2bosonic.graph import trace_path
from sl2bosonic.operators import INITIAL, Undefined, apply_word, resolve_groups, simple, word_on_vinf
from sl2bosonic.series import TruncationPolicy, format_series

print("summation-graph path of ACB:", " -> ".join(map(str, trace_path("ACB"))))

(term,) = apply_word("CBCAE", simple(INITIAL)).terms
print("CBCAE [1,0,z2] has vector part", term.vector)

try:
    apply_word("BCBCAE", simple(INITIAL))
except Undefined as exc:
    print("BCBCAE is undefined at letter position", exc.position)

grouped = apply_word("(B+E)CBCAE", simple(INITIAL))
print("(B+E)CBCAE routes:", grouped.routes)
for key, scalars in sorted(resolve_groups(grouped, 1).items()):
    print("   component", key, "->", len(scalars), "resolved scalar(s)")

chi = word_on_vinf("(A+B)", 1, TruncationPolicy(5))
for state, series in chi.items():
    print(f"((A+B) v_inf)_{state.i},{state.l} = {format_series(series)}")
