"""Walk the 18 bosonic families and list the terms that reach a given q-degree."""
from collections import Counter

from sl2bosonic.bosonic import families, family_term_closed, family_term_operator, theorem_terms
from sl2bosonic.series import TruncationPolicy

policy = TruncationPolicy(8)
terms = list(theorem_terms(2, policy))
print(f"{len(terms)} family terms contribute below q^9 at k=2")
print("per family:", dict(sorted(Counter(fid for fid, *_ in terms).items())))

fid, n, m, s = terms[-1]
print(f"family {fid} at (n,m,s)=({n},{m},{s}): word {families()[fid].word_at(n, m, s)}")
same = family_term_closed(fid, n, m, s, 2, policy) == family_term_operator(fid, n, m, s, 2, policy)
print("closed form equals operator evaluation:", same)
