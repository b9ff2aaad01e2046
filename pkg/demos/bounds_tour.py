"""Walk the catalog through the bound pipeline at a few truncation orders.

    python demos/bounds_tour.py
"""

from gkbound import ccp

for name in ("grothendieck", "kappa", "haagerup", "fk(3)"):
    print(f"\n{name}")
    for order in (7, 15, 41):
        rep = ccp.bound(name, order)
        print(f"  order {order:>2}: c* = {rep.c_star:.10f}  bound = {rep.bound:.10f}  "
              f"route = {rep.route}  last |beta| = {rep.tail_indicator:.2e}")
    if ccp.catalog(name).flags:
        print("  flags:", ", ".join(ccp.catalog(name).flags))
