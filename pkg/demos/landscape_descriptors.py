"""FDC and neutrality for a few hand-written landscapes, and the archive
cells they fall into."""
import numpy as np

from gpdiff import Domain, parse
from gpdiff import fla

domain = Domain()
functions = {
    "constant": "7",
    "sphere": "(add (mul x0 x0) (mul x1 x1))",
    "ridge": "(neg (sqrt (mul x0 x0)))",
    "wavy": "(add (sin (mul 10 x0)) (cos (mul 10 x1)))",
    "plateau": "(mul (sub x0 x0) x1)",
}

print(f"{'name':10s} {'fdc':>7s} {'neutral':>8s}  bin")
for name, text in functions.items():
    h = parse(text)
    desc = fla.describe(h, domain, equal_best=False,
                        fdc_rng=np.random.default_rng(0), walk_rng=np.random.default_rng(1))
    print(f"{name:10s} {desc.fdc:7.3f} {desc.neutrality:8.3f}  {desc.bin}")

# The inverted sphere's best sample sits in one corner, while the other
# three corners are nearly as good but far away, so FDC collapses.
inverted = parse("(neg (add (mul x0 x0) (mul x1 x1)))")
print("inverted sphere fdc:", round(fla.fdc(inverted, domain, rng=0), 3))
