"""
Designing trend-preserving concurrent filters
=============================================

Rolling multi-year estimates behave like moving averages of the underlying
annual series, and a k-term moving average drags a trending series behind
by (k-1)/2 periods. This script designs filter families that undo the drag:
one filter per period length, all reducing to the same composite weights,
so that filtered 1y, 3y, and 5y estimates of a polynomial trend agree with
the trend itself -- using no future data and exact rational arithmetic.
"""

from myetrends import (
    DesignSpec,
    design_filters,
    sma,
    variance_inflation,
    verify_filter_set,
)

###############################################################################
# The building block: the k-term rolling-average polynomial. Applied through
# the backshift operator, its coefficients weight the present and past values.

for k in (1, 3, 5):
    print(f"avg({k}) = {sma(k)}")

###############################################################################
# Design a family for periods {1, 3, 5} that preserves linear trends. The
# result is a correction polynomial (phi), one filter per period (psi), and
# the common composite every period reduces to.

spec = DesignSpec(periods=(1, 3, 5), degree=1)
fs = design_filters(spec)

print(f"\ndesign: {fs.spec}")
print(f"phi    = {fs.phi}")
for k in spec.periods:
    print(f"psi[{k}] = {fs.psi[k]}")
print(f"common = {fs.common}")

###############################################################################
# Every coefficient is an exact fraction, so the defining identities can be
# checked with zero tolerance: weights sum to one, the first derivative at
# z = 1 vanishes, and psi[k] times avg(k) equals the common composite.

report = verify_filter_set(fs)
print(f"\n{report}")
print("all checks passed" if report.passed else "SOMETHING IS WRONG")

###############################################################################
# Filtering amplifies (or damps) independent noise by the sum of squared
# weights. The 5y filter pays the most for undoing the longest delay.

print()
for k in spec.periods:
    vif = variance_inflation(fs.psi[k])
    print(f"variance inflation psi[{k}] = {vif} ({float(vif):.2f})")

###############################################################################
# The same machinery handles quadratic trends -- longer filters, bigger
# weights, same exact verification.

quad = design_filters(DesignSpec(periods=(1, 3, 5), degree=2))
print(f"\nquadratic family:")
for k in (1, 3, 5):
    print(f"psi[{k}] = {quad.psi[k]}")
print(f"verified: {verify_filter_set(quad).passed}")
