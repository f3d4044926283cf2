"""
Countably infinite alphabets without truncation
===============================================

Streams over {1, 2, 3, ...} are handled by partitions that isolate one more
integer per level and lump the rest into a tail cell. The reference puts
mass 1/k - 1/(k+1) on each integer, so every level has finite, positive
cell masses and nothing is ever cut off.
"""

import math

from histmix import RunConfig, build_estimator, build_source, validate_config

cfg = validate_config(RunConfig(source="countable-geometric", levels=6, n=8192))
source = build_source(cfg)
est = build_estimator(cfg)

data = source.sample(cfg.n, seed=2)
est.observe_all(data)

# actual code length for the integers: subtract the log reference mass of
# each observed value from the density-based total
ref_bits = sum(math.log2(1.0 / (k * (k + 1))) for k in data.astype(int))
bits = -(est.joint_log_density / math.log(2) + ref_bits) / cfg.n
# entropy of geometric(1/2) over the integers: exactly 2 bits
p = 1.0 - cfg.ratio
entropy = (-(p * math.log2(p) + cfg.ratio * math.log2(cfg.ratio))) / p
print(f"stream: geometric on the positive integers, n = {cfg.n}")
print(f"largest value seen: {int(data.max())}")
print(f"code length   : {bits:.4f} bits/obs")
print(f"source entropy: {entropy:.4f} bits/obs")

# the posterior favors fine levels here: the true law is genuinely discrete,
# so resolving more integers always pays
print("posterior over levels:", " ".join(f"{w:.3f}" for w in est.posterior_weights))

# per-value probabilities are available directly
print()
for k in (1, 2, 3, 5, 9):
    rule_mass = 1.0 / (k * (k + 1))
    p = math.exp(est.log_density_at(float(k))) * rule_mass
    print(f"P(next = {k}) = {p:.4f}   (true {0.5 ** k:.4f})")
