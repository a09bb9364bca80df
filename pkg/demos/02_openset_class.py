"""Openset classification: score a class that has no training data at all.

With shrinkage r > 0 the prior on class means is proper, so a class with
zero training patterns still has a predictive density: mean at the
origin, scale inflated by c* = 1/r. Appending such a class changes
nothing about the fitted classes (a* and B* stay identical); it only
adds a column. Patterns far from every trained class then fall to the
empty one.
"""

import numpy as np

from gausset import (
    ClassPrior,
    LabeledDataset,
    PriorHyper,
    accumulate,
    add_empty_class,
    build_model,
    class_posterior,
    column_marginal,
    posterior,
)

rng = np.random.default_rng(7)

# Two trained classes near the origin.
patterns = np.vstack([rng.normal([1.5, 0.0], 0.7, size=(25, 2)),
                      rng.normal([-1.5, 0.0], 0.7, size=(25, 2))])
ds = LabeledDataset(patterns, np.repeat([0, 1], 25), ("right", "left"))
post = posterior(accumulate(ds), PriorHyper.noninformative(r=1.0))

grown = add_empty_class(post)
print("a* before/after appending:", post.a_star, "/", grown.a_star)
print("B* shared bit for bit:", grown.b_star is post.b_star)
mu, c = column_marginal(grown, 2)
print(f"empty class marginal: mu* = {mu}, c* = {c}  (c* = 1/r)")

model = build_model(grown, class_names=("right", "left", "something-else"))
prior = ClassPrior.uniform(3)

print("\nposterior over (right, left, something-else):")
for x in ([1.5, 0.0], [-1.5, 0.0], [0.0, 4.0], [6.0, -6.0]):
    probs = class_posterior(model, np.asarray(x, dtype=float), prior)
    print(f"  x = {x!s:>14}: {np.round(probs, 3)}")

# The shrinkage r also moves the trained classes (their means shrink
# toward the origin and B* grows), so the openset share of a point is
# not a simple monotone function of r. Sweep it and look, then pick r
# by evidence maximization (see the shrinkage-tuning demo) rather than
# by hand.
print("\nprobability of the empty class at the origin as r varies:")
for r in (0.3, 1.0, 3.0, 10.0):
    post_r = add_empty_class(posterior(accumulate(ds), PriorHyper.noninformative(r)))
    model_r = build_model(post_r, class_names=("right", "left", "something-else"))
    probs = class_posterior(model_r, np.zeros(2), prior)
    print(f"  r = {r:5.1f}: P(something-else | x=0) = {probs[2]:.3f}")
