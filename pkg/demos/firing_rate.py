"""Mean firing rate of a regionally driven layer against the Poisson drive
strength, with a least-squares line through the points."""

from spikecl.harness import firing_rate_study

study = firing_rate_study([0.0, 0.5, 1.0, 1.5, 2.0, 2.5])
for mu, rate in zip(study.mu_ext, study.rates):
    print(f"mu_ext {mu:4.1f}  rate {rate:.4f}")
print(f"slope {study.slope:.4f}  intercept {study.intercept:.4f}  R^2 {study.r_squared:.4f}")
