"""Order-k germs only see the order-k part of the map and model.

Every coefficient of degree k+1..k+3 is perturbed at random; the order-k
germ must not move at all, in exact arithmetic.  A second perturbation of
one low-degree coefficient shows that the check is not vacuous.

Run: python demos/key_observation.py
"""
from crjets import CrSignature
from crjets.experiments import ExperimentConfig, key_observation_check

for sig in [CrSignature(1, 1, 1, 2, 3), CrSignature(1, 1, 2, 3, 4), CrSignature(1, 2, 1, 2, 3)]:
    report = key_observation_check(ExperimentConfig(sig, seed=7, trials=20), strict=False)
    print(
        f"m={sig.m} d={sig.d} m'={sig.mprime} nu={sig.nu} k={sig.k}: "
        f"{report.failures}/{report.trials} germs moved under high-order noise, "
        f"{report.converse_changed}/{report.trials} moved under low-order noise"
    )
