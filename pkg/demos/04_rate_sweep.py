"""Error vs sample size: the ~ 1/sqrt(m) statistical rate.

Runs the seeded experiment harness over a grid of sample sizes, fits the
log-log slope of mean error against m, and writes the sweep CSV plus a
dependency-free SVG plot next to this script.
"""
from pathlib import Path

from genphase import ExperimentConfig, emit_outputs, run_experiment

cfg = ExperimentConfig(
    prior_kind="linear-subspace", k=5, n=100, prior_seed=2,
    link_name="abs-noise-out", sigma=0.0,
    m_grid=(250, 500, 1000, 2000, 4000),
    trials=5, restarts=2,
    algorithms=("mprg", "ppower"),
    master_seed=11,
)

result = run_experiment(cfg)

print(f"{'m':>6} {'algorithm':<8} {'mean error':>11} {'stderr':>9}")
for a in result.aggregates:
    print(f"{a['m']:>6} {a['algorithm']:<8} {a['mean']:>11.4f} {a['stderr']:>9.4f}")

print()
for algo, fit in result.slopes.items():
    if fit is None:
        print(f"{algo}: not enough positive points for a slope fit")
    else:
        print(f"{algo}: log-log slope {fit.slope:+.3f} +/- {fit.ci95:.3f} "
              "(rate ~ 1/sqrt(m) would be -0.5)")

out = Path(__file__).resolve().parent
emit_outputs(result, "csv", out / "rate_sweep.csv")
emit_outputs(result, "svg", out / "rate_sweep.svg")
print(f"\nwrote {out / 'rate_sweep.csv'} and {out / 'rate_sweep.svg'}")
