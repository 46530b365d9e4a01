"""Error growth with prediction horizon, split by motion class.

Runs the benchmark harness over one trace per profile and prints mean
position error per model and class as the horizon stretches from 20 ms
to 100 ms. Higher-order variants hold their advantage longest on the
hard chunks.
"""

from posecast.classifier import MotionClass
from posecast.experiment import ExperimentConfig, run_experiment
from posecast.traces import PROFILES, generate_synthetic_trace


def main():
    traces = [generate_synthetic_trace(p, duration_s=20.0, seed=0)
              for p in PROFILES]
    config = ExperimentConfig(models=("KF", "ESKF", "p2o2", "p3o3"),
                              horizons_ms=(20, 60, 100),
                              drop_rates=(0.0,), repeats=1,
                              keep_samples=False)
    report = run_experiment(config, traces)

    for cls in MotionClass:
        rows = [(m, [report.aggregate(m, cls, h, 0.0)
                     for h in config.horizons_ms])
                for m in config.models]
        if all(r is None for _, row in rows for r in row):
            continue
        print(f"{cls.name} chunks, mean position error [mm]:")
        header = "".join(f"{h:>9}ms" for h in config.horizons_ms)
        print(f"  {'model':>6}{header}")
        for m, row in rows:
            cells = "".join("      --  " if r is None
                            else f"{r.pos_mean_mm:9.2f} " for r in row)
            print(f"  {m:>6} {cells}")
        print()


if __name__ == "__main__":
    main()
