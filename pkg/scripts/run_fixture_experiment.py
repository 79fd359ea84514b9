"""Calibrate and evaluate on the synthetic corpus under every normalization and decision rule."""
import argparse
import tempfile
import time
from pathlib import Path

from mispron.corpus import load_manifest
from mispron.detector import DecisionStrategy
from mispron.distance import NormalizationStrategy
from mispron.fixture import generate_corpus
from mispron.metrics import DistanceSummary, format_summary_table
from mispron.pipeline import calibrate_manifest, evaluate_manifest


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--n-utterances", type=int, default=50)
    ap.add_argument("--holdout", type=int, default=10)
    ap.add_argument("--misp-rate", type=float, default=0.4)
    ap.add_argument("--alpha", type=float, default=0.4)
    ap.add_argument("--out-dir", help="keep the corpus here instead of a temp dir")
    args = ap.parse_args()

    with tempfile.TemporaryDirectory() as tmp:
        root = Path(args.out_dir or tmp)
        generate_corpus(root, args.seed, args.n_utterances, 5, args.misp_rate, args.holdout)
        cal = load_manifest(root / "manifest_calibrate.json")
        ev = load_manifest(root / "manifest_evaluate.json")
        for norm in NormalizationStrategy:
            t0 = time.perf_counter()
            model, _ = calibrate_manifest(cal, args.alpha, strategy=norm)
            print(f"\n== {norm.value}  tau={model.tau_global:.4f}  tau_C={model.tau_correct:.4f}  tau_I={model.tau_incorrect:.4f}")
            print(f"   pools: correct {model.pool_correct.values[0]:.4g}..{model.pool_correct.values[-1]:.4g}"
                  f"  incorrect {model.pool_incorrect.values[0]:.4g}..{model.pool_incorrect.values[-1]:.4g}")
            for decision in DecisionStrategy:
                rep = evaluate_manifest(model, ev, decision)
                print(f"   {decision.value:<11} accuracy {rep['accuracy']:.3f}  counts {rep['counts']}")
                if decision is DecisionStrategy.GLOBAL:
                    sums = [DistanceSummary(**s) for s in rep["distance_summaries"]]
                    print("\n".join("   " + line for line in format_summary_table(sums, "SYN").splitlines()))
            print(f"   elapsed {time.perf_counter() - t0:.2f}s")


if __name__ == "__main__":
    main()
