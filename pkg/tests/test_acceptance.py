"""End-to-end acceptance checks for the whole package.

Each check prints one verdict line (visible even under plain ``pytest -v``)
with the measured numbers, then asserts the stated bound. The bounds are
the project's published targets; see README for the protocol.
"""

import time

import numpy as np
import pytest
from scipy.special import logsumexp

from cadm.classifiers import GaussianNB, RandomFeatureRLS
from cadm.datagen import DATASET_NAMES, make_stream
from cadm.detector import CadmConfig, run
from cadm.experiment import ExperimentSpec, run_experiment
from cadm.metrics import match_detections
from cadm.similarity import sim
from cadm.threshold import SimilarityWindow

SEEDS = tuple(range(1, 11))
TRUE_DRIFTS = tuple(range(26, 500, 25))  # 19 label flips in a 500-chunk stream

_cache = {}


def detection_runs(dataset, classifier="gnb", detect=True, n_chunks=500,
                   drift_every=25):
    """Ten seeded runs at the benchmark settings, cached across checks."""
    key = (dataset, classifier, detect, n_chunks, drift_every)
    if key not in _cache:
        reports, elapsed = [], []
        for seed in SEEDS:
            stream = make_stream(dataset, chunk_size=200, n_chunks=n_chunks,
                                 seed=seed, drift_every=drift_every)
            config = CadmConfig(label_ratio=0.2, window_size=10, k=2.0,
                                seed=seed, classifier=classifier, detect=detect)
            start = time.perf_counter()
            reports.append(run(stream, config))
            elapsed.append(time.perf_counter() - start)
        _cache[key] = (reports, elapsed)
    return _cache[key]


@pytest.fixture
def verdict(capsys):
    def emit(label, ok, detail):
        with capsys.disabled():
            print(f"\nacceptance {label}: {'PASS' if ok else 'FAIL'} — {detail}")
        return ok
    return emit


def test_acceptance_1_detection_quality(verdict):
    # per dataset over 10 seeds: mean detection rate >= 0.80, mean false
    # alarms <= 1 per run, every matched delay <= 3 chunks, < 10 s per run
    failing, details = [], []
    for dataset in DATASET_NAMES:
        reports, elapsed = detection_runs(dataset)
        summaries = [match_detections(TRUE_DRIFTS, r.drifts, 3) for r in reports]
        rate = float(np.mean([s.detection_rate for s in summaries]))
        fa = float(np.mean([len(s.false_alarms) for s in summaries]))
        delays = [d for s in summaries for d in s.delays]
        max_delay = max(delays, default=0)
        slowest = max(elapsed)
        details.append(f"{dataset}: rate={rate:.3f} fa/run={fa:.2f} "
                       f"max_delay={max_delay} max_runtime={slowest:.2f}s")
        if not (rate >= 0.80 and fa <= 1.0 and max_delay <= 3 and slowest < 10.0):
            failing.append(dataset)
    detail = "; ".join(details)
    ok = verdict("1/9 detection quality (rate>=0.80, fa<=1, delay<=3)",
                 not failing, detail)
    assert ok, detail


def test_acceptance_2_gnb_accuracy_uplift(verdict):
    # doubleline over 10 seeds: detection-enabled GNB accuracy >= 0.58 and
    # at least 10 points above the detection-disabled baseline
    cadm, _ = detection_runs("doubleline")
    base, _ = detection_runs("doubleline", detect=False)
    acc = float(np.mean([r.accuracy for r in cadm]))
    acc_base = float(np.mean([r.accuracy for r in base]))
    uplift = acc - acc_base
    ok = verdict("2/9 accuracy uplift, GaussianNB on doubleline",
                 acc >= 0.58 and uplift >= 0.10,
                 f"acc={acc:.4f} baseline={acc_base:.4f} uplift={uplift * 100:.1f}pp")
    assert ok


def test_acceptance_3_rls_accuracy_uplift(verdict):
    cadm, _ = detection_runs("doubleline", classifier="rls")
    base, _ = detection_runs("doubleline", classifier="rls", detect=False)
    acc = float(np.mean([r.accuracy for r in cadm]))
    acc_base = float(np.mean([r.accuracy for r in base]))
    uplift = acc - acc_base
    ok = verdict("3/9 accuracy uplift, random-feature RLS on doubleline",
                 uplift >= 0.10,
                 f"acc={acc:.4f} baseline={acc_base:.4f} uplift={uplift * 100:.1f}pp")
    assert ok


def test_acceptance_4_similarity_oracle(verdict):
    def oracle(A, B):
        total = 0.0
        for i in range(A.shape[0]):
            na, nb = np.linalg.norm(A[i]), np.linalg.norm(B[i])
            if na == 0.0 and nb == 0.0:
                total += 1.0
            elif na > 0.0 and nb > 0.0:
                total += float(A[i] @ B[i]) / (na * nb)
        return total / A.shape[0]

    rng = np.random.default_rng(2024)
    worst = 0.0
    ok = True
    for case in range(1000):
        m = int(rng.integers(1, 6))
        n = int(rng.integers(1, 51))
        signed = case % 2 == 1
        A = rng.normal(size=(m, n)) if signed else rng.random((m, n))
        B = rng.normal(size=(m, n)) if signed else rng.random((m, n))
        v = sim(A, B)
        worst = max(worst, abs(v - oracle(A, B)))
        lo = -1.0 if signed else 0.0
        ok = ok and lo <= v <= 1.0 and sim(B, A) == v
    ok = ok and worst < 1e-12
    ok = verdict("4/9 similarity vs independent oracle (1000 pairs)", ok,
                 f"max |diff|={worst:.2e}, bounds and symmetry on all cases")
    assert ok


def test_acceptance_5_threshold_oracle(verdict):
    rng = np.random.default_rng(77)
    mismatches = 0
    for _ in range(1000):
        cap = int(rng.integers(1, 13))
        k = float(rng.uniform(0.0, 4.0))
        window = SimilarityWindow(cap, k)
        history = []
        reset_at = int(rng.integers(0, 40))
        for i, v in enumerate(rng.random(40)):
            if i == reset_at:
                window.reset()
                history = []
            got = window.update(float(v))
            history.append(float(v))
            tail = np.array(history[-cap:], dtype=np.float64)
            if got != float(tail.mean() - k * tail.std()):
                mismatches += 1
    ok = verdict("5/9 adaptive threshold vs sliding-window oracle "
                 "(1000 sequences)", mismatches == 0,
                 f"{mismatches} mismatching steps, resets included")
    assert ok


def test_acceptance_6_classifier_equivalence(verdict):
    rng = np.random.default_rng(5150)
    gnb_worst = 0.0
    for _ in range(100):
        n = int(rng.integers(10, 120))
        d = int(rng.integers(1, 5))
        X = rng.normal(size=(n, d))
        y = rng.integers(0, 3, size=n)
        cut = int(rng.integers(1, n))
        inc = GaussianNB(3, d).fit(X[:cut], y[:cut]).partial_fit(X[cut:], y[cut:])
        batch = GaussianNB(3, d).fit(X, y)
        probe = rng.normal(size=(8, d))
        gnb_worst = max(gnb_worst, float(np.max(np.abs(
            inc.predict_prob(probe) - batch.predict_prob(probe)))))

    rls_worst = 0.0
    for _ in range(100):
        n = int(rng.integers(10, 80))
        X = rng.normal(size=(n, 2))
        y = rng.integers(0, 2, size=n)
        cut = int(rng.integers(1, n))
        seq = RandomFeatureRLS(2, 2, hidden=20, seed=3).fit(X[:cut], y[:cut])
        seq.partial_fit(X[cut:], y[cut:])
        H = np.tanh(X @ seq.weights_ + seq.bias_)
        T = np.eye(2)[y]
        beta = np.linalg.solve(H.T @ H + seq.ridge * np.eye(20), H.T @ T)
        rls_worst = max(rls_worst, float(np.max(np.abs(seq.beta_ - beta))))

    ok = verdict("6/9 incremental/batch equivalence (100 GNB splits, "
                 "100 RLS solves)", gnb_worst < 1e-9 and rls_worst < 1e-6,
                 f"gnb max |diff|={gnb_worst:.2e}, rls max |diff|={rls_worst:.2e}")
    assert ok


def test_acceptance_7_confidence_collapse(verdict):
    rng = np.random.default_rng(11)
    X = np.vstack([rng.normal(-3.0, 1.0, size=(100, 2)),
                   rng.normal(3.0, 1.0, size=(100, 2))])
    y = np.array([0] * 100 + [1] * 100)
    probe = np.array([[-3.0, -3.0]])
    clf = GaussianNB(2, 2).fit(X, y)
    before = float(clf.predict_prob(probe).max())
    clf.partial_fit(X, 1 - y)  # equal-size label-reversed batch
    after = float(clf.predict_prob(probe).max())
    ok = verdict("7/9 confidence collapse under label reversal",
                 before >= 0.99 and after <= 0.8,
                 f"max confidence {before:.4f} -> {after:.4f}")
    assert ok


def test_acceptance_8_reruns_are_byte_identical(verdict, tmp_path):
    spec = ExperimentSpec(dataset="line", chunk_size=100, n_chunks=60,
                          drift_every=25, seeds=(1, 2, 3))
    run_experiment(spec, tmp_path / "a")
    run_experiment(spec, tmp_path / "b")
    files = sorted(p.name for p in (tmp_path / "a").iterdir())
    same = all((tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()
               for f in files)
    ok = verdict("8/9 rerun determinism (byte-identical outputs)", same,
                 f"{len(files)} files compared: {', '.join(files)}")
    assert ok


def test_acceptance_9_stationary_false_alarms(verdict):
    # 100-chunk stationary streams, 10 seeds per dataset: at most 2 false
    # alarms in total across all 40 runs
    per_dataset = {}
    for dataset in DATASET_NAMES:
        reports, _ = detection_runs(dataset, n_chunks=100, drift_every=0)
        per_dataset[dataset] = sum(len(r.drifts) for r in reports)
    total = sum(per_dataset.values())
    breakdown = ", ".join(f"{name}={count}" for name, count in per_dataset.items())
    ok = verdict("9/9 stationary false-alarm budget (<=2 across 40 runs)",
                 total <= 2, f"total={total} ({breakdown})")
    assert ok


def test_acceptance_sanity_posterior_probe():
    # tiny independent cross-check that the probability machinery feeding
    # checks 1-3 is sane: hand-set two-class model, exact Bayes posterior
    X = np.array([[-1.0], [1.0], [0.0], [2.0]])
    clf = GaussianNB(2, 1).fit(X, np.array([0, 0, 1, 1]))
    logp = np.array([[-0.5 * 0.25], [-0.5 * 0.25]])  # x=0.5 equidistant
    expected = np.exp(logp - logsumexp(logp, axis=0))
    assert np.allclose(clf.predict_prob(np.array([[0.5]])), expected, atol=1e-9)
