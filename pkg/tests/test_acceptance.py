"""End-to-end acceptance suite; one test per criterion.

Run with ``pytest tests/test_acceptance.py -v -s`` to get one printed
PASS line per criterion (failures show up as ordinary pytest failures).
"""

import math
import time

import numpy as np
import pytest
import yaml

import macjam as mj
from macjam.cli import main, run_sweep
from _support import random_alloc, random_config


def _report(num: str, detail: str):
    print(f"\n[acceptance] criterion {num}: PASS ({detail})")


@pytest.fixture(scope="module")
def certificate_suite():
    """200 random solved configs shared by the certificate and ratio criteria."""
    rng = np.random.default_rng(1905)
    suite = []
    for _ in range(200):
        cfg = random_config(rng)
        budget = mj.JammerBudget(float(10 ** rng.uniform(-1, 4)))
        suite.append((cfg, budget, mj.solve_kkt(cfg, budget)))
    return suite


def test_criterion_01_oracle_equivalence():
    rng = np.random.default_rng(31415)
    start = time.perf_counter()
    worst = 0.0
    for i in range(30):
        cfg = random_config(rng, k=[1, 2, 3][i % 3])
        budget = mj.JammerBudget(float(10 ** rng.uniform(-1, 4)))
        kkt = mj.solve_kkt(cfg, budget)
        oracle = mj.solve_oracle(cfg, budget, grid_resolution=1e-3)
        worst = max(worst, abs(kkt.rho_star - oracle.rho_star))
        assert abs(kkt.rho_star - oracle.rho_star) <= 1e-4
    elapsed = time.perf_counter() - start
    assert elapsed < 60.0
    _report("1", f"30 configs, worst |drho| = {worst:.2e}, {elapsed:.1f} s")


def test_criterion_02_closed_form_consistency():
    rng = np.random.default_rng(27182)
    worst_alloc = worst_rho = 0.0
    for _ in range(30):
        cfg = random_config(rng)
        pt, pd, tt = cfg.train_power_vec(), cfg.data_power_vec(), cfg.train_len_vec()
        t, td, s = cfg.block_len, cfg.data_len, float(pd.sum())
        delta = float((pt * tt**2).sum())
        w = tt * np.sqrt(pd * pt)
        eta = float(w.sum())
        need = max(
            td * (1.0 + s) - tt.sum() - delta,
            float(np.max(2.0 * eta * tt * (1.0 + pt * tt) / w - (t + delta + td * s))),
            float(t),
        )
        budget = mj.JammerBudget(2.0 * need / t)
        cf = mj.solve_closed_form(cfg, budget)
        assert cf is not None, "budget was chosen to make the closed form interior"
        kkt = mj.solve_kkt(cfg, budget)
        d_alloc = float(np.max(np.abs(cf.alloc.as_vector() - kkt.alloc.as_vector())))
        d_rho = abs(cf.rho_star - kkt.rho_star)
        worst_alloc = max(worst_alloc, d_alloc)
        worst_rho = max(worst_rho, d_rho)
        assert d_alloc <= 1e-4
        assert d_rho <= 1e-6
    _report("2", f"30 interior configs, worst dalloc {worst_alloc:.2e}, drho {worst_rho:.2e}")


def test_criterion_03_asymptotic_limit(fig_setup):
    _, cfg = fig_setup
    result = mj.solve(cfg, mj.JammerBudget(mj.db_to_linear(60.0)))
    assert abs(result.alloc.zeta_d - 0.5) < 1e-2
    w = cfg.train_len_vec() * np.sqrt(cfg.train_power_vec() * cfg.data_power_vec())
    zt = result.alloc.zeta_t_vec()
    shares = zt / zt.sum()
    targets = w / w.sum()
    rel = float(np.max(np.abs(shares / targets - 1.0)))
    assert rel < 1e-2
    _report("3", f"|zeta_d - 1/2| = {abs(result.alloc.zeta_d - 0.5):.2e}, share error {rel:.2e}")


def test_criterion_04_kkt_certificate(certificate_suite):
    worst = 0.0
    for cfg, budget, res in certificate_suite:
        residual, _ = mj.evaluate_kkt(
            res.alloc.zeta_t_vec(), res.alloc.zeta_d, res.nu_star, cfg, budget
        )
        worst = max(worst, residual, res.kkt_residual)
        assert residual < 1e-8
        assert res.kkt_residual < 1e-8
    _report("4", f"200 configs, worst residual {worst:.2e}")


def test_criterion_05_interior_ratio_law(certificate_suite):
    worst = 0.0
    pairs = 0
    for cfg, budget, res in certificate_suite:
        zt = res.alloc.zeta_t_vec()
        free = zt > 1e-6
        if free.sum() < 2:
            continue
        e = budget.avg_power * cfg.block_len
        pt, pd, tt = cfg.train_power_vec(), cfg.data_power_vec(), cfg.train_len_vec()
        vals = (pd * pt * tt**2 / (e * zt + (pt * tt + 1.0) * tt) ** 2)[free]
        spread = float((vals.max() - vals.min()) / vals.max())
        worst = max(worst, spread)
        pairs += 1
        assert spread < 1e-6
    assert pairs > 50  # the suite must actually exercise multi-user interiors
    _report("5", f"{pairs} configs with >= 2 free ratios, worst spread {worst:.2e}")


def test_criterion_06_bound_sandwich():
    rng = np.random.default_rng(6174)
    mc = mj.MonteCarloSettings(samples=200_000, seed=8)
    worst_gap = 0.0
    for _ in range(100):
        cfg = random_config(rng)
        alloc = random_alloc(rng, cfg.n_users)
        budget = mj.JammerBudget(float(10 ** rng.uniform(-2, 3)))
        report = mj.rate_report(alloc, cfg, budget, mc)
        slack = 3.0 * report.r_mc_halfwidth
        assert report.r_lb <= report.r_mc + slack
        assert report.r_mc - slack <= report.r_ub
        rho = mj.objective_rho(alloc, cfg, budget)
        identity = (
            cfg.data_len
            / cfg.block_len
            * math.log2((1.0 + rho) / (1.0 + rho * math.exp(-mj.EULER_GAMMA)))
        )
        gap_err = abs((report.r_ub - report.r_lb) - identity)
        worst_gap = max(worst_gap, gap_err)
        assert gap_err <= 1e-12
    _report("6", f"100 pairs at 200k samples, worst gap-identity error {worst_gap:.2e}")


def test_criterion_07_corollary_orderings():
    # Sampled in the high-jamming-energy regime where the pairwise orderings
    # bind (see the low-energy reversal test in test_optimizer for the
    # boundary behavior).
    rng = np.random.default_rng(42)
    counts = {1: 0, 2: 0, 3: 0}
    for _ in range(100):
        base_pt = float(10 ** rng.uniform(0.0, 1.5))
        base_pd = float(10 ** rng.uniform(0.0, 1.5))
        tl = int(rng.integers(1, 4))
        factor = float(10 ** rng.uniform(0.1, 1.0))
        pw = float(10 ** rng.uniform(2.0, 4.0))
        for corollary in (1, 2, 3):
            if corollary == 1:
                pair = (
                    mj.UserParams(base_pt, base_pd * factor, tl),
                    mj.UserParams(base_pt, base_pd, tl),
                )
            elif corollary == 2:
                pair = (
                    mj.UserParams(base_pt * factor, base_pd, tl),
                    mj.UserParams(base_pt, base_pd, tl),
                )
            else:
                pair = (
                    mj.UserParams(base_pt, base_pd, tl + int(rng.integers(1, 3))),
                    mj.UserParams(base_pt, base_pd, tl),
                )
            cfg = mj.SystemConfig(100, pair)
            res = mj.solve_kkt(cfg, mj.JammerBudget(pw))
            verdicts = mj.check_corollary_orderings(res, cfg)
            relevant = [v for v in verdicts if v.corollary == corollary]
            assert relevant and all(v.passed for v in relevant)
            counts[corollary] += 1
    assert all(n == 100 for n in counts.values())
    _report("7", "100 instances per ordering, all satisfied")


def test_criterion_08a_activation_order(fig_sweep_rows):
    active_prev = None
    for row in fig_sweep_rows:
        active = [z > 1e-9 for z in row.zeta_t]
        for k in range(3):
            if active[k]:
                assert all(active[k + 1:]), (
                    f"user {k + 1} active before a higher-budget user at {row.pw_db} dB"
                )
        if active_prev is not None:
            for k in range(4):
                assert not (active_prev[k] and not active[k])
        active_prev = active
    first_active = [
        next(r.pw_db for r in fig_sweep_rows if r.zeta_t[k] > 1e-9) for k in range(4)
    ]
    assert first_active[3] <= first_active[2] <= first_active[1] <= first_active[0]
    _report("8a", f"activation dB thresholds {first_active} in budget order 4,3,2,1")


def test_criterion_08b_data_phase_threshold(fig_sweep_rows):
    active = [row.zeta_d > 1e-9 for row in fig_sweep_rows]
    crossings = sum(1 for a, b in zip(active, active[1:]) if a != b)
    assert crossings == 1
    threshold_db = next(row.pw_db for row, a in zip(fig_sweep_rows, active) if a)
    assert 15.0 <= threshold_db <= 25.0
    _report("8b", f"single data-phase activation at {threshold_db:g} dB")


def test_criterion_08c_optimal_strictly_below_uniform(fig_sweep_rows):
    worst_margin = math.inf
    for row in fig_sweep_rows:
        assert row.opt.r_mc < row.unif.r_mc, f"not strictly lower at {row.pw_db} dB"
        worst_margin = min(worst_margin, row.unif.r_mc - row.opt.r_mc)
    _report("8c", f"71 sweep points, smallest achievable-rate margin {worst_margin:.3e}")


def test_criterion_08d_peak_rate_reduction(fig_sweep_rows):
    peak = max(row.rate_reduction_pct for row in fig_sweep_rows)
    assert 35.0 <= peak <= 90.0, (
        f"peak rate reduction over the sweep is {peak:.2f}%, outside [35, 90]"
    )
    _report("8d", f"peak rate reduction {peak:.2f}%")


def test_criterion_09_zero_budget_flatness(tmp_path, capsys):
    rng = np.random.default_rng(99)
    cfg = random_config(rng, k=3)
    budget = mj.JammerBudget(0.0)
    values = [mj.objective_rho(random_alloc(rng, 3), cfg, budget) for _ in range(100)]
    assert max(values) - min(values) < 1e-12
    scenario = tmp_path / "nojam.scenario"
    scenario.write_text(
        "block_len: 20\n"
        "users:\n"
        "  - {train_len: 1, train_power_db: 10.0, data_power_db: 10.0}\n"
        "  - {train_len: 1, train_power_db: 8.0, data_power_db: 6.0}\n"
        "jammer: {power_db: -.inf}\n"
        "mc: {samples: 5000, seed: 11}\n"
        "output: nojam\n"
    )
    alloc_file = tmp_path / "alloc.yaml"
    alloc_file.write_text(yaml.safe_dump({"zeta_t": [0.6, 0.3], "zeta_d": 0.1}))
    assert main(["rates", str(scenario), "--alloc", "uniform"]) == 0
    out_uniform = capsys.readouterr().out.splitlines()[1:]
    assert main(["rates", str(scenario), "--alloc", f"file:{alloc_file}"]) == 0
    out_file = capsys.readouterr().out.splitlines()[1:]
    assert out_uniform == out_file
    _report("9", "rho flat to < 1e-12 and CLI reports identical at zero budget")


def test_criterion_10_determinism(tmp_path):
    scenario = tmp_path / "tiny.scenario"
    scenario.write_text(
        "block_len: 12\n"
        "users:\n"
        "  - {train_len: 1, train_power_db: 12.0, data_power_db: 8.0}\n"
        "  - {train_len: 2, train_power_db: 6.0, data_power_db: 10.0}\n"
        "jammer: {sweep: {min_db: 0.0, max_db: 20.0, step_db: 10.0}}\n"
        "mc: {samples: 4000, seed: 21}\n"
        "output: tiny\n"
    )
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert main(["sweep", str(scenario), "--outdir", str(out_a)]) == 0
    assert main(["sweep", str(scenario), "--outdir", str(out_b)]) == 0
    csv_a = (out_a / "tiny.csv").read_bytes()
    assert csv_a == (out_b / "tiny.csv").read_bytes()
    spec = mj.load_scenario(scenario)
    cfg = mj.to_system_config(spec)
    alloc = mj.uniform_allocation(cfg)
    budget = mj.JammerBudget(mj.db_to_linear(10.0))
    serial = mj.sum_rate_mc(alloc, cfg, budget, spec.mc, workers=1)
    threaded = mj.sum_rate_mc(alloc, cfg, budget, spec.mc, workers=4)
    assert serial == threaded
    _report("10", "byte-identical sweep CSVs; estimate independent of worker count")
