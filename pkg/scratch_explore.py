"""Scratch exploration to pin test constants. Not part of the package."""
import numpy as np
from scipy.integrate import quad

import hrvkit as hk

# --- 1. sec7_1 rank-mode hill median over k in [500,1500], 5 seeds
print("== criterion 1: rank hill medians ==")
for seed in range(5):
    sm = hk.example_dataset(hk.GeneratorSpec("sec7_1", 5000, seed))
    m2 = hk.rank_transform(sm, 2).values
    pts = hk.hill_series(m2, range(500, 1501))
    alphas = [p.fit.alpha_hat for p in pts if p.fit]
    print(f" seed {seed}: median {np.median(alphas):.3f}  min {min(alphas):.3f} max {max(alphas):.3f}")

# --- 2. sec7_1 joint risk over k grid
print("== criterion 2: semiparam joint risk ==")
t = (100.0, np.sqrt(10.0))
for seed in [0, 1]:
    sm = hk.example_dataset(hk.GeneratorSpec("sec7_1", 5000, seed))
    vals = []
    for k in range(500, 5001, 500):
        est = hk.joint_exceedance_semiparam(sm, [0, 1], t, k, mode="rank")
        vals.append(est.probability)
    gm = float(np.exp(np.mean(np.log(vals))))
    print(f" seed {seed}: geomean {gm:.5f}  min {min(vals):.5f} max {max(vals):.5f} all_pos {all(v>0 for v in vals)}")

# --- 3. small-sample contrast n=500
print("== criterion 3: HR zeros at n=500 ==")
for seed in range(5):
    sm = hk.example_dataset(hk.GeneratorSpec("sec7_1", 500, seed))
    zeros = 0
    pos_all = True
    for k in range(50, 501, 50):
        hr = hk.joint_exceedance_hr(sm, t, k)
        sp = hk.joint_exceedance_semiparam(sm, [0, 1], t, k, mode="rank")
        zeros += hr.probability == 0.0
        pos_all &= sp.probability > 0
    print(f" seed {seed}: hr zeros {zeros}/10, semiparam positive {pos_all}")

# --- 4. density L1
print("== criterion 4: density L1 ==")
def true_density(s):
    return np.where(s < 0.5, 0.5 * (1 - s) ** -2, 0.5 * s ** -2.0)
l1s = []
for seed in range(5):
    sm = hk.example_dataset(hk.GeneratorSpec("sec7_1", 5000, seed))
    atoms = hk.estimate_spectral_rank(sm, 2, 1000)
    tr = hk.transform_measure(atoms)
    curve = hk.density_estimate(tr)
    f = true_density(curve.grid)
    l1 = np.trapezoid(np.abs(curve.values - f), curve.grid)
    l1s.append(l1)
    print(f" seed {seed}: L1 {l1:.4f}  integral {curve.integral():.4f}  bw {curve.bandwidth:.4f} atoms {atoms.count}")
print(f" mean L1 {np.mean(l1s):.4f}")

# --- 5. iid pareto alphas at k=2000
print("== criterion 5: iid pareto alphas ==")
for seed in range(5):
    sm = hk.example_dataset(hk.GeneratorSpec("ex2_1", 100_000, seed, {"d": 3, "alpha": 1.0}))
    rel = []
    for l in (1, 2, 3):
        fit = hk.hill_estimate(sm.level_values(l), 2000)
        rel.append((fit.alpha_hat - l) / l)
    print(f" seed {seed}: rel errors {[f'{r:+.3f}' for r in rel]}")

# --- 6. ex2_2 detection, standard, defaults, k=2000
print("== criterion 6: ex2_2 detection ==")
for seed in range(3):
    sm = hk.example_dataset(hk.GeneratorSpec("ex2_2", 100_000, seed))
    rep = hk.sequential_hrv_search(sm, mode="standard", k=2000)
    lv1 = rep.level(1)
    lv3 = rep.level(3)
    print(f" seed {seed}: verdicts {lv1.verdicts} masses { {p: round(m,3) for p,m in lv1.mass_below_epsilon.items()} } "
          f"lvl2 visited {rep.level(2).visited} stop {rep.stop_reason} "
          f"a3 {lv3.fit.alpha_hat if lv3.fit else None}")

# --- 7. iid pareto detection standard k=1000 eps .4 cutoff .85
print("== detect example: iid pareto all levels ==")
for seed in range(3):
    sm = hk.example_dataset(hk.GeneratorSpec("ex2_1", 100_000, seed, {"d": 3}))
    rep = hk.sequential_hrv_search(sm, mode="standard", k=1000,
                                   config=hk.DetectionConfig(epsilon=0.4, cutoff=0.85))
    alphas = [f"{e.fit.alpha_hat:.2f}" if e.fit else None for e in rep.levels]
    l1m = {p: round(m, 3) for p, m in rep.level(1).mass_below_epsilon.items()}
    l2m = {p: round(m, 3) for p, m in rep.level(2).mass_below_epsilon.items()}
    print(f" seed {seed}: visited {[e.visited for e in rep.levels]} alphas {alphas} stop {rep.stop_reason} l1m {l1m} l2m {l2m}")

# --- 8. sec7_1 rank detection eps/cutoff scan
print("== detect example: sec7_1 rank ==")
for seed in range(3):
    sm = hk.example_dataset(hk.GeneratorSpec("sec7_1", 5000, seed))
    for eps, cut in [(0.05, 0.9), (0.5, 0.8)]:
        rep = hk.sequential_hrv_search(sm, mode="rank", k=1000,
                                       config=hk.DetectionConfig(epsilon=eps, cutoff=cut))
        l1 = rep.level(1)
        a2 = rep.level(2).fit.alpha_hat if rep.level(2).fit else None
        print(f" seed {seed} eps {eps}: l1 mass {l1.mass_below_epsilon} verdict {l1.verdicts} stop {rep.stop_reason} a2 {a2}")

# --- 9. linear combination risk
print("== linear combination ==")
rng = np.random.default_rng(123)
x = (1 - rng.random(10_000_000)) ** -1.0
y = (1 - rng.random(10_000_000)) ** -0.5
mc_truth = float(np.mean(x + y > 100.0))
print(f" MC truth P[X+Y>100] ~ {mc_truth:.6f}")
for seed in range(3):
    sm = hk.example_dataset(hk.GeneratorSpec("sec7_1", 5000, seed))
    for k in (100, 200, 500, 1000):
        import warnings as w
        with w.catch_warnings():
            w.simplefilter("ignore")
            est = hk.linear_combination_risk(sm, (1.0, 1.0), 100.0, k)
        print(f" seed {seed} k {k}: {est.probability:.5f} ratio {est.probability/mc_truth:.2f} "
              f"interior {est.components['interior']:.5f} warn {len(est.diagnostics['warnings'])}")

# --- 10. noncompliance
print("== noncompliance sec7_1 ==")
exact = 0.01 + 0.1 - 0.001
for seed in range(3):
    sm = hk.example_dataset(hk.GeneratorSpec("sec7_1", 5000, seed))
    rep = hk.sequential_hrv_search(sm, mode="rank", k=1000,
                                   config=hk.DetectionConfig(epsilon=0.5, cutoff=0.8))
    est = hk.noncompliance_probability(sm, t, rep, 1000)
    print(f" seed {seed}: {est.probability:.4f} vs {exact:.4f} ratio {est.probability/exact:.3f} comps {{k: round(v,5) for k,v in est.components.items()}}")

print("== noncompliance ex2_2 ==")
exact3 = 0.02 + 0.02 - 0.0004  # P[X>50 or Y>50] with 2X>100 == X>50
for seed in range(3):
    sm = hk.example_dataset(hk.GeneratorSpec("ex2_2", 100_000, seed))
    rep = hk.sequential_hrv_search(sm, mode="standard", k=2000)
    est = hk.noncompliance_probability(sm, (50.0, 100.0, 50.0), rep, 2000)
    comps = {kk: round(v, 5) for kk, v in est.components.items()}
    print(f" seed {seed}: {est.probability:.4f} vs {exact3:.4f} ratio {est.probability/exact3:.3f} {comps}")

# --- 11. ex2_4 rectangles
print("== criterion 10: ex2_4 rectangles ==")
sm = hk.example_dataset(hk.GeneratorSpec("ex2_4", 1_000_000, 0))
inv = hk.inverse_rank_matrix(sm)
m2 = hk.rank_transform(sm, 2)
k = 5000
mk = m2.order_stats[k - 1]
std = inv / mk
for w1 in (1, 2):
    for w2 in (1, 2):
        for w3 in (1, 2):
            est = np.mean((std[:, 0] > w1) & (std[:, 1] > w2) & (std[:, 2] > w3)) * sm.n / k
            truth = 1.0 / np.sqrt(max(w1, w3) * max(w1, w2) * max(w2, w3))
            print(f" w=({w1},{w2},{w3}): est {est:.4f} truth {truth:.4f} rel {(est-truth)/truth:+.3f}")

# --- 12. sec7_1 nu-hat rectangles n=1e5 k=2000
print("== sec7_1 rectangles ==")
sm = hk.example_dataset(hk.GeneratorSpec("sec7_1", 100_000, 0))
inv = hk.inverse_rank_matrix(sm)
mk = hk.rank_transform(sm, 2).order_stats[2000 - 1]
std = inv / mk
for x0 in (1, 2):
    for y0 in (1, 2):
        est = np.mean((std[:, 0] > x0) & (std[:, 1] > y0)) * sm.n / 2000
        truth = 1.0 / (x0 * y0)
        print(f" (x,y)=({x0},{y0}): est {est:.4f} truth {truth:.4f} rel {(est-truth)/truth:+.3f}")

# --- 13. Pareto MC hill
print("== pareto hill medians ==")
for alpha in (0.5, 1.0, 2.0, 3.0):
    meds = []
    for seed in range(20):
        xs = hk.pareto_sample(alpha, 100_000, seed)
        meds.append(hk.hill_estimate(xs, 2000).alpha_hat)
    med = np.median(meds)
    print(f" alpha {alpha}: median {med:.4f} rel {(med-alpha)/alpha:+.4f}")

# --- 14. marginal tail prob
print("== marginal tail prob ==")
for seed in range(5):
    xs = hk.pareto_sample(1.0, 100_000, seed)
    p = hk.marginal_tail_probability(xs, 2000, 100.0)
    print(f" seed {seed}: {p:.5f} rel {(p-0.01)/0.01:+.3f}")

# --- 15. polar hill
print("== polar hill ==")
atoms = hk.SpectralAtoms(level=2, points=np.array([[1.0, 1.0, 0.5], [2.0, 1.0, 0.2]]), weights=np.array([0.5, 0.5]))
sm = hk.polar_sample(1.7, atoms, 100_000, 7)
fit = hk.hill_estimate(sm.level_values(2), 2000)
print(f" alpha_hat {fit.alpha_hat:.4f} (target 1.7) rel {(fit.alpha_hat-1.7)/1.7:+.3f}")
lv = sm.level_values(2)
print(" theta^(2)=1 check: every row's 2nd largest equals radius:", np.allclose(np.sort(sm.values)[:, 1], np.sort(lv)))

# --- 16. quadrature adjudication
print("== radial integral vs quad ==")
rng = np.random.default_rng(0)
worst = 0.0
for _ in range(100):
    b1, b2 = rng.uniform(0.2, 3.0, 2)
    alpha = rng.uniform(0.2, 4.0)
    a = rng.uniform(0.05, 10.0)
    b = a * rng.uniform(1.0001, 50.0)
    closed = hk.pareto_radial_integral(b1 + b2 - 2.0, alpha, a, b)
    num, _ = quad(lambda r: r ** (b1 + b2 - 2.0) * alpha * r ** (-alpha - 1.0), a, b, limit=200)
    rel = abs(closed - num) / abs(num)
    worst = max(worst, rel)
print(f" worst rel err {worst:.2e}")
# log branch
b1, b2 = 1.3, 1.9
alpha = b1 + b2 - 2.0
closed = hk.pareto_radial_integral(b1 + b2 - 2.0, alpha, 0.5, 7.0)
num, _ = quad(lambda r: r ** (b1 + b2 - 2.0) * alpha * r ** (-alpha - 1.0), 0.5, 7.0)
print(f" log branch: closed {closed:.10f} quad {num:.10f}")
eps_e = hk.pareto_radial_integral(b1 + b2 - 2.0, alpha - 1e-6, 0.5, 7.0)
print(f" continuity |closed(e=1e-6)-closed(0)|/closed(0) = {abs(eps_e-closed)/closed:.2e}")
