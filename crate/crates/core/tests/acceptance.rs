//! End-to-end acceptance checks. Each criterion prints one `PASS`/`FAIL`
//! line; the process exits non-zero if any fails. Pass criterion numbers as
//! arguments to run a subset.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vrjp_core::electrical::{harmonic_flow, rayleigh_monotonicity_check, thomson_upper_bound, weight_resistance, AnnuliFlow};
use vrjp_core::environment::{
    estimate_exp_moment, monotonicity_check, quadrature_1v, sample_s_with, sample_u_mcmc, ward_statistic,
    KernelChoice, SampleConfig, Selector, SingleVertexCdf, WardMatrices,
};
use vrjp_core::stats::{batch_means, ks_distance, total_variation};
use vrjp_core::transience::{kx_high_dim, nested_box_resistances, visit_bound_experiment, weakly_increasing, HOLDER_ORDER};
use vrjp_core::vrjp::{annealed_rwrc, count_visits, expected_visits, path_law, simulate_vrjp_with, ConductanceWalker, StopRule, DEFAULT_STEP_CAP};
use vrjp_core::weights::{
    constant_c, constant_ch, euclidean_hierarchical_pair, hierarchical_distance,
    hierarchical_wbar, phi, EuclideanLongRange, HierarchicalModel, HighDimModel, Profile,
};
use vrjp_core::WiredGraph;

type Check = Result<(bool, String), String>;

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Option<Duration>,
    run: fn() -> Check,
}

fn main() -> ExitCode {
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let criteria = [
        Criterion { id: 1, name: "matrix-tree exactness", budget: Some(secs(10)), run: matrix_tree },
        Criterion { id: 2, name: "single-vertex closed forms", budget: Some(secs(1)), run: single_vertex_closed_forms },
        Criterion { id: 3, name: "sampler validity", budget: Some(secs(300)), run: sampler_validity },
        Criterion { id: 4, name: "Ward determinant identity", budget: None, run: ward_identity },
        Criterion { id: 5, name: "moment bounds", budget: Some(secs(900)), run: moment_bounds },
        Criterion { id: 6, name: "hierarchical vs sup distance", budget: Some(secs(30)), run: distance_comparison },
        Criterion { id: 7, name: "annuli flow", budget: Some(secs(60)), run: annuli_flow },
        Criterion { id: 8, name: "electrical laws", budget: None, run: electrical_laws },
        Criterion { id: 9, name: "VRJP vs annealed walk", budget: Some(secs(600)), run: vrjp_equivalence },
        Criterion { id: 10, name: "transience-bound pipeline", budget: None, run: transience_pipeline },
        Criterion { id: 11, name: "monotonicity in the weights", budget: None, run: weight_monotonicity },
    ];
    let mut failed = 0;
    for c in criteria.iter().filter(|c| selected.is_empty() || selected.contains(&c.id)) {
        let started = Instant::now();
        let outcome = (c.run)();
        let elapsed = started.elapsed();
        let in_budget = c.budget.is_none_or(|b| elapsed <= b);
        let (pass, detail) = match outcome {
            Ok((ok, detail)) => (ok && in_budget, detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let budget = c.budget.map_or(String::new(), |b| format!(" of {:.0} s", b.as_secs_f64()));
        println!(
            "{} criterion {:>2} {} [{:.1} s{budget}]: {detail}",
            if pass { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            elapsed.as_secs_f64(),
        );
        if !pass {
            failed += 1;
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

/// Random tree plus extra edges on `n` vertices, weights in `weights`, at
/// least one positive pin.
fn random_wired_graph(rng: &mut ChaCha8Rng, n: usize, weights: (f64, f64), extra: f64) -> WiredGraph {
    let mut edges = Vec::new();
    for j in 1..n {
        edges.push((rng.random_range(0..j), j, rng.random_range(weights.0..weights.1)));
    }
    for a in 0..n {
        for b in a + 1..n {
            if !edges.iter().any(|&(x, y, _)| (x, y) == (a, b)) && rng.random::<f64>() < extra {
                edges.push((a, b, rng.random_range(weights.0..weights.1)));
            }
        }
    }
    let mut pins: Vec<f64> = (0..n)
        .map(|_| if rng.random::<f64>() < 0.5 { rng.random_range(weights.0..weights.1) } else { 0.0 })
        .collect();
    if pins.iter().all(|&h| h == 0.0) {
        let k = rng.random_range(0..n);
        pins[k] = rng.random_range(weights.0..weights.1);
    }
    WiredGraph::new(n, edges, pins).expect("connected by construction")
}

fn sampler(sweeps: usize, burn_in: usize) -> SampleConfig {
    SampleConfig {
        sweeps,
        burn_in,
        ..SampleConfig::default()
    }
}

fn matrix_tree() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let n = rng.random_range(1..=6);
        let g = random_wired_graph(&mut rng, n, (0.2, 3.0), 0.4);
        let u: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..=2.0)).collect();
        let det = g.log_det_laplacian(&u).map_err(e)?.exp();
        let trees = g.spanning_tree_sum(&u).map_err(e)?;
        worst = worst.max((det - trees).abs() / trees);
    }
    Ok((worst <= 1e-10, format!("50 graphs, max relative error {worst:.2e}")))
}

fn single_vertex_closed_forms() -> Check {
    let mut worst = [0.0f64; 3];
    for h in [0.5, 1.0, 2.0, 5.0] {
        let mass = quadrature_1v(h, Selector::Normalization).map_err(e)?;
        let pos = quadrature_1v(h, Selector::ExpMoment { sigma: 1.0, m: 1.0 }).map_err(e)?;
        let neg = quadrature_1v(h, Selector::ExpMoment { sigma: -1.0, m: 1.0 }).map_err(e)?;
        worst[0] = worst[0].max((mass - 1.0).abs());
        worst[1] = worst[1].max((pos - 1.0).abs());
        worst[2] = worst[2].max((neg - (1.0 + 1.0 / h)).abs());
    }
    let ok = worst[0] <= 1e-8 && worst[1] <= 1e-8 && worst[2] <= 1e-6;
    Ok((
        ok,
        format!("errors: mass {:.1e}, E[e^u] {:.1e}, E[e^-u] {:.1e}", worst[0], worst[1], worst[2]),
    ))
}

fn sampler_validity() -> Check {
    let g = WiredGraph::new(1, [], vec![1.0]).map_err(e)?;
    let batch = sample_u_mcmc(&g, &sampler(6_000_000, 2000), 3).map_err(e)?;
    let ess = batch.ess[0];
    let cdf = SingleVertexCdf::new(1.0).map_err(e)?;
    let ks = ks_distance(&batch.column(0), |x| cdf.eval(x));
    let mut ok = ess >= 1e6 && ks < 0.01 && !batch.flagged;
    let mut detail = format!("KS {ks:.4} at ESS {ess:.0}");

    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for k in 0..5 {
        let n = 2 + k % 4;
        let g = random_wired_graph(&mut rng, n, (0.5, 3.0), 0.3);
        let batch = sample_u_mcmc(&g, &sampler(200_000, 2000), 40 + k as u64).map_err(e)?;
        let xs: Vec<f64> = batch.column(0).iter().map(|u| u.exp()).collect();
        let est = batch_means(&xs, 30);
        ok &= est.within(1.0, 3.0) && !batch.flagged;
        detail += &format!("; graph {k} (n={n}) E[e^u_0] = {:.4} ± {:.4}", est.mean, est.se);
    }
    Ok((ok, detail))
}

fn ward_identity() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut ok = true;
    let mut details = Vec::new();
    let mut pointwise_failures = 0usize;
    let mut samples = 0usize;
    for k in 0..6 {
        let n = 2 + k % 4;
        let g = random_wired_graph(&mut rng, n, (0.5, 3.0), 0.4);
        // m_e ≤ 0.4 W_e keeps the statistic square integrable.
        let m: Vec<f64> = g
            .plus_weights()
            .iter()
            .map(|w| rng.random_range(0.0..=(0.4 * w).min(1.0)))
            .collect();
        let floor: f64 = g.plus_weights().iter().zip(&m).map(|(w, me)| 1.0 - me / w).product();
        let batch = sample_u_mcmc(&g, &sampler(100_000, 2000), 400 + k as u64).map_err(e)?;
        let mut values = Vec::with_capacity(batch.len());
        for u in batch.rows() {
            let s = sample_s_with(&g, u, &mut rng).map_err(e)?;
            values.push(ward_statistic(&g, u, &s, &m).map_err(e)?);
            let det = WardMatrices::new(&g, u, &s, &m).map_err(e)?.det_identity_minus();
            if det < floor * (1.0 - 1e-12) {
                pointwise_failures += 1;
            }
            samples += 1;
        }
        let est = batch_means(&values, 30);
        ok &= est.within(1.0, 3.0);
        details.push(format!("{:.4}±{:.4}", est.mean, est.se));
    }
    ok &= pointwise_failures == 0;
    Ok((
        ok,
        format!(
            "means [{}]; determinant floor violated on {pointwise_failures} of {samples} samples",
            details.join(", ")
        ),
    ))
}

fn moment_bounds() -> Check {
    let mut ok = true;
    let mut detail = String::new();

    let mut worst_ratio = 0.0f64;
    for w in [1.0, 4.0, 16.0] {
        for m in [1.0, 2.0] {
            for sigma in [1.0, -1.0] {
                let exact = quadrature_1v(w, Selector::ExpMoment { sigma, m }).map_err(e)?;
                let bound = ((2.0 * sigma * m - 1.0).powi(2) / (8.0 * w)).exp();
                worst_ratio = worst_ratio.max(exact / bound);
            }
        }
    }
    ok &= worst_ratio <= 1.0;
    detail += &format!("single edge: max moment/bound {worst_ratio:.4}");

    // The hierarchical scale induced by W̄ = 36, d = 1, α = 2.
    let wbar_h = hierarchical_wbar(36.0, 1, 2.0);
    let c_h = constant_ch(wbar_h, 2.0, 1.0).map_err(e)?;
    let mut worst = 0.0f64;
    for levels in 1..=3 {
        let g = HierarchicalModel::minimal(levels, wbar_h, 2.0).graph().map_err(e)?;
        let (holds, largest) = moments_below(&g, c_h, &sampler(100_000, 2000), 50 + levels as u64)?;
        ok &= holds;
        worst = worst.max(largest);
    }
    detail += &format!("; hierarchical W̄^H={wbar_h}: max E[e^(±u)] {worst:.4} vs c_H {c_h:.4}");

    for d in 1..=2 {
        let c = constant_c(36.0, d, 2.0, 1.0).map_err(e)?;
        let model = EuclideanLongRange::log_envelope(d, 36.0, 2.0);
        let mut worst = 0.0f64;
        for levels in 1..=3u32 {
            let g = model.box_graph(levels, 1e-9).map_err(e)?;
            let sweeps = if g.n() > 16 { 20_000 } else { 100_000 };
            let (holds, largest) = moments_below(&g, c, &sampler(sweeps, 1000), 60 + levels as u64)?;
            ok &= holds;
            worst = worst.max(largest);
        }
        detail += &format!("; Euclidean d={d}: max {worst:.4} vs C {c:.4}");
    }
    Ok((ok, detail))
}

/// `E[e^{±u_i}] ≤ bound + 3 SE` at every vertex; also returns the largest mean.
fn moments_below(g: &WiredGraph, bound: f64, config: &SampleConfig, seed: u64) -> Result<(bool, f64), String> {
    let batch = sample_u_mcmc(g, config, seed).map_err(e)?;
    let mut holds = !batch.flagged;
    let mut largest = 0.0f64;
    for i in 0..g.n() {
        for sigma in [1.0, -1.0] {
            let est = estimate_exp_moment(&batch, i, sigma, 1.0, 0.0).map_err(e)?.estimate;
            holds &= est.below(bound, 3.0);
            largest = largest.max(est.mean);
        }
    }
    Ok((holds, largest))
}

fn distance_comparison() -> Check {
    let mut pairs = 0u64;
    let mut violations = 0u64;
    for d in 1..=12usize {
        for levels in 1..=(12 / d) as u32 {
            let side = 1i64 << levels;
            let count = (side as usize).pow(d as u32);
            let points: Vec<Vec<i64>> = (0..count)
                .map(|mut idx| {
                    (0..d)
                        .map(|_| {
                            let c = (idx % side as usize) as i64;
                            idx /= side as usize;
                            c
                        })
                        .collect()
                })
                .collect();
            let digits: Vec<Vec<u8>> = points.iter().map(|p| phi(p, levels)).collect::<Result<_, _>>().map_err(e)?;
            for a in 0..count {
                for b in a + 1..count {
                    let dh = hierarchical_distance(&digits[a], &digits[b]).map_err(e)?;
                    let sup = points[a].iter().zip(&points[b]).map(|(x, y)| (x - y).abs()).max().unwrap_or(0);
                    if (1i64 << dh.div_ceil(d)) <= sup {
                        violations += 1;
                    }
                    pairs += 1;
                }
            }
        }
    }
    Ok((violations == 0, format!("{violations} violations among {pairs} pairs")))
}

fn annuli_flow() -> Check {
    let mut ok = true;
    let mut worst_ratio = 0.0f64;
    for d in 1..=3 {
        let flow = AnnuliFlow::new(d, 5).map_err(e)?;
        flow.check_node_rule().map_err(e)?;
        let counted = flow.counted_sizes();
        for k in 0..=5u32 {
            ok &= counted[k as usize] == flow.annulus_size(k) && counted[k as usize] >= 1i128 << (k as usize * d);
        }
        for alpha in [1.5, 2.0] {
            for levels in 1..=5 {
                let flow = AnnuliFlow::new(d, levels).map_err(e)?;
                let energy = flow.energy(&Profile::LogEnvelope { wbar: 36.0, alpha, d });
                worst_ratio = worst_ratio.max(energy / flow.energy_bound(36.0, alpha));
            }
        }
    }
    AnnuliFlow::new(2, 4).map_err(e)?.check_node_rule_pointwise().map_err(e)?;
    AnnuliFlow::new(3, 2).map_err(e)?.check_node_rule_pointwise().map_err(e)?;
    ok &= worst_ratio <= 1.0;
    Ok((ok, format!("node rule exact, sizes ≥ 2^(kd), max energy/bound {worst_ratio:.4}")))
}

fn electrical_laws() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst_closed_form = 0.0f64;
    for _ in 0..50 {
        // Series: 0 – 1 – … – (k-1) – ρ.
        let k = rng.random_range(1..=6);
        let c: Vec<f64> = (0..k).map(|_| rng.random_range(0.1..5.0)).collect();
        let edges: Vec<_> = (0..k - 1).map(|i| (i, i + 1, c[i])).collect();
        let mut pins = vec![0.0; k];
        pins[k - 1] = c[k - 1];
        let g = WiredGraph::new(k, edges, pins).map_err(e)?;
        let exact: f64 = c.iter().map(|x| 1.0 / x).sum();
        let r = weight_resistance(&g, 0).map_err(e)?.value;
        worst_closed_form = worst_closed_form.max((r / exact - 1.0).abs());

        // Parallel branches 0 – a_b – ρ next to a direct pin at 0.
        let branches = rng.random_range(1..=4);
        let direct = rng.random_range(0.1..5.0);
        let mut edges = Vec::new();
        let mut pins = vec![direct];
        let mut conductance = direct;
        for b in 0..branches {
            let (x, y) = (rng.random_range(0.1..5.0), rng.random_range(0.1..5.0));
            edges.push((0, b + 1, x));
            pins.push(y);
            conductance += 1.0 / (1.0 / x + 1.0 / y);
        }
        let g = WiredGraph::new(branches + 1, edges, pins).map_err(e)?;
        let r = weight_resistance(&g, 0).map_err(e)?.value;
        worst_closed_form = worst_closed_form.max((r * conductance - 1.0).abs());
    }

    let mut flows = 0;
    let mut thomson_failures = 0;
    let mut rayleigh_failures = 0;
    for _ in 0..50 {
        let n = rng.random_range(2..=7);
        let g = random_wired_graph(&mut rng, n, (0.2, 3.0), 0.4);
        let x = rng.random_range(0..n);
        let c = g.plus_weights();
        // Unit flows: the current flow itself and current flows of other
        // conductances on the same graph.
        for trial in 0..4 {
            let other: Vec<f64> = if trial == 0 {
                c.to_vec()
            } else {
                c.iter().map(|_| rng.random_range(0.05..5.0)).collect()
            };
            let flow = harmonic_flow(&g, &other, x).map_err(e)?;
            let check = thomson_upper_bound(&g, &flow, c).map_err(e)?;
            if check.energy < check.resistance * (1.0 - 1e-10) {
                thomson_failures += 1;
            }
            flows += 1;
        }
        let high: Vec<f64> = c.iter().map(|w| w + rng.random_range(0.0..2.0)).collect();
        let (low_r, high_r) = rayleigh_monotonicity_check(&g, c, &high, x).map_err(e)?;
        if high_r > low_r * (1.0 + 1e-12) {
            rayleigh_failures += 1;
        }
    }
    let ok = worst_closed_form <= 1e-10 && thomson_failures == 0 && rayleigh_failures == 0;
    Ok((
        ok,
        format!(
            "series/parallel max rel error {worst_closed_form:.1e}; Thomson violated on {thomson_failures} of {flows} flows; \
             Rayleigh violated on {rayleigh_failures} of 50 pairs"
        ),
    ))
}

fn vrjp_equivalence() -> Check {
    let graphs = [
        WiredGraph::new(2, [(0, 1, 1.0)], vec![2.0, 3.0]).map_err(e)?,
        WiredGraph::new(3, [(0, 1, 1.0), (1, 2, 2.0), (0, 2, 0.5)], vec![1.0, 0.0, 1.5]).map_err(e)?,
    ];
    let samples = 100_000;
    let mut ok = true;
    let mut detail = Vec::new();
    for (k, g) in graphs.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(90 + k as u64);
        let vrjp: Vec<Vec<usize>> = (0..samples)
            .map(|_| simulate_vrjp_with(g, 0, StopRule::Jumps(3), DEFAULT_STEP_CAP, &mut rng).map(|t| t.skeleton()))
            .collect::<Result<_, _>>()
            .map_err(e)?;
        let run = annealed_rwrc(g, &sampler(2000, 1000), 0, samples, StopRule::Jumps(3), 95 + k as u64).map_err(e)?;
        let rwrc: Vec<Vec<usize>> = run.walks.into_iter().map(|w| w.path).collect();
        let tv = total_variation(&path_law(vrjp, 3), &path_law(rwrc, 3));
        ok &= tv <= 0.02;
        detail.push(format!("n={} TV {tv:.4} (spacing {})", g.n(), run.spacing));
    }

    let g = &graphs[1];
    let c = g.conductances(&[0.4, -0.3, 0.2]).map_err(e)?;
    let walker = ConductanceWalker::new(g, &c).map_err(e)?;
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let paths: Vec<Vec<usize>> = (0..samples)
        .map(|_| walker.walk(1, StopRule::HitRho, DEFAULT_STEP_CAP, &mut rng).path)
        .collect();
    let visits = count_visits(&paths, 1, g.rho());
    let exact = expected_visits(g, &c, 1).map_err(e)?;
    ok &= visits.excluded == 0 && visits.estimate.within(exact, 3.0);
    detail.push(format!(
        "quenched visits {:.4} ± {:.4} vs c(x)ℛ {exact:.4}",
        visits.estimate.mean, visits.estimate.se
    ));
    Ok((ok, detail.join("; ")))
}

fn transience_pipeline() -> Check {
    let model = HighDimModel::new(3, 100.0, None).map_err(e)?;
    let nested = nested_box_resistances(&model, 3, &[4, 6, 8], 1e-9).map_err(e)?;
    let increasing = weakly_increasing(&nested);
    let g = model.box_graph(8, 0, 1e-9).map_err(e)?;
    let x = g.vertex_at(&[3, 3, 3]).ok_or("start vertex missing")?;
    let kx = kx_high_dim(&model, HOLDER_ORDER, 1e-9).map_err(e)?;
    let env = SampleConfig {
        sweeps: 2000,
        burn_in: 200,
        kernel: KernelChoice::Preconditioned,
        ..SampleConfig::default()
    };
    let report = visit_bound_experiment(&g, x, kx, &env, 100, 10).map_err(e)?;
    let resistances: Vec<String> = nested
        .iter()
        .map(|r| format!("{}:{:.5}", r.side, r.resistance.value))
        .collect();
    Ok((
        increasing && report.holds,
        format!(
            "ℛ by side [{}]; visits {:.3} ± {:.3} ({} walks, spacing {}) vs K_x ℛ = {:.1} (K_x = {kx})",
            resistances.join(", "),
            report.visits.estimate.mean,
            report.visits.estimate.se,
            report.visits.estimate.n,
            report.spacing,
            report.bound,
        ),
    ))
}

fn weight_monotonicity() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let config = sampler(50_000, 1000);
    let mut ok = true;
    let mut detail = Vec::new();
    for k in 0..9u64 {
        let n = 1 + (k as usize) % 4;
        let minus = random_wired_graph(&mut rng, n, (0.5, 2.0), 0.3);
        let edges: Vec<_> = minus
            .edges()
            .iter()
            .map(|e| (e.a, e.b, e.weight + rng.random_range(0.0..2.0)))
            .collect();
        let pins: Vec<f64> = minus.pins().iter().map(|h| h + rng.random_range(0.0..2.0)).collect();
        let plus = WiredGraph::new(n, edges, pins).map_err(e)?;
        let i = rng.random_range(0..n);
        let m = if k % 2 == 0 { 1.0 } else { 2.0 };
        let r = monotonicity_check(&plus, &minus, i, m, -1.0, &config, &[100 + 2 * k, 101 + 2 * k]).map_err(e)?;
        ok &= r.ordered;
        detail.push(format!("{:.3}≤{:.3}", r.plus.mean, r.minus.mean));
    }
    let model = EuclideanLongRange::log_envelope(1, 36.0, 2.0);
    let (plus, minus) = euclidean_hierarchical_pair(&model, 3, 1e-9).map_err(e)?;
    let r = monotonicity_check(&plus, &minus, 0, 1.0, -1.0, &config, &[200, 201]).map_err(e)?;
    ok &= r.ordered;
    detail.push(format!("Euclidean vs hierarchical {:.4}≤{:.4}", r.plus.mean, r.minus.mean));
    Ok((ok, format!("10 pairs, E[e^(-mu_i)]: {}", detail.join(", "))))
}
