//! Componentwise random-walk Metropolis sampler for `ν` (optionally tilted).

use std::fmt::Write as _;

use nalgebra::{Cholesky, DMatrix, Dyn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{cosh_m1, log_density_u};
use crate::graph::{VertexId, WiredGraph};
use crate::linalg::{self, Matrix, Vector};
use crate::stats;
use crate::{Error, Result};

const TARGET_LOW: f64 = 0.3;
const TARGET_HIGH: f64 = 0.5;
const ADAPT_WINDOW: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampleConfig {
    /// Post burn-in sweeps; every `thinning`-th one is retained.
    pub sweeps: usize,
    pub burn_in: usize,
    pub thinning: usize,
    /// Initial proposal scale, relative to `1/√(total weight at i)`.
    pub step_scale: f64,
    /// Sample `e^{u_t} dν` instead of `ν`.
    pub tilt: Option<VertexId>,
    pub kernel: KernelChoice,
}

/// Update rule of the chain. For `Preconditioned` a sweep is one global move.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum KernelChoice {
    /// Single-site random-walk moves, one per vertex per sweep.
    #[default]
    Componentwise,
    /// Gaussian-preconditioned global moves; suited to strongly coupled
    /// environments on larger boxes.
    Preconditioned,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig {
            sweeps: 10_000,
            burn_in: 1_000,
            thinning: 1,
            step_scale: 1.5,
            tilt: None,
            kernel: KernelChoice::Componentwise,
        }
    }
}

/// Retained draws of `u`, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleBatch {
    pub n: usize,
    pub draws: Vec<f64>,
    pub seed: u64,
    pub burn_in: usize,
    pub thinning: usize,
    pub tilt: Option<VertexId>,
    pub acceptance_rate: f64,
    /// Effective sample size of each coordinate.
    pub ess: Vec<f64>,
    /// Acceptance after adaptation fell outside `[0.05, 0.95]`; for the
    /// preconditioned kernel only a rate below `0.05` is flagged, since near
    /// one it just means the Gaussian reference is already close to `ν`.
    pub flagged: bool,
}

impl SampleBatch {
    pub fn len(&self) -> usize {
        self.draws.len().checked_div(self.n).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn row(&self, k: usize) -> &[f64] {
        &self.draws[k * self.n..(k + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.draws.chunks_exact(self.n.max(1))
    }

    pub fn column(&self, i: VertexId) -> Vec<f64> {
        self.rows().map(|r| r[i]).collect()
    }

    pub fn min_ess(&self) -> f64 {
        self.ess.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Columnar text: `#` header lines, a column-name line, one row per draw.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# seed {}", self.seed);
        let _ = writeln!(out, "# burn_in {}", self.burn_in);
        let _ = writeln!(out, "# thinning {}", self.thinning);
        match self.tilt {
            Some(t) => {
                let _ = writeln!(out, "# tilt {t}");
            }
            None => {
                let _ = writeln!(out, "# tilt none");
            }
        }
        let _ = writeln!(out, "# acceptance_rate {}", self.acceptance_rate);
        let _ = writeln!(out, "# flagged {}", self.flagged);
        let ess: Vec<String> = self.ess.iter().map(|x| x.to_string()).collect();
        let _ = writeln!(out, "# ess {}", ess.join(","));
        let names: Vec<String> = (0..self.n).map(|i| format!("u_{i}")).collect();
        let _ = writeln!(out, "{}", names.join(","));
        for row in self.rows() {
            let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut batch = SampleBatch {
            n: 0,
            draws: Vec::new(),
            seed: 0,
            burn_in: 0,
            thinning: 1,
            tilt: None,
            acceptance_rate: f64::NAN,
            ess: Vec::new(),
            flagged: false,
        };
        let mut seen_names = false;
        let parse_err = |line: usize, msg: String| Error::Parse { line, msg };
        for (k, line) in text.lines().enumerate() {
            let lineno = k + 1;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let mut parts = rest.split_whitespace();
                let key = parts.next().unwrap_or("");
                let value = parts.next().unwrap_or("");
                let bad = |e: &dyn std::fmt::Display| parse_err(lineno, format!("{key}: {e}"));
                match key {
                    "seed" => batch.seed = value.parse().map_err(|e| bad(&e))?,
                    "burn_in" => batch.burn_in = value.parse().map_err(|e| bad(&e))?,
                    "thinning" => batch.thinning = value.parse().map_err(|e| bad(&e))?,
                    "tilt" => {
                        batch.tilt = if value == "none" {
                            None
                        } else {
                            Some(value.parse().map_err(|e| bad(&e))?)
                        }
                    }
                    "acceptance_rate" => batch.acceptance_rate = value.parse().map_err(|e| bad(&e))?,
                    "flagged" => batch.flagged = value.parse().map_err(|e| bad(&e))?,
                    "ess" => {
                        batch.ess = value
                            .split(',')
                            .filter(|s| !s.is_empty())
                            .map(str::parse)
                            .collect::<std::result::Result<_, _>>()
                            .map_err(|e| bad(&e))?
                    }
                    _ => {}
                }
                continue;
            }
            if !seen_names {
                batch.n = line.split(',').count();
                seen_names = true;
                continue;
            }
            let before = batch.draws.len();
            for cell in line.split(',') {
                batch
                    .draws
                    .push(cell.trim().parse().map_err(|e| parse_err(lineno, format!("{e}")))?);
            }
            if batch.draws.len() - before != batch.n {
                return Err(parse_err(lineno, format!("expected {} columns", batch.n)));
            }
        }
        if !seen_names {
            return Err(parse_err(0, "missing column header".into()));
        }
        Ok(batch)
    }
}

/// How the determinant ratio of a single-site move is computed.
enum DetTracker {
    /// Maintains `M^{-1}`; the move is a diagonal change on a small set `S`.
    Woodbury { inverse: Matrix },
    /// Refactors `M` on every proposal.
    Refactor { log_det: f64 },
}

struct Chain<'g> {
    g: &'g WiredGraph,
    u: Vec<f64>,
    m: Matrix,
    tracker: DetTracker,
    tilt: Option<VertexId>,
}

impl<'g> Chain<'g> {
    fn new(g: &'g WiredGraph, tilt: Option<VertexId>) -> Result<Self> {
        let u = vec![0.0; g.n()];
        let m = g.conjugated_laplacian(&u)?;
        let sparse = (g.max_degree() + 1) * 4 <= g.n();
        let tracker = if sparse {
            DetTracker::Woodbury {
                inverse: linalg::cholesky(&m)?.inverse(),
            }
        } else {
            DetTracker::Refactor {
                log_det: linalg::log_det(&m)?,
            }
        };
        Ok(Chain { g, u, m, tracker, tilt })
    }

    fn refresh(&mut self) -> Result<()> {
        // Rebuild M from u to stop round-off from accumulating.
        self.m = self.g.conjugated_laplacian(&self.u)?;
        match &mut self.tracker {
            DetTracker::Woodbury { inverse } => *inverse = linalg::cholesky(&self.m)?.inverse(),
            DetTracker::Refactor { log_det } => *log_det = linalg::log_det(&self.m)?,
        }
        Ok(())
    }

    /// Metropolis update of `u_i` by `delta`; returns whether it was accepted.
    fn step(&mut self, i: VertexId, delta: f64, log_uniform: f64) -> bool {
        let g = self.g;
        let ui = self.u[i];
        let mut log_ratio = -g.pin(i) * (cosh_m1(ui + delta) - cosh_m1(ui));
        for &(j, w) in g.neighbors(i) {
            log_ratio -= w * (cosh_m1(ui + delta - self.u[j]) - cosh_m1(ui - self.u[j]));
        }
        if self.tilt == Some(i) {
            log_ratio += delta;
        }

        let mut sites = Vec::with_capacity(g.neighbors(i).len() + 1);
        let mut changes = Vec::with_capacity(sites.capacity());
        sites.push(i);
        changes.push(self.m[(i, i)] * ((-delta).exp() - 1.0));
        let grow = delta.exp_m1();
        for &(j, w) in g.neighbors(i) {
            sites.push(j);
            changes.push(w * (ui - self.u[j]).exp() * grow);
        }

        match &mut self.tracker {
            DetTracker::Woodbury { inverse } => {
                let k = sites.len();
                let mut core = DMatrix::<f64>::identity(k, k);
                for a in 0..k {
                    for b in 0..k {
                        core[(a, b)] += changes[a] * inverse[(sites[a], sites[b])];
                    }
                }
                let lu = core.clone().lu();
                let det = lu.determinant();
                if !(det > 0.0 && det.is_finite()) {
                    return false;
                }
                log_ratio += 0.5 * det.ln();
                if !(log_uniform < log_ratio) {
                    return false;
                }
                // M' = M + P Δ Pᵗ  ⇒  G' = G - G P (I + Δ Pᵗ G P)^{-1} Δ Pᵗ G.
                let n = inverse.nrows();
                let mut rows = DMatrix::<f64>::zeros(k, n);
                for a in 0..k {
                    for c in 0..n {
                        rows[(a, c)] = changes[a] * inverse[(sites[a], c)];
                    }
                }
                let Some(solved) = lu.solve(&rows) else {
                    return false;
                };
                let mut cols = DMatrix::<f64>::zeros(n, k);
                for (a, &site) in sites.iter().enumerate() {
                    cols.set_column(a, &inverse.column(site));
                }
                inverse.gemm(-1.0, &cols, &solved, 1.0);
            }
            DetTracker::Refactor { log_det } => {
                let mut proposed = self.m.clone();
                for (&s, &c) in sites.iter().zip(&changes) {
                    proposed[(s, s)] += c;
                }
                let Ok(new_log_det) = linalg::log_det(&proposed) else {
                    return false;
                };
                log_ratio += 0.5 * (new_log_det - *log_det);
                if !(log_uniform < log_ratio) {
                    return false;
                }
                *log_det = new_log_det;
            }
        }
        for (&s, &c) in sites.iter().zip(&changes) {
            self.m[(s, s)] += c;
        }
        self.u[i] += delta;
        true
    }
}

/// One round of updates of some Metropolis kernel targeting `ν` or its tilt.
trait Kernel {
    /// Proposals per round, one acceptance counter each.
    fn proposals(&self) -> usize;
    fn healthy(&self, acceptance_rate: f64) -> bool {
        (0.05..=0.95).contains(&acceptance_rate)
    }
    fn round(&mut self, rng: &mut ChaCha8Rng, accepts: &mut [usize]) -> Result<()>;
    /// Rescales proposal sizes after a window of `rounds` rounds.
    fn adapt(&mut self, accepts: &[usize], rounds: usize);
    fn refresh(&mut self) -> Result<()>;
    fn state(&self) -> &[f64];
}

fn rescale(step: &mut f64, accepted: usize, rounds: usize, cap: f64) {
    let rate = accepted as f64 / rounds as f64;
    if rate < TARGET_LOW {
        *step *= 0.7;
    } else if rate > TARGET_HIGH {
        *step = (*step * 1.4).min(cap);
    }
}

struct Componentwise<'g> {
    chain: Chain<'g>,
    steps: Vec<f64>,
}

impl Kernel for Componentwise<'_> {
    fn proposals(&self) -> usize {
        self.steps.len()
    }

    fn round(&mut self, rng: &mut ChaCha8Rng, accepts: &mut [usize]) -> Result<()> {
        for (i, (&step, accepted)) in self.steps.iter().zip(accepts.iter_mut()).enumerate() {
            let z: f64 = rng.sample(StandardNormal);
            let log_u = rng.random::<f64>().ln();
            if self.chain.step(i, step * z, log_u) {
                *accepted += 1;
            }
        }
        Ok(())
    }

    fn adapt(&mut self, accepts: &[usize], rounds: usize) {
        for (step, &a) in self.steps.iter_mut().zip(accepts) {
            rescale(step, a, rounds, f64::INFINITY);
        }
    }

    fn refresh(&mut self) -> Result<()> {
        self.chain.refresh()
    }

    fn state(&self) -> &[f64] {
        &self.chain.u
    }
}

/// Crank–Nicolson moves `u' = μ + √(1-β²)(u - μ) + βξ` with
/// `ξ ~ N(0, H⁻¹)`, `H` the weighted Laplacian at `u = 0` and `μ = H⁻¹ e_t`
/// under a tilt at `t`. The proposal is reversible for `N(μ, H⁻¹)`, so only
/// the non-Gaussian remainder enters the acceptance ratio.
struct Preconditioned<'g> {
    g: &'g WiredGraph,
    tilt: Option<VertexId>,
    center: Vector,
    reference: Cholesky<f64, Dyn>,
    u: Vec<f64>,
    remainder: f64,
    beta: f64,
}

impl<'g> Preconditioned<'g> {
    fn new(g: &'g WiredGraph, tilt: Option<VertexId>, beta: f64) -> Result<Self> {
        let reference = linalg::cholesky(&g.conjugated_laplacian(&vec![0.0; g.n()])?)?;
        let mut center = Vector::zeros(g.n());
        if let Some(t) = tilt {
            center[t] = 1.0;
            reference.solve_mut(&mut center);
        }
        let u = center.iter().copied().collect::<Vec<_>>();
        let mut kernel = Preconditioned {
            g,
            tilt,
            center,
            reference,
            u,
            remainder: 0.0,
            beta: beta.clamp(1e-3, 1.0),
        };
        kernel.remainder = kernel.remainder_at(&kernel.u)?;
        Ok(kernel)
    }

    /// `log π(u) + ½ (u-μ)ᵗ H (u-μ)`.
    fn remainder_at(&self, u: &[f64]) -> Result<f64> {
        let shifted = Vector::from_iterator(u.len(), u.iter().zip(self.center.iter()).map(|(a, b)| a - b));
        let root = self.reference.l().tr_mul(&shifted);
        Ok(log_density_u(self.g, u, self.tilt)? + 0.5 * root.norm_squared())
    }
}

impl Kernel for Preconditioned<'_> {
    fn proposals(&self) -> usize {
        1
    }

    fn healthy(&self, acceptance_rate: f64) -> bool {
        acceptance_rate >= 0.05
    }

    fn round(&mut self, rng: &mut ChaCha8Rng, accepts: &mut [usize]) -> Result<()> {
        let n = self.u.len();
        let z = Vector::from_iterator(n, (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)));
        let xi = self
            .reference
            .l()
            .transpose()
            .solve_upper_triangular(&z)
            .ok_or(Error::NotPositiveDefinite)?;
        let log_u = rng.random::<f64>().ln();
        let keep = (1.0 - self.beta * self.beta).sqrt();
        let proposal: Vec<f64> = (0..n)
            .map(|i| self.center[i] + keep * (self.u[i] - self.center[i]) + self.beta * xi[i])
            .collect();
        let Ok(remainder) = self.remainder_at(&proposal) else {
            return Ok(());
        };
        if log_u < remainder - self.remainder {
            self.u = proposal;
            self.remainder = remainder;
            accepts[0] += 1;
        }
        Ok(())
    }

    fn adapt(&mut self, accepts: &[usize], rounds: usize) {
        rescale(&mut self.beta, accepts[0], rounds, 1.0);
    }

    fn refresh(&mut self) -> Result<()> {
        Ok(())
    }

    fn state(&self) -> &[f64] {
        &self.u
    }
}

/// Runs one Metropolis chain, from `u ≡ 0` for the componentwise kernel and
/// from the reference mean for the preconditioned one.
///
/// Proposal sizes are adapted during burn-in towards an acceptance rate in
/// `[0.3, 0.5]` and frozen afterwards.
pub fn sample_u_mcmc(g: &WiredGraph, config: &SampleConfig, seed: u64) -> Result<SampleBatch> {
    if config.thinning == 0 {
        return Err(Error::Precondition("thinning must be at least 1".into()));
    }
    if let Some(t) = config.tilt {
        if t >= g.n() {
            return Err(Error::OutOfRange(format!("tilt vertex {t}")));
        }
    }
    match config.kernel {
        KernelChoice::Componentwise => {
            let steps = (0..g.n())
                .map(|i| config.step_scale / g.total_weight(i).max(1.0).sqrt())
                .collect();
            let kernel = Componentwise {
                chain: Chain::new(g, config.tilt)?,
                steps,
            };
            drive(kernel, g.n(), config, seed)
        }
        KernelChoice::Preconditioned => {
            let kernel = Preconditioned::new(g, config.tilt, 0.3 * config.step_scale)?;
            drive(kernel, g.n(), config, seed)
        }
    }
}

fn drive<K: Kernel>(mut kernel: K, n: usize, config: &SampleConfig, seed: u64) -> Result<SampleBatch> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut window = vec![0usize; kernel.proposals()];
    for s in 0..config.burn_in {
        kernel.round(&mut rng, &mut window)?;
        if (s + 1) % ADAPT_WINDOW == 0 {
            kernel.adapt(&window, ADAPT_WINDOW);
            window.fill(0);
            kernel.refresh()?;
        }
    }

    let retained = config.sweeps / config.thinning;
    let mut draws = Vec::with_capacity(retained * n);
    let mut accepts = vec![0usize; kernel.proposals()];
    for s in 0..config.sweeps {
        kernel.round(&mut rng, &mut accepts)?;
        if n > 1 {
            kernel.refresh()?;
        }
        if (s + 1) % config.thinning == 0 {
            draws.extend_from_slice(kernel.state());
        }
    }
    let total_moves = (config.sweeps * kernel.proposals()).max(1) as f64;
    let acceptance_rate = accepts.iter().sum::<usize>() as f64 / total_moves;
    let rows = draws.len() / n.max(1);
    let ess = (0..n)
        .map(|i| {
            let col: Vec<f64> = (0..rows).map(|k| draws[k * n + i]).collect();
            stats::effective_sample_size(&col)
        })
        .collect();
    Ok(SampleBatch {
        n,
        draws,
        seed,
        burn_in: config.burn_in,
        thinning: config.thinning,
        tilt: config.tilt,
        acceptance_rate,
        ess,
        flagged: !kernel.healthy(acceptance_rate),
    })
}

/// Independent chains with the given seeds, run on scoped threads.
pub fn run_chains(g: &WiredGraph, config: &SampleConfig, seeds: &[u64]) -> Result<Vec<SampleBatch>> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = seeds
            .iter()
            .map(|&seed| scope.spawn(move || sample_u_mcmc(g, config, seed)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sampler thread panicked"))
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::batch_means;

    fn config(sweeps: usize) -> SampleConfig {
        SampleConfig {
            sweeps,
            burn_in: 500,
            ..SampleConfig::default()
        }
    }

    #[test]
    fn single_vertex_moments() {
        let g = WiredGraph::new(1, [], vec![1.0]).unwrap();
        let batch = sample_u_mcmc(&g, &config(200_000), 11).unwrap();
        assert!(!batch.flagged);
        assert!((0.3..=0.5).contains(&batch.acceptance_rate), "{}", batch.acceptance_rate);
        let col = batch.column(0);
        let neg: Vec<f64> = col.iter().map(|u| (-u).exp()).collect();
        let pos: Vec<f64> = col.iter().map(|u| u.exp()).collect();
        let e_neg = batch_means(&neg, 30);
        let e_pos = batch_means(&pos, 30);
        assert!(e_neg.within(2.0, 3.0), "{e_neg:?}");
        assert!(e_pos.within(1.0, 3.0), "{e_pos:?}");
    }

    #[test]
    fn deterministic_per_seed() {
        let g = WiredGraph::new(3, [(0, 1, 1.0), (1, 2, 2.0)], vec![1.0, 0.0, 0.5]).unwrap();
        let a = sample_u_mcmc(&g, &config(200), 5).unwrap();
        let b = sample_u_mcmc(&g, &config(200), 5).unwrap();
        let c = sample_u_mcmc(&g, &config(200), 6).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.draws, c.draws);
    }

    #[test]
    fn woodbury_path_matches_target() {
        // A path of 12 vertices is sparse enough for the low-rank tracker.
        let n = 12;
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1, 2.0)).collect();
        let mut pins = vec![0.0; n];
        pins[0] = 2.0;
        pins[n - 1] = 2.0;
        let g = WiredGraph::new(n, edges, pins).unwrap();
        let seeds: Vec<u64> = (0..4).collect();
        let batches = run_chains(&g, &config(20_000), &seeds).unwrap();
        let parts: Vec<_> = batches
            .iter()
            .map(|b| {
                let xs: Vec<f64> = b.column(5).iter().map(|u| u.exp()).collect();
                batch_means(&xs, 30)
            })
            .collect();
        let e = crate::stats::Estimate::combine(&parts);
        assert!(e.within(1.0, 3.0), "{e:?}");
    }

    #[test]
    fn tilt_shifts_the_mean() {
        // Under e^{u} dν on one vertex with h = 1, E[e^{-u}] = E_ν[1] = 1.
        let g = WiredGraph::new(1, [], vec![1.0]).unwrap();
        let cfg = SampleConfig {
            tilt: Some(0),
            ..config(100_000)
        };
        let batch = sample_u_mcmc(&g, &cfg, 3).unwrap();
        let xs: Vec<f64> = batch.column(0).iter().map(|u| (-u).exp()).collect();
        assert!(batch_means(&xs, 30).within(1.0, 3.0));
    }

    #[test]
    fn preconditioned_kernel_matches_target() {
        let preconditioned = |sweeps, tilt| SampleConfig {
            tilt,
            kernel: KernelChoice::Preconditioned,
            ..config(sweeps)
        };
        let g = WiredGraph::new(1, [], vec![1.0]).unwrap();
        let batch = sample_u_mcmc(&g, &preconditioned(200_000, None), 12).unwrap();
        assert!(!batch.flagged, "{}", batch.acceptance_rate);
        let neg: Vec<f64> = batch.column(0).iter().map(|u| (-u).exp()).collect();
        assert!(batch_means(&neg, 30).within(2.0, 3.0));

        // E_ν[e^{u_i}] = 1, and under the tilt at t, E[e^{-u_t}] = 1.
        let g = WiredGraph::new(4, [(0, 1, 3.0), (1, 2, 3.0), (2, 3, 3.0), (0, 2, 1.0)], vec![2.0, 0.0, 0.0, 1.0]).unwrap();
        let batch = sample_u_mcmc(&g, &preconditioned(100_000, None), 13).unwrap();
        for i in 0..4 {
            let xs: Vec<f64> = batch.column(i).iter().map(|u| u.exp()).collect();
            let e = batch_means(&xs, 30);
            assert!(e.within(1.0, 3.0), "vertex {i}: {e:?}");
        }
        let batch = sample_u_mcmc(&g, &preconditioned(100_000, Some(2)), 14).unwrap();
        let xs: Vec<f64> = batch.column(2).iter().map(|u| (-u).exp()).collect();
        let e = batch_means(&xs, 30);
        assert!(e.within(1.0, 3.0), "{e:?}");
    }

    #[test]
    fn text_round_trip() {
        let g = WiredGraph::new(2, [(0, 1, 1.0)], vec![2.0, 3.0]).unwrap();
        let batch = sample_u_mcmc(&g, &config(50), 9).unwrap();
        let text = batch.to_text();
        let back = SampleBatch::from_text(&text).unwrap();
        assert_eq!(back, batch);
        assert_eq!(back.to_text(), text);
        assert!(SampleBatch::from_text("# seed 1\nu_0\n1,2\n").is_err());
    }

    #[test]
    fn bad_config_rejected() {
        let g = WiredGraph::new(1, [], vec![1.0]).unwrap();
        let cfg = SampleConfig {
            thinning: 0,
            ..SampleConfig::default()
        };
        assert!(sample_u_mcmc(&g, &cfg, 0).is_err());
        let cfg = SampleConfig {
            tilt: Some(1),
            ..SampleConfig::default()
        };
        assert!(sample_u_mcmc(&g, &cfg, 0).is_err());
    }
}
