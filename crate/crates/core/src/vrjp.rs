//! Exact simulation of the vertex-reinforced jump process and of random
//! walks in random conductances on `G₊ = Λ ∪ {ρ}`. The wiring point is the
//! vertex `n`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use crate::electrical::{effective_resistance, ConductanceSource};
use crate::environment::{sample_u_mcmc, SampleConfig};
use crate::graph::{VertexId, WiredGraph};
use crate::stats::{self, Estimate};
use crate::{Error, Result};

pub const DEFAULT_STEP_CAP: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StopRule {
    /// Stop on arrival at `ρ` (a walk started at `ρ` must leave first).
    HitRho,
    /// Stop once the total elapsed time reaches the horizon.
    Horizon(f64),
    /// Stop after this many jumps.
    Jumps(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    HitRho,
    Horizon,
    Jumps,
    /// The step cap was reached first; the run is truncated.
    StepCap,
}

impl Termination {
    fn name(self) -> &'static str {
        match self {
            Termination::HitRho => "hit_rho",
            Termination::Horizon => "horizon",
            Termination::Jumps => "jumps",
            Termination::StepCap => "step_cap",
        }
    }
}

/// A VRJP trajectory: completed sojourns (each followed by a jump), the
/// vertex occupied at termination and the time already spent there.
#[derive(Clone, Debug, PartialEq)]
pub struct Trace {
    pub start: VertexId,
    pub sojourns: Vec<(VertexId, f64)>,
    pub position: VertexId,
    pub final_sojourn: f64,
    pub termination: Termination,
}

impl Trace {
    pub fn is_truncated(&self) -> bool {
        self.termination == Termination::StepCap
    }

    /// Vertex sequence with durations dropped.
    pub fn skeleton(&self) -> Vec<VertexId> {
        discrete_skeleton(self)
    }

    /// `v duration` lines after a header; the last line is the occupied
    /// vertex and its elapsed (unfinished) sojourn.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# start {}", self.start);
        let _ = writeln!(out, "# termination {}", self.termination.name());
        for (v, t) in &self.sojourns {
            let _ = writeln!(out, "{v} {t}");
        }
        let _ = writeln!(out, "{} {}", self.position, self.final_sojourn);
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut start = None;
        let mut termination = None;
        let mut rows: Vec<(VertexId, f64)> = Vec::new();
        for (k, line) in text.lines().enumerate() {
            let err = |msg: String| Error::Parse { line: k + 1, msg };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                match parts.as_slice() {
                    ["start", v] => start = Some(v.parse().map_err(|e| err(format!("{e}")))?),
                    ["termination", t] => {
                        termination = Some(match *t {
                            "hit_rho" => Termination::HitRho,
                            "horizon" => Termination::Horizon,
                            "jumps" => Termination::Jumps,
                            "step_cap" => Termination::StepCap,
                            other => return Err(err(format!("unknown termination {other}"))),
                        })
                    }
                    _ => {}
                }
                continue;
            }
            let mut parts = line.split_whitespace();
            let (Some(v), Some(t), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(err(format!("expected `v duration`, got `{line}`")));
            };
            rows.push((
                v.parse().map_err(|e| err(format!("{e}")))?,
                t.parse().map_err(|e| err(format!("{e}")))?,
            ));
        }
        let (position, final_sojourn) = rows.pop().ok_or(Error::Parse {
            line: 0,
            msg: "empty trace".into(),
        })?;
        Ok(Trace {
            start: start.ok_or(Error::Parse {
                line: 0,
                msg: "missing start".into(),
            })?,
            sojourns: rows,
            position,
            final_sojourn,
            termination: termination.ok_or(Error::Parse {
                line: 0,
                msg: "missing termination".into(),
            })?,
        })
    }
}

pub fn discrete_skeleton(trace: &Trace) -> Vec<VertexId> {
    trace.sojourns.iter().map(|(v, _)| *v).chain([trace.position]).collect()
}

/// Adjacency of `G₊` including `ρ = n`.
fn plus_adjacency(g: &WiredGraph, weights: &[f64]) -> Vec<Vec<(VertexId, f64)>> {
    let n = g.n();
    let mut adj = vec![Vec::new(); n + 1];
    for (e, &w) in g.plus_edges().iter().zip(weights) {
        if w > 0.0 {
            let a = e.plus();
            let b = e.minus().unwrap_or(n);
            adj[a].push((b, w));
            adj[b].push((a, w));
        }
    }
    adj
}

/// Mutable VRJP state: current vertex and local times on `G₊`.
#[derive(Clone, Debug)]
pub struct VrjpState {
    adj: Vec<Vec<(VertexId, f64)>>,
    pub position: VertexId,
    pub local_times: Vec<f64>,
    pub elapsed: f64,
}

impl VrjpState {
    pub fn new(g: &WiredGraph, start: VertexId) -> Result<Self> {
        if start > g.n() {
            return Err(Error::OutOfRange(format!("start vertex {start}")));
        }
        Ok(VrjpState {
            adj: plus_adjacency(g, g.plus_weights()),
            position: start,
            local_times: vec![0.0; g.n() + 1],
            elapsed: 0.0,
        })
    }

    /// Jump rates `W_vj (1 + L_j)` out of the current vertex.
    pub fn rates(&self) -> Vec<(VertexId, f64)> {
        self.adj[self.position]
            .iter()
            .map(|&(j, w)| (j, w * (1.0 + self.local_times[j])))
            .collect()
    }

    /// Draws the sojourn at the current vertex and the next vertex. While
    /// the walker sits at `v` every other local time is frozen, so the
    /// sojourn is exponential with the total rate.
    pub fn step<R: Rng>(&mut self, rng: &mut R) -> (f64, VertexId) {
        let rates = self.rates();
        let total: f64 = rates.iter().map(|r| r.1).sum();
        let duration = rng.sample::<f64, _>(Exp1) / total;
        let mut pick = rng.random::<f64>() * total;
        let mut next = rates.last().expect("every vertex of G₊ has a neighbour").0;
        for &(j, r) in &rates {
            if pick < r {
                next = j;
                break;
            }
            pick -= r;
        }
        (duration, next)
    }
}

pub fn simulate_vrjp(g: &WiredGraph, start: VertexId, stop: StopRule, seed: u64) -> Result<Trace> {
    simulate_vrjp_with(g, start, stop, DEFAULT_STEP_CAP, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn simulate_vrjp_with<R: Rng>(g: &WiredGraph, start: VertexId, stop: StopRule, step_cap: usize, rng: &mut R) -> Result<Trace> {
    let mut state = VrjpState::new(g, start)?;
    let rho = g.n();
    let mut sojourns = Vec::new();
    loop {
        if let StopRule::Jumps(k) = stop {
            if sojourns.len() >= k {
                return Ok(finish(start, sojourns, state.position, 0.0, Termination::Jumps));
            }
        }
        if sojourns.len() >= step_cap {
            return Ok(finish(start, sojourns, state.position, 0.0, Termination::StepCap));
        }
        let (duration, next) = state.step(rng);
        if let StopRule::Horizon(t) = stop {
            if state.elapsed + duration >= t {
                let partial = t - state.elapsed;
                return Ok(finish(start, sojourns, state.position, partial, Termination::Horizon));
            }
        }
        state.local_times[state.position] += duration;
        state.elapsed += duration;
        sojourns.push((state.position, duration));
        state.position = next;
        if stop == StopRule::HitRho && next == rho {
            return Ok(finish(start, sojourns, next, 0.0, Termination::HitRho));
        }
    }
}

fn finish(start: VertexId, sojourns: Vec<(VertexId, f64)>, position: VertexId, final_sojourn: f64, termination: Termination) -> Trace {
    Trace {
        start,
        sojourns,
        position,
        final_sojourn,
        termination,
    }
}

/// A discrete-time walk; `truncated` when the step cap ended it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Walk {
    pub path: Vec<VertexId>,
    pub truncated: bool,
}

/// Transition tables `c_ij / c(i)` on `G₊`.
#[derive(Clone, Debug)]
pub struct ConductanceWalker {
    cumulative: Vec<Vec<(VertexId, f64)>>,
    rho: VertexId,
}

impl ConductanceWalker {
    /// `c` is indexed like `E₊`; every vertex must have positive total
    /// conductance.
    pub fn new(g: &WiredGraph, c: &[f64]) -> Result<Self> {
        if c.len() != g.plus_edges().len() {
            return Err(Error::DimensionMismatch {
                expected: g.plus_edges().len(),
                got: c.len(),
            });
        }
        if let Some(k) = c.iter().position(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(Error::Precondition(format!("conductance {} on edge {k} is not positive", c[k])));
        }
        let cumulative = plus_adjacency(g, c)
            .into_iter()
            .map(|row| {
                let mut acc = 0.0;
                row.into_iter()
                    .map(|(j, w)| {
                        acc += w;
                        (j, acc)
                    })
                    .collect()
            })
            .collect();
        Ok(ConductanceWalker { cumulative, rho: g.n() })
    }

    fn next<R: Rng>(&self, v: VertexId, rng: &mut R) -> VertexId {
        let row = &self.cumulative[v];
        let total = row.last().expect("vertex without neighbours").1;
        let pick = rng.random::<f64>() * total;
        let k = row.partition_point(|&(_, acc)| acc <= pick);
        row[k.min(row.len() - 1)].0
    }

    pub fn walk<R: Rng>(&self, start: VertexId, stop: StopRule, step_cap: usize, rng: &mut R) -> Walk {
        let mut path = vec![start];
        let mut v = start;
        loop {
            let jumps = path.len() - 1;
            if let StopRule::Jumps(k) = stop {
                if jumps >= k {
                    return Walk { path, truncated: false };
                }
            }
            if jumps >= step_cap {
                return Walk { path, truncated: true };
            }
            v = self.next(v, rng);
            path.push(v);
            if stop == StopRule::HitRho && v == self.rho {
                return Walk { path, truncated: false };
            }
        }
    }
}

/// Random walk in fixed conductances `c` (indexed like `E₊`).
pub fn simulate_rwrc(g: &WiredGraph, c: &[f64], start: VertexId, stop: StopRule, seed: u64) -> Result<Walk> {
    if start > g.n() {
        return Err(Error::OutOfRange(format!("start vertex {start}")));
    }
    if let StopRule::Horizon(_) = stop {
        return Err(Error::Precondition("discrete walks have no time horizon".into()));
    }
    let walker = ConductanceWalker::new(g, c)?;
    Ok(walker.walk(start, stop, DEFAULT_STEP_CAP, &mut ChaCha8Rng::seed_from_u64(seed)))
}

/// Walks in environments drawn from `ν` (tilted by `e^{u_start}` when the
/// start is an inner vertex), one fresh environment per walk.
#[derive(Clone, Debug)]
pub struct AnnealedRun {
    pub walks: Vec<Walk>,
    /// Sweeps between consecutive environment draws.
    pub spacing: usize,
    /// Largest integrated autocorrelation time seen in the pilot run.
    pub pilot_iat: f64,
    pub acceptance_rate: f64,
}

pub fn annealed_rwrc(
    g: &WiredGraph,
    env: &SampleConfig,
    start: VertexId,
    n_walks: usize,
    stop: StopRule,
    seed: u64,
) -> Result<AnnealedRun> {
    if start > g.n() {
        return Err(Error::OutOfRange(format!("start vertex {start}")));
    }
    let tilt = (start < g.n()).then_some(start);
    let pilot_config = SampleConfig {
        sweeps: env.sweeps.max(2000),
        thinning: 1,
        tilt,
        ..*env
    };
    let pilot = sample_u_mcmc(g, &pilot_config, seed)?;
    if pilot.flagged {
        return Err(Error::Precondition(format!(
            "environment sampler acceptance {} outside [0.05, 0.95]",
            pilot.acceptance_rate
        )));
    }
    let pilot_iat = (0..g.n())
        .map(|i| stats::integrated_autocorrelation_time(&pilot.column(i)))
        .fold(1.0, f64::max);
    let spacing = ((10.0 * pilot_iat).ceil() as usize).max(env.thinning).max(1);
    let config = SampleConfig {
        sweeps: n_walks * spacing,
        thinning: spacing,
        tilt,
        ..*env
    };
    let batch = sample_u_mcmc(g, &config, seed.wrapping_add(1))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(2));
    let walks = batch
        .rows()
        .map(|u| {
            let c = g.conductances(u)?;
            Ok(ConductanceWalker::new(g, &c)?.walk(start, stop, DEFAULT_STEP_CAP, &mut rng))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AnnealedRun {
        walks,
        spacing,
        pilot_iat,
        acceptance_rate: batch.acceptance_rate,
    })
}

/// Mean number of visits to `x` before the first arrival at `ρ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VisitCounts {
    pub estimate: Estimate,
    pub excluded: usize,
    pub excluded_fraction: f64,
}

/// `N_x = #{m < τ_ρ : X_m = x}` averaged over paths that reached `ρ`;
/// paths that did not are excluded and counted.
pub fn count_visits(paths: &[Vec<VertexId>], x: VertexId, rho: VertexId) -> VisitCounts {
    let mut counts = Vec::with_capacity(paths.len());
    let mut excluded = 0;
    for p in paths {
        // Walks started at ρ count up to their first return.
        let from = usize::from(p.first() == Some(&rho));
        match p.iter().skip(from).position(|&v| v == rho) {
            Some(k) => counts.push(p[..from + k].iter().filter(|&&v| v == x).count() as f64),
            None => excluded += 1,
        }
    }
    let estimate = if counts.is_empty() {
        Estimate {
            mean: 0.0,
            se: 0.0,
            n: 0,
        }
    } else {
        stats::batch_means(&counts, stats::DEFAULT_BATCHES)
    };
    VisitCounts {
        estimate,
        excluded,
        excluded_fraction: if paths.is_empty() { 0.0 } else { excluded as f64 / paths.len() as f64 },
    }
}

/// `E[N_x] = c(x) ℛ(c, x ↔ ρ)` for a walk started at `x` in fixed conductances.
pub fn expected_visits(g: &WiredGraph, c: &[f64], x: VertexId) -> Result<f64> {
    let r = effective_resistance(g, c, x, ConductanceSource::Sampled)?;
    let cx: f64 = g
        .plus_edges()
        .iter()
        .zip(c)
        .filter(|(e, _)| e.touches(x))
        .map(|(_, ce)| ce)
        .sum();
    Ok(cx * r.value)
}

/// Counts of the first `jumps + 1` vertices of each path; shorter paths are
/// skipped.
pub fn path_law(paths: impl IntoIterator<Item = Vec<VertexId>>, jumps: usize) -> BTreeMap<Vec<VertexId>, u64> {
    let mut law = BTreeMap::new();
    for p in paths {
        if p.len() > jumps {
            *law.entry(p[..=jumps].to_vec()).or_insert(0) += 1;
        }
    }
    law
}

/// `path,count` CSV with paths written as `0-1-2`.
pub fn path_law_csv(law: &BTreeMap<Vec<VertexId>, u64>) -> String {
    let mut out = String::from("path,count\n");
    for (path, count) in law {
        let names: Vec<String> = path.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "{},{count}", names.join("-"));
    }
    out
}
