//! Turns a model descriptor into concrete wired graphs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vrjp_core::weights::{constant_c, constant_ch, EuclideanLongRange, HierarchicalModel, HighDimModel, Profile};
use vrjp_core::WiredGraph;

use crate::config::ModelSpec;
use crate::error::{LabError, LabResult};
use crate::table::Value;

/// Largest vertex count for sampling experiments.
pub const SAMPLING_LIMIT: usize = 4096;
/// Relative accuracy of the pinnings that stand in for the outside lattice.
pub const PIN_TOLERANCE: f64 = 1e-9;

/// Columns identifying an instance in result tables.
#[derive(Clone, Debug, PartialEq)]
pub struct Descriptor {
    pub model: &'static str,
    pub d: Option<usize>,
    /// `N` for dyadic boxes and hierarchical models, the side for high-dim
    /// boxes, the index for random graphs.
    pub size: Option<i64>,
    pub alpha: Option<f64>,
    pub wbar: Option<f64>,
}

impl Descriptor {
    pub const COLUMNS: [&'static str; 5] = ["model", "d", "N", "alpha", "Wbar"];

    /// Short human-readable name, e.g. `euclidean d=1 N=3`.
    pub fn label(&self) -> String {
        let mut out = self.model.to_string();
        if let Some(d) = self.d {
            out += &format!(" d={d}");
        }
        if let Some(n) = self.size {
            out += &format!(" N={n}");
        }
        out
    }

    pub fn values(&self) -> Vec<Value> {
        vec![
            Value::from(self.model),
            Value::opt(self.d.map(|d| d as i64)),
            Value::opt(self.size),
            Value::opt_float(self.alpha),
            Value::opt_float(self.wbar),
        ]
    }
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub descriptor: Descriptor,
    pub graph: WiredGraph,
}

impl ModelSpec {
    fn name(&self) -> &'static str {
        match self {
            ModelSpec::Euclidean { .. } => "euclidean",
            ModelSpec::Highdim { .. } => "highdim",
            ModelSpec::Hierarchical { .. } => "hierarchical",
            ModelSpec::Graph { .. } => "graph",
            ModelSpec::Random { .. } => "random",
        }
    }

    /// Vertex counts of every instance, computed without building anything.
    pub fn planned_sizes(&self) -> LabResult<Vec<usize>> {
        let pow = |base: i64, exp: usize| -> LabResult<usize> {
            (base as usize)
                .checked_pow(exp as u32)
                .ok_or_else(|| LabError::Config(format!("box {base}^{exp} overflows")))
        };
        let sizes = match self {
            ModelSpec::Euclidean { d, levels, .. } => levels
                .iter()
                .map(|&n| pow(2, n as usize * d))
                .collect::<LabResult<_>>()?,
            ModelSpec::Highdim { d, sides, .. } => sides.iter().map(|&s| pow(s, *d)).collect::<LabResult<_>>()?,
            ModelSpec::Hierarchical { levels, .. } => levels.iter().map(|&n| pow(2, n)).collect::<LabResult<_>>()?,
            ModelSpec::Graph { .. } => Vec::new(),
            ModelSpec::Random {
                count, max_vertices, ..
            } => vec![*max_vertices; *count],
        };
        Ok(sizes)
    }

    fn validate(&self) -> LabResult<()> {
        let bad = |msg: String| Err(LabError::Config(msg));
        match self {
            ModelSpec::Euclidean { d, levels, wbar, alpha } => {
                if *d == 0 || levels.is_empty() || !(*wbar > 0.0) || !(*alpha > 1.0) {
                    return bad("euclidean model needs d ≥ 1, levels, Wbar > 0 and alpha > 1".into());
                }
            }
            ModelSpec::Highdim { d, sides, wbar, .. } => {
                if *d < 3 || sides.is_empty() || sides.iter().any(|&s| s < 1) || !(*wbar > 0.0) {
                    return bad("highdim model needs d ≥ 3, positive sides and Wbar > 0".into());
                }
            }
            ModelSpec::Hierarchical { levels, wbar_h, alpha } => {
                if levels.is_empty() || levels.contains(&0) || !(*wbar_h > 0.0) || !(*alpha > 1.0) {
                    return bad("hierarchical model needs levels ≥ 1, wbar_h > 0 and alpha > 1".into());
                }
            }
            ModelSpec::Graph { .. } => {}
            ModelSpec::Random {
                count,
                max_vertices,
                weight_range,
                extra_edge_probability,
                ..
            } => {
                let [lo, hi] = *weight_range;
                if *count == 0 || *max_vertices == 0 || !(lo > 0.0 && hi > lo) {
                    return bad("random model needs count, max_vertices ≥ 1 and 0 < low < high weights".into());
                }
                if !(0.0..=1.0).contains(extra_edge_probability) {
                    return bad("extra_edge_probability must lie in [0, 1]".into());
                }
            }
        }
        Ok(())
    }

    /// Builds every instance, refusing any with more than `limit` vertices.
    pub fn instances(&self, limit: usize) -> LabResult<Vec<Instance>> {
        self.validate()?;
        for n in self.planned_sizes()? {
            guard(n, limit)?;
        }
        let name = self.name();
        let descriptor = |d, size, alpha, wbar| Descriptor {
            model: name,
            d,
            size,
            alpha,
            wbar,
        };
        let built = match self {
            ModelSpec::Euclidean { d, levels, wbar, alpha } => {
                let model = EuclideanLongRange::log_envelope(*d, *wbar, *alpha);
                levels
                    .iter()
                    .map(|&n| {
                        Ok(Instance {
                            descriptor: descriptor(Some(*d), Some(n as i64), Some(*alpha), Some(*wbar)),
                            graph: model.box_graph(n, PIN_TOLERANCE)?,
                        })
                    })
                    .collect::<LabResult<Vec<_>>>()?
            }
            ModelSpec::Highdim {
                d, sides, wbar, center, ..
            } => {
                let model = self.high_dim_model()?;
                let center = center.unwrap_or_else(|| default_center(sides));
                sides
                    .iter()
                    .map(|&side| {
                        Ok(Instance {
                            descriptor: descriptor(Some(*d), Some(side), None, Some(*wbar)),
                            graph: model.box_graph(side, center - (side - 1) / 2, PIN_TOLERANCE)?,
                        })
                    })
                    .collect::<LabResult<Vec<_>>>()?
            }
            ModelSpec::Hierarchical { levels, wbar_h, alpha } => levels
                .iter()
                .map(|&n| {
                    Ok(Instance {
                        descriptor: descriptor(None, Some(n as i64), Some(*alpha), Some(*wbar_h)),
                        graph: HierarchicalModel::minimal(n, *wbar_h, *alpha).graph()?,
                    })
                })
                .collect::<LabResult<Vec<_>>>()?,
            ModelSpec::Graph { path } => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| LabError::Config(format!("cannot read graph file {}: {e}", path.display())))?;
                let graph: WiredGraph = text.parse()?;
                guard(graph.n(), limit)?;
                vec![Instance {
                    descriptor: descriptor(None, None, None, None),
                    graph,
                }]
            }
            ModelSpec::Random {
                count,
                max_vertices,
                weight_range,
                extra_edge_probability,
                graph_seed,
            } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*graph_seed);
                (0..*count)
                    .map(|k| {
                        let n = rng.random_range(1..=*max_vertices);
                        Ok(Instance {
                            descriptor: descriptor(None, Some(k as i64), None, None),
                            graph: random_wired_graph(&mut rng, n, *weight_range, *extra_edge_probability)?,
                        })
                    })
                    .collect::<LabResult<Vec<_>>>()?
            }
        };
        Ok(built)
    }

    pub fn high_dim_model(&self) -> LabResult<HighDimModel> {
        match self {
            ModelSpec::Highdim { d, wbar, long_range, .. } => Ok(HighDimModel::new(
                *d,
                *wbar,
                long_range.map(|p| Profile::Power {
                    scale: p.scale,
                    exponent: p.exponent,
                }),
            )?),
            _ => Err(LabError::Config("expected a highdim model".into())),
        }
    }

    /// The analytic constant bounding `E[e^{σ m u_i}]`, where one is known.
    pub fn moment_bound(&self, m: f64) -> LabResult<Option<f64>> {
        Ok(match self {
            ModelSpec::Euclidean { d, wbar, alpha, .. } => Some(constant_c(*wbar, *d, *alpha, m)?),
            ModelSpec::Hierarchical { wbar_h, alpha, .. } => Some(constant_ch(*wbar_h, *alpha, m)?),
            ModelSpec::Highdim { .. } => Some(2f64.powf(2.0 * m + 1.0)),
            ModelSpec::Graph { .. } | ModelSpec::Random { .. } => None,
        })
    }
}

/// `⌊(max side - 1) / 2⌋`, the centre of the largest box anchored at 0.
pub fn default_center(sides: &[i64]) -> i64 {
    (sides.iter().copied().max().unwrap_or(1) - 1) / 2
}

pub fn guard(n: usize, limit: usize) -> LabResult<()> {
    if n > limit {
        return Err(LabError::Guard {
            what: "vertex count",
            value: n,
            limit,
        });
    }
    Ok(())
}

/// A random tree with extra edges added independently, and at least one pin.
pub fn random_wired_graph(rng: &mut ChaCha8Rng, n: usize, [lo, hi]: [f64; 2], extra: f64) -> LabResult<WiredGraph> {
    let mut edges: Vec<(usize, usize, f64)> = (1..n).map(|j| (rng.random_range(0..j), j, rng.random_range(lo..hi))).collect();
    for a in 0..n {
        for b in a + 1..n {
            let present = edges.iter().any(|&(x, y, _)| (x.min(y), x.max(y)) == (a, b));
            if !present && rng.random::<f64>() < extra {
                edges.push((a, b, rng.random_range(lo..hi)));
            }
        }
    }
    let mut pins: Vec<f64> = (0..n)
        .map(|_| if rng.random::<f64>() < 0.5 { rng.random_range(lo..hi) } else { 0.0 })
        .collect();
    if pins.iter().all(|&h| h == 0.0) {
        let k = rng.random_range(0..n);
        pins[k] = rng.random_range(lo..hi);
    }
    Ok(WiredGraph::new(n, edges, pins)?)
}
