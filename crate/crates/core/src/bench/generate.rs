use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;
use serde::{Deserialize, Serialize};

use crate::connectivity::is_connected;
use crate::error::{Error, Result};
use crate::geom::{build_comm_graph, Instance, Point};

/// Attempts before [`generate_instance`] gives up on finding a connected
/// sample.
pub const MAX_ATTEMPTS: usize = 10_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetKind {
    #[default]
    Uniform,
    Gmm,
}

impl std::str::FromStr for DatasetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(DatasetKind::Uniform),
            "gmm" => Ok(DatasetKind::Gmm),
            other => Err(Error::InvalidArgument(format!("unknown dataset kind `{other}`"))),
        }
    }
}

/// Isotropic 2D Gaussian mixture.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GmmParams {
    pub means: Vec<[f64; 2]>,
    pub stds: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GmmParams {
    /// `components` equal-weight components with means uniform in the
    /// square and standard deviation `side / 6`.
    pub fn default_for(side: f64, components: usize, rng: &mut impl Rng) -> Self {
        let means = (0..components).map(|_| [rng.random_range(0.0..side), rng.random_range(0.0..side)]).collect();
        GmmParams { means, stds: vec![side / 6.0; components], weights: vec![1.0 / components as f64; components] }
    }

    fn validate(&self) -> Result<()> {
        let c = self.means.len();
        if c == 0 || self.stds.len() != c || self.weights.len() != c {
            return Err(Error::InvalidArgument("GMM means, stds and weights must have the same non-zero length".into()));
        }
        if self.stds.iter().any(|&s| !(s > 0.0 && s.is_finite())) {
            return Err(Error::InvalidArgument("GMM standard deviations must be positive".into()));
        }
        if self.weights.iter().any(|&w| w.is_nan() || w < 0.0) || (self.weights.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument("GMM weights must be non-negative and sum to 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub kind: DatasetKind,
    pub n: usize,
    pub h: f64,
    /// Side length of the square workspace `[0, side]^2`.
    pub side: f64,
    /// Explicit mixture; `None` draws the default 3-component mixture from
    /// the seeded stream.
    pub gmm: Option<GmmParams>,
    pub seed: u64,
}

impl GeneratorConfig {
    /// Uniform dataset with radius 1 and side `sqrt(n) / 2`.
    pub fn uniform(n: usize, seed: u64) -> Self {
        GeneratorConfig { kind: DatasetKind::Uniform, n, h: 1.0, side: default_side(n), gmm: None, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidArgument(format!("need at least 2 robots, got {}", self.n)));
        }
        if !(self.side > 0.0 && self.side.is_finite()) {
            return Err(Error::InvalidArgument(format!("workspace side must be positive, got {}", self.side)));
        }
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(Error::InvalidArgument(format!("radius must be positive, got {}", self.h)));
        }
        if let Some(g) = &self.gmm {
            g.validate()?;
        }
        Ok(())
    }
}

/// Workspace side keeping about four robots per square meter.
pub fn default_side(n: usize) -> f64 {
    (n as f64).sqrt() / 2.0
}

/// Samples positions until the communication graph is connected.
pub fn generate_instance(cfg: &GeneratorConfig) -> Result<Instance> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let gmm = match (cfg.kind, &cfg.gmm) {
        (DatasetKind::Gmm, Some(g)) => Some(g.clone()),
        (DatasetKind::Gmm, None) => Some(GmmParams::default_for(cfg.side, 3, &mut rng)),
        (DatasetKind::Uniform, _) => None,
    };
    let mut sampler = Sampler::new(cfg.side, gmm)?;
    let mut largest_sum = 0.0;
    for _ in 0..MAX_ATTEMPTS {
        let positions: Vec<Point> = (0..cfg.n).map(|_| sampler.sample(&mut rng)).collect();
        let inst = Instance::new(2, cfg.h, positions)?;
        let graph = build_comm_graph(&inst);
        if is_connected(&graph) {
            return Ok(inst);
        }
        largest_sum += largest_component(&graph) as f64 / cfg.n as f64;
    }
    Err(Error::GenerationFailed {
        attempts: MAX_ATTEMPTS,
        n: cfg.n,
        side: cfg.side,
        h: cfg.h,
        mean_largest_component: largest_sum / MAX_ATTEMPTS as f64,
    })
}

fn largest_component(graph: &crate::geom::CommGraph) -> usize {
    let n = graph.n();
    let mut seen = vec![false; n];
    let mut best = 0;
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut stack = vec![s];
        let mut size = 0;
        while let Some(u) = stack.pop() {
            size += 1;
            for &v in graph.neighbors(u) {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        best = best.max(size);
    }
    best
}

struct Sampler {
    side: f64,
    mixture: Option<(GmmParams, WeightedIndex<f64>, Vec<Normal<f64>>)>,
}

impl Sampler {
    fn new(side: f64, gmm: Option<GmmParams>) -> Result<Self> {
        let mixture = match gmm {
            None => None,
            Some(g) => {
                g.validate()?;
                let index = WeightedIndex::new(&g.weights).map_err(|e| Error::InvalidArgument(format!("GMM weights: {e}")))?;
                let normals = g.stds.iter().map(|&s| Normal::new(0.0, s).expect("positive std")).collect();
                Some((g, index, normals))
            }
        };
        Ok(Sampler { side, mixture })
    }

    fn sample(&mut self, rng: &mut ChaCha8Rng) -> Point {
        let side = self.side;
        match &self.mixture {
            None => Point::new2(rng.random_range(0.0..side), rng.random_range(0.0..side)),
            Some((g, index, normals)) => {
                let c = index.sample(rng);
                // Truncated to the workspace by rejection; clamp as a last resort.
                for _ in 0..1000 {
                    let x = g.means[c][0] + normals[c].sample(rng);
                    let y = g.means[c][1] + normals[c].sample(rng);
                    if (0.0..=side).contains(&x) && (0.0..=side).contains(&y) {
                        return Point::new2(x, y);
                    }
                }
                Point::new2(g.means[c][0].clamp(0.0, side), g.means[c][1].clamp(0.0, side))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_is_connected_and_reproducible() {
        let cfg = GeneratorConfig { side: 2.0, ..GeneratorConfig::uniform(8, 42) };
        let a = generate_instance(&cfg).unwrap();
        let b = generate_instance(&cfg).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        assert!(is_connected(&build_comm_graph(&a)));
        assert!(a.positions().iter().all(|p| (0.0..2.0).contains(&p.0[0]) && (0.0..2.0).contains(&p.0[1])));
        let c = generate_instance(&GeneratorConfig { seed: 43, ..cfg }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn sparse_workspace_fails() {
        let cfg = GeneratorConfig { side: 1000.0, ..GeneratorConfig::uniform(8, 1) };
        match generate_instance(&cfg) {
            Err(Error::GenerationFailed { attempts, mean_largest_component, .. }) => {
                assert_eq!(attempts, MAX_ATTEMPTS);
                assert!(mean_largest_component < 0.5);
            }
            other => panic!("expected GenerationFailed, got {other:?}"),
        }
    }

    #[test]
    fn gmm_samples_stay_in_workspace() {
        let cfg = GeneratorConfig { kind: DatasetKind::Gmm, ..GeneratorConfig::uniform(16, 7) };
        let inst = generate_instance(&cfg).unwrap();
        let side = cfg.side;
        assert!(inst.positions().iter().all(|p| (0.0..=side).contains(&p.0[0]) && (0.0..=side).contains(&p.0[1])));
        assert_eq!(inst, generate_instance(&cfg).unwrap());
    }

    #[test]
    fn config_validation() {
        assert!(generate_instance(&GeneratorConfig::uniform(1, 0)).is_err());
        assert!(generate_instance(&GeneratorConfig { side: 0.0, ..GeneratorConfig::uniform(4, 0) }).is_err());
        let bad = GmmParams { means: vec![[0.0, 0.0]; 2], stds: vec![1.0; 2], weights: vec![0.7, 0.7] };
        let cfg = GeneratorConfig { kind: DatasetKind::Gmm, gmm: Some(bad), ..GeneratorConfig::uniform(4, 0) };
        assert!(generate_instance(&cfg).is_err());
    }
}
