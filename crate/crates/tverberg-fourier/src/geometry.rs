//! Maps `∂Δⁿ → R^d`, configurations of `q` points on pairwise disjoint faces,
//! objective evaluation, and the verification report.
//!
//! A configuration is one point of the 2-fold deleted product: for each group
//! element a nonempty support (set of vertex indices) with barycentric weights,
//! supports pairwise disjoint. The solver's objective is the squared norm of
//! the annihilated Fourier coefficients of the evaluated points, which for
//! affine maps is a convex quadratic in the weights.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fourier::{forward_transform, FourierError, SpectrumTable, ValueTable};
use crate::group::GroupError;
use crate::planner::{PartitionPlan, Theorem};

/// Barycentric weights below this threshold do not count towards the
/// effective support (the configuration then lies on the smaller face).
pub const EFFECTIVE_WEIGHT_THRESHOLD: f64 = 1e-9;

/// Step for central finite differences when a post-map blocks the analytic
/// gradient.
pub const FD_STEP: f64 = 1e-6;

const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum GeomError {
    #[error("invalid map: {0}")]
    BadMap(String),
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("oracle limits exceeded: {0}")]
    OracleLimits(String),
    #[error(transparent)]
    Fourier(#[from] FourierError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// Optional continuous evaluator applied after the affine vertex
/// interpolation.
#[derive(Clone)]
pub enum PostMap {
    Identity,
    /// `v ↦ A·v + b`
    Affine { matrix: Vec<Vec<f64>>, offset: Vec<f64> },
    /// Arbitrary continuous `R^d → R^d`.
    Custom(Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>),
}

impl PostMap {
    pub fn is_identity(&self) -> bool {
        matches!(self, PostMap::Identity)
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        match self {
            PostMap::Identity => v.to_vec(),
            PostMap::Affine { matrix, offset } => matrix
                .iter()
                .zip(offset)
                .map(|(row, &b)| row.iter().zip(v).map(|(&a, &x)| a * x).sum::<f64>() + b)
                .collect(),
            PostMap::Custom(f) => f(v),
        }
    }
}

impl fmt::Debug for PostMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PostMap::Identity => write!(f, "Identity"),
            PostMap::Affine { .. } => write!(f, "Affine"),
            PostMap::Custom(_) => write!(f, "Custom"),
        }
    }
}

/// A map `∂Δⁿ → R^d` given by vertex images, evaluated affinely in the
/// barycentric weights and then through the optional post-map.
#[derive(Debug, Clone)]
pub struct SimplexMap {
    n: usize,
    d: usize,
    vertex_images: Vec<Vec<f64>>,
    post_map: PostMap,
}

impl SimplexMap {
    pub fn new(vertex_images: Vec<Vec<f64>>) -> Result<Self, GeomError> {
        if vertex_images.len() < 2 {
            return Err(GeomError::BadMap("need at least 2 vertices".into()));
        }
        let d = vertex_images[0].len();
        if d == 0 {
            return Err(GeomError::BadMap("target dimension must be >= 1".into()));
        }
        if vertex_images.iter().any(|v| v.len() != d) {
            return Err(GeomError::BadMap("vertex images have mixed dimensions".into()));
        }
        Ok(Self { n: vertex_images.len() - 1, d, vertex_images, post_map: PostMap::Identity })
    }

    pub fn with_post_map(mut self, post_map: PostMap) -> Self {
        self.post_map = post_map;
        self
    }

    /// Vertex images i.i.d. uniform in `[-1,1]^d`, deterministic per seed.
    pub fn random(n: usize, d: usize, seed: u64) -> Self {
        use rand::Rng;
        use rand_chacha::rand_core::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let vertex_images = (0..=n)
            .map(|_| (0..d).map(|_| rng.gen_range(-1.0..=1.0)).collect())
            .collect();
        Self { n, d, vertex_images, post_map: PostMap::Identity }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn vertex_images(&self) -> &[Vec<f64>] {
        &self.vertex_images
    }

    pub fn post_map(&self) -> &PostMap {
        &self.post_map
    }

    /// Affine maps admit the analytic objective gradient.
    pub fn is_affine(&self) -> bool {
        self.post_map.is_identity()
    }

    /// Evaluate at a barycentric point of the face spanned by `support`.
    pub fn eval(&self, support: &[usize], weights: &[f64]) -> Vec<f64> {
        let mut v = vec![0.0; self.d];
        for (&vertex, &w) in support.iter().zip(weights) {
            for i in 0..self.d {
                v[i] += w * self.vertex_images[vertex][i];
            }
        }
        self.post_map.apply(&v)
    }
}

/// One point of a configuration: a support face and barycentric weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointPlacement {
    pub support: Vec<usize>,
    pub weights: Vec<f64>,
}

impl PointPlacement {
    pub fn effective_support(&self) -> Vec<usize> {
        self.support
            .iter()
            .zip(&self.weights)
            .filter(|(_, &w)| w > EFFECTIVE_WEIGHT_THRESHOLD)
            .map(|(&v, _)| v)
            .collect()
    }
}

/// `q` points on pairwise disjoint faces, indexed by plan point index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    pub orders: Vec<u32>,
    pub points: Vec<PointPlacement>,
}

impl Configuration {
    /// Checks the deleted-product invariants against a map and plan.
    pub fn validate(&self, map: &SimplexMap, plan: &PartitionPlan) -> Result<(), GeomError> {
        if self.orders != plan.group().orders() {
            return Err(GeomError::DimensionMismatch(format!(
                "configuration orders {:?} do not match plan orders {:?}",
                self.orders,
                plan.group().orders()
            )));
        }
        let q = plan.q() as usize;
        if self.points.len() != q {
            return Err(GeomError::InvalidConfiguration(format!(
                "expected {q} points, got {}",
                self.points.len()
            )));
        }
        let mut used = vec![false; map.n() + 1];
        for (idx, pt) in self.points.iter().enumerate() {
            if pt.support.is_empty() {
                return Err(GeomError::InvalidConfiguration(format!("point {idx} has empty support")));
            }
            if pt.support.len() != pt.weights.len() {
                return Err(GeomError::InvalidConfiguration(format!(
                    "point {idx}: support and weight lengths differ"
                )));
            }
            let mut sum = 0.0;
            for (&v, &w) in pt.support.iter().zip(&pt.weights) {
                if v > map.n() {
                    return Err(GeomError::InvalidConfiguration(format!(
                        "point {idx}: vertex {v} outside 0..={}",
                        map.n()
                    )));
                }
                if used[v] {
                    return Err(GeomError::InvalidConfiguration(format!(
                        "supports overlap at vertex {v}"
                    )));
                }
                used[v] = true;
                if !(w >= -WEIGHT_SUM_TOLERANCE) {
                    return Err(GeomError::InvalidConfiguration(format!(
                        "point {idx}: negative weight {w}"
                    )));
                }
                sum += w;
            }
            if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
                return Err(GeomError::InvalidConfiguration(format!(
                    "point {idx}: weights sum to {sum}"
                )));
            }
        }
        Ok(())
    }

    /// Effective support sizes, largest first.
    pub fn support_profile(&self) -> Vec<usize> {
        let mut sizes: Vec<usize> =
            self.points.iter().map(|p| p.effective_support().len()).collect();
        sizes.sort_unstable_by(|x, y| y.cmp(x));
        sizes
    }

    /// Image points `f(x_g)` for every plan index.
    pub fn evaluate(&self, map: &SimplexMap) -> Vec<Vec<f64>> {
        self.points.iter().map(|p| map.eval(&p.support, &p.weights)).collect()
    }

    /// Values keyed by canonical element rank, ready for the transforms.
    pub fn value_table(&self, map: &SimplexMap, plan: &PartitionPlan) -> ValueTable {
        let spec = plan.group().clone();
        let images = self.evaluate(map);
        let q = plan.q() as usize;
        let mut values = vec![Vec::new(); q];
        for (rank, g) in spec.enumerate_elements().iter().enumerate() {
            let img = &images[plan.point_index(g)];
            values[rank] = img.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        }
        ValueTable::new(spec, map.d(), values).expect("dimensions are consistent")
    }
}

/// Support-shape outcome for planar block plans with two blocks: either all
/// but one point sit on vertices ("a") or all but two do ("b").
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SupportCase {
    #[serde(rename = "a")]
    OneBigFace,
    #[serde(rename = "b")]
    TwoEdges,
}

/// Everything `verify` measures about a configuration under a plan.
#[derive(Debug, Clone)]
pub struct FourierReport {
    /// Transform of the evaluated configuration.
    pub spectrum: SpectrumTable,
    /// Root of the summed squared magnitudes over the full annihilated set.
    pub residual: f64,
    /// Same, restricted to conjugate-pair representatives (the solver
    /// objective).
    pub objective_residual: f64,
    /// Largest annihilated coefficient magnitude.
    pub max_annihilated_coeff: f64,
    /// Per equality class: worst coordinate deviation between members.
    pub equality_deviations: Vec<f64>,
    /// Per orbit family: worst coordinate deviation between orbit averages.
    pub orbit_deviations: Vec<f64>,
    /// Worst coordinate deviation between block averages.
    pub block_deviation: Option<f64>,
    /// For two-block plans: the signed alternating sum over interleaved
    /// blocks, in the sup norm.
    pub alternating_sum_deviation: Option<f64>,
    /// Largest coincidence deviation of any kind.
    pub max_coincidence_deviation: f64,
    /// Triangle-inequality bound `2·q'·max_annihilated_coeff`: no coincidence
    /// deviation can exceed it.
    pub guarantee_bound: f64,
    /// Effective support sizes, largest first.
    pub support_profile: Vec<usize>,
    /// Vertex-dominated shape classification for planar two-block plans.
    pub support_case: Option<SupportCase>,
}

fn max_coord_deviation(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn average(points: &[&Vec<f64>], d: usize) -> Vec<f64> {
    let mut avg = vec![0.0; d];
    for p in points {
        for i in 0..d {
            avg[i] += p[i];
        }
    }
    for v in &mut avg {
        *v /= points.len() as f64;
    }
    avg
}

/// Computes the full spectrum of a configuration and the deviation of every
/// planned coincidence.
///
/// If every annihilated coefficient magnitude is at most `δ`, every reported
/// coincidence deviation is at most `2·q'·δ`.
pub fn verify(
    map: &SimplexMap,
    config: &Configuration,
    plan: &PartitionPlan,
) -> Result<FourierReport, GeomError> {
    config.validate(map, plan)?;
    if map.d() != plan.d() as usize {
        return Err(GeomError::DimensionMismatch(format!(
            "map targets R^{} but the plan has d = {}",
            map.d(),
            plan.d()
        )));
    }

    let spec = plan.group();
    let values = config.value_table(map, plan);
    let spectrum = forward_transform(&values);

    let mut residual_sq = 0.0;
    let mut max_coeff: f64 = 0.0;
    for eps in plan.annihilated() {
        for i in 0..map.d() {
            let c = spectrum.coeff(i, eps);
            residual_sq += c.norm_sqr();
            max_coeff = max_coeff.max(c.norm());
        }
    }
    let mut objective_sq = 0.0;
    for eps in plan.representatives() {
        for i in 0..map.d() {
            objective_sq += spectrum.coeff(i, eps).norm_sqr();
        }
    }

    let images = config.evaluate(map);
    let schedule = plan.full_schedule();

    let equality_deviations: Vec<f64> = schedule
        .equality_classes
        .iter()
        .map(|class| {
            let mut worst: f64 = 0.0;
            for pair in class.windows(2) {
                worst = worst.max(max_coord_deviation(&images[pair[0]], &images[pair[1]]));
            }
            worst = worst.max(max_coord_deviation(
                &images[class[0]],
                &images[*class.last().expect("classes are nonempty")],
            ));
            worst
        })
        .collect();

    let orbit_deviations: Vec<f64> = schedule
        .orbit_families
        .iter()
        .map(|fam| {
            let avgs: Vec<Vec<f64>> = fam
                .orbits
                .iter()
                .map(|orbit| {
                    let pts: Vec<&Vec<f64>> = orbit.iter().map(|&i| &images[i]).collect();
                    average(&pts, map.d())
                })
                .collect();
            let mut worst: f64 = 0.0;
            for x in 0..avgs.len() {
                for y in x + 1..avgs.len() {
                    worst = worst.max(max_coord_deviation(&avgs[x], &avgs[y]));
                }
            }
            worst
        })
        .collect();

    let block_deviation = if schedule.blocks.is_empty() {
        None
    } else {
        let avgs: Vec<Vec<f64>> = schedule
            .blocks
            .iter()
            .map(|block| {
                let pts: Vec<&Vec<f64>> = block.iter().map(|&i| &images[i]).collect();
                average(&pts, map.d())
            })
            .collect();
        let mut worst: f64 = 0.0;
        for x in 0..avgs.len() {
            for y in x + 1..avgs.len() {
                worst = worst.max(max_coord_deviation(&avgs[x], &avgs[y]));
            }
        }
        Some(worst)
    };

    // two blocks interleave into an alternating sum: ±(Σ block_1 − Σ block_0)
    let alternating_sum_deviation = if schedule.blocks.len() == 2 {
        let mut sums = [vec![0.0; map.d()], vec![0.0; map.d()]];
        for (which, block) in schedule.blocks.iter().enumerate() {
            for &idx in block {
                for i in 0..map.d() {
                    sums[which][i] += images[idx][i];
                }
            }
        }
        Some(max_coord_deviation(&sums[0], &sums[1]))
    } else {
        None
    };

    let max_coincidence_deviation = equality_deviations
        .iter()
        .chain(&orbit_deviations)
        .chain(block_deviation.iter())
        .fold(0.0f64, |acc, &v| acc.max(v));

    let support_profile = config.support_profile();
    let support_case = classify_support_case(plan, &support_profile);

    let _ = spec;
    Ok(FourierReport {
        spectrum,
        residual: residual_sq.sqrt(),
        objective_residual: objective_sq.sqrt(),
        max_annihilated_coeff: max_coeff,
        equality_deviations,
        orbit_deviations,
        block_deviation,
        alternating_sum_deviation,
        max_coincidence_deviation,
        guarantee_bound: 2.0 * plan.q_prime() as f64 * max_coeff,
        support_profile,
        support_case,
    })
}

/// For two-block planar plans: case "a" means all points but one are
/// vertices and the leftover face has at most 3 vertices; case "b" means all
/// but two are vertices and the two leftover faces are edges at most.
fn classify_support_case(plan: &PartitionPlan, profile: &[usize]) -> Option<SupportCase> {
    if plan.theorem() != Theorem::Blocks || plan.q() / plan.r() as u64 != 2 {
        return None;
    }
    let singles = profile.iter().filter(|&&s| s == 1).count();
    let q = profile.len();
    if singles >= q - 1 && profile.first().is_some_and(|&s| s <= 3) {
        Some(SupportCase::OneBigFace)
    } else if singles >= q - 2 && profile.iter().take(2).all(|&s| s <= 2) {
        Some(SupportCase::TwoEdges)
    } else {
        None
    }
}

/// Residual over representative annihilated characters plus the gradient of
/// its square with respect to every weight, point by point.
///
/// For affine maps the coefficients are linear in the weights and the
/// gradient is analytic; with a post-map present it falls back to central
/// finite differences of step [`FD_STEP`].
pub fn evaluate_objective(
    map: &SimplexMap,
    plan: &PartitionPlan,
    config: &Configuration,
) -> Result<(f64, Vec<Vec<f64>>), GeomError> {
    config.validate(map, plan)?;
    if map.d() != plan.d() as usize {
        return Err(GeomError::DimensionMismatch(format!(
            "map targets R^{} but the plan has d = {}",
            map.d(),
            plan.d()
        )));
    }
    let weights: Vec<Vec<f64>> = config.points.iter().map(|p| p.weights.clone()).collect();
    let supports: Vec<Vec<usize>> = config.points.iter().map(|p| p.support.clone()).collect();
    let objective = ObjectiveContext::new(map, plan, &supports);
    let residual_sq = objective.residual_sq(&weights);
    let grad = if map.is_affine() {
        objective.analytic_gradient(&weights)
    } else {
        objective.fd_gradient(&weights)
    };
    Ok((residual_sq.sqrt(), grad))
}

/// Precomputed character weights for evaluating the objective on a fixed
/// support assignment.
pub(crate) struct ObjectiveContext<'a> {
    map: &'a SimplexMap,
    supports: &'a [Vec<usize>],
    d: usize,
    /// `char_weights[rep][point] = χ_ε(g_point)^{-1} / q`
    char_weights: Vec<Vec<Complex64>>,
}

impl<'a> ObjectiveContext<'a> {
    pub(crate) fn new(
        map: &'a SimplexMap,
        plan: &'a PartitionPlan,
        supports: &'a [Vec<usize>],
    ) -> Self {
        let spec = plan.group();
        let q = plan.q() as usize;
        let mut char_weights = Vec::with_capacity(plan.representatives().len());
        for eps in plan.representatives() {
            let mut row = vec![Complex64::new(0.0, 0.0); q];
            for g in spec.enumerate_elements() {
                let idx = plan.point_index(&g);
                row[idx] = spec
                    .eval_character(eps, &g)
                    .expect("plan characters conform")
                    .conj()
                    .value()
                    / q as f64;
            }
            char_weights.push(row);
        }
        Self { map, supports, d: map.d(), char_weights }
    }

    pub(crate) fn images(&self, weights: &[Vec<f64>]) -> Vec<Vec<f64>> {
        self.supports
            .iter()
            .zip(weights)
            .map(|(s, w)| self.map.eval(s, w))
            .collect()
    }

    /// `Σ_{i, ε∈reps} |c_{i,ε}|²`.
    pub(crate) fn residual_sq(&self, weights: &[Vec<f64>]) -> f64 {
        let images = self.images(weights);
        let mut total = 0.0;
        for row in &self.char_weights {
            for i in 0..self.d {
                let mut c = Complex64::new(0.0, 0.0);
                for (idx, img) in images.iter().enumerate() {
                    c += row[idx] * img[i];
                }
                total += c.norm_sqr();
            }
        }
        total
    }

    /// Gradient of the squared residual; exact for affine maps.
    pub(crate) fn analytic_gradient(&self, weights: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let images = self.images(weights);
        let mut grad: Vec<Vec<f64>> =
            self.supports.iter().map(|s| vec![0.0; s.len()]).collect();
        for row in &self.char_weights {
            for i in 0..self.d {
                let mut c = Complex64::new(0.0, 0.0);
                for (idx, img) in images.iter().enumerate() {
                    c += row[idx] * img[i];
                }
                for (idx, support) in self.supports.iter().enumerate() {
                    for (slot, &v) in support.iter().enumerate() {
                        let dc = row[idx] * self.map.vertex_images()[v][i];
                        grad[idx][slot] += 2.0 * (c.conj() * dc).re;
                    }
                }
            }
        }
        grad
    }

    /// Central finite differences of the squared residual.
    pub(crate) fn fd_gradient(&self, weights: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let mut work: Vec<Vec<f64>> = weights.to_vec();
        let mut grad: Vec<Vec<f64>> =
            self.supports.iter().map(|s| vec![0.0; s.len()]).collect();
        for idx in 0..work.len() {
            for slot in 0..work[idx].len() {
                let orig = work[idx][slot];
                work[idx][slot] = orig + FD_STEP;
                let plus = self.residual_sq(&work);
                work[idx][slot] = orig - FD_STEP;
                let minus = self.residual_sq(&work);
                work[idx][slot] = orig;
                grad[idx][slot] = (plus - minus) / (2.0 * FD_STEP);
            }
        }
        grad
    }
}
