//! Search for configurations annihilating a plan's transforms.
//!
//! The outer problem assigns each vertex of `∂Δⁿ` to one of the `q` labeled
//! groups or leaves it unused; for a fixed assignment and an affine map the
//! objective is a convex quadratic over a product of simplices, solved by
//! projected gradient descent with spectral (Barzilai–Borwein) steps plus an
//! exact least-squares polish on the active face. The outer loop enumerates
//! assignments exhaustively (in a seeded shuffled order with early exit) when
//! the space is small, and falls back to seeded simulated annealing over
//! assignments otherwise.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::{verify, Configuration, FourierReport, GeomError, PointPlacement, SimplexMap};
use crate::geometry::ObjectiveContext;
use crate::planner::PartitionPlan;

/// Exhaustive enumeration is used up to this many assignments.
const EXHAUSTIVE_LIMIT: f64 = 1e6;
/// Assignments polished per merge step; determinism does not depend on the
/// thread count because chunk boundaries are fixed.
const CHUNK: usize = 512;
/// Inner-iteration budget while probing assignments.
const PROBE_ITERS: usize = 600;
/// Annealing steps per restart.
const ANNEAL_STEPS: usize = 600;
/// Geometric cooling factor, applied once per sweep of `n+1` proposals.
const COOLING: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    Auto,
    Exhaustive,
    Anneal,
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub mode: SearchMode,
    pub seed: u64,
    /// Success threshold on the representative-coefficient residual.
    pub tol: f64,
    /// Iteration cap per inner solve.
    pub max_iters: usize,
    /// Independent annealing restarts.
    pub restarts: usize,
    /// Worker threads for the outer loop; 1 keeps everything sequential.
    pub threads: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            mode: SearchMode::Auto,
            seed: 0,
            tol: 1e-8,
            max_iters: 50_000,
            restarts: 8,
            threads: 1,
        }
    }
}

/// Result of a solve: best configuration found, flagged rather than failed
/// when the tolerance was not reached.
#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub converged: bool,
    pub configuration: Configuration,
    pub report: FourierReport,
    pub objective_residual: f64,
    /// Vertex labels: `0..q` are groups, `q` means unused.
    pub assignment: Vec<u8>,
    pub assignments_tried: usize,
    pub mode_used: SearchMode,
    pub warnings: Vec<String>,
}

/// Finds a configuration whose planned transforms vanish, within tolerance.
///
/// `map.n() >= plan.n()` is required for the existence guarantee; smaller
/// maps are searched anyway with a warning (failure then means nothing).
pub fn solve(
    map: &SimplexMap,
    plan: &PartitionPlan,
    options: &SolveOptions,
) -> Result<SolveOutcome, GeomError> {
    if map.d() != plan.d() as usize {
        return Err(GeomError::DimensionMismatch(format!(
            "map targets R^{} but the plan has d = {}",
            map.d(),
            plan.d()
        )));
    }
    let q = plan.q() as usize;
    let verts = map.n() + 1;
    if verts < q {
        return Err(GeomError::InvalidConfiguration(format!(
            "{verts} vertices cannot host {q} disjoint nonempty supports"
        )));
    }
    let mut warnings: Vec<String> = plan.warnings().to_vec();
    if map.n() < plan.n() {
        warnings.push(format!(
            "map dimension n = {} is below the plan's n = {}: no existence guarantee",
            map.n(),
            plan.n()
        ));
    }

    let labels = q + 1;
    let space = (labels as f64).powi(verts as i32);
    let mode_used = match options.mode {
        SearchMode::Auto => {
            if space <= EXHAUSTIVE_LIMIT {
                SearchMode::Exhaustive
            } else {
                SearchMode::Anneal
            }
        }
        m => m,
    };
    if mode_used == SearchMode::Exhaustive && space > 64.0 * EXHAUSTIVE_LIMIT {
        return Err(GeomError::OracleLimits(format!(
            "assignment space of {space:.3e} is too large to enumerate"
        )));
    }

    let best = match mode_used {
        SearchMode::Exhaustive => search_exhaustive(map, plan, options),
        SearchMode::Anneal => search_anneal(map, plan, options),
        SearchMode::Auto => unreachable!("resolved above"),
    };
    let Some(candidate) = best else {
        return Err(GeomError::InvalidConfiguration(
            "no valid assignment exists for this map and plan".into(),
        ));
    };

    // final full-budget solve on the winning assignment
    let ctx = AssignmentContext::new(map, plan, &candidate.assignment);
    let polished = ctx
        .map(|ctx| ctx.minimize(options.max_iters, options.tol))
        .unwrap_or_else(|| candidate.solution.clone());
    let solution =
        if polished.residual_sq <= candidate.solution.residual_sq { polished } else { candidate.solution.clone() };

    let configuration = build_configuration(plan, &candidate.assignment, &solution.weights);
    let report = verify(map, &configuration, plan)?;
    let objective_residual = report.objective_residual;
    Ok(SolveOutcome {
        converged: objective_residual <= options.tol,
        configuration,
        report,
        objective_residual,
        assignment: candidate.assignment,
        assignments_tried: candidate.tried,
        mode_used,
        warnings,
    })
}

#[derive(Debug, Clone)]
struct Candidate {
    assignment: Vec<u8>,
    solution: InnerSolution,
    tried: usize,
}

#[derive(Debug, Clone)]
struct InnerSolution {
    /// Flat weights per support slot, grouped by point.
    weights: Vec<Vec<f64>>,
    residual_sq: f64,
}

fn build_configuration(
    plan: &PartitionPlan,
    assignment: &[u8],
    weights: &[Vec<f64>],
) -> Configuration {
    let q = plan.q() as usize;
    let supports = supports_of(assignment, q);
    Configuration {
        orders: plan.group().orders().to_vec(),
        points: supports
            .into_iter()
            .zip(weights)
            .map(|(support, w)| PointPlacement { support, weights: w.clone() })
            .collect(),
    }
}

fn supports_of(assignment: &[u8], q: usize) -> Vec<Vec<usize>> {
    let mut supports = vec![Vec::new(); q];
    for (v, &label) in assignment.iter().enumerate() {
        if (label as usize) < q {
            supports[label as usize].push(v);
        }
    }
    supports
}

fn assignment_is_valid(assignment: &[u8], q: usize) -> bool {
    let mut seen = vec![false; q];
    for &label in assignment {
        if (label as usize) < q {
            seen[label as usize] = true;
        }
    }
    seen.into_iter().all(|s| s)
}

fn decode_assignment(mut code: u64, labels: u64, verts: usize) -> Vec<u8> {
    let mut out = vec![0u8; verts];
    for slot in out.iter_mut() {
        *slot = (code % labels) as u8;
        code /= labels;
    }
    out
}

// ---------------------------------------------------------------------------
// Exhaustive search
// ---------------------------------------------------------------------------

fn search_exhaustive(
    map: &SimplexMap,
    plan: &PartitionPlan,
    options: &SolveOptions,
) -> Option<Candidate> {
    let q = plan.q() as usize;
    let verts = map.n() + 1;
    let labels = (q + 1) as u64;
    let count = labels.pow(verts as u32);

    let mut order: Vec<u64> = (0..count).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    for i in (1..order.len()).rev() {
        let j = rng.gen_range(0..=i);
        order.swap(i, j);
    }

    let pool = (options.threads > 1).then(|| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(options.threads)
            .build()
            .expect("thread pool")
    });

    let target_sq = options.tol * options.tol;
    let mut best: Option<Candidate> = None;
    let mut tried = 0usize;
    for chunk in order.chunks(CHUNK) {
        let probe = |&code: &u64| -> Option<(f64, Vec<u8>, InnerSolution)> {
            let assignment = decode_assignment(code, labels, verts);
            if !assignment_is_valid(&assignment, q) {
                return None;
            }
            let ctx = AssignmentContext::new(map, plan, &assignment)?;
            let sol = ctx.minimize(PROBE_ITERS, options.tol);
            Some((sol.residual_sq, assignment, sol))
        };
        let chunk_results: Vec<(f64, Vec<u8>, InnerSolution)> = match &pool {
            Some(pool) => pool.install(|| chunk.par_iter().filter_map(probe).collect()),
            None => chunk.iter().filter_map(probe).collect(),
        };
        tried += chunk_results.len();
        for (res_sq, assignment, sol) in chunk_results {
            let better = match &best {
                None => true,
                Some(b) => {
                    res_sq < b.solution.residual_sq
                        || (res_sq == b.solution.residual_sq && assignment < b.assignment)
                }
            };
            if better {
                best = Some(Candidate { assignment, solution: sol, tried });
            }
        }
        if let Some(b) = &mut best {
            b.tried = tried;
            if b.solution.residual_sq <= target_sq {
                break;
            }
        }
    }
    best
}

// ---------------------------------------------------------------------------
// Simulated annealing over assignments
// ---------------------------------------------------------------------------

fn random_valid_assignment(rng: &mut ChaCha8Rng, verts: usize, q: usize) -> Vec<u8> {
    for _ in 0..1000 {
        let candidate: Vec<u8> = (0..verts).map(|_| rng.gen_range(0..=q) as u8).collect();
        if assignment_is_valid(&candidate, q) {
            return candidate;
        }
    }
    // deterministic fallback: first q vertices one per group, rest unused
    let mut out = vec![q as u8; verts];
    for (g, slot) in out.iter_mut().take(q).enumerate() {
        *slot = g as u8;
    }
    out
}

fn search_anneal(
    map: &SimplexMap,
    plan: &PartitionPlan,
    options: &SolveOptions,
) -> Option<Candidate> {
    let q = plan.q() as usize;
    let verts = map.n() + 1;
    let target_sq = options.tol * options.tol;

    let energy = |assignment: &[u8]| -> Option<InnerSolution> {
        let ctx = AssignmentContext::new(map, plan, assignment)?;
        Some(ctx.minimize(PROBE_ITERS, options.tol))
    };

    let mut best: Option<Candidate> = None;
    let mut tried = 0usize;
    'restarts: for restart in 0..options.restarts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(
            options.seed.wrapping_add(0x9e37_79b9_7f4a_7c15u64.wrapping_mul(restart as u64 + 1)),
        );
        let mut current = random_valid_assignment(&mut rng, verts, q);
        let Some(mut current_sol) = energy(&current) else { return None };
        tried += 1;
        let mut temperature = current_sol.residual_sq.max(1e-6);
        update_best(&mut best, &current, &current_sol, tried);
        if current_sol.residual_sq <= target_sq {
            break 'restarts;
        }

        for step in 0..ANNEAL_STEPS {
            // move: send one vertex to a different label, keep groups nonempty
            let mut proposal = current.clone();
            let mut ok = false;
            for _ in 0..50 {
                let v = rng.gen_range(0..verts);
                let new_label = rng.gen_range(0..=q) as u8;
                if new_label == current[v] {
                    continue;
                }
                proposal = current.clone();
                proposal[v] = new_label;
                if assignment_is_valid(&proposal, q) {
                    ok = true;
                    break;
                }
            }
            if !ok {
                continue;
            }
            let Some(proposal_sol) = energy(&proposal) else { continue };
            tried += 1;
            let delta = proposal_sol.residual_sq - current_sol.residual_sq;
            let accept = delta <= 0.0 || rng.gen_range(0.0..1.0f64) < (-delta / temperature).exp();
            if accept {
                current = proposal;
                current_sol = proposal_sol;
                update_best(&mut best, &current, &current_sol, tried);
                if current_sol.residual_sq <= target_sq {
                    break 'restarts;
                }
            }
            if (step + 1) % verts == 0 {
                temperature *= COOLING;
            }
        }
    }
    if let Some(b) = &mut best {
        b.tried = tried;
    }
    best
}

fn update_best(best: &mut Option<Candidate>, assignment: &[u8], sol: &InnerSolution, tried: usize) {
    let better = match best {
        None => true,
        Some(b) => {
            sol.residual_sq < b.solution.residual_sq
                || (sol.residual_sq == b.solution.residual_sq
                    && assignment < b.assignment.as_slice())
        }
    };
    if better {
        *best = Some(Candidate {
            assignment: assignment.to_vec(),
            solution: sol.clone(),
            tried,
        });
    }
}

// ---------------------------------------------------------------------------
// Inner solve for one assignment
// ---------------------------------------------------------------------------

/// Objective machinery bound to one assignment.
struct AssignmentContext<'a> {
    map: &'a SimplexMap,
    plan: &'a PartitionPlan,
    supports: Vec<Vec<usize>>,
    sizes: Vec<usize>,
    offsets: Vec<usize>,
    width: usize,
    /// Rows of the residual map (affine case only).
    linear: Option<LinearSystem>,
}

struct LinearSystem {
    m: DMatrix<f64>,
    /// `2 MᵀM`, the gradient operator.
    q: DMatrix<f64>,
    /// A cheap positive scale for the first step length.
    grad_scale: f64,
}

impl<'a> AssignmentContext<'a> {
    /// `None` when some group is empty.
    fn new(map: &'a SimplexMap, plan: &'a PartitionPlan, assignment: &[u8]) -> Option<Self> {
        let q = plan.q() as usize;
        let supports = supports_of(assignment, q);
        if supports.iter().any(|s| s.is_empty()) {
            return None;
        }
        let sizes: Vec<usize> = supports.iter().map(|s| s.len()).collect();
        let offsets: Vec<usize> = sizes
            .iter()
            .scan(0usize, |acc, &s| {
                let o = *acc;
                *acc += s;
                Some(o)
            })
            .collect();
        let width: usize = sizes.iter().sum();

        let linear = map.is_affine().then(|| {
            let spec = plan.group();
            let d = map.d();
            let order = plan.q() as usize;
            // character weights per plan point index
            let mut rows: Vec<Vec<f64>> = Vec::new();
            for eps in plan.representatives() {
                let mut w = vec![num_complex::Complex64::new(0.0, 0.0); order];
                for g in spec.enumerate_elements() {
                    w[plan.point_index(&g)] =
                        spec.eval_character(eps, &g).expect("plan characters conform").conj().value()
                            / order as f64;
                }
                let keep_imag = spec.character_order(eps) > 2;
                for i in 0..d {
                    let mut row_re = vec![0.0; width];
                    let mut row_im = vec![0.0; width];
                    for (g_idx, support) in supports.iter().enumerate() {
                        for (slot, &v) in support.iter().enumerate() {
                            let col = offsets[g_idx] + slot;
                            let coef = w[g_idx] * map.vertex_images()[v][i];
                            row_re[col] = coef.re;
                            row_im[col] = coef.im;
                        }
                    }
                    rows.push(row_re);
                    if keep_imag {
                        rows.push(row_im);
                    }
                }
            }
            let nrows = rows.len();
            let m = DMatrix::from_fn(nrows, width, |r, c| rows[r][c]);
            let q_mat = 2.0 * m.transpose() * &m;
            let grad_scale = q_mat.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1e-12);
            LinearSystem { m, q: q_mat, grad_scale }
        });

        Some(Self { map, plan, supports, sizes, offsets, width, linear })
    }

    fn uniform_start(&self) -> DVector<f64> {
        let mut x = DVector::zeros(self.width);
        for (g, &size) in self.sizes.iter().enumerate() {
            for slot in 0..size {
                x[self.offsets[g] + slot] = 1.0 / size as f64;
            }
        }
        x
    }

    fn split(&self, x: &DVector<f64>) -> Vec<Vec<f64>> {
        self.sizes
            .iter()
            .enumerate()
            .map(|(g, &size)| (0..size).map(|s| x[self.offsets[g] + s]).collect())
            .collect()
    }

    fn residual_sq(&self, x: &DVector<f64>) -> f64 {
        match &self.linear {
            Some(sys) => (&sys.m * x).norm_squared(),
            None => {
                let ctx = ObjectiveContext::new(self.map, self.plan, &self.supports);
                ctx.residual_sq(&self.split(x))
            }
        }
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        match &self.linear {
            Some(sys) => &sys.q * x,
            None => {
                let ctx = ObjectiveContext::new(self.map, self.plan, &self.supports);
                let g = ctx.fd_gradient(&self.split(x));
                DVector::from_iterator(self.width, g.into_iter().flatten())
            }
        }
    }

    /// Euclidean projection onto the product of simplices.
    fn project(&self, x: &mut DVector<f64>) {
        for (g, &size) in self.sizes.iter().enumerate() {
            let o = self.offsets[g];
            let mut block: Vec<f64> = (0..size).map(|s| x[o + s]).collect();
            project_simplex(&mut block);
            for (s, v) in block.into_iter().enumerate() {
                x[o + s] = v;
            }
        }
    }

    /// Equality-constrained least squares on the active face; `None` when a
    /// group loses all active columns or the solution is meaningfully
    /// negative.
    fn face_solve(&self, active: &[bool]) -> Option<DVector<f64>> {
        let sys = self.linear.as_ref()?;
        let cols: Vec<usize> = (0..self.width).filter(|&c| active[c]).collect();
        if cols.is_empty() {
            return None;
        }
        // every group needs at least one active column
        for (g, &size) in self.sizes.iter().enumerate() {
            if !(0..size).any(|s| active[self.offsets[g] + s]) {
                return None;
            }
        }
        let na = cols.len();
        let nq = self.sizes.len();
        let dim = na + nq;
        let mut kkt = DMatrix::zeros(dim, dim);
        for (ia, &ca) in cols.iter().enumerate() {
            for (ib, &cb) in cols.iter().enumerate() {
                kkt[(ia, ib)] = sys.q[(ca, cb)];
            }
        }
        for (g, &size) in self.sizes.iter().enumerate() {
            for s in 0..size {
                let col = self.offsets[g] + s;
                if let Some(ia) = cols.iter().position(|&c| c == col) {
                    kkt[(na + g, ia)] = 1.0;
                    kkt[(ia, na + g)] = 1.0;
                }
            }
        }
        let mut rhs = DVector::zeros(dim);
        for g in 0..nq {
            rhs[na + g] = 1.0;
        }
        let svd = kkt.svd(true, true);
        let sol = svd.solve(&rhs, 1e-12).ok()?;
        // consistency of the equality constraints
        for g in 0..nq {
            let lo = self.offsets[g];
            let hi = lo + self.sizes[g];
            let sum: f64 = cols
                .iter()
                .enumerate()
                .filter(|(_, &col)| col >= lo && col < hi)
                .map(|(ia, _)| sol[ia])
                .sum();
            if (sum - 1.0).abs() > 1e-8 {
                return None;
            }
        }
        if (0..cols.len()).any(|ia| sol[ia] < -1e-10) {
            return None;
        }
        let mut x = DVector::zeros(self.width);
        for (ia, &c) in cols.iter().enumerate() {
            x[c] = sol[ia].max(0.0);
        }
        // exact renormalization per group
        for (g, &size) in self.sizes.iter().enumerate() {
            let o = self.offsets[g];
            let sum: f64 = (0..size).map(|s| x[o + s]).sum();
            if sum <= 0.0 {
                return None;
            }
            for s in 0..size {
                x[o + s] /= sum;
            }
        }
        Some(x)
    }

    /// Minimizes the residual over the product of simplices.
    fn minimize(&self, iter_budget: usize, tol: f64) -> InnerSolution {
        let target_sq = (0.5 * tol) * (0.5 * tol);

        let mut best_x = self.uniform_start();
        self.project(&mut best_x);
        let mut best_f = self.residual_sq(&best_x);

        // least-squares shortcut: the KKT point over the whole face is a
        // lower bound; when it lands inside the feasible set it is optimal
        if self.linear.is_some() {
            if let Some(x) = self.face_solve(&vec![true; self.width]) {
                let f = self.residual_sq(&x);
                if f < best_f {
                    best_f = f;
                    best_x = x;
                }
            }
        }
        if best_f <= target_sq {
            return InnerSolution { weights: self.split(&best_x), residual_sq: best_f };
        }

        // spectral projected gradient with a periodic face polish
        let mut x = best_x.clone();
        let mut grad = self.gradient(&x);
        let init_alpha = match &self.linear {
            Some(sys) => 1.0 / sys.grad_scale,
            None => 1e-2,
        };
        let mut alpha = init_alpha;
        let mut since_improvement = 0usize;
        let mut iter = 0usize;
        while iter < iter_budget {
            iter += 1;
            let mut x_new = &x - alpha * &grad;
            self.project(&mut x_new);
            let s = &x_new - &x;
            let step_norm = s.norm();
            if step_norm < 1e-16 {
                break;
            }
            let f_new = self.residual_sq(&x_new);
            let grad_new = self.gradient(&x_new);
            let y = &grad_new - &grad;
            let sy = s.dot(&y);
            alpha = if sy > 1e-18 { (s.dot(&s) / sy).clamp(1e-12, 1e12) } else { init_alpha };
            x = x_new;
            grad = grad_new;
            if f_new < best_f {
                best_f = f_new;
                best_x = x.clone();
                since_improvement = 0;
            } else {
                since_improvement += 1;
                if since_improvement > 40 {
                    // restart from the best point with a safe step
                    x = best_x.clone();
                    grad = self.gradient(&x);
                    alpha = init_alpha;
                    since_improvement = 0;
                }
            }
            if best_f <= target_sq {
                break;
            }
            if iter % 100 == 0 {
                if let Some(polished) = self.polish(&best_x) {
                    let fp = self.residual_sq(&polished);
                    if fp < best_f {
                        best_f = fp;
                        best_x = polished;
                        if best_f <= target_sq {
                            break;
                        }
                        x = best_x.clone();
                        grad = self.gradient(&x);
                    }
                }
            }
        }
        if let Some(polished) = self.polish(&best_x) {
            let fp = self.residual_sq(&polished);
            if fp < best_f {
                best_f = fp;
                best_x = polished;
            }
        }
        InnerSolution { weights: self.split(&best_x), residual_sq: best_f }
    }

    fn polish(&self, x: &DVector<f64>) -> Option<DVector<f64>> {
        if self.linear.is_none() {
            return None;
        }
        let mut active: Vec<bool> =
            (0..self.width).map(|c| x[c] > crate::geometry::EFFECTIVE_WEIGHT_THRESHOLD).collect();
        // keep the heaviest column of any group that lost everything
        for (g, &size) in self.sizes.iter().enumerate() {
            let o = self.offsets[g];
            if !(0..size).any(|s| active[o + s]) {
                let heaviest = (0..size)
                    .max_by(|&a, &b| {
                        x[o + a].partial_cmp(&x[o + b]).expect("weights are finite")
                    })
                    .expect("groups are nonempty");
                active[o + heaviest] = true;
            }
        }
        self.face_solve(&active)
    }
}

/// Euclidean projection onto `{w >= 0, Σw = 1}` (sort-based).
pub fn project_simplex(w: &mut [f64]) {
    let n = w.len();
    if n == 1 {
        w[0] = 1.0;
        return;
    }
    let mut u: Vec<f64> = w.to_vec();
    u.sort_by(|a, b| b.partial_cmp(a).expect("weights are finite"));
    let mut css = 0.0;
    let mut rho = 0usize;
    let mut theta = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        css += uj;
        let t = (css - 1.0) / (j + 1) as f64;
        if uj - t > 0.0 {
            rho = j;
            theta = t;
        }
    }
    let _ = rho;
    for v in w.iter_mut() {
        *v = (*v - theta).max(0.0);
    }
}
