//! Report-only stretch instances: the nine-point plan on ∂Δ¹⁶ → R² and the
//! eighteen-point plan on ∂Δ³¹ → R. Assignment spaces here are far beyond
//! enumeration, so seeded annealing does what it can within its budget and
//! the results are reported without a pass/fail gate.
//!
//! ```bash
//! cargo run --release --example stretch_runs
//! ```

use tverberg_fourier::geometry::SimplexMap;
use tverberg_fourier::planner::{plan_theorem_1_3, PartitionPlan};
use tverberg_fourier::solver::{solve, SearchMode, SolveOptions};

fn attempt(label: &str, plan: &PartitionPlan, seed: u64) {
    let map = SimplexMap::random(plan.n(), plan.d() as usize, seed);
    let options = SolveOptions {
        mode: SearchMode::Anneal,
        seed,
        restarts: 4,
        ..Default::default()
    };
    let outcome = solve(&map, plan, &options).expect("search runs");
    println!(
        "{label}: q = {}, n = {}, d = {} -> best residual {:.3e} after {} probes ({})",
        plan.q(),
        plan.n(),
        plan.d(),
        outcome.objective_residual,
        outcome.assignments_tried,
        if outcome.converged { "converged" } else { "not converged; report only" }
    );
    println!(
        "  worst coincidence deviation {:.3e}, support sizes {:?}",
        outcome.report.max_coincidence_deviation, outcome.report.support_profile
    );
}

fn main() {
    let nine = plan_theorem_1_3(3, 1, 3, 0, 2).expect("plan certifies");
    attempt("nine points, six triple averages", &nine, 1);

    let eighteen = plan_theorem_1_3(3, 2, 2, 1, 1).expect("plan certifies");
    attempt("eighteen points, coset equalities + pair sums", &eighteen, 2);
}
