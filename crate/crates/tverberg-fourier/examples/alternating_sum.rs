//! The planar alternating-sum guarantee: on `∂Δ^{2r+1} → R²` there are 2r
//! points on disjoint faces whose alternating image sum vanishes, and all but
//! at most two of the faces are vertices.
//!
//! ```bash
//! cargo run --example alternating_sum
//! ```

use tverberg_fourier::geometry::SimplexMap;
use tverberg_fourier::planner::plan_theorem_1_4;
use tverberg_fourier::solver::{solve, SolveOptions};

fn main() {
    for r in 2..=3u32 {
        let plan = plan_theorem_1_4(2, 1, r, 2).expect("plan certifies");
        println!("r = {r}: q = {} points on ∂Δ^{} → R²", plan.q(), plan.n());

        let map = SimplexMap::random(plan.n(), 2, 7 + r as u64);
        let outcome = solve(&map, &plan, &SolveOptions::default()).expect("solvable");
        let report = &outcome.report;
        println!(
            "  converged = {}, residual {:.2e}",
            outcome.converged, outcome.objective_residual
        );
        println!(
            "  alternating-sum deviation {:.2e}",
            report.alternating_sum_deviation.expect("two blocks")
        );
        println!(
            "  support sizes {:?} -> case {:?}",
            report.support_profile, report.support_case
        );
    }
}
