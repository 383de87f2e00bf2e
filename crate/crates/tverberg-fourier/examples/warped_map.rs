//! Non-affine maps plug in through the post-map contract; gradients switch to
//! central finite differences and the search becomes best effort.
//!
//! ```bash
//! cargo run --example warped_map
//! ```

use std::sync::Arc;

use tverberg_fourier::geometry::{PostMap, SimplexMap};
use tverberg_fourier::planner::plan_theorem_1_3;
use tverberg_fourier::solver::{solve, SolveOptions};

fn main() {
    let plan = plan_theorem_1_3(2, 1, 1, 1, 2).expect("plan certifies");
    let base = SimplexMap::random(3, 2, 99);
    let warped = base.with_post_map(PostMap::Custom(Arc::new(|v: &[f64]| {
        // a gentle planar warp, still continuous
        vec![
            v[0] + 0.2 * (v[1] * v[1] - 0.3 * v[0] * v[1]),
            v[1] - 0.15 * v[0] * v[0],
        ]
    })));
    println!("solving a warped q = 2 instance (finite-difference gradients)");

    let options = SolveOptions { max_iters: 4000, ..Default::default() };
    let outcome = solve(&warped, &plan, &options).expect("search runs");
    println!(
        "best residual {:.2e}, converged = {}",
        outcome.objective_residual, outcome.converged
    );
    let images = outcome.configuration.evaluate(&warped);
    println!(
        "image points [{:+.6}, {:+.6}] vs [{:+.6}, {:+.6}]",
        images[0][0], images[0][1], images[1][0], images[1][1]
    );
    println!("supports {:?}", outcome.report.support_profile);
}
