//! The q = 2 case is the classical two-part partition: solve it numerically
//! and compare with the exact affine-dependence construction.
//!
//! ```bash
//! cargo run --example radon_partition
//! ```

use tverberg_fourier::geometry::SimplexMap;
use tverberg_fourier::oracle::radon_oracle;
use tverberg_fourier::planner::plan_theorem_1_3;
use tverberg_fourier::solver::{solve, SolveOptions};

fn main() {
    let plan = plan_theorem_1_3(2, 1, 1, 1, 2).expect("plan certifies");
    println!("q = 2, d = 2 needs n = {} (four vertices)", plan.n());

    let map = SimplexMap::random(3, 2, 2024);
    for (i, v) in map.vertex_images().iter().enumerate() {
        println!("  vertex {i}: [{:+.4}, {:+.4}]", v[0], v[1]);
    }

    let outcome = solve(&map, &plan, &SolveOptions::default()).expect("solvable");
    println!(
        "solver: residual {:.2e}, converged = {}",
        outcome.objective_residual, outcome.converged
    );
    let supports: Vec<Vec<usize>> = outcome
        .configuration
        .points
        .iter()
        .map(|p| p.effective_support())
        .collect();
    let images = outcome.configuration.evaluate(&map);
    println!("  parts {:?} and {:?}", supports[0], supports[1]);
    println!(
        "  common image point: [{:+.6}, {:+.6}] vs [{:+.6}, {:+.6}]",
        images[0][0], images[0][1], images[1][0], images[1][1]
    );

    let exact = radon_oracle(map.vertex_images()).expect("generic points");
    println!(
        "oracle: parts {:?} and {:?}, witness [{:+.6}, {:+.6}]",
        exact.positive, exact.negative, exact.witness[0], exact.witness[1]
    );
}
