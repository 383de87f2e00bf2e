//! A full three-fold intersection for affine planar maps, found by the
//! Fourier solver and cross-checked by exhaustive hull-intersection search.
//!
//! ```bash
//! cargo run --example three_fold_intersection
//! ```

use tverberg_fourier::geometry::SimplexMap;
use tverberg_fourier::oracle::tverberg_oracle_affine;
use tverberg_fourier::planner::plan_theorem_1_3;
use tverberg_fourier::solver::{solve, SolveOptions};

fn main() {
    let plan = plan_theorem_1_3(3, 1, 1, 1, 2).expect("plan certifies");
    println!("q = 3, d = 2: guaranteed from n = {}; searching a 9-vertex map", plan.n());

    let map = SimplexMap::random(8, 2, 3141);
    let outcome = solve(&map, &plan, &SolveOptions::default()).expect("solvable");
    println!(
        "solver: {:?} after {} assignments, residual {:.2e}",
        outcome.mode_used, outcome.assignments_tried, outcome.objective_residual
    );

    let supports: Vec<Vec<usize>> = outcome
        .configuration
        .points
        .iter()
        .map(|p| p.effective_support())
        .collect();
    let images = outcome.configuration.evaluate(&map);
    println!("  parts {:?}", supports);
    println!(
        "  images agree at [{:+.6}, {:+.6}] (spread {:.2e})",
        images[0][0],
        images[0][1],
        images
            .iter()
            .flat_map(|a| images.iter().map(move |b| {
                a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
            }))
            .fold(0.0f64, f64::max)
    );

    let oracle = tverberg_oracle_affine(map.vertex_images(), 3).expect("within limits");
    match oracle {
        Some(partition) => println!(
            "oracle: parts {:?}, witness [{:+.6}, {:+.6}]",
            partition.parts, partition.witness[0], partition.witness[1]
        ),
        None => println!("oracle: none found (unexpected for 9 generic points)"),
    }
}
