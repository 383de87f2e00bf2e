//! The spectral side with no geometry: synthesize random real functions with
//! a prescribed annihilated spectrum and watch the coincidences appear.
//!
//! ```bash
//! cargo run --example fourier_synthesis
//! ```

use num_complex::Complex64;
use tverberg_fourier::fourier::{forward_transform, inverse_transform, synthesize_constrained};
use tverberg_fourier::planner::plan_theorem_1_3;

fn main() {
    let plan = plan_theorem_1_3(3, 2, 2, 1, 1).expect("plan certifies");
    let spec = plan.group();
    println!(
        "group orders {:?}: annihilating {} characters",
        spec.orders(),
        plan.annihilated().len()
    );

    let vals = synthesize_constrained(spec, 1, plan.annihilated(), 42).unwrap();
    println!("synthesized a random real function with the prescribed zero spectrum");

    // the planned coincidences hold exactly, before any solver runs
    let schedule = plan.full_schedule();
    let f = |idx: usize| vals.value(&plan.element_at_point(idx))[0];
    let mut worst: f64 = 0.0;
    for class in &schedule.equality_classes {
        for &m in &class[1..] {
            worst = worst.max((f(m) - f(class[0])).norm());
        }
    }
    println!("worst equality deviation over {} classes: {worst:.2e}", schedule.equality_classes.len());

    let mut worst: f64 = 0.0;
    for family in &schedule.orbit_families {
        let avg = |orbit: &[usize]| -> Complex64 {
            orbit.iter().map(|&i| f(i)).sum::<Complex64>() / orbit.len() as f64
        };
        let first = avg(&family.orbits[0]);
        for orbit in &family.orbits[1..] {
            worst = worst.max((avg(orbit) - first).norm());
        }
    }
    println!("worst orbit-average deviation over {} families: {worst:.2e}", schedule.orbit_families.len());

    // transforms invert each other
    let spectrum = forward_transform(&vals);
    let back = inverse_transform(&spectrum);
    let roundtrip = vals
        .values()
        .iter()
        .zip(back.values())
        .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).norm()))
        .fold(0.0, f64::max);
    println!("transform roundtrip error: {roundtrip:.2e}");
}
