//! Non-vanishing of the obstruction polynomials across group orders: every
//! prime power certifies, the first non-prime-powers do not.
//!
//! ```bash
//! cargo run --example obstruction_verdicts
//! ```

use tverberg_fourier::group::GroupSpec;
use tverberg_fourier::obstruction::{build_sw_poly, orientability, Sw1Convention};
use tverberg_fourier::planner::{plan_theorem_1_3, route_and_certify};

fn main() {
    println!("full annihilation (all nonzero characters), d = 1..3:");
    for (q, p, k) in [(2u64, 2u32, 1u32), (3, 3, 1), (4, 2, 2), (5, 5, 1), (8, 2, 3), (9, 3, 2)] {
        for d in 1..=3 {
            let plan = plan_theorem_1_3(p, k, 1, k, d).expect("prime powers certify");
            println!(
                "  q = {q} = {p}^{k}, d = {d}: certificate nonzero via {:?} ({})",
                plan.route(),
                plan.certificate()
            );
        }
    }

    for q in [6u32, 12] {
        let spec = GroupSpec::new(vec![q]).unwrap();
        let annihilated: Vec<_> =
            spec.enumerate_characters().into_iter().filter(|c| !c.is_trivial()).collect();
        for d in 1..=3 {
            let verdict = route_and_certify(&spec, &annihilated, d, Sw1Convention::default());
            println!(
                "  q = {q} (cyclic), d = {d}: {}",
                if verdict.is_ok() { "certified (unexpected!)" } else { "obstruction vanishes" }
            );
        }
    }

    // The order-2 coefficient convention matters over Z_4: read literally,
    // the linear form of the order-2 character would vanish.
    let spec = GroupSpec::new(vec![4]).unwrap();
    let order2 = vec![spec.character(vec![2]).unwrap()];
    let ind = build_sw_poly(&[4], &order2, &[], 1, Sw1Convention::Order2Indicator).unwrap();
    let lit = build_sw_poly(&[4], &order2, &[], 1, Sw1Convention::LiteralMod2).unwrap();
    println!("\nZ_4 order-2 character, d = 1:");
    println!("  indicator convention: {ind}");
    println!("  literal convention:   {lit}");
    println!("  orientable bundle: {}", orientability(&[4], &order2).unwrap());
}
