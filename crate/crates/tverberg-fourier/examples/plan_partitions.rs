//! Build the two showcase partition plans and print their coincidence
//! schedules.
//!
//! ```bash
//! cargo run --example plan_partitions
//! ```

use tverberg_fourier::planner::{enumerate_coincidences, plan_theorem_1_3, plan_theorem_1_4};

fn main() {
    // Nine points indexed by Z_3 ⊕ Z_3: six triples share one average value.
    // A full 3x3-fold partition guarantee would need n = 8d + 8; the
    // average-value version gets away with 4d + 8.
    let plan = plan_theorem_1_3(3, 1, 3, 0, 2).expect("plan certifies");
    println!(
        "Z_3 ⊕ Z_3, d = 2: q = {}, annihilated {} of {} characters, n = {} (tight N = {})",
        plan.q(),
        plan.q_prime(),
        plan.q() - 1,
        plan.n(),
        plan.tight_dimension()
    );
    let schedule = enumerate_coincidences(&plan, Some(3)).expect("ell = 3 is valid");
    for family in &schedule.orbit_families {
        println!("  subsets {:?} -> orbits with a common average:", family.subsets);
        for orbit in &family.orbits {
            println!("    {{x{}, x{}, x{}}}", orbit[0], orbit[1], orbit[2]);
        }
    }

    // Eighteen points indexed by Z_3 ⊕ Z_3 ⊕ Z_2 with H = Z_3: the first
    // coordinate shifts by 6, the quotient Z_3 ⊕ Z_2 is cyclic of order 6.
    let plan = plan_theorem_1_3(3, 2, 2, 1, 1).expect("plan certifies");
    println!(
        "\nZ_3^2 ⊕ Z_2, a = 1, d = 1: q = {}, n = {} (tight N = {})",
        plan.q(),
        plan.n(),
        plan.tight_dimension()
    );
    let schedule = enumerate_coincidences(&plan, Some(2)).expect("ell = 2 is valid");
    println!("  point equalities:");
    for class in &schedule.equality_classes {
        println!(
            "    f(x{}) = f(x{}) = f(x{})",
            class[0], class[1], class[2]
        );
    }
    println!("  pair identities:");
    for family in &schedule.orbit_families {
        let a = &family.orbits[0];
        let b = &family.orbits[1];
        println!(
            "    f(x{}) + f(x{}) = f(x{}) + f(x{})",
            a[0], a[1], b[0], b[1]
        );
    }

    // A block plan: q = 6 points in two... rather p^k = 2 blocks of r = 3,
    // block averages agree on maps of a 7-dimensional simplex boundary.
    let plan = plan_theorem_1_4(2, 1, 3, 2).expect("plan certifies");
    println!(
        "\nblocks over Z_2 ⊕ Z_3, d = 2: q = {}, n = {}, blocks {:?}",
        plan.q(),
        plan.n(),
        plan.full_schedule().blocks
    );
}
