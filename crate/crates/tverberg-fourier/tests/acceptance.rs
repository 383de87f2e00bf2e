//! Acceptance suite: every criterion prints one PASS line (or fails loudly).
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tverberg_fourier::fourier::{
    forward_transform, inverse_transform, parseval_defect, synthesize_constrained, ValueTable,
};
use tverberg_fourier::geometry::{evaluate_objective, verify, Configuration, PointPlacement, SimplexMap, SupportCase};
use tverberg_fourier::group::{specs_with_order_at_most, GroupSpec};
use tverberg_fourier::obstruction::Sw1Convention;
use tverberg_fourier::oracle::{radon_oracle, tverberg_oracle_affine};
use tverberg_fourier::planner::{
    enumerate_coincidences, plan_theorem_1_3, plan_theorem_1_4, route_and_certify, PartitionPlan,
    PlanError,
};
use tverberg_fourier::solver::{solve, SolveOptions};

fn pass(n: u32, name: &str, detail: String) {
    println!("acceptance {n} ({name}): PASS  [{detail}]");
}

/// Plain-integer expansion oracle for single-factor groups: the product of
/// all the scalar coefficients, reduced once at the end.
fn cyclic_full_set_coefficient(q: u64, d: u32) -> i128 {
    let mut coeff: i128 = 1;
    for e in 1..q {
        for _ in 0..d {
            coeff *= e as i128;
        }
    }
    coeff.rem_euclid(q as i128)
}

#[test]
fn criterion_1_obstruction_verdicts() {
    let start = Instant::now();
    // prime powers: the planner's full-partition decomposition certifies
    for (q, p, k) in [(2u64, 2u32, 1u32), (3, 3, 1), (4, 2, 2), (5, 5, 1), (8, 2, 3), (9, 3, 2)] {
        for d in 1..=3u32 {
            let plan = plan_theorem_1_3(p, k, 1, k, d)
                .unwrap_or_else(|e| panic!("q={q} d={d} should certify: {e}"));
            assert_eq!(plan.q(), q);
            assert_eq!(plan.q_prime() as u64, q - 1, "full nonzero character set");
            assert!(plan.certificate().is_nonzero());
        }
    }
    // first non-prime-powers: the full cyclic set dies, matching the
    // plain-integer oracle
    for q in [6u64, 12] {
        assert_eq!(cyclic_full_set_coefficient(q, 1), 0, "oracle: (q-1)! ≡ 0 mod {q}");
        let spec = GroupSpec::new(vec![q as u32]).unwrap();
        let annihilated: Vec<_> =
            spec.enumerate_characters().into_iter().filter(|c| !c.is_trivial()).collect();
        for d in 1..=3u32 {
            let err = route_and_certify(&spec, &annihilated, d, Sw1Convention::default());
            assert!(
                matches!(err, Err(PlanError::Uncertifiable { .. })),
                "q={q} d={d} must be uncertifiable"
            );
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "criterion 1 overran: {elapsed:?}");
    pass(1, "obstruction verdicts", format!("{elapsed:.2?}"));
}

#[test]
fn criterion_2_dimension_reproduction() {
    let start = Instant::now();
    for d in 1..=5u32 {
        let plan = plan_theorem_1_3(3, 2, 1, 0, d).unwrap();
        assert_eq!(plan.n(), (4 * d + 8) as usize);
        assert_eq!(plan.n(), d as usize * plan.q_prime() + plan.q() as usize - 1);
        let plan = plan_theorem_1_3(3, 2, 2, 1, d).unwrap();
        assert_eq!(plan.n(), (14 * d + 17) as usize);
        assert_eq!(plan.n(), d as usize * plan.q_prime() + plan.q() as usize - 1);
    }
    for r in 1..=4u32 {
        let plan = plan_theorem_1_4(2, 1, r, 2).unwrap();
        assert_eq!(plan.n(), (2 * r + 1) as usize);
        assert_eq!(plan.n(), 2 * plan.q_prime() + plan.q() as usize - 1);
    }
    pass(2, "dimension reproduction", format!("{:.2?}", start.elapsed()));
}

#[test]
fn criterion_3_schedule_reproduction() {
    use std::collections::BTreeSet;
    let start = Instant::now();

    // nine points indexed 3·b1 + b2: the six triples with a common average
    let plan = plan_theorem_1_3(3, 1, 3, 0, 2).unwrap();
    let sched = enumerate_coincidences(&plan, Some(3)).unwrap();
    assert_eq!(sched.orbit_families.len(), 1);
    let got: BTreeSet<Vec<usize>> = sched.orbit_families[0].orbits.iter().cloned().collect();
    let expect: BTreeSet<Vec<usize>> = [
        vec![0, 4, 8],
        vec![0, 5, 7],
        vec![1, 5, 6],
        vec![1, 3, 8],
        vec![2, 3, 7],
        vec![2, 4, 6],
    ]
    .into_iter()
    .collect();
    assert_eq!(got, expect);

    // eighteen points: f(x_j) = f(x_{j+6}) = f(x_{j+12}) and the three pair
    // identities f(x_j) + f(x_{j+1}) = f(x_{j+3}) + f(x_{j+4}), j mod 6
    let plan = plan_theorem_1_3(3, 2, 2, 1, 1).unwrap();
    let sched = enumerate_coincidences(&plan, Some(2)).unwrap();
    assert_eq!(sched.equality_classes.len(), 6);
    for (j, class) in sched.equality_classes.iter().enumerate() {
        assert_eq!(class, &vec![j, j + 6, j + 12]);
    }
    let got: BTreeSet<BTreeSet<Vec<usize>>> = sched
        .orbit_families
        .iter()
        .map(|f| f.orbits.iter().cloned().collect())
        .collect();
    let expect: BTreeSet<BTreeSet<Vec<usize>>> = [
        [vec![0, 1], vec![3, 4]].into_iter().collect(),
        [vec![1, 2], vec![4, 5]].into_iter().collect(),
        [vec![2, 3], vec![0, 5]].into_iter().collect(),
    ]
    .into_iter()
    .collect();
    assert_eq!(got, expect);
    pass(3, "schedule reproduction", format!("{:.2?}", start.elapsed()));
}

#[test]
fn criterion_4_fourier_suite() {
    let start = Instant::now();
    let mut tables = 0usize;
    for spec in specs_with_order_at_most(24) {
        let q = spec.order() as usize;
        for seed in 0..100u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed * 31 + q as u64);
            // complex table for the roundtrip and Parseval
            let values: Vec<Vec<Complex64>> = (0..q)
                .map(|_| {
                    (0..2)
                        .map(|_| {
                            Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))
                        })
                        .collect()
                })
                .collect();
            let vals = ValueTable::new(spec.clone(), 2, values).unwrap();
            let spectrum = forward_transform(&vals);
            let back = inverse_transform(&spectrum);
            let worst = vals
                .values()
                .iter()
                .zip(back.values())
                .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).norm()))
                .fold(0.0, f64::max);
            assert!(worst <= 1e-12, "roundtrip {worst} on {:?}", spec.orders());
            assert!(parseval_defect(&vals, &spectrum) <= 1e-10);

            // real table for conjugate symmetry
            let values: Vec<Vec<Complex64>> = (0..q)
                .map(|_| vec![Complex64::new(rng.gen_range(-1.0..=1.0), 0.0); 1])
                .collect();
            let real_vals = ValueTable::new(spec.clone(), 1, values).unwrap();
            let sp = forward_transform(&real_vals);
            assert!(sp.conjugate_symmetry_defect() <= 1e-12);
            tables += 1;
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "criterion 4 overran: {elapsed:?}");
    pass(4, "fourier suite", format!("{tables} tables, {elapsed:.2?}"));
}

/// Every certifiable plan with q <= 24, both families.
fn certified_plans_up_to_24() -> Vec<PartitionPlan> {
    let primes = [2u32, 3, 5, 7, 11, 13, 17, 19, 23];
    let mut plans = Vec::new();
    for &p in &primes {
        for k in 0..=4u32 {
            let Some(pk) = (p as u64).checked_pow(k).filter(|&v| v <= 24) else { continue };
            for r in 1..=(24 / pk) as u32 {
                for d in 1..=3u32 {
                    for a in 0..=k {
                        plans.push(
                            plan_theorem_1_3(p, k, r, a, d)
                                .unwrap_or_else(|e| panic!("1.3({p},{k},{r},{a},{d}): {e}")),
                        );
                    }
                    plans.push(
                        plan_theorem_1_4(p, k, r, d)
                            .unwrap_or_else(|e| panic!("1.4({p},{k},{r},{d}): {e}")),
                    );
                }
            }
        }
    }
    plans
}

#[test]
fn criterion_5_spectral_synthesis_coincidences() {
    let start = Instant::now();
    let plans = certified_plans_up_to_24();
    let mut checked_entries = 0usize;
    for plan in &plans {
        // the schedule and annihilated set do not depend on d; run the
        // synthesis once per (p,k,r,a,theorem) instance
        if plan.d() != 1 {
            continue;
        }
        let spec = plan.group();
        let schedule = plan.full_schedule();
        for seed in 0..50u64 {
            let vals = synthesize_constrained(spec, 2, plan.annihilated(), seed).unwrap();
            let f = |idx: usize, i: usize| -> Complex64 {
                vals.value(&plan.element_at_point(idx))[i]
            };
            for class in &schedule.equality_classes {
                for &member in &class[1..] {
                    for i in 0..2 {
                        let dev = (f(member, i) - f(class[0], i)).norm();
                        assert!(dev <= 1e-10, "equality dev {dev}");
                        checked_entries += 1;
                    }
                }
            }
            for family in &schedule.orbit_families {
                let ell = family.ell as f64;
                let avg = |orbit: &[usize], i: usize| -> Complex64 {
                    orbit.iter().map(|&idx| f(idx, i)).sum::<Complex64>() / ell
                };
                let first = &family.orbits[0];
                for orbit in &family.orbits[1..] {
                    for i in 0..2 {
                        let dev = (avg(orbit, i) - avg(first, i)).norm();
                        assert!(dev <= 1e-10, "orbit dev {dev}");
                        checked_entries += 1;
                    }
                }
            }
            if !schedule.blocks.is_empty() {
                let r = plan.r() as f64;
                let avg = |block: &[usize], i: usize| -> Complex64 {
                    block.iter().map(|&idx| f(idx, i)).sum::<Complex64>() / r
                };
                let first = &schedule.blocks[0];
                for block in &schedule.blocks[1..] {
                    for i in 0..2 {
                        let dev = (avg(block, i) - avg(first, i)).norm();
                        assert!(dev <= 1e-10, "block dev {dev}");
                        checked_entries += 1;
                    }
                }
            }
        }
    }
    pass(
        5,
        "spectral-synthesis coincidences",
        format!("{} plans, {checked_entries} entries, {:.2?}", plans.len(), start.elapsed()),
    );
}

#[test]
fn criterion_6_radon_solve() {
    let start = Instant::now();
    let plan = plan_theorem_1_3(2, 1, 1, 1, 2).unwrap();
    assert_eq!(plan.n(), 3);
    let mut converged = 0usize;
    for seed in 0..100u64 {
        let map = SimplexMap::random(3, 2, 1000 + seed);
        let outcome = solve(&map, &plan, &SolveOptions { seed, ..Default::default() }).unwrap();
        assert!(
            outcome.converged && outcome.objective_residual < 1e-8,
            "seed {seed}: residual {}",
            outcome.objective_residual
        );
        let oracle = radon_oracle(map.vertex_images()).unwrap();
        let mut got: Vec<Vec<usize>> = outcome
            .configuration
            .points
            .iter()
            .map(|p| p.effective_support())
            .collect();
        got.sort();
        let mut expect = vec![oracle.positive.clone(), oracle.negative.clone()];
        expect.sort();
        assert_eq!(got, expect, "seed {seed}: supports disagree with the sign split");
        converged += 1;
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "criterion 6 overran: {elapsed:?}");
    pass(6, "radon solve", format!("{converged}/100 converged, {elapsed:.2?}"));
}

#[test]
fn criterion_7_prime_three_tverberg() {
    let start = Instant::now();
    let plan = plan_theorem_1_3(3, 1, 1, 1, 2).unwrap();
    assert_eq!(plan.n(), 6);
    let mut converged = 0usize;
    for seed in 0..50u64 {
        let map = SimplexMap::random(8, 2, 7000 + seed);
        let outcome = solve(&map, &plan, &SolveOptions { seed, ..Default::default() }).unwrap();
        if !(outcome.converged && outcome.objective_residual < 1e-8) {
            continue;
        }
        // the three image points must coincide pairwise at the witness
        let images = outcome.configuration.evaluate(&map);
        let mut worst = 0.0f64;
        for x in 0..3 {
            for y in x + 1..3 {
                let dist = images[x]
                    .iter()
                    .zip(&images[y])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                worst = worst.max(dist);
            }
        }
        assert!(worst < 1e-6, "seed {seed}: witness spread {worst}");
        // cross-check: the exhaustive oracle also finds a partition
        let oracle = tverberg_oracle_affine(map.vertex_images(), 3).unwrap();
        assert!(oracle.is_some(), "seed {seed}: oracle found nothing");
        converged += 1;
    }
    let elapsed = start.elapsed();
    assert!(converged >= 48, "only {converged}/50 converged");
    assert!(elapsed.as_secs_f64() < 600.0, "criterion 7 overran: {elapsed:?}");
    pass(7, "prime q=3 solve", format!("{converged}/50 converged, {elapsed:.2?}"));
}

#[test]
fn criterion_8_alternating_sum_desk_test() {
    let start = Instant::now();
    let plan = plan_theorem_1_4(2, 1, 2, 2).unwrap();
    assert_eq!(plan.n(), 5);
    let mut passed = 0usize;
    for seed in 0..50u64 {
        let map = SimplexMap::random(5, 2, 8000 + seed);
        let outcome = solve(&map, &plan, &SolveOptions { seed, ..Default::default() }).unwrap();
        let dev = outcome
            .report
            .alternating_sum_deviation
            .expect("two-block plans report the alternating sum");
        if !outcome.converged || dev >= 1e-6 {
            continue;
        }
        // every converged run's effective supports match case (a) or (b)
        assert!(
            matches!(
                outcome.report.support_case,
                Some(SupportCase::OneBigFace) | Some(SupportCase::TwoEdges)
            ),
            "seed {seed}: profile {:?}",
            outcome.report.support_profile
        );
        passed += 1;
    }
    let elapsed = start.elapsed();
    assert!(passed >= 45, "only {passed}/50 within 1e-6");
    assert!(elapsed.as_secs_f64() < 600.0, "criterion 8 overran: {elapsed:?}");
    pass(8, "alternating-sum desk test", format!("{passed}/50, {elapsed:.2?}"));
}

#[test]
fn criterion_9_gradient_check() {
    let start = Instant::now();
    let families = [
        plan_theorem_1_3(2, 1, 1, 1, 2).unwrap(),
        plan_theorem_1_3(3, 1, 1, 1, 2).unwrap(),
        plan_theorem_1_4(2, 1, 2, 2).unwrap(),
    ];
    let mut checked = 0usize;
    for plan in &families {
        let mut rng = ChaCha8Rng::seed_from_u64(90_000 + plan.q());
        let n = plan.n().max(plan.q() as usize + 1);
        let map = SimplexMap::random(n, plan.d() as usize, rng.gen());
        for _ in 0..50 {
            let config = random_config(plan, n, &mut rng);
            let (_, analytic) = evaluate_objective(&map, plan, &config).unwrap();
            // finite-difference replica through a post-map wrapper: force the
            // FD path by attaching an identity affine post-map
            let d = plan.d() as usize;
            let identity = (0..d)
                .map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                .collect();
            let fd_map = SimplexMap::new(map.vertex_images().to_vec())
                .unwrap()
                .with_post_map(tverberg_fourier::geometry::PostMap::Affine {
                    matrix: identity,
                    offset: vec![0.0; d],
                });
            let (_, fd) = evaluate_objective(&fd_map, plan, &config).unwrap();
            for (a_row, f_row) in analytic.iter().zip(&fd) {
                for (&a, &f) in a_row.iter().zip(f_row) {
                    let scale = a.abs().max(f.abs()).max(1e-6);
                    assert!((a - f).abs() / scale < 1e-5, "analytic {a} vs fd {f}");
                }
            }
            checked += 1;
        }
    }
    pass(9, "gradient check", format!("{checked} configurations, {:.2?}", start.elapsed()));
}

fn random_config(plan: &PartitionPlan, n: usize, rng: &mut ChaCha8Rng) -> Configuration {
    let q = plan.q() as usize;
    let mut verts: Vec<usize> = (0..=n).collect();
    for i in (1..verts.len()).rev() {
        let j = rng.gen_range(0..=i);
        verts.swap(i, j);
    }
    let mut supports = vec![Vec::new(); q];
    for (pos, &v) in verts.iter().enumerate() {
        supports[pos % q].push(v);
    }
    let points = supports
        .into_iter()
        .map(|mut support| {
            support.sort_unstable();
            let raw: Vec<f64> = support.iter().map(|_| rng.gen_range(0.05..1.0)).collect();
            let sum: f64 = raw.iter().sum();
            PointPlacement { support, weights: raw.into_iter().map(|w| w / sum).collect() }
        })
        .collect();
    Configuration { orders: plan.group().orders().to_vec(), points }
}

#[test]
fn verify_bound_ties_residual_to_coincidences() {
    // supporting property: residual <= 1e-8 forces every coincidence
    // deviation under 2·q'·1e-8
    let plan = plan_theorem_1_3(3, 1, 1, 1, 2).unwrap();
    for seed in 0..10u64 {
        let map = SimplexMap::random(8, 2, 600 + seed);
        let outcome = solve(&map, &plan, &SolveOptions { seed, ..Default::default() }).unwrap();
        if !outcome.converged {
            continue;
        }
        let report = verify(&map, &outcome.configuration, &plan).unwrap();
        let bound = 2.0 * plan.q_prime() as f64 * 1e-8;
        assert!(report.max_coincidence_deviation <= bound);
        assert!(report.max_coincidence_deviation <= 1e-6, "empirically far below");
    }
}
