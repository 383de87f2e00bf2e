//! Partition plans: given a decomposition `q = p^k · r` the planner picks the
//! annihilated character set, the target simplex dimension `n`, and the full
//! coincidence schedule, and certifies the plan through the obstruction
//! module before returning it.
//!
//! Two plan families exist. The subgroup family fixes `H = Z_p^a` inside
//! `G = Z_p^k ⊕ Z_r` and annihilates every character outside the single-axis
//! families of the quotient `Ḡ = Z_p^{k-a} ⊕ Z_r`; its schedule has the
//! `H`-coset equalities plus, for each `ℓ ≤ min{p,r}`, orbit families with a
//! common average. The block family annihilates `(Z_p^k − 0) ⊕ 0` and forces
//! the `p^k` blocks of `r` consecutive points to share one average.

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use itertools::Itertools;

use crate::group::{Character, GroupElement, GroupError, GroupSpec};
use crate::obstruction::{
    build_chern_poly, build_sw_poly, orientability, ObstructionPoly, RingError, Sw1Convention,
};

/// Plans larger than this are refused outright; everything here is desk scale.
const MAX_GROUP_ORDER: u64 = 1_000_000;

#[derive(Debug, Error)]
pub enum PlanError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("invalid plan parameters: {0}")]
    BadParameters(String),
    #[error("obstruction polynomial vanishes; plan is uncertifiable: {polynomial}")]
    Uncertifiable { polynomial: String },
    #[error("orbit length {ell} out of range (need 2 <= ell <= {max})")]
    EllOutOfRange { ell: u32, max: u32 },
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// Which average-value theorem a plan instantiates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Theorem {
    #[serde(rename = "1.3")]
    Subgroup,
    #[serde(rename = "1.4")]
    Blocks,
}

/// How the certificate was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LemmaRoute {
    /// Even `d`: the map is treated as `C^{d/2}`-valued and every annihilated
    /// character enters the Chern product with exponent `d/2`.
    ChernFull,
    /// Odd `d` with no order-2 characters annihilated: conjugate-pair
    /// representatives enter with exponent `d`.
    ChernHalf,
    /// Odd `d` with order-2 characters annihilated: the mod-2 ring decides.
    StiefelWhitney,
}

/// How plan point indices map to group elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointIndexing {
    /// Plain lexicographic rank of the coordinate vector.
    Lexicographic,
    /// `H`-coset major; within the cyclic quotient the index is the Chinese
    /// remainder position, so quotient indices step through every coordinate
    /// at once.
    CosetCrt,
}

/// A certified partition plan.
#[derive(Debug, Clone)]
pub struct PartitionPlan {
    theorem: Theorem,
    p: u32,
    k: u32,
    r: u32,
    a: u32,
    d: u32,
    spec: GroupSpec,
    q: u64,
    q_prime: usize,
    m: usize,
    m_prime: usize,
    n: usize,
    annihilated: Vec<Character>,
    representatives: Vec<Character>,
    route: LemmaRoute,
    certificate: ObstructionPoly,
    indexing: PointIndexing,
    /// lex rank -> point index
    index_of_rank: Vec<usize>,
    /// point index -> lex rank
    rank_of_index: Vec<usize>,
    warnings: Vec<String>,
}

/// One family of equal-average orbits: all `(ℓ!)^{k-a}` orbits over a fixed
/// choice of coordinate subsets share a single average value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitFamily {
    pub ell: u32,
    /// The chosen subsets, one per free coordinate of the quotient (the
    /// `Z_r` subset last).
    pub subsets: Vec<Vec<u32>>,
    /// Orbits as sorted point-index sets.
    pub orbits: Vec<Vec<usize>>,
}

/// The coincidences a plan guarantees, in point indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoincidenceSchedule {
    /// Point-value equalities: every index in a class maps to the same image
    /// (the `H`-cosets, one class per quotient element).
    pub equality_classes: Vec<Vec<usize>>,
    /// Equal-average orbit families.
    pub orbit_families: Vec<OrbitFamily>,
    /// Blocks of consecutive indices with a common average.
    pub blocks: Vec<Vec<usize>>,
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut f = 2u32;
    while (f as u64) * (f as u64) <= p as u64 {
        if p % f == 0 {
            return false;
        }
        f += 1;
    }
    true
}

fn checked_pow(p: u32, k: u32) -> Result<u64, PlanError> {
    let mut out = 1u64;
    for _ in 0..k {
        out = out
            .checked_mul(p as u64)
            .filter(|&v| v <= MAX_GROUP_ORDER)
            .ok_or_else(|| PlanError::BadParameters(format!("p^k = {p}^{k} is too large")))?;
    }
    Ok(out)
}

/// `(q, q', n)` for the subgroup theorem.
fn dims_subgroup(p: u32, k: u32, r: u32, a: u32, d: u32) -> Result<(u64, usize, usize), PlanError> {
    let q = checked_pow(p, k)?
        .checked_mul(r as u64)
        .filter(|&v| v <= MAX_GROUP_ORDER)
        .ok_or_else(|| PlanError::BadParameters("group order too large".into()))?;
    let kept = (k - a) as u64 * (p as u64 - 1) + r as u64;
    let q_prime = (q - kept) as usize;
    let n = (d as usize + 1) * (q as usize - 1)
        - d as usize * ((k - a) as usize * (p as usize - 1) + r as usize - 1);
    Ok((q, q_prime, n))
}

/// `(q, q', n)` for the block theorem.
fn dims_blocks(p: u32, k: u32, r: u32, d: u32) -> Result<(u64, usize, usize), PlanError> {
    let pk = checked_pow(p, k)?;
    let q = pk
        .checked_mul(r as u64)
        .filter(|&v| v <= MAX_GROUP_ORDER)
        .ok_or_else(|| PlanError::BadParameters("group order too large".into()))?;
    let q_prime = (pk - 1) as usize;
    let n = (d as usize + r as usize) * (pk as usize - 1) + r as usize - 1;
    Ok((q, q_prime, n))
}

fn check_common(p: u32, k: u32, r: u32, d: u32) -> Result<(), PlanError> {
    if !is_prime(p) {
        return Err(PlanError::NotPrime(p));
    }
    if r < 1 {
        return Err(PlanError::BadParameters("r must be >= 1".into()));
    }
    if d < 1 {
        return Err(PlanError::BadParameters("d must be >= 1".into()));
    }
    if k > 20 {
        return Err(PlanError::BadParameters("k too large".into()));
    }
    Ok(())
}

fn group_orders(p: u32, k: u32, r: u32) -> Vec<u32> {
    let mut orders = vec![p; k as usize];
    orders.push(r);
    orders
}

/// Annihilated set of the subgroup theorem: every nonzero character that is
/// not supported on a single coordinate with index >= a.
fn annihilated_subgroup(spec: &GroupSpec, a: u32) -> Vec<Character> {
    spec.enumerate_characters()
        .into_iter()
        .filter(|eps| {
            let support: Vec<usize> = eps
                .exponents()
                .iter()
                .enumerate()
                .filter(|(_, &e)| e != 0)
                .map(|(j, _)| j)
                .collect();
            match support.len() {
                0 => false,
                1 => support[0] < a as usize,
                _ => true,
            }
        })
        .collect()
}

/// Annihilated set of the block theorem: nonzero on the `Z_p^k` part, zero on
/// the `Z_r` coordinate.
fn annihilated_blocks(spec: &GroupSpec) -> Vec<Character> {
    let last = spec.rank() - 1;
    spec.enumerate_characters()
        .into_iter()
        .filter(|eps| {
            eps.exponents()[last] == 0 && eps.exponents().iter().take(last).any(|&e| e != 0)
        })
        .collect()
}

/// Conjugate-pair representatives: the lexicographically smaller of
/// `{ε, −ε}`; self-paired characters represent themselves.
fn representatives(spec: &GroupSpec, annihilated: &[Character]) -> Vec<Character> {
    annihilated.iter().filter(|eps| **eps <= spec.neg_character(eps)).cloned().collect()
}

/// Routes an annihilated set to its obstruction polynomial and checks that it
/// does not vanish. The set must be closed under negation and exclude the
/// trivial character.
pub fn route_and_certify(
    spec: &GroupSpec,
    annihilated: &[Character],
    d: u32,
    convention: Sw1Convention,
) -> Result<(LemmaRoute, ObstructionPoly), PlanError> {
    let order2: Vec<Character> =
        annihilated.iter().filter(|e| spec.is_order_two(e)).cloned().collect();
    let poly;
    let route;
    if d % 2 == 0 {
        route = LemmaRoute::ChernFull;
        poly = ObstructionPoly::Chern(build_chern_poly(spec.orders(), annihilated, d / 2)?);
    } else if order2.is_empty() {
        route = LemmaRoute::ChernHalf;
        let reps = representatives(spec, annihilated);
        poly = ObstructionPoly::Chern(build_chern_poly(spec.orders(), &reps, d)?);
    } else {
        route = LemmaRoute::StiefelWhitney;
        let pair_reps: Vec<Character> = representatives(spec, annihilated)
            .into_iter()
            .filter(|e| !spec.is_order_two(e))
            .collect();
        poly = ObstructionPoly::StiefelWhitney(build_sw_poly(
            spec.orders(),
            &order2,
            &pair_reps,
            d,
            convention,
        )?);
    }
    if !poly.is_nonzero() {
        return Err(PlanError::Uncertifiable { polynomial: poly.canonical_text() });
    }
    Ok((route, poly))
}

fn mod_inverse(x: u64, m: u64) -> u64 {
    // extended euclid; inputs are coprime by construction
    let (mut r0, mut r1) = (m as i64, (x % m) as i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let qt = r0 / r1;
        (r0, r1) = (r1, r0 - qt * r1);
        (t0, t1) = (t1, t0 - qt * t1);
    }
    t0.rem_euclid(m as i64) as u64
}

/// Builds the point indexing for a subgroup plan: `H`-coset major, and within
/// the quotient the Chinese remainder position when the quotient is cyclic
/// (pairwise coprime nontrivial factor orders), plain lexicographic rank
/// otherwise.
fn subgroup_indexing(spec: &GroupSpec, a: u32) -> (PointIndexing, Vec<usize>) {
    let orders = spec.orders();
    let a = a as usize;
    let quotient_orders: Vec<u64> = orders[a..].iter().map(|&q| q as u64).collect();
    let nontrivial: Vec<(usize, u64)> = quotient_orders
        .iter()
        .enumerate()
        .filter(|(_, &q)| q > 1)
        .map(|(j, &q)| (j, q))
        .collect();
    let cyclic = nontrivial
        .iter()
        .tuple_combinations()
        .all(|((_, q1), (_, q2))| q1.gcd(q2) == 1);
    let qbar: u64 = quotient_orders.iter().product();
    let h_order: u64 = orders[..a].iter().map(|&q| q as u64).product();

    let quotient_index = |coords: &[u32]| -> u64 {
        if cyclic {
            // CRT position: j ≡ b_s (mod o_s) for every nontrivial factor
            let mut j = 0u64;
            for &(s, o) in &nontrivial {
                let w = qbar / o;
                j = (j + coords[s] as u64 * w % qbar * mod_inverse(w, o)) % qbar;
            }
            j
        } else {
            let mut rank = 0u64;
            for (s, &o) in quotient_orders.iter().enumerate() {
                rank = rank * o + coords[s] as u64;
            }
            rank
        }
    };

    let mut index_of_rank = vec![0usize; spec.order() as usize];
    let mut identity = true;
    for (rank, g) in spec.enumerate_elements().iter().enumerate() {
        let mut h_rank = 0u64;
        for (j, &o) in orders[..a].iter().enumerate() {
            h_rank = h_rank * o as u64 + g.coords()[j] as u64;
        }
        let idx = (h_rank * qbar + quotient_index(&g.coords()[a..])) as usize;
        index_of_rank[rank] = idx;
        identity &= idx == rank;
    }
    debug_assert!(h_order * qbar == spec.order());
    let kind = if identity { PointIndexing::Lexicographic } else { PointIndexing::CosetCrt };
    (kind, index_of_rank)
}

impl PartitionPlan {
    /// Subgroup plan for `q = p^k·r`, `H = Z_p^a`.
    ///
    /// `gcd(p, r) != 1` is accepted with a warning; the theorem is stated for
    /// the decomposition as given and nothing forces coprimality, but mixed
    /// decompositions of the same `q` differ in what they guarantee.
    pub fn subgroup(p: u32, k: u32, r: u32, a: u32, d: u32) -> Result<Self, PlanError> {
        check_common(p, k, r, d)?;
        if a > k {
            return Err(PlanError::BadParameters(format!("a = {a} exceeds k = {k}")));
        }
        let (q, q_prime, n) = dims_subgroup(p, k, r, a, d)?;
        let spec = GroupSpec::new(group_orders(p, k, r))?;
        let annihilated = annihilated_subgroup(&spec, a);
        debug_assert_eq!(annihilated.len(), q_prime);
        let mut warnings = Vec::new();
        if k > 0 && (r as u64).gcd(&(p as u64)) != 1 {
            warnings.push(format!(
                "gcd(p, r) = gcd({p}, {r}) != 1: the decomposition is accepted but unusual"
            ));
        }
        Self::finish(Theorem::Subgroup, p, k, r, a, d, spec, q, q_prime, n, annihilated, warnings)
    }

    /// Block plan for `q = p^k·r`.
    pub fn blocks(p: u32, k: u32, r: u32, d: u32) -> Result<Self, PlanError> {
        check_common(p, k, r, d)?;
        let (q, q_prime, n) = dims_blocks(p, k, r, d)?;
        let spec = GroupSpec::new(group_orders(p, k, r))?;
        let annihilated = annihilated_blocks(&spec);
        debug_assert_eq!(annihilated.len(), q_prime);
        let mut warnings = Vec::new();
        if k > 0 && (r as u64).gcd(&(p as u64)) != 1 {
            warnings.push(format!(
                "gcd(p, r) = gcd({p}, {r}) != 1: the decomposition is accepted but unusual"
            ));
        }
        Self::finish(Theorem::Blocks, p, k, r, k, d, spec, q, q_prime, n, annihilated, warnings)
    }

    #[allow(clippy::too_many_arguments)]
    fn finish(
        theorem: Theorem,
        p: u32,
        k: u32,
        r: u32,
        a: u32,
        d: u32,
        spec: GroupSpec,
        q: u64,
        q_prime: usize,
        n: usize,
        annihilated: Vec<Character>,
        warnings: Vec<String>,
    ) -> Result<Self, PlanError> {
        let reps = representatives(&spec, &annihilated);
        let m_prime = annihilated.iter().filter(|e| spec.is_order_two(e)).count();
        let m = reps.len();
        debug_assert_eq!(m, m_prime + (q_prime - m_prime) / 2);
        // the three lemma cases all collapse to the same dimension count
        debug_assert_eq!(n, d as usize * q_prime + q as usize - 1);

        let (route, certificate) =
            route_and_certify(&spec, &annihilated, d, Sw1Convention::default())?;

        let (indexing, index_of_rank) = match theorem {
            Theorem::Subgroup => subgroup_indexing(&spec, a),
            // block plans index lexicographically: consecutive indices run
            // through the Z_r coordinate
            Theorem::Blocks => (PointIndexing::Lexicographic, (0..q as usize).collect()),
        };
        let mut rank_of_index = vec![0usize; q as usize];
        for (rank, &idx) in index_of_rank.iter().enumerate() {
            rank_of_index[idx] = rank;
        }

        Ok(Self {
            theorem,
            p,
            k,
            r,
            a,
            d,
            spec,
            q,
            q_prime,
            m,
            m_prime,
            n,
            annihilated,
            representatives: reps,
            route,
            certificate,
            indexing,
            index_of_rank,
            rank_of_index,
            warnings,
        })
    }

    pub fn theorem(&self) -> Theorem {
        self.theorem
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn a(&self) -> u32 {
        self.a
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn group(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// Number of annihilated characters.
    pub fn q_prime(&self) -> usize {
        self.q_prime
    }

    /// Transform count: conjugate-pair representatives plus self-paired
    /// characters.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of annihilated characters of order 2.
    pub fn m_prime(&self) -> usize {
        self.m_prime
    }

    /// Guaranteed simplex dimension: maps `∂Δⁿ → R^d` with this `n` admit a
    /// configuration annihilating the planned transforms.
    pub fn n(&self) -> usize {
        self.n
    }

    /// The dimension a full partition guarantee would need, `(q−1)(d+1)`.
    pub fn tight_dimension(&self) -> usize {
        (self.q as usize - 1) * (self.d as usize + 1)
    }

    pub fn annihilated(&self) -> &[Character] {
        &self.annihilated
    }

    pub fn representatives(&self) -> &[Character] {
        &self.representatives
    }

    pub fn route(&self) -> LemmaRoute {
        self.route
    }

    pub fn certificate(&self) -> &ObstructionPoly {
        &self.certificate
    }

    /// Orientability of the mod-2 route's bundle; `None` for the Chern routes.
    pub fn bundle_orientable(&self) -> Option<bool> {
        match self.route {
            LemmaRoute::StiefelWhitney => {
                let order2: Vec<Character> = self
                    .annihilated
                    .iter()
                    .filter(|e| self.spec.is_order_two(e))
                    .cloned()
                    .collect();
                orientability(self.spec.orders(), &order2).ok()
            }
            _ => None,
        }
    }

    pub fn indexing(&self) -> PointIndexing {
        self.indexing
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Point index of a group element under the plan's documented indexing.
    pub fn point_index(&self, g: &GroupElement) -> usize {
        self.index_of_rank[self.spec.rank_of(g)]
    }

    pub fn element_at_point(&self, idx: usize) -> GroupElement {
        self.spec.element_at(self.rank_of_index[idx])
    }

    /// The index-to-element table, for serialization and display.
    pub fn point_elements(&self) -> Vec<GroupElement> {
        (0..self.q as usize).map(|i| self.element_at_point(i)).collect()
    }

    /// Coincidence schedule for one orbit length; see
    /// [`enumerate_coincidences`].
    pub fn schedule(&self, ell: Option<u32>) -> Result<CoincidenceSchedule, PlanError> {
        enumerate_coincidences(self, ell)
    }

    /// Schedule holding the orbit families of every valid orbit length.
    ///
    /// Families with a single orbit (which arise when `a = k`, i.e. no free
    /// product coordinate) relate nothing to nothing and are omitted here;
    /// ask [`enumerate_coincidences`] for a specific length to see them.
    pub fn full_schedule(&self) -> CoincidenceSchedule {
        let mut out = enumerate_coincidences(self, None).expect("no ell given");
        if self.theorem == Theorem::Subgroup && self.a < self.k {
            let max = self.p.min(self.r);
            for ell in 2..=max {
                let sched = enumerate_coincidences(self, Some(ell)).expect("ell in range");
                out.orbit_families.extend(sched.orbit_families);
            }
        }
        out
    }
}

/// Max orbit length for a plan (0 when the plan has no orbit coincidences).
fn max_ell(plan: &PartitionPlan) -> u32 {
    match plan.theorem {
        Theorem::Subgroup => plan.p.min(plan.r),
        Theorem::Blocks => 0,
    }
}

/// Enumerates the coincidences a plan guarantees.
///
/// Subgroup plans always emit the `H`-coset equality classes; passing an
/// orbit length `ℓ` (with `2 ≤ ℓ ≤ min{p,r}`) additionally emits, per choice
/// of coordinate subsets of size `ℓ`, the `(ℓ!)^{k-a}` orbits sharing one
/// average. Orbits are enumerated as graphs of bijection tuples anchored at
/// the `Z_r` coordinate. Block plans ignore `ℓ` and emit the blocks.
pub fn enumerate_coincidences(
    plan: &PartitionPlan,
    ell: Option<u32>,
) -> Result<CoincidenceSchedule, PlanError> {
    let mut schedule = CoincidenceSchedule::default();
    let spec = plan.group();
    match plan.theorem {
        Theorem::Blocks => {
            let pk = (plan.q / plan.r as u64) as usize;
            let r = plan.r as usize;
            for h in 0..pk {
                schedule.blocks.push((h * r..(h + 1) * r).collect());
            }
        }
        Theorem::Subgroup => {
            let a = plan.a as usize;
            let k = plan.k as usize;
            let h_order: usize = spec.orders()[..a].iter().map(|&q| q as usize).product();
            let qbar = plan.q as usize / h_order;
            if h_order > 1 {
                for j in 0..qbar {
                    schedule
                        .equality_classes
                        .push((0..h_order).map(|t| t * qbar + j).collect());
                }
            }
            if let Some(ell) = ell {
                if plan.r > 1 {
                    let max = max_ell(plan);
                    if ell < 2 || ell > max {
                        return Err(PlanError::EllOutOfRange { ell, max });
                    }
                    schedule.orbit_families = orbit_families(plan, ell, a, k);
                }
                // r = 1: only the coset equalities exist, any ell is a no-op
            }
        }
    }
    Ok(schedule)
}

fn orbit_families(plan: &PartitionPlan, ell: u32, a: usize, k: usize) -> Vec<OrbitFamily> {
    let spec = plan.group();
    let p = plan.p;
    let r = plan.r;
    let l = ell as usize;

    // subsets per free Z_p coordinate (a..k) and the Z_r coordinate (k)
    let p_subsets: Vec<Vec<u32>> = (0..p).combinations(l).collect();
    let r_subsets: Vec<Vec<u32>> = (0..r).combinations(l).collect();
    let free_coords = k - a;

    let mut families = Vec::new();
    let free_factor: Vec<Vec<Vec<u32>>> = vec![p_subsets; free_coords];
    for combo in multi_product_or_single(&free_factor) {
        for base in &r_subsets {
            let mut subsets = combo.clone();
            subsets.push(base.clone());
            let mut orbits = Vec::new();
            // bijection tuples: one ordering of each S_j against the sorted base
            let arrangement_factors: Vec<Vec<Vec<u32>>> = combo
                .iter()
                .map(|s| s.iter().cloned().permutations(l).collect::<Vec<_>>())
                .collect();
            for arrangement in multi_product_or_single(&arrangement_factors) {
                let mut orbit = Vec::with_capacity(l);
                for (t, &u) in base.iter().enumerate() {
                    let mut coords = vec![0u32; spec.rank()];
                    for (j, images) in arrangement.iter().enumerate() {
                        coords[a + j] = images[t];
                    }
                    coords[k] = u;
                    let g = spec.element(coords).expect("coords in range");
                    orbit.push(plan.point_index(&g));
                }
                orbit.sort_unstable();
                orbits.push(orbit);
            }
            orbits.sort_unstable();
            families.push(OrbitFamily { ell, subsets, orbits });
        }
    }
    families
}

/// Cartesian product of the factor lists, with one empty tuple for an empty
/// factor list (matching `(ℓ!)^0 = 1`).
fn multi_product_or_single<T: Clone>(factors: &[Vec<T>]) -> Vec<Vec<T>> {
    if factors.is_empty() {
        return vec![Vec::new()];
    }
    factors.iter().map(|f| f.iter().cloned()).multi_cartesian_product().collect()
}

/// Subgroup-theorem plan (see [`PartitionPlan::subgroup`]).
pub fn plan_theorem_1_3(p: u32, k: u32, r: u32, a: u32, d: u32) -> Result<PartitionPlan, PlanError> {
    PartitionPlan::subgroup(p, k, r, a, d)
}

/// Block-theorem plan (see [`PartitionPlan::blocks`]).
pub fn plan_theorem_1_4(p: u32, k: u32, r: u32, d: u32) -> Result<PartitionPlan, PlanError> {
    PartitionPlan::blocks(p, k, r, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn paper_dimension_nine_points() {
        for d in 1..=5u32 {
            let plan = plan_theorem_1_3(3, 2, 1, 0, d).unwrap();
            assert_eq!(plan.q(), 9);
            assert_eq!(plan.n(), (4 * d + 8) as usize);
            assert_eq!(plan.tight_dimension(), (8 * d + 8) as usize);
        }
        assert_eq!(plan_theorem_1_3(3, 2, 1, 0, 2).unwrap().n(), 16);
    }

    #[test]
    fn paper_dimension_eighteen_points() {
        for d in 1..=5u32 {
            let plan = plan_theorem_1_3(3, 2, 2, 1, d).unwrap();
            assert_eq!(plan.q(), 18);
            assert_eq!(plan.n(), (14 * d + 17) as usize);
        }
        assert_eq!(plan_theorem_1_3(3, 2, 2, 1, 1).unwrap().n(), 31);
    }

    #[test]
    fn full_partition_case_recovers_tight_dimension() {
        for (p, k, d) in [(2, 1, 2), (3, 1, 1), (2, 2, 3), (5, 1, 2)] {
            let plan = plan_theorem_1_3(p, k, 1, k, d).unwrap();
            assert_eq!(plan.n(), plan.tight_dimension());
            // annihilated = all nonzero characters
            assert_eq!(plan.q_prime() as u64, plan.q() - 1);
        }
    }

    #[test]
    fn block_plan_dimensions() {
        for r in 1..=4u32 {
            let plan = plan_theorem_1_4(2, 1, r, 2).unwrap();
            assert_eq!(plan.n(), (2 * r + 1) as usize);
            assert_eq!(plan.q_prime(), 1);
        }
        // r = 1 recovers the tight dimension
        for (p, k, d) in [(2, 1, 1), (3, 1, 2), (2, 2, 2)] {
            let plan = plan_theorem_1_4(p, k, 1, d).unwrap();
            assert_eq!(plan.n(), plan.tight_dimension());
        }
        assert_eq!(plan_theorem_1_4(2, 1, 3, 2).unwrap().n(), 7);
    }

    #[test]
    fn dimension_consistency_exhaustive() {
        // n = d·q' + q − 1 across every valid parameter combination with q <= 50
        let primes = [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47];
        let mut checked = 0;
        for &p in &primes {
            for k in 0..=5u32 {
                let pk = (p as u64).checked_pow(k);
                let Some(pk) = pk.filter(|&v| v <= 50) else { continue };
                for r in 1..=(50 / pk) as u32 {
                    for d in 1..=3u32 {
                        for a in 0..=k {
                            let (q, qp, n) = dims_subgroup(p, k, r, a, d).unwrap();
                            let spec = GroupSpec::new(group_orders(p, k, r)).unwrap();
                            assert_eq!(annihilated_subgroup(&spec, a).len(), qp);
                            assert_eq!(n, d as usize * qp + q as usize - 1);
                            checked += 1;
                        }
                        let (q, qp, n) = dims_blocks(p, k, r, d).unwrap();
                        let spec = GroupSpec::new(group_orders(p, k, r)).unwrap();
                        assert_eq!(annihilated_blocks(&spec).len(), qp);
                        assert_eq!(n, d as usize * qp + q as usize - 1);
                    }
                }
            }
        }
        assert!(checked > 100);
    }

    #[test]
    fn order_two_count_closed_form() {
        // p = 2, odd d: m' = 2^k − (k−a+1) for odd r, 2^{k+1} − (k−a+2) for even r
        for k in 1..=3u32 {
            for a in 0..=k {
                for r in 1..=4u32 {
                    let plan = match plan_theorem_1_3(2, k, r, a, 1) {
                        Ok(p) => p,
                        Err(PlanError::Uncertifiable { .. }) => {
                            panic!("unexpected uncertifiable plan at k={k} a={a} r={r}")
                        }
                        Err(e) => panic!("{e}"),
                    };
                    let expect = if r % 2 == 1 {
                        2usize.pow(k) - (k - a + 1) as usize
                    } else {
                        2usize.pow(k + 1) - (k - a + 2) as usize
                    };
                    assert_eq!(plan.m_prime(), expect, "k={k} a={a} r={r}");
                }
            }
        }
    }

    #[test]
    fn annihilated_closed_under_negation_and_excludes_zero() {
        for plan in [
            plan_theorem_1_3(3, 2, 2, 1, 2).unwrap(),
            plan_theorem_1_3(2, 2, 3, 0, 1).unwrap(),
            plan_theorem_1_4(3, 1, 4, 1).unwrap(),
        ] {
            let spec = plan.group();
            let set: BTreeSet<_> = plan.annihilated().iter().cloned().collect();
            assert!(!set.iter().any(|e| e.is_trivial()));
            for eps in &set {
                assert!(set.contains(&spec.neg_character(eps)));
            }
            // representatives split every pair exactly once
            assert_eq!(plan.representatives().len(), plan.m());
            let mut covered = BTreeSet::new();
            for rep in plan.representatives() {
                covered.insert(rep.clone());
                covered.insert(spec.neg_character(rep));
            }
            assert_eq!(covered, set);
        }
    }

    #[test]
    fn certification_family_positive() {
        for p in [2u32, 3] {
            for k in 0..=2u32 {
                for r in 1..=3u32 {
                    for a in 0..=k {
                        for d in 1..=3u32 {
                            let plan = plan_theorem_1_3(p, k, r, a, d);
                            assert!(
                                plan.is_ok(),
                                "p={p} k={k} r={r} a={a} d={d}: {:?}",
                                plan.err()
                            );
                            assert!(plan.unwrap().certificate().is_nonzero());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn route_selection() {
        // even d goes through the full Chern product
        assert_eq!(plan_theorem_1_3(3, 1, 3, 0, 2).unwrap().route(), LemmaRoute::ChernFull);
        // odd d, odd p: no order-2 characters annihilated
        assert_eq!(plan_theorem_1_3(3, 1, 3, 0, 1).unwrap().route(), LemmaRoute::ChernHalf);
        assert_eq!(plan_theorem_1_3(3, 2, 2, 1, 1).unwrap().m_prime(), 0);
        // odd d, p = 2: mod-2 route
        assert_eq!(plan_theorem_1_3(2, 2, 1, 2, 1).unwrap().route(), LemmaRoute::StiefelWhitney);
        let p14 = plan_theorem_1_4(2, 2, 3, 3).unwrap();
        assert_eq!(p14.route(), LemmaRoute::StiefelWhitney);
        assert_eq!(p14.m_prime(), 3);
    }

    #[test]
    fn uncertifiable_set_reports_polynomial() {
        // the full nonzero set over Z_6 kills the Chern product (5! ≡ 0 mod 6)
        let spec = GroupSpec::new(vec![6]).unwrap();
        let annihilated: Vec<Character> =
            spec.enumerate_characters().into_iter().filter(|c| !c.is_trivial()).collect();
        let err = route_and_certify(&spec, &annihilated, 2, Sw1Convention::default()).unwrap_err();
        assert!(matches!(err, PlanError::Uncertifiable { .. }));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(plan_theorem_1_3(4, 1, 1, 0, 1), Err(PlanError::NotPrime(4))));
        assert!(matches!(plan_theorem_1_3(3, 1, 1, 2, 1), Err(PlanError::BadParameters(_))));
        assert!(matches!(plan_theorem_1_3(3, 1, 0, 0, 1), Err(PlanError::BadParameters(_))));
        assert!(matches!(plan_theorem_1_3(3, 1, 1, 0, 0), Err(PlanError::BadParameters(_))));
    }

    #[test]
    fn gcd_warning_emitted() {
        let plan = plan_theorem_1_3(3, 1, 3, 0, 1).unwrap();
        assert_eq!(plan.warnings().len(), 1);
        let plan = plan_theorem_1_3(3, 1, 2, 0, 1).unwrap();
        assert!(plan.warnings().is_empty());
    }

    #[test]
    fn nine_point_triple_schedule_matches_expected_family() {
        // G = Z_3 ⊕ Z_3 (p=3, k=1, r=3, a=0), ℓ = 3: one subset, six orbits
        let plan = plan_theorem_1_3(3, 1, 3, 0, 2).unwrap();
        assert_eq!(plan.indexing(), PointIndexing::Lexicographic);
        let sched = enumerate_coincidences(&plan, Some(3)).unwrap();
        assert_eq!(sched.orbit_families.len(), 1);
        let fam = &sched.orbit_families[0];
        assert_eq!(fam.orbits.len(), 6);
        let got: BTreeSet<Vec<usize>> = fam.orbits.iter().cloned().collect();
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
    }

    #[test]
    fn eighteen_point_pair_identities_match_expected_family() {
        // G = Z_3 ⊕ Z_3 ⊕ Z_2 (p=3, k=2, r=2, a=1), ℓ = 2: the quotient
        // Z_3 ⊕ Z_2 is cyclic, so indices step diagonally and the three
        // pair identities come out on consecutive indices
        let plan = plan_theorem_1_3(3, 2, 2, 1, 1).unwrap();
        assert_eq!(plan.indexing(), PointIndexing::CosetCrt);
        let sched = enumerate_coincidences(&plan, Some(2)).unwrap();
        assert_eq!(sched.orbit_families.len(), 3);
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

        // coincidence (i): f(x_j) = f(x_{j+6}) = f(x_{j+12})
        assert_eq!(sched.equality_classes.len(), 6);
        for (j, class) in sched.equality_classes.iter().enumerate() {
            assert_eq!(class, &vec![j, j + 6, j + 12]);
        }
    }

    #[test]
    fn quotient_only_subsets_have_single_orbits() {
        // k − a = 0: C(r, ℓ) subsets with one orbit each
        let plan = plan_theorem_1_3(5, 1, 4, 1, 1).unwrap();
        let sched = enumerate_coincidences(&plan, Some(3)).unwrap();
        assert_eq!(sched.orbit_families.len(), 4); // C(4,3)
        for fam in &sched.orbit_families {
            assert_eq!(fam.orbits.len(), 1); // (ℓ!)^0
            assert_eq!(fam.orbits[0].len(), 3);
        }
    }

    #[test]
    fn orbit_counts_match_closed_forms() {
        fn binom(n: u32, k: u32) -> usize {
            if k > n {
                return 0;
            }
            (1..=k as usize).fold(1usize, |acc, i| acc * (n as usize - i + 1) / i)
        }
        for (p, k, r, a) in [(3, 1, 3, 0), (2, 2, 2, 1), (3, 2, 2, 1), (2, 1, 4, 0)] {
            let plan = plan_theorem_1_3(p, k, r, a, 1).unwrap();
            for ell in 2..=p.min(r) {
                let sched = enumerate_coincidences(&plan, Some(ell)).unwrap();
                let free = (k - a) as usize;
                let expect_subsets = binom(p, ell).pow(free as u32) * binom(r, ell);
                assert_eq!(sched.orbit_families.len(), expect_subsets);
                let fact: usize = (1..=ell as usize).product();
                for fam in &sched.orbit_families {
                    assert_eq!(fam.orbits.len(), fact.pow(free as u32));
                    for orbit in &fam.orbits {
                        assert_eq!(orbit.len(), ell as usize);
                        // projection to each chosen coordinate is a bijection
                        let elements: Vec<GroupElement> =
                            orbit.iter().map(|&i| plan.element_at_point(i)).collect();
                        for (slot, subset) in fam.subsets.iter().enumerate() {
                            let coord =
                                if slot < free { a as usize + slot } else { k as usize };
                            let seen: BTreeSet<u32> =
                                elements.iter().map(|g| g.coords()[coord]).collect();
                            let want: BTreeSet<u32> = subset.iter().cloned().collect();
                            assert_eq!(seen, want);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn ell_out_of_range_rejected() {
        let plan = plan_theorem_1_3(3, 1, 3, 0, 1).unwrap();
        assert!(matches!(
            enumerate_coincidences(&plan, Some(4)),
            Err(PlanError::EllOutOfRange { ell: 4, max: 3 })
        ));
        assert!(matches!(
            enumerate_coincidences(&plan, Some(1)),
            Err(PlanError::EllOutOfRange { ell: 1, max: 3 })
        ));
    }

    #[test]
    fn r_equal_one_schedule_has_only_equalities() {
        let plan = plan_theorem_1_3(3, 2, 1, 1, 1).unwrap();
        let sched = plan.full_schedule();
        assert!(sched.orbit_families.is_empty());
        assert!(sched.blocks.is_empty());
        assert_eq!(sched.equality_classes.len(), 3);
        for class in &sched.equality_classes {
            assert_eq!(class.len(), 3);
        }
    }

    #[test]
    fn block_schedule_shape() {
        let plan = plan_theorem_1_4(2, 1, 2, 2).unwrap();
        let sched = plan.full_schedule();
        assert!(sched.equality_classes.is_empty());
        assert_eq!(sched.blocks, vec![vec![0, 1], vec![2, 3]]);
    }

    /// Orbits generated from cycle tuples coincide with the bijection-graph
    /// enumeration.
    #[test]
    fn cycle_tuple_orbits_equal_bijection_graphs() {
        fn cycles_of(set: &[u32]) -> Vec<Vec<u32>> {
            // an ℓ-cycle is determined by the image order after the first
            // element: (ℓ−1)! cycles, each written as the image table of `set`
            let l = set.len();
            let mut out = Vec::new();
            for rest in set[1..].iter().cloned().permutations(l - 1) {
                // cycle sends seq[i] -> seq[i+1] cyclically
                let mut seq = vec![set[0]];
                seq.extend(rest);
                let mut image = vec![0u32; l];
                for i in 0..l {
                    let from = seq[i];
                    let to = seq[(i + 1) % l];
                    let pos = set.iter().position(|&x| x == from).unwrap();
                    image[pos] = to;
                }
                out.push(image);
            }
            out
        }

        for ell in 2..=4usize {
            for coords in 2..=3usize {
                // wlog each S_j = {0..ℓ-1}; points are coordinate tuples
                let set: Vec<u32> = (0..ell as u32).collect();
                let cycles = cycles_of(&set);

                // family from cycle tuples
                let mut from_cycles: BTreeSet<BTreeSet<Vec<u32>>> = BTreeSet::new();
                let cycle_tuples = std::iter::repeat(cycles.clone())
                    .take(coords)
                    .multi_cartesian_product();
                for tuple in cycle_tuples {
                    // orbits of the tuple acting on the product
                    let all_points = std::iter::repeat(set.clone())
                        .take(coords)
                        .multi_cartesian_product();
                    for start in all_points {
                        let mut orbit = BTreeSet::new();
                        let mut cur = start.clone();
                        for _ in 0..ell {
                            orbit.insert(cur.clone());
                            cur = cur
                                .iter()
                                .enumerate()
                                .map(|(j, &x)| tuple[j][x as usize])
                                .collect();
                        }
                        from_cycles.insert(orbit);
                    }
                }

                // family from bijection graphs anchored at the last coordinate
                let mut from_bijections: BTreeSet<BTreeSet<Vec<u32>>> = BTreeSet::new();
                let arrangements = std::iter::repeat(
                    set.iter().cloned().permutations(ell).collect::<Vec<_>>(),
                )
                .take(coords - 1)
                .multi_cartesian_product();
                for arr in arrangements {
                    let mut orbit = BTreeSet::new();
                    for (t, &u) in set.iter().enumerate() {
                        let mut point: Vec<u32> =
                            arr.iter().map(|images| images[t]).collect();
                        point.push(u);
                        orbit.insert(point);
                    }
                    from_bijections.insert(orbit);
                }

                assert_eq!(from_cycles, from_bijections, "ell={ell} coords={coords}");
            }
        }
    }

    #[test]
    fn point_indexing_roundtrip() {
        for plan in [
            plan_theorem_1_3(3, 2, 2, 1, 1).unwrap(),
            plan_theorem_1_3(3, 1, 3, 0, 2).unwrap(),
            plan_theorem_1_4(2, 2, 3, 1).unwrap(),
        ] {
            for idx in 0..plan.q() as usize {
                let g = plan.element_at_point(idx);
                assert_eq!(plan.point_index(&g), idx);
            }
        }
    }

    #[test]
    fn block_indexing_is_h_major() {
        let plan = plan_theorem_1_4(3, 1, 2, 1).unwrap();
        // index = rank(h)·r + b
        for h in 0..3u32 {
            for b in 0..2u32 {
                let g = plan.group().element(vec![h, b]).unwrap();
                assert_eq!(plan.point_index(&g), (h * 2 + b) as usize);
            }
        }
    }
}
