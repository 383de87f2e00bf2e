//! Sparse polynomial arithmetic in two quotient cohomology rings, and the
//! non-vanishing tests for the obstruction polynomials that certify partition
//! plans.
//!
//! The integral ring is `Z[y_1,…,y_k]/(q_1·y_1,…,q_k·y_k)`: a monomial
//! divisible by `y_j` is killed by multiples of `q_j`, so the coefficient of a
//! monomial with support `J` lives modulo `gcd{q_j : j ∈ J}` (constants stay
//! over `Z`). The mod-2 ring is `Z_2[x_1,y_1,…,x_{k'},y_{k'}]/(x_i² − r_i·y_i)`
//! with one `(x_i, y_i)` pair per even factor `q_i = 2·r_i`; normal form keeps
//! every x-exponent at 0 or 1 via the rewrite `x_i² → (r_i mod 2)·y_i`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_integer::Integer;
use thiserror::Error;

use crate::group::Character;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RingError {
    #[error("ring specs do not match: {0:?} vs {1:?}")]
    SpecMismatch(Vec<u32>, Vec<u32>),
    #[error("character {0} has {1} components but the ring has {2} moduli")]
    ArityMismatch(String, usize, usize),
    #[error("exponent {0} out of range for a character over these moduli")]
    ExponentOutOfRange(u32),
    #[error("the mod-2 obstruction is defined for odd d only (got {0})")]
    EvenDegree(u32),
    #[error("character {0} does not have order 2")]
    NotOrderTwo(String),
}

/// Which coefficient a character of order 2 contributes to its linear form in
/// the mod-2 ring.
///
/// `Order2Indicator` puts `x_i` into the form exactly when `ε_i = r_i`, the
/// first Stiefel–Whitney class of the corresponding real character.
/// `LiteralMod2` reads the coefficient as `ε_i mod 2` instead, which kills the
/// `x_i` term whenever `r_i` is even; it is kept selectable for comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sw1Convention {
    #[default]
    Order2Indicator,
    LiteralMod2,
}

// ---------------------------------------------------------------------------
// Integral quotient ring
// ---------------------------------------------------------------------------

/// Sparse polynomial in `Z[y_1,…,y_k]/(q_1·y_1,…,q_k·y_k)`, kept in normal
/// form: coefficients reduced per-monomial, no explicit zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientPolyZ {
    moduli: Vec<u32>,
    terms: BTreeMap<Vec<u32>, i64>,
}

impl QuotientPolyZ {
    pub fn zero(moduli: Vec<u32>) -> Self {
        Self { moduli, terms: BTreeMap::new() }
    }

    pub fn constant(moduli: Vec<u32>, c: i64) -> Self {
        let mut p = Self::zero(moduli);
        if c != 0 {
            p.terms.insert(vec![0; p.moduli.len()], c);
        }
        p
    }

    /// The linear form `Σ_j coeffs_j · y_j`.
    pub fn linear_form(moduli: Vec<u32>, coeffs: &[i64]) -> Self {
        assert_eq!(coeffs.len(), moduli.len());
        let mut p = Self::zero(moduli);
        for (j, &c) in coeffs.iter().enumerate() {
            if c != 0 {
                let mut exps = vec![0u32; p.moduli.len()];
                exps[j] = 1;
                p.terms.insert(exps, c);
            }
        }
        p.normalize();
        p
    }

    /// Build from raw terms; reduces to normal form.
    pub fn from_terms(moduli: Vec<u32>, raw: Vec<(Vec<u32>, i64)>) -> Self {
        let mut p = Self::zero(moduli);
        for (exps, c) in raw {
            assert_eq!(exps.len(), p.moduli.len());
            *p.terms.entry(exps).or_insert(0) += c;
        }
        p.normalize();
        p
    }

    pub fn moduli(&self) -> &[u32] {
        &self.moduli
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, i64> {
        &self.terms
    }

    /// Modulus governing a monomial: `gcd{q_j : exps_j > 0}`, or 0 (meaning
    /// "no reduction") for the constant monomial.
    fn monomial_modulus(&self, exps: &[u32]) -> u64 {
        let mut g = 0u64;
        for (j, &e) in exps.iter().enumerate() {
            if e > 0 {
                g = g.gcd(&(self.moduli[j] as u64));
            }
        }
        g
    }

    fn reduce_coeff(&self, exps: &[u32], c: i64) -> i64 {
        let g = self.monomial_modulus(exps) as i64;
        if g == 0 {
            c
        } else {
            c.rem_euclid(g)
        }
    }

    pub fn normalize(&mut self) {
        let old = std::mem::take(&mut self.terms);
        for (exps, c) in old {
            let r = self.reduce_coeff(&exps, c);
            if r != 0 {
                self.terms.insert(exps, r);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, RingError> {
        if self.moduli != other.moduli {
            return Err(RingError::SpecMismatch(self.moduli.clone(), other.moduli.clone()));
        }
        let mut out = self.clone();
        for (exps, c) in &other.terms {
            let entry = out.terms.entry(exps.clone()).or_insert(0);
            *entry += c;
        }
        out.normalize();
        Ok(out)
    }

    /// Distributes, merges like monomials, and reduces every coefficient; the
    /// result is in normal form.
    pub fn multiply_reduce(&self, other: &Self) -> Result<Self, RingError> {
        if self.moduli != other.moduli {
            return Err(RingError::SpecMismatch(self.moduli.clone(), other.moduli.clone()));
        }
        let mut out = Self::zero(self.moduli.clone());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exps: Vec<u32> = ea.iter().zip(eb).map(|(&a, &b)| a + b).collect();
                // reduce the product immediately so intermediate values stay small
                let c = out.reduce_coeff(&exps, ca * cb);
                if c == 0 {
                    continue;
                }
                let entry = out.terms.entry(exps).or_insert(0);
                *entry += c;
            }
        }
        out.normalize();
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Result<Self, RingError> {
        let mut out = Self::constant(self.moduli.clone(), 1);
        for _ in 0..e {
            out = out.multiply_reduce(self)?;
        }
        Ok(out)
    }

    pub fn is_nonzero(&self) -> bool {
        !self.terms.is_empty()
    }

    /// Canonical text form, sorted monomials with explicit coefficients,
    /// e.g. `2*y1^2*y2 + y3`.
    pub fn canonical_text(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(exps, c)| {
                let vars: Vec<String> = exps
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(j, &e)| {
                        if e == 1 {
                            format!("y{}", j + 1)
                        } else {
                            format!("y{}^{}", j + 1, e)
                        }
                    })
                    .collect();
                if vars.is_empty() {
                    format!("{c}")
                } else if *c == 1 {
                    vars.join("*")
                } else {
                    format!("{c}*{}", vars.join("*"))
                }
            })
            .collect();
        parts.join(" + ")
    }
}

impl fmt::Display for QuotientPolyZ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical_text())
    }
}

// ---------------------------------------------------------------------------
// Mod-2 quotient ring
// ---------------------------------------------------------------------------

/// Monomial `x^e · y^a`: x-exponents are 0/1 in normal form.
type Mod2Monomial = (Vec<u8>, Vec<u32>);

/// Sparse polynomial over `Z_2` in `x_1,y_1,…,x_{k'},y_{k'}` modulo
/// `(x_i² − r_i·y_i)`; present monomials have coefficient 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mod2Poly {
    half_orders: Vec<u32>,
    terms: BTreeSet<Mod2Monomial>,
}

impl Mod2Poly {
    pub fn zero(half_orders: Vec<u32>) -> Self {
        Self { half_orders, terms: BTreeSet::new() }
    }

    pub fn one(half_orders: Vec<u32>) -> Self {
        let k = half_orders.len();
        let mut p = Self::zero(half_orders);
        p.terms.insert((vec![0; k], vec![0; k]));
        p
    }

    /// `Σ_i coeffs_i · x_i` with coefficients in `{0,1}`.
    pub fn x_form(half_orders: Vec<u32>, coeffs: &[u8]) -> Self {
        assert_eq!(coeffs.len(), half_orders.len());
        let k = half_orders.len();
        let mut p = Self::zero(half_orders);
        for (i, &c) in coeffs.iter().enumerate() {
            if c % 2 == 1 {
                let mut x = vec![0u8; k];
                x[i] = 1;
                p.terms.insert((x, vec![0; k]));
            }
        }
        p
    }

    /// `Σ_i coeffs_i · y_i` with coefficients in `{0,1}`.
    pub fn y_form(half_orders: Vec<u32>, coeffs: &[u8]) -> Self {
        assert_eq!(coeffs.len(), half_orders.len());
        let k = half_orders.len();
        let mut p = Self::zero(half_orders);
        for (i, &c) in coeffs.iter().enumerate() {
            if c % 2 == 1 {
                let mut y = vec![0u32; k];
                y[i] = 1;
                p.terms.insert((vec![0u8; k], y));
            }
        }
        p
    }

    pub fn half_orders(&self) -> &[u32] {
        &self.half_orders
    }

    pub fn terms(&self) -> &BTreeSet<Mod2Monomial> {
        &self.terms
    }

    fn xor_insert(&mut self, m: Mod2Monomial) {
        if !self.terms.insert(m.clone()) {
            self.terms.remove(&m);
        }
    }

    /// Product of two monomials in normal form; `None` when the rewrite
    /// `x_i² → (r_i mod 2)·y_i` kills the term.
    fn mul_monomials(&self, a: &Mod2Monomial, b: &Mod2Monomial) -> Option<Mod2Monomial> {
        let k = self.half_orders.len();
        let mut x = vec![0u8; k];
        let mut y = vec![0u32; k];
        for i in 0..k {
            y[i] = a.1[i] + b.1[i];
            match a.0[i] + b.0[i] {
                0 => {}
                1 => x[i] = 1,
                2 => {
                    if self.half_orders[i] % 2 == 1 {
                        y[i] += 1;
                    } else {
                        return None;
                    }
                }
                _ => unreachable!("normal form keeps x-exponents at 0 or 1"),
            }
        }
        Some((x, y))
    }

    pub fn multiply_reduce(&self, other: &Self) -> Result<Self, RingError> {
        if self.half_orders != other.half_orders {
            return Err(RingError::SpecMismatch(
                self.half_orders.clone(),
                other.half_orders.clone(),
            ));
        }
        let mut out = Self::zero(self.half_orders.clone());
        for a in &self.terms {
            for b in &other.terms {
                if let Some(m) = self.mul_monomials(a, b) {
                    out.xor_insert(m);
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Result<Self, RingError> {
        let mut out = Self::one(self.half_orders.clone());
        for _ in 0..e {
            out = out.multiply_reduce(self)?;
        }
        Ok(out)
    }

    pub fn is_nonzero(&self) -> bool {
        !self.terms.is_empty()
    }

    pub fn canonical_text(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(x, y)| {
                let mut vars = Vec::new();
                for (i, &e) in x.iter().enumerate() {
                    if e > 0 {
                        vars.push(format!("x{}", i + 1));
                    }
                }
                for (i, &e) in y.iter().enumerate() {
                    if e == 1 {
                        vars.push(format!("y{}", i + 1));
                    } else if e > 1 {
                        vars.push(format!("y{}^{}", i + 1, e));
                    }
                }
                if vars.is_empty() {
                    "1".to_string()
                } else {
                    vars.join("*")
                }
            })
            .collect();
        parts.join(" + ")
    }
}

impl fmt::Display for Mod2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical_text())
    }
}

// ---------------------------------------------------------------------------
// Obstruction polynomial builders
// ---------------------------------------------------------------------------

/// Either obstruction polynomial, with a shared non-vanishing test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ObstructionPoly {
    Chern(QuotientPolyZ),
    StiefelWhitney(Mod2Poly),
}

impl ObstructionPoly {
    pub fn is_nonzero(&self) -> bool {
        match self {
            ObstructionPoly::Chern(p) => p.is_nonzero(),
            ObstructionPoly::StiefelWhitney(p) => p.is_nonzero(),
        }
    }

    pub fn canonical_text(&self) -> String {
        match self {
            ObstructionPoly::Chern(p) => p.canonical_text(),
            ObstructionPoly::StiefelWhitney(p) => p.canonical_text(),
        }
    }
}

impl fmt::Display for ObstructionPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical_text())
    }
}

fn check_conformance(moduli: &[u32], eps: &Character) -> Result<(), RingError> {
    if eps.exponents().len() != moduli.len() {
        return Err(RingError::ArityMismatch(eps.to_string(), eps.exponents().len(), moduli.len()));
    }
    for (&e, &q) in eps.exponents().iter().zip(moduli) {
        if e >= q {
            return Err(RingError::ExponentOutOfRange(e));
        }
    }
    Ok(())
}

/// Top Chern class of the character sum: `Π_j (Σ_i ε_{j,i}·y_i)^d` in the
/// integral quotient ring. Each factor is reduced as it is multiplied in, so
/// intermediate term counts stay at the reduced ring's size. An empty
/// character list yields the constant 1.
pub fn build_chern_poly(
    moduli: &[u32],
    eps_list: &[Character],
    d: u32,
) -> Result<QuotientPolyZ, RingError> {
    let mut h = QuotientPolyZ::constant(moduli.to_vec(), 1);
    for eps in eps_list {
        check_conformance(moduli, eps)?;
        let coeffs: Vec<i64> = eps.exponents().iter().map(|&e| e as i64).collect();
        let form = QuotientPolyZ::linear_form(moduli.to_vec(), &coeffs);
        h = h.multiply_reduce(&form.pow(d)?)?;
    }
    Ok(h)
}

/// Indices of even factors and their half-orders `r_i = q_i / 2`.
fn even_factors(orders: &[u32]) -> (Vec<usize>, Vec<u32>) {
    let idx: Vec<usize> =
        orders.iter().enumerate().filter(|(_, &q)| q % 2 == 0).map(|(i, _)| i).collect();
    let half = idx.iter().map(|&i| orders[i] / 2).collect();
    (idx, half)
}

fn is_order_two(orders: &[u32], eps: &Character) -> bool {
    let mut nontrivial = false;
    for (&e, &q) in eps.exponents().iter().zip(orders) {
        if e == 0 {
            continue;
        }
        if q % 2 != 0 || e != q / 2 {
            return false;
        }
        nontrivial = true;
    }
    nontrivial
}

/// Top Stiefel–Whitney class in the mod-2 quotient ring:
/// `Π_{j≤m'} (x-form of ε_j)^d · Π_{j>m'} (y-form of ε_j)^d`.
///
/// `order2` must contain only characters of order 2; `rest` holds one
/// representative per remaining conjugate pair. Only even factors contribute
/// variables: an order-2 character puts `x_i` into its form per
/// [`Sw1Convention`], and a pair representative contributes `(ε_i mod 2)·y_i`.
/// Components over odd factors vanish in mod-2 cohomology and are dropped.
pub fn build_sw_poly(
    orders: &[u32],
    order2: &[Character],
    rest: &[Character],
    d: u32,
    convention: Sw1Convention,
) -> Result<Mod2Poly, RingError> {
    if d % 2 == 0 {
        return Err(RingError::EvenDegree(d));
    }
    let (even_idx, half_orders) = even_factors(orders);
    let mut h = Mod2Poly::one(half_orders.clone());
    for eps in order2 {
        check_conformance(orders, eps)?;
        if !is_order_two(orders, eps) {
            return Err(RingError::NotOrderTwo(eps.to_string()));
        }
        let coeffs: Vec<u8> = even_idx
            .iter()
            .map(|&i| {
                let e = eps.exponents()[i];
                match convention {
                    Sw1Convention::Order2Indicator => u8::from(e == orders[i] / 2),
                    Sw1Convention::LiteralMod2 => (e % 2) as u8,
                }
            })
            .collect();
        let form = Mod2Poly::x_form(half_orders.clone(), &coeffs);
        h = h.multiply_reduce(&form.pow(d)?)?;
    }
    for eps in rest {
        check_conformance(orders, eps)?;
        let coeffs: Vec<u8> = even_idx.iter().map(|&i| (eps.exponents()[i] % 2) as u8).collect();
        let form = Mod2Poly::y_form(half_orders.clone(), &coeffs);
        h = h.multiply_reduce(&form.pow(d)?)?;
    }
    Ok(h)
}

/// Orientability of the mod-2 route's bundle: true iff for each even factor
/// the order-2 characters hit its half-order an even number of times (the
/// coordinatewise sum of the order-2 inputs vanishes).
pub fn orientability(orders: &[u32], order2: &[Character]) -> Result<bool, RingError> {
    let (even_idx, _) = even_factors(orders);
    let mut parity = vec![0u32; even_idx.len()];
    for eps in order2 {
        check_conformance(orders, eps)?;
        if !is_order_two(orders, eps) {
            return Err(RingError::NotOrderTwo(eps.to_string()));
        }
        for (slot, &i) in even_idx.iter().enumerate() {
            if eps.exponents()[i] == orders[i] / 2 {
                parity[slot] += 1;
            }
        }
    }
    Ok(parity.iter().all(|&c| c % 2 == 0))
}
