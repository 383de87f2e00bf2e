//! Finite abelian groups `Z_{q1} ⊕ … ⊕ Z_{qk}` and their one-dimensional
//! unitary characters.
//!
//! Characters are evaluated exactly: `χ_ε(g) = Π_j ζ_{q_j}^{ε_j b_j}` is kept
//! as an integer exponent `t` modulo `L = lcm(q_1,…,q_k)`, with the complex
//! value `exp(2πi·t/L)` derived on demand. All equality tests downstream work
//! on exponents, never on floats.

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;
use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("coordinate count {got} does not match group rank {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("coordinate {value} out of range for factor Z_{order}")]
    CoordinateOutOfRange { value: u32, order: u32 },
    #[error("group factor orders must be >= 1")]
    InvalidOrder,
}

/// A finite abelian group given as a list of cyclic factor orders.
///
/// Trivial factors (`q_j = 1`) are allowed and contribute nothing; this keeps
/// callers that decompose `q = p^k · r` uniform when `r = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupSpec {
    orders: Vec<u32>,
}

impl GroupSpec {
    pub fn new(orders: Vec<u32>) -> Result<Self, GroupError> {
        if orders.is_empty() || orders.iter().any(|&q| q == 0) {
            return Err(GroupError::InvalidOrder);
        }
        Ok(Self { orders })
    }

    pub fn orders(&self) -> &[u32] {
        &self.orders
    }

    /// Number of cyclic factors (including trivial ones).
    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    /// Group order `q = Π q_j`.
    pub fn order(&self) -> u64 {
        self.orders.iter().map(|&q| q as u64).product()
    }

    /// Common character denominator `L = lcm(q_1,…,q_k)`.
    pub fn lcm(&self) -> u64 {
        self.orders.iter().fold(1u64, |l, &q| l.lcm(&(q as u64)))
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement { coords: vec![0; self.rank()] }
    }

    fn check_coords(&self, coords: &[u32]) -> Result<(), GroupError> {
        if coords.len() != self.rank() {
            return Err(GroupError::DimensionMismatch { expected: self.rank(), got: coords.len() });
        }
        for (&c, &q) in coords.iter().zip(&self.orders) {
            if c >= q {
                return Err(GroupError::CoordinateOutOfRange { value: c, order: q });
            }
        }
        Ok(())
    }

    pub fn element(&self, coords: Vec<u32>) -> Result<GroupElement, GroupError> {
        self.check_coords(&coords)?;
        Ok(GroupElement { coords })
    }

    pub fn character(&self, exponents: Vec<u32>) -> Result<Character, GroupError> {
        self.check_coords(&exponents)?;
        Ok(Character { exponents })
    }

    /// All `q` elements in lexicographic order of coordinates; the identity is
    /// first. This ordering is the canonical indexing used everywhere else.
    pub fn enumerate_elements(&self) -> Vec<GroupElement> {
        let q = self.order() as usize;
        let mut out = Vec::with_capacity(q);
        let mut coords = vec![0u32; self.rank()];
        loop {
            out.push(GroupElement { coords: coords.clone() });
            // odometer increment, last coordinate fastest
            let mut j = self.rank();
            loop {
                if j == 0 {
                    return out;
                }
                j -= 1;
                coords[j] += 1;
                if coords[j] < self.orders[j] {
                    break;
                }
                coords[j] = 0;
            }
        }
    }

    /// Characters enumerate exactly like elements (exponent vectors are
    /// coordinate vectors).
    pub fn enumerate_characters(&self) -> Vec<Character> {
        self.enumerate_elements()
            .into_iter()
            .map(|g| Character { exponents: g.coords })
            .collect()
    }

    /// Lexicographic rank of an element; inverse of `element_at`.
    pub fn rank_of(&self, g: &GroupElement) -> usize {
        let mut r = 0usize;
        for (&b, &q) in g.coords.iter().zip(&self.orders) {
            r = r * q as usize + b as usize;
        }
        r
    }

    pub fn element_at(&self, mut rank: usize) -> GroupElement {
        let mut coords = vec![0u32; self.rank()];
        for j in (0..self.rank()).rev() {
            let q = self.orders[j] as usize;
            coords[j] = (rank % q) as u32;
            rank /= q;
        }
        GroupElement { coords }
    }

    pub fn rank_of_character(&self, eps: &Character) -> usize {
        self.rank_of(&GroupElement { coords: eps.exponents.clone() })
    }

    pub fn character_at(&self, rank: usize) -> Character {
        Character { exponents: self.element_at(rank).coords }
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        let coords = a
            .coords
            .iter()
            .zip(&b.coords)
            .zip(&self.orders)
            .map(|((&x, &y), &q)| (x + y) % q)
            .collect();
        GroupElement { coords }
    }

    pub fn neg(&self, a: &GroupElement) -> GroupElement {
        let coords = a
            .coords
            .iter()
            .zip(&self.orders)
            .map(|(&x, &q)| if x == 0 { 0 } else { q - x })
            .collect();
        GroupElement { coords }
    }

    pub fn neg_character(&self, eps: &Character) -> Character {
        Character { exponents: self.neg(&GroupElement { coords: eps.exponents.clone() }).coords }
    }

    /// Order of a character: smallest `t ≥ 1` with `t·ε ≡ 0` coordinatewise.
    /// Equals `lcm_j(q_j / gcd(q_j, ε_j))`, which divides `L`.
    pub fn character_order(&self, eps: &Character) -> u64 {
        eps.exponents
            .iter()
            .zip(&self.orders)
            .fold(1u64, |t, (&e, &q)| t.lcm(&((q as u64) / (q as u64).gcd(&(e as u64)))))
    }

    pub fn is_order_two(&self, eps: &Character) -> bool {
        self.character_order(eps) == 2
    }

    /// Exact character evaluation: `t = Σ_j ε_j·b_j·(L/q_j) mod L`, the value
    /// being `ζ_L^t`.
    pub fn eval_character(
        &self,
        eps: &Character,
        g: &GroupElement,
    ) -> Result<RootOfUnity, GroupError> {
        self.check_coords(&eps.exponents)?;
        self.check_coords(&g.coords)?;
        let l = self.lcm();
        let mut t: u64 = 0;
        for ((&e, &b), &q) in eps.exponents.iter().zip(&g.coords).zip(&self.orders) {
            let w = l / q as u64;
            t = (t + (e as u64 * b as u64 % l) * w) % l;
        }
        Ok(RootOfUnity { numerator: t, denominator: l })
    }
}

/// Every group spec with order at most `bound`, one per multiset of factor
/// orders `>= 2` (plus the trivial group). Handy for sweeps and property
/// tests; note isomorphic groups appear once per factorization, e.g. `[6]`
/// and `[2,3]` are both listed.
pub fn specs_with_order_at_most(bound: u64) -> Vec<GroupSpec> {
    fn rec(n: u64, min: u64, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        out.push(prefix.clone());
        let mut f = min;
        while f <= n {
            if n % f == 0 {
                prefix.push(f as u32);
                rec(n / f, f, prefix, out);
                prefix.pop();
            }
            f += 1;
        }
    }
    let mut raw = Vec::new();
    for n in 1..=bound {
        rec(n, 2, &mut Vec::new(), &mut raw);
    }
    raw.sort();
    raw.dedup();
    raw.into_iter()
        .map(|orders| {
            let orders = if orders.is_empty() { vec![1] } else { orders };
            GroupSpec::new(orders).expect("factor orders are positive")
        })
        .collect()
}

/// Group element `(b_1,…,b_k)` with `0 ≤ b_j < q_j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupElement {
    coords: Vec<u32>,
}

impl GroupElement {
    pub fn coords(&self) -> &[u32] {
        &self.coords
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.coords.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(","))
    }
}

/// Character exponent vector `ε = (ε_1,…,ε_k)` with `0 ≤ ε_j < q_j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Character {
    exponents: Vec<u32>,
}

impl Character {
    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn is_trivial(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }
}

impl fmt::Display for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.exponents.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(","))
    }
}

/// An exact root of unity `ζ_L^t`, i.e. `exp(2πi·t/L)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RootOfUnity {
    numerator: u64,
    denominator: u64,
}

impl RootOfUnity {
    pub fn exponent(&self) -> u64 {
        self.numerator
    }

    pub fn denominator(&self) -> u64 {
        self.denominator
    }

    pub fn conj(&self) -> RootOfUnity {
        let n = if self.numerator == 0 { 0 } else { self.denominator - self.numerator };
        RootOfUnity { numerator: n, denominator: self.denominator }
    }

    pub fn mul(&self, other: &RootOfUnity) -> RootOfUnity {
        assert_eq!(self.denominator, other.denominator, "mismatched root denominators");
        RootOfUnity {
            numerator: (self.numerator + other.numerator) % self.denominator,
            denominator: self.denominator,
        }
    }

    pub fn value(&self) -> Complex64 {
        Complex64::from_polar(1.0, TAU * self.numerator as f64 / self.denominator as f64)
    }
}
