//! Forward and inverse Fourier transforms of functions `G → C^d`, plus
//! synthesis of real-valued functions with a prescribed annihilated spectrum.
//!
//! Transforms are the naive `O(q²)` character sums; group orders here are a
//! few hundred at most and exactness of the character exponents matters more
//! than speed.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_chacha::rand_core::SeedableRng;
use thiserror::Error;

use crate::group::{Character, GroupElement, GroupSpec};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FourierError {
    #[error("table dimension must be >= 1")]
    ZeroDimension,
    #[error("entry count {got} does not match group order {expected}")]
    WrongEntryCount { expected: usize, got: usize },
    #[error("annihilated set is not closed under negation (missing {0})")]
    NotNegationClosed(String),
    #[error("character does not belong to the group: {0}")]
    ForeignCharacter(String),
}

/// Values `F_i(g)` of a function `G → C^d`, indexed by the canonical
/// (lexicographic) element rank.
#[derive(Debug, Clone)]
pub struct ValueTable {
    spec: GroupSpec,
    d: usize,
    /// `values[rank(g)][i]`
    values: Vec<Vec<Complex64>>,
}

/// Fourier coefficients `c_{i,ε}`, indexed by the canonical character rank.
#[derive(Debug, Clone)]
pub struct SpectrumTable {
    spec: GroupSpec,
    d: usize,
    /// `coeffs[rank(ε)][i]`
    coeffs: Vec<Vec<Complex64>>,
}

impl ValueTable {
    pub fn new(spec: GroupSpec, d: usize, values: Vec<Vec<Complex64>>) -> Result<Self, FourierError> {
        if d == 0 {
            return Err(FourierError::ZeroDimension);
        }
        let q = spec.order() as usize;
        if values.len() != q {
            return Err(FourierError::WrongEntryCount { expected: q, got: values.len() });
        }
        for row in &values {
            if row.len() != d {
                return Err(FourierError::WrongEntryCount { expected: d, got: row.len() });
            }
        }
        Ok(Self { spec, d, values })
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn value(&self, g: &GroupElement) -> &[Complex64] {
        &self.values[self.spec.rank_of(g)]
    }

    pub fn values(&self) -> &[Vec<Complex64>] {
        &self.values
    }

    /// Largest imaginary part in absolute value; a real-valued table has this
    /// at rounding level.
    pub fn max_imag(&self) -> f64 {
        self.values
            .iter()
            .flatten()
            .map(|v| v.im.abs())
            .fold(0.0, f64::max)
    }
}

impl SpectrumTable {
    pub fn new(spec: GroupSpec, d: usize, coeffs: Vec<Vec<Complex64>>) -> Result<Self, FourierError> {
        if d == 0 {
            return Err(FourierError::ZeroDimension);
        }
        let q = spec.order() as usize;
        if coeffs.len() != q {
            return Err(FourierError::WrongEntryCount { expected: q, got: coeffs.len() });
        }
        for row in &coeffs {
            if row.len() != d {
                return Err(FourierError::WrongEntryCount { expected: d, got: row.len() });
            }
        }
        Ok(Self { spec, d, coeffs })
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn coeff(&self, i: usize, eps: &Character) -> Complex64 {
        self.coeffs[self.spec.rank_of_character(eps)][i]
    }

    pub fn coeffs(&self) -> &[Vec<Complex64>] {
        &self.coeffs
    }

    /// Max over `(i,ε)` of `|conj(c_{i,ε}) - c_{i,-ε}|`; zero for spectra of
    /// real-valued functions.
    pub fn conjugate_symmetry_defect(&self) -> f64 {
        let chars = self.spec.enumerate_characters();
        let mut worst: f64 = 0.0;
        for eps in &chars {
            let r = self.spec.rank_of_character(eps);
            let rn = self.spec.rank_of_character(&self.spec.neg_character(eps));
            for i in 0..self.d {
                worst = worst.max((self.coeffs[r][i].conj() - self.coeffs[rn][i]).norm());
            }
        }
        worst
    }
}

/// `c_{i,ε} = (1/q) Σ_u F_i(u) χ_ε(u)^{-1}`.
pub fn forward_transform(vals: &ValueTable) -> SpectrumTable {
    let spec = vals.spec.clone();
    let q = spec.order() as usize;
    let els = spec.enumerate_elements();
    let chars = spec.enumerate_characters();
    let mut coeffs = vec![vec![Complex64::new(0.0, 0.0); vals.d]; q];
    for (ci, eps) in chars.iter().enumerate() {
        for (ui, u) in els.iter().enumerate() {
            let w = spec
                .eval_character(eps, u)
                .expect("table and characters share the spec")
                .conj()
                .value();
            for i in 0..vals.d {
                coeffs[ci][i] += vals.values[ui][i] * w;
            }
        }
        for c in &mut coeffs[ci] {
            *c /= q as f64;
        }
    }
    SpectrumTable { spec, d: vals.d, coeffs }
}

/// `F_i(g) = Σ_ε c_{i,ε} χ_ε(g)`.
pub fn inverse_transform(spectrum: &SpectrumTable) -> ValueTable {
    let spec = spectrum.spec.clone();
    let q = spec.order() as usize;
    let els = spec.enumerate_elements();
    let chars = spec.enumerate_characters();
    let mut values = vec![vec![Complex64::new(0.0, 0.0); spectrum.d]; q];
    for (gi, g) in els.iter().enumerate() {
        for (ci, eps) in chars.iter().enumerate() {
            let w = spec
                .eval_character(eps, g)
                .expect("table and characters share the spec")
                .value();
            for i in 0..spectrum.d {
                values[gi][i] += spectrum.coeffs[ci][i] * w;
            }
        }
    }
    ValueTable { spec, d: spectrum.d, values }
}

/// Parseval defect `max_i |(1/q)·Σ_g |F_i(g)|² − Σ_ε |c_{i,ε}|²|`.
pub fn parseval_defect(vals: &ValueTable, spectrum: &SpectrumTable) -> f64 {
    let q = vals.spec.order() as f64;
    (0..vals.d)
        .map(|i| {
            let e_time: f64 = vals.values.iter().map(|row| row[i].norm_sqr()).sum::<f64>() / q;
            let e_freq: f64 = spectrum.coeffs.iter().map(|row| row[i].norm_sqr()).sum();
            (e_time - e_freq).abs()
        })
        .fold(0.0, f64::max)
}

/// Draws a random real-valued function whose transform vanishes on the
/// annihilated set.
///
/// Coefficients for kept characters get real and imaginary parts uniform in
/// `[-1,1]`; conjugate pairs are symmetrized (`c_{-ε} = conj(c_ε)`) and
/// characters of order ≤ 2 get purely real coefficients, so the synthesized
/// values are real. Deterministic per seed.
pub fn synthesize_constrained(
    spec: &GroupSpec,
    d: usize,
    annihilated: &[Character],
    seed: u64,
) -> Result<ValueTable, FourierError> {
    let spectrum = synthesize_spectrum(spec, d, annihilated, seed)?;
    Ok(inverse_transform(&spectrum))
}

/// The spectrum half of [`synthesize_constrained`], exposed so tests can
/// compare against the prescribed coefficients directly.
pub fn synthesize_spectrum(
    spec: &GroupSpec,
    d: usize,
    annihilated: &[Character],
    seed: u64,
) -> Result<SpectrumTable, FourierError> {
    if d == 0 {
        return Err(FourierError::ZeroDimension);
    }
    let q = spec.order() as usize;
    let mut kill = vec![false; q];
    for eps in annihilated {
        if eps.exponents().len() != spec.rank() {
            return Err(FourierError::ForeignCharacter(eps.to_string()));
        }
        kill[spec.rank_of_character(eps)] = true;
    }
    for eps in annihilated {
        if !kill[spec.rank_of_character(&spec.neg_character(eps))] {
            return Err(FourierError::NotNegationClosed(spec.neg_character(eps).to_string()));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let chars = spec.enumerate_characters();
    let mut coeffs = vec![vec![Complex64::new(0.0, 0.0); d]; q];
    for (ci, eps) in chars.iter().enumerate() {
        if kill[ci] {
            continue;
        }
        let neg_rank = spec.rank_of_character(&spec.neg_character(eps));
        if neg_rank == ci {
            // order 1 or 2: real-valued character, real coefficient
            for i in 0..d {
                coeffs[ci][i] = Complex64::new(rng.gen_range(-1.0..=1.0), 0.0);
            }
        } else if ci < neg_rank {
            for i in 0..d {
                let c = Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0));
                coeffs[ci][i] = c;
                coeffs[neg_rank][i] = c.conj();
            }
        }
    }
    SpectrumTable::new(spec.clone(), d, coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::specs_with_order_at_most;

    fn spec(orders: &[u32]) -> GroupSpec {
        GroupSpec::new(orders.to_vec()).unwrap()
    }

    fn random_table(spec: &GroupSpec, d: usize, seed: u64) -> ValueTable {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = spec.order() as usize;
        let values = (0..q)
            .map(|_| {
                (0..d)
                    .map(|_| Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)))
                    .collect()
            })
            .collect();
        ValueTable::new(spec.clone(), d, values).unwrap()
    }

    #[test]
    fn constant_function_transforms_to_mean() {
        let g = spec(&[3, 2]);
        let c = Complex64::new(0.75, -0.25);
        let vals =
            ValueTable::new(g.clone(), 1, vec![vec![c]; 6]).unwrap();
        let sp = forward_transform(&vals);
        for (ci, eps) in g.enumerate_characters().iter().enumerate() {
            let expect = if eps.is_trivial() { c } else { Complex64::new(0.0, 0.0) };
            assert!((sp.coeffs()[ci][0] - expect).norm() < 1e-14);
        }
    }

    #[test]
    fn sign_function_on_z2() {
        let g = spec(&[2]);
        let vals = ValueTable::new(
            g.clone(),
            1,
            vec![vec![Complex64::new(1.0, 0.0)], vec![Complex64::new(-1.0, 0.0)]],
        )
        .unwrap();
        let sp = forward_transform(&vals);
        assert!((sp.coeffs()[0][0]).norm() < 1e-15);
        assert!((sp.coeffs()[1][0] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn single_character_on_z3() {
        // F(b) = ζ_3^b picks out c_1 = 1
        let g = spec(&[3]);
        let one = g.character(vec![1]).unwrap();
        let values = g
            .enumerate_elements()
            .iter()
            .map(|b| vec![g.eval_character(&one, b).unwrap().value()])
            .collect();
        let sp = forward_transform(&ValueTable::new(g.clone(), 1, values).unwrap());
        assert!((sp.coeffs()[0][0]).norm() < 1e-14);
        assert!((sp.coeffs()[1][0] - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        assert!((sp.coeffs()[2][0]).norm() < 1e-14);
    }

    #[test]
    fn zero_spectrum_gives_zero_function() {
        let g = spec(&[4]);
        let sp = SpectrumTable::new(g.clone(), 2, vec![vec![Complex64::new(0.0, 0.0); 2]; 4]).unwrap();
        let vals = inverse_transform(&sp);
        assert!(vals.values().iter().flatten().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn trivial_coefficient_gives_constant() {
        let g = spec(&[3, 2]);
        let v = Complex64::new(-1.5, 0.5);
        let mut coeffs = vec![vec![Complex64::new(0.0, 0.0); 1]; 6];
        coeffs[0][0] = v;
        let vals = inverse_transform(&SpectrumTable::new(g, 1, coeffs).unwrap());
        for row in vals.values() {
            assert!((row[0] - v).norm() < 1e-14);
        }
    }

    #[test]
    fn roundtrip_on_small_groups() {
        for g in specs_with_order_at_most(24) {
            for seed in 0..100 {
                let vals = random_table(&g, 2, seed);
                let back = inverse_transform(&forward_transform(&vals));
                let worst = vals
                    .values()
                    .iter()
                    .zip(back.values())
                    .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).norm()))
                    .fold(0.0, f64::max);
                assert!(worst < 1e-12, "roundtrip error {worst} on {:?} seed {seed}", g.orders());
            }
        }
    }

    #[test]
    fn roundtrip_mixed_rank_group() {
        let g = spec(&[3, 3, 2]);
        let vals = random_table(&g, 2, 7);
        let back = inverse_transform(&forward_transform(&vals));
        let worst = vals
            .values()
            .iter()
            .zip(back.values())
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).norm()))
            .fold(0.0, f64::max);
        assert!(worst < 1e-12);
    }

    #[test]
    fn parseval_holds() {
        for g in specs_with_order_at_most(12) {
            let vals = random_table(&g, 3, 11);
            let sp = forward_transform(&vals);
            assert!(parseval_defect(&vals, &sp) < 1e-10);
        }
    }

    #[test]
    fn reality_iff_conjugate_symmetry() {
        let g = spec(&[4, 3]);
        // real table -> symmetric spectrum
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let values = (0..12)
            .map(|_| vec![Complex64::new(rng.gen_range(-1.0..=1.0), 0.0)])
            .collect();
        let vals = ValueTable::new(g.clone(), 1, values).unwrap();
        let sp = forward_transform(&vals);
        assert!(sp.conjugate_symmetry_defect() < 1e-12);

        // symmetric spectrum -> real table (synthesize with empty annihilated set)
        let vals = synthesize_constrained(&g, 2, &[], 9).unwrap();
        assert!(vals.max_imag() < 1e-12);

        // a genuinely complex table fails both ways
        let vals = random_table(&g, 1, 3);
        let sp = forward_transform(&vals);
        assert!(vals.max_imag() > 1e-3);
        assert!(sp.conjugate_symmetry_defect() > 1e-3);
    }

    #[test]
    fn synthesize_all_nonzero_annihilated_is_constant() {
        let g = spec(&[3, 2]);
        let annihilated: Vec<_> =
            g.enumerate_characters().into_iter().filter(|c| !c.is_trivial()).collect();
        let vals = synthesize_constrained(&g, 2, &annihilated, 42).unwrap();
        let first = vals.values()[0].clone();
        for row in vals.values() {
            for (a, b) in row.iter().zip(&first) {
                assert!((a - b).norm() < 1e-12);
            }
            assert!(row.iter().all(|v| v.im.abs() < 1e-12));
        }
    }

    #[test]
    fn synthesize_rejects_unpaired_set() {
        let g = spec(&[5]);
        let a = vec![g.character(vec![1]).unwrap()];
        assert!(matches!(
            synthesize_constrained(&g, 1, &a, 0),
            Err(FourierError::NotNegationClosed(_))
        ));
    }

    #[test]
    fn synthesize_block_sum_identity() {
        // annihilate (Z_2 - 0) ⊕ 0 inside Z_2 ⊕ Z_3: for every h the block sum
        // F(h,0)+F(h,1)+F(h,2) equals 3·c_0
        let g = spec(&[2, 3]);
        let annihilated = vec![g.character(vec![1, 0]).unwrap()];
        for seed in 0..20 {
            let sp = synthesize_spectrum(&g, 2, &annihilated, seed).unwrap();
            let vals = inverse_transform(&sp);
            let c0 = sp.coeffs()[0].clone();
            for h in 0..2u32 {
                for i in 0..2 {
                    let mut s = Complex64::new(0.0, 0.0);
                    for b in 0..3u32 {
                        s += vals.value(&g.element(vec![h, b]).unwrap())[i];
                    }
                    assert!((s - c0[i] * 3.0).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn synthesis_is_deterministic_per_seed() {
        let g = spec(&[3, 3]);
        let a: Vec<_> = g
            .enumerate_characters()
            .into_iter()
            .filter(|c| c.exponents().iter().all(|&e| e != 0))
            .collect();
        let v1 = synthesize_constrained(&g, 2, &a, 123).unwrap();
        let v2 = synthesize_constrained(&g, 2, &a, 123).unwrap();
        for (a_row, b_row) in v1.values().iter().zip(v2.values()) {
            assert_eq!(a_row, b_row);
        }
    }
}
