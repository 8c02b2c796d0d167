use std::fmt;
use std::ops::{Add, Mul};

/// Polynomial over `F2`, coefficients lowest degree first.
///
/// The coefficient vector never ends in a zero; the zero polynomial is the
/// empty vector and has degree `-1`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct GF2Poly {
    coeffs: Vec<bool>,
}

impl GF2Poly {
    pub fn zero() -> Self {
        GF2Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::monomial(0)
    }

    /// `x^k`.
    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![false; k + 1];
        coeffs[k] = true;
        GF2Poly { coeffs }
    }

    pub fn from_coeffs(mut coeffs: Vec<bool>) -> Self {
        while coeffs.last() == Some(&false) {
            coeffs.pop();
        }
        GF2Poly { coeffs }
    }

    /// Polynomial whose coefficient bits are the bits of `mask`
    /// (bit `i` is the coefficient of `x^i`).
    pub fn from_bits(mask: u64) -> Self {
        Self::from_coeffs((0..64).map(|i| mask >> i & 1 == 1).collect())
    }

    /// All polynomials of degree `<= max_degree`, zero included.
    pub fn all_up_to_degree(max_degree: usize) -> impl Iterator<Item = GF2Poly> {
        assert!(max_degree < 63);
        (0u64..1 << (max_degree + 1)).map(GF2Poly::from_bits)
    }

    pub fn coeffs(&self) -> &[bool] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> bool {
        self.coeffs.get(i).copied().unwrap_or(false)
    }

    pub fn degree(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Formal derivative: `i * a_i` reduced mod 2.
    pub fn derivative(&self) -> GF2Poly {
        Self::from_coeffs(
            (1..self.coeffs.len())
                .map(|i| i % 2 == 1 && self.coeffs[i])
                .collect(),
        )
    }

    /// `self * x^k`.
    pub fn shift(&self, k: usize) -> GF2Poly {
        if self.is_zero() {
            return GF2Poly::zero();
        }
        let mut coeffs = vec![false; k];
        coeffs.extend_from_slice(&self.coeffs);
        GF2Poly { coeffs }
    }
}

impl Add for &GF2Poly {
    type Output = GF2Poly;
    fn add(self, rhs: &GF2Poly) -> GF2Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        GF2Poly::from_coeffs((0..n).map(|i| self.coeff(i) ^ rhs.coeff(i)).collect())
    }
}

impl Mul for &GF2Poly {
    type Output = GF2Poly;
    fn mul(self, rhs: &GF2Poly) -> GF2Poly {
        if self.is_zero() || rhs.is_zero() {
            return GF2Poly::zero();
        }
        let mut out = vec![false; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a {
                for (j, &b) in rhs.coeffs.iter().enumerate() {
                    out[i + j] ^= b;
                }
            }
        }
        GF2Poly::from_coeffs(out)
    }
}

impl fmt::Display for GF2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for i in (0..self.coeffs.len()).rev().filter(|&i| self.coeffs[i]) {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match i {
                0 => f.write_str("1")?,
                1 => f.write_str("x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for GF2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF2Poly({self})")
    }
}
