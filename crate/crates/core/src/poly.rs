//! Univariate polynomials over the rationals, just enough to find the rational
//! roots of a determinant polynomial.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::linalg::Scalar;

/// Coefficients from the constant term upwards; no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    coeffs: Vec<Scalar>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Scalar>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn coefficients(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        self.coeffs.iter().rev().fold(Scalar::zero(), |acc, c| acc * x + c)
    }

    /// The unique polynomial of degree `< points.len()` through the points
    /// (Newton divided differences).
    pub fn interpolate(points: &[(Scalar, Scalar)]) -> Self {
        let n = points.len();
        let xs: Vec<&Scalar> = points.iter().map(|(x, _)| x).collect();
        let mut table: Vec<Scalar> = points.iter().map(|(_, y)| y.clone()).collect();
        for level in 1..n {
            for i in (level..n).rev() {
                let num = &table[i] - &table[i - 1];
                let den = xs[i] - xs[i - level];
                table[i] = num / den;
            }
        }
        // Expand the Newton form from the innermost term outwards.
        let mut coeffs: Vec<Scalar> = Vec::new();
        for i in (0..n).rev() {
            // coeffs := coeffs * (x - xs[i]) + table[i]
            let mut next = vec![Scalar::zero(); coeffs.len() + 1];
            for (k, c) in coeffs.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= c * xs[i];
            }
            next[0] += &table[i];
            coeffs = next;
        }
        Self::new(coeffs)
    }

    /// All distinct rational roots, ascending. The zero polynomial has no
    /// finite root set and yields an empty list; callers must check for it.
    pub fn rational_roots(&self) -> Vec<Scalar> {
        if self.coeffs.len() <= 1 {
            return Vec::new();
        }
        let mut ints = integer_coefficients(&self.coeffs);
        let mut roots = Vec::new();
        let shift = ints.iter().position(|c| !c.is_zero()).unwrap_or(0);
        if shift > 0 {
            roots.push(Scalar::zero());
            ints.drain(..shift);
        }
        if ints.len() > 1 {
            let constant = ints[0].abs();
            let leading = ints.last().expect("nonempty").abs();
            let ps = divisors(&constant);
            let qs = divisors(&leading);
            let poly = Polynomial::new(ints.iter().cloned().map(BigRational::from_integer).collect());
            for p in &ps {
                for q in &qs {
                    if !p.gcd(q).is_one() {
                        continue;
                    }
                    for sign in [1, -1] {
                        let cand = BigRational::new(p * BigInt::from(sign), q.clone());
                        if poly.eval(&cand).is_zero() {
                            roots.push(cand);
                        }
                    }
                }
            }
        }
        roots.sort();
        roots.dedup();
        roots
    }
}

/// Scales by the lcm of denominators and divides out the content.
fn integer_coefficients(coeffs: &[Scalar]) -> Vec<BigInt> {
    let lcm = coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = coeffs.iter().map(|c| c.numer() * (&lcm / c.denom())).collect();
    let content = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if content.is_zero() || content.is_one() {
        return ints;
    }
    ints.into_iter().map(|c| c / &content).collect()
}

/// Positive divisors of a positive integer by trial division.
fn divisors(n: &BigInt) -> Vec<BigInt> {
    if let Some(small) = n.to_u64() {
        let mut out = Vec::new();
        let mut d = 1u64;
        while d.saturating_mul(d) <= small {
            if small % d == 0 {
                out.push(BigInt::from(d));
                if d != small / d {
                    out.push(BigInt::from(small / d));
                }
            }
            d += 1;
        }
        return out;
    }
    let mut out = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= *n {
        if (n % &d).is_zero() {
            let other = n / &d;
            if other != d {
                out.push(other);
            }
            out.push(d.clone());
        }
        d += 1;
    }
    out
}
