use std::fmt;

use num_complex::Complex64;

use super::polynomial::{coefficient_mismatch, Polynomial};
use crate::error::{Error, Result};

/// SISO rational transfer function `num(s) / den(s)`.
///
/// Always stored in canonical form: the denominator is monic and the
/// numerator carries the same scaling. Products and sums never cancel
/// common factors on their own; call [`TransferFunction::minreal`].
#[derive(Debug, Clone, PartialEq)]
pub struct TransferFunction {
    num: Polynomial,
    den: Polynomial,
}

impl TransferFunction {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        let lead = den.leading();
        Ok(Self {
            num: num.scale(1.0 / lead),
            den: den.scale(1.0 / lead),
        })
    }

    /// Shorthand for ascending coefficient slices.
    pub fn from_coeffs(num: &[f64], den: &[f64]) -> Result<Self> {
        Self::new(Polynomial::new(num.to_vec()), Polynomial::new(den.to_vec()))
    }

    pub fn gain(k: f64) -> Self {
        Self {
            num: Polynomial::constant(k),
            den: Polynomial::one(),
        }
    }

    /// `1/s`
    pub fn integrator() -> Self {
        Self {
            num: Polynomial::one(),
            den: Polynomial::s(),
        }
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn is_proper(&self) -> bool {
        self.num.degree() <= self.den.degree() || self.num.is_zero()
    }

    pub fn is_strictly_proper(&self) -> bool {
        self.num.is_zero() || self.num.degree() < self.den.degree()
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        self.num.eval(s) / self.den.eval(s)
    }

    /// Response at `s = j omega` for every frequency in `omega`.
    pub fn freq_response(&self, omega: &[f64]) -> Vec<Complex64> {
        omega
            .iter()
            .map(|&w| self.eval(Complex64::new(0.0, w)))
            .collect()
    }

    pub fn mul(&self, rhs: &TransferFunction) -> TransferFunction {
        // Both denominators are monic, so the product is too.
        Self {
            num: &self.num * &rhs.num,
            den: &self.den * &rhs.den,
        }
    }

    pub fn add(&self, rhs: &TransferFunction) -> TransferFunction {
        if rhs.num.is_zero() {
            return self.clone();
        }
        if self.num.is_zero() {
            return rhs.clone();
        }
        let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        Self {
            num,
            den: &self.den * &rhs.den,
        }
    }

    pub fn sub(&self, rhs: &TransferFunction) -> TransferFunction {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> TransferFunction {
        Self {
            num: -&self.num,
            den: self.den.clone(),
        }
    }

    pub fn scale(&self, k: f64) -> TransferFunction {
        Self {
            num: self.num.scale(k),
            den: self.den.clone(),
        }
    }

    pub fn inv(&self) -> Result<TransferFunction> {
        Self::new(self.den.clone(), self.num.clone())
    }

    /// `G / (1 + G)`, formed without expanding `1 + G` as a separate sum.
    pub fn feedback_unity(&self) -> Result<TransferFunction> {
        Self::new(self.num.clone(), &self.den + &self.num)
    }

    /// Cancels pole/zero pairs closer than `tol` (absolute distance in the
    /// complex plane). Pairing is greedy: each zero, in order, takes the
    /// nearest still-unpaired pole.
    pub fn minreal(&self, tol: f64) -> Result<TransferFunction> {
        if self.num.is_zero() || self.num.degree() == 0 || self.den.degree() == 0 {
            return Ok(self.clone());
        }
        let zeros = self.num.roots()?;
        let poles = self.den.roots()?;
        let mut pole_used = vec![false; poles.len()];
        let mut common = Vec::new();
        for z in &zeros {
            let nearest = poles
                .iter()
                .enumerate()
                .filter(|(i, _)| !pole_used[*i])
                .map(|(i, p)| (i, (p - z).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1));
            if let Some((i, dist)) = nearest {
                if dist <= tol {
                    pole_used[i] = true;
                    // Average the pair so a conjugate pair stays a conjugate pair.
                    common.push((poles[i] + z) * 0.5);
                }
            }
        }
        if common.is_empty() {
            return Ok(self.clone());
        }
        let factor = Polynomial::from_roots(&conjugate_closed(common), 1.0);
        let (num, _) = self.num.div_rem(&factor)?;
        let (den, _) = self.den.div_rem(&factor)?;
        Self::new(num, den)
    }

    /// Roots of the denominator.
    pub fn poles(&self) -> Result<Vec<Complex64>> {
        if self.den.degree() == 0 {
            return Err(Error::NoPoles);
        }
        self.den.roots()
    }

    pub fn zeros(&self) -> Result<Vec<Complex64>> {
        self.num.roots()
    }

    /// All poles strictly in the open left half-plane.
    pub fn is_stable(&self) -> Result<bool> {
        Ok(self.poles()?.iter().all(|p| p.re < 0.0))
    }

    /// Per-coefficient relative mismatch after monic normalization. Both
    /// operands are already canonical, so this compares them directly.
    pub fn coefficient_mismatch(&self, other: &TransferFunction) -> f64 {
        coefficient_mismatch(&self.num, &other.num).max(coefficient_mismatch(&self.den, &other.den))
    }

    /// Mismatch of the cross products `a.num*b.den` and `b.num*a.den`.
    /// Zero for equal rational functions even when one carries an
    /// uncancelled common factor.
    pub fn equivalence_mismatch(&self, other: &TransferFunction) -> f64 {
        let lhs = &self.num * &other.den;
        let rhs = &other.num * &self.den;
        coefficient_mismatch(&lhs, &rhs)
    }
}

/// Restores exact conjugate symmetry in a root list that may have lost it
/// through averaging.
fn conjugate_closed(mut roots: Vec<Complex64>) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(roots.len());
    while let Some(r) = roots.pop() {
        if r.im == 0.0 {
            out.push(r);
            continue;
        }
        let partner = roots
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - r.conj()).norm().total_cmp(&(b.1 - r.conj()).norm()))
            .map(|(i, _)| i);
        match partner {
            Some(i) if (roots[i] - r.conj()).norm() <= 1e-6 * r.norm().max(1.0) => {
                let p = roots.swap_remove(i);
                let mid = Complex64::new(0.5 * (r.re + p.re), 0.5 * (r.im.abs() + p.im.abs()));
                out.push(mid);
                out.push(mid.conj());
            }
            _ => out.push(Complex64::new(r.re, 0.0)),
        }
    }
    out
}

impl fmt::Display for TransferFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.num, self.den)
    }
}
