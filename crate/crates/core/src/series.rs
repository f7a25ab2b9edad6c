//! Truncated formal power series in `g` with exact rational coefficients.
//!
//! A [`Series`] of order `N` stores the coefficients of `g^0..=g^N`; everything
//! beyond is discarded. Binary operations between series of different orders
//! produce a result at the smaller order.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("division by a series with zero constant term")]
    ZeroConstantTerm,
    #[error("{op} requires constant term 1, found {found}")]
    ConstantTermNotOne { op: &'static str, found: String },
    #[error("exp requires constant term 0, found {0}")]
    NonzeroConstantTerm(String),
    #[error("coefficient of g^{0} is nonzero, cannot divide by g^{1}")]
    NotDivisible(usize, usize),
    #[error("no power series solution: {0}")]
    NoSolution(&'static str),
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Series {
    coeffs: Vec<BigRational>,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl Series {
    pub fn zero(order: usize) -> Self {
        Series { coeffs: vec![BigRational::zero(); order + 1] }
    }

    pub fn one(order: usize) -> Self {
        Self::constant(BigRational::one(), order)
    }

    pub fn constant(c: BigRational, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    /// `c * g^k`, which is the zero series when `k > order`.
    pub fn monomial(c: BigRational, k: usize, order: usize) -> Self {
        let mut s = Self::zero(order);
        if k <= order {
            s.coeffs[k] = c;
        }
        s
    }

    /// Builds a series from the given coefficients, padding with zeros or
    /// truncating to `order`.
    pub fn from_coeffs(mut coeffs: Vec<BigRational>, order: usize) -> Self {
        coeffs.resize(order + 1, BigRational::zero());
        Series { coeffs }
    }

    pub fn from_ints(coeffs: &[i64], order: usize) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| rat(c)).collect(), order)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of `g^k`; zero above the truncation order.
    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn truncate(&self, order: usize) -> Self {
        assert!(order <= self.order(), "cannot raise truncation order");
        Series { coeffs: self.coeffs[..=order].to_vec() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Index of the first nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    pub fn is_nonnegative_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer() && !c.is_negative())
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Series { coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    /// Multiplies by `g^k`, keeping the order.
    pub fn shift_up(&self, k: usize) -> Self {
        let n = self.order();
        let mut out = Self::zero(n);
        for i in k..=n {
            out.coeffs[i] = self.coeffs[i - k].clone();
        }
        out
    }

    /// Divides by `g^k`; the result has order `order - k`.
    pub fn shift_down(&self, k: usize) -> Result<Self, SeriesError> {
        if let Some(i) = self.coeffs.iter().take(k).position(|c| !c.is_zero()) {
            return Err(SeriesError::NotDivisible(i, k));
        }
        assert!(k <= self.order());
        Ok(Series { coeffs: self.coeffs[k..].to_vec() })
    }

    /// Multiplicative inverse, valid when the constant term is nonzero.
    pub fn inv(&self) -> Result<Self, SeriesError> {
        let a0 = &self.coeffs[0];
        if a0.is_zero() {
            return Err(SeriesError::ZeroConstantTerm);
        }
        let n = self.order();
        let inv0 = a0.recip();
        let mut b: Vec<BigRational> = Vec::with_capacity(n + 1);
        b.push(inv0.clone());
        for k in 1..=n {
            let mut acc = BigRational::zero();
            for j in 1..=k {
                if !self.coeffs[j].is_zero() {
                    acc += &self.coeffs[j] * &b[k - j];
                }
            }
            b.push(-acc * &inv0);
        }
        Ok(Series { coeffs: b })
    }

    pub fn div(&self, other: &Series) -> Result<Self, SeriesError> {
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Series::one(self.order());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        let n = self.order();
        let mut out = Self::zero(n);
        for k in 1..=n {
            out.coeffs[k - 1] = &self.coeffs[k] * rat(k as i64);
        }
        out
    }

    /// Logarithm of a series with constant term 1, via `log f = ∫ f'/f`.
    pub fn log(&self) -> Result<Self, SeriesError> {
        if !self.coeffs[0].is_one() {
            return Err(SeriesError::ConstantTermNotOne {
                op: "log",
                found: self.coeffs[0].to_string(),
            });
        }
        let q = &self.derivative() * &self.inv()?;
        let n = self.order();
        let mut out = Self::zero(n);
        for k in 1..=n {
            out.coeffs[k] = &q.coeffs[k - 1] / rat(k as i64);
        }
        Ok(out)
    }

    /// Exponential of a series with constant term 0.
    pub fn exp(&self) -> Result<Self, SeriesError> {
        if !self.coeffs[0].is_zero() {
            return Err(SeriesError::NonzeroConstantTerm(self.coeffs[0].to_string()));
        }
        // e' = a' e, solved coefficient by coefficient.
        let n = self.order();
        let da = self.derivative();
        let mut e = vec![BigRational::zero(); n + 1];
        e[0] = BigRational::one();
        for k in 1..=n {
            let mut acc = BigRational::zero();
            for j in 0..k {
                if !da.coeffs[j].is_zero() {
                    acc += &da.coeffs[j] * &e[k - 1 - j];
                }
            }
            e[k] = acc / rat(k as i64);
        }
        Ok(Series { coeffs: e })
    }

    /// Square root of a series with constant term 1, normalised to `sqrt(1) = 1`.
    pub fn sqrt(&self) -> Result<Self, SeriesError> {
        if !self.coeffs[0].is_one() {
            return Err(SeriesError::ConstantTermNotOne {
                op: "sqrt",
                found: self.coeffs[0].to_string(),
            });
        }
        let n = self.order();
        let two = rat(2);
        let mut b = vec![BigRational::zero(); n + 1];
        b[0] = BigRational::one();
        for k in 1..=n {
            let mut acc = self.coeffs[k].clone();
            for j in 1..k {
                acc -= &b[j] * &b[k - j];
            }
            b[k] = acc / &two;
        }
        Ok(Series { coeffs: b })
    }

    /// Evaluates the polynomial `Σ p_k y^k` at the series `y` (Horner).
    pub fn compose_poly(poly: &[BigRational], y: &Series) -> Series {
        let n = y.order();
        let mut acc = Series::zero(n);
        for c in poly.iter().rev() {
            acc = &acc * y;
            acc.coeffs[0] += c;
        }
        acc
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect()
    }

    fn binary(&self, other: &Series, f: impl Fn(&BigRational, &BigRational) -> BigRational) -> Series {
        let n = self.order().min(other.order());
        Series { coeffs: (0..=n).map(|k| f(&self.coeffs[k], &other.coeffs[k])).collect() }
    }

    /// Common denominator and integer numerators of the first `n+1` coefficients.
    fn scaled(&self, n: usize) -> (Vec<BigInt>, BigInt) {
        let mut den = BigInt::one();
        for c in &self.coeffs[..=n] {
            if !c.denom().is_one() {
                den = den.lcm(c.denom());
            }
        }
        let nums = self.coeffs[..=n]
            .iter()
            .map(|c| {
                if c.denom() == &den {
                    c.numer().clone()
                } else {
                    c.numer() * (&den / c.denom())
                }
            })
            .collect();
        (nums, den)
    }
}

impl Add for &Series {
    type Output = Series;
    fn add(self, rhs: &Series) -> Series {
        self.binary(rhs, |a, b| a + b)
    }
}

impl Sub for &Series {
    type Output = Series;
    fn sub(self, rhs: &Series) -> Series {
        self.binary(rhs, |a, b| a - b)
    }
}

impl Neg for &Series {
    type Output = Series;
    fn neg(self) -> Series {
        Series { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Mul for &Series {
    type Output = Series;
    /// Truncated product. Coefficients are brought to a common denominator
    /// so the convolution runs on integers.
    fn mul(self, rhs: &Series) -> Series {
        let n = self.order().min(rhs.order());
        let (a, da) = self.scaled(n);
        let (b, db) = rhs.scaled(n);
        let first_a = a.iter().position(|c| !c.is_zero());
        let first_b = b.iter().position(|c| !c.is_zero());
        let mut out = vec![BigInt::zero(); n + 1];
        if let (Some(fa), Some(fb)) = (first_a, first_b) {
            for i in fa..=n {
                if a[i].is_zero() {
                    continue;
                }
                for j in fb..=n - i {
                    if !b[j].is_zero() {
                        out[i + j] += &a[i] * &b[j];
                    }
                }
            }
        }
        let den = da * db;
        Series {
            coeffs: out
                .into_iter()
                .map(|c| if c.is_zero() { BigRational::zero() } else { BigRational::new(c, den.clone()) })
                .collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Series {
            type Output = Series;
            fn $m(self, rhs: Series) -> Series {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Series> for Series {
            type Output = Series;
            fn $m(self, rhs: &Series) -> Series {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*g")?,
                _ => write!(f, "{c}*g^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(g^{})", self.order() + 1)
    }
}

impl fmt::Debug for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `R(g)`, the generating function of labelled trees with labels bounded below,
/// solved as the fixed point of `R = 1 + 3 g R^2`.
pub fn solve_r(order: usize) -> Series {
    let mut r = Series::one(order);
    let three = rat(3);
    for _ in 0..order {
        r = (&r * &r).shift_up(1).scale(&three);
        r.coeffs[0] += BigRational::one();
    }
    r
}

/// `R(g)` from the closed form `(1 - sqrt(1 - 12 g)) / (6 g)`.
pub fn solve_r_closed(order: usize) -> Series {
    let disc = Series::from_ints(&[1, -12], order + 1);
    let num = &Series::one(order + 1) - &disc.sqrt().expect("constant term is 1");
    num.shift_down(1).expect("numerator vanishes at g = 0").scale(&BigRational::new(1.into(), 6.into()))
}

/// The series `x(g)` with `x(0) = 0` solving `g (1 + 4x + x^2)^2 = x (1 + x + x^2)`.
pub fn solve_x(order: usize) -> Series {
    let one = BigRational::one();
    let quad = [one.clone(), rat(4), one.clone()];
    let trip = [one.clone(), one.clone(), one];
    let mut x = Series::zero(order);
    for _ in 0..order {
        let a = Series::compose_poly(&quad, &x);
        let b = Series::compose_poly(&trip, &x);
        x = (&a * &a).div(&b).expect("1 + x + x^2 has constant term 1").shift_up(1);
    }
    x
}

/// Powers `x^0..=x^order` of a series with zero constant term.
pub fn powers(x: &Series) -> Vec<Series> {
    let n = x.order();
    let mut out = Vec::with_capacity(n + 1);
    out.push(Series::one(n));
    for k in 1..=n {
        let next = &out[k - 1] * x;
        out.push(next);
    }
    out
}

/// `[i]_x = 1 + x + ... + x^{i-1}`, with `[0]_x = 0`.
pub fn bracket(i: usize, x: &Series) -> Series {
    let n = x.order();
    let mut acc = Series::zero(n);
    let mut p = Series::one(n);
    for _ in 0..i.min(n + 1) {
        acc = &acc + &p;
        p = &p * x;
    }
    acc
}

pub(crate) fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ints(s: &Series) -> Vec<i64> {
        s.coeffs().iter().map(|c| c.to_integer().to_i64().unwrap()).collect()
    }

    #[test]
    fn r_first_coefficients() {
        assert_eq!(ints(&solve_r(4)), vec![1, 3, 18, 135, 1134]);
        assert_eq!(solve_r(12), solve_r_closed(12));
    }

    #[test]
    fn r_counts_labelled_trees() {
        // 3^n Cat(n)
        let r = solve_r(10);
        let mut cat = BigInt::one();
        for n in 0..=10u32 {
            assert_eq!(r.coeff(n as usize), BigRational::from_integer(BigInt::from(3).pow(n) * &cat));
            cat = cat * BigInt::from(2 * (2 * n + 1)) / BigInt::from(n + 2);
        }
    }

    #[test]
    fn x_solves_its_equation() {
        let n = 12;
        let x = solve_x(n);
        assert_eq!(x.coeff(0), BigRational::zero());
        assert_eq!(x.coeff(1), BigRational::one());
        let one = BigRational::one();
        let a = Series::compose_poly(&[one.clone(), rat(4), one.clone()], &x);
        let b = Series::compose_poly(&[one.clone(), one.clone(), one], &x);
        let lhs = (&a * &a).shift_up(1);
        assert_eq!(lhs, &x * &b);
    }

    #[test]
    fn x_relates_to_r() {
        // x = g R^2 (1 + x + x^2)
        let n = 10;
        let x = solve_x(n);
        let r = solve_r(n);
        let one = BigRational::one();
        let b = Series::compose_poly(&[one.clone(), one.clone(), one], &x);
        assert_eq!(x, (&(&r * &r) * &b).shift_up(1));
    }

    #[test]
    fn log_of_linear() {
        let s = Series::from_ints(&[1, 2], 5);
        let l = s.log().unwrap();
        assert_eq!(l.coeff(2), rat(-2));
        assert_eq!(l.coeff(3), rational(8, 3));
    }

    #[test]
    fn domain_errors() {
        let s = Series::from_ints(&[0, 1], 4);
        assert_eq!(s.inv(), Err(SeriesError::ZeroConstantTerm));
        assert!(matches!(s.log(), Err(SeriesError::ConstantTermNotOne { .. })));
        assert!(matches!(Series::from_ints(&[2, 1], 3).sqrt(), Err(SeriesError::ConstantTermNotOne { .. })));
        assert!(Series::from_ints(&[1], 3).exp().is_err());
        assert!(Series::from_ints(&[0, 1], 3).shift_down(2).is_err());
    }

    #[test]
    fn bracket_values() {
        let x = solve_x(6);
        assert!(bracket(0, &x).is_zero());
        assert_eq!(bracket(1, &x), Series::one(6));
        assert_eq!(bracket(3, &x), &(&Series::one(6) + &x) + &(&x * &x));
        assert_eq!(bracket(7, &x), bracket(50, &x));
    }

    #[test]
    fn display_form() {
        assert_eq!(Series::from_ints(&[1, 3], 2).to_string(), "1 + 3*g + O(g^3)");
    }

    fn small_series(order: usize) -> impl Strategy<Value = Series> {
        proptest::collection::vec((-20i64..20, 1i64..6), order + 1).prop_map(move |v| {
            Series::from_coeffs(v.into_iter().map(|(a, b)| rational(a, b)).collect(), order)
        })
    }

    proptest! {
        #[test]
        fn mul_matches_naive(a in small_series(6), b in small_series(6)) {
            let p = &a * &b;
            for k in 0..=6 {
                let mut acc = BigRational::zero();
                for j in 0..=k { acc += a.coeff(j) * b.coeff(k - j); }
                prop_assert_eq!(p.coeff(k), acc);
            }
        }

        #[test]
        fn inverse_and_division(a in small_series(6), b in small_series(6)) {
            prop_assume!(!b.coeff(0).is_zero());
            let q = a.div(&b).unwrap();
            prop_assert_eq!(&q * &b, a);
        }

        #[test]
        fn exp_log_roundtrip(mut a in small_series(6)) {
            a.coeffs[0] = BigRational::zero();
            let e = a.exp().unwrap();
            prop_assert_eq!(e.log().unwrap(), a);
        }

        #[test]
        fn sqrt_squares_back(mut a in small_series(6)) {
            a.coeffs[0] = BigRational::one();
            let r = a.sqrt().unwrap();
            prop_assert_eq!(&r * &r, a);
        }

        #[test]
        fn truncation_commutes_with_mul(a in small_series(8), b in small_series(8)) {
            prop_assert_eq!((&a * &b).truncate(4), &a.truncate(4) * &b.truncate(4));
        }
    }
}
