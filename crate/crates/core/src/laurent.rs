//! Multivariate Laurent polynomials with arbitrary-precision integer
//! coefficients.
//!
//! Variable `k` (0-based) is rendered `u{k+1}`; in this crate it is the
//! parameter attached to reflection class `k`. Exponent vectors are stored
//! with trailing zeros trimmed, so polynomials in different numbers of
//! variables combine without any bookkeeping.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LaurentError {
    #[error("variable u{0} specialized to zero, but it must stay invertible")]
    ZeroValue(usize),
    #[error("no value supplied for variable u{0}")]
    MissingValue(usize),
    #[error("matrix is not square")]
    NotSquare,
}

/// Exponent vector, trailing zeros trimmed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<i32>);

impl Monomial {
    pub fn new(mut exps: Vec<i32>) -> Self {
        while exps.last() == Some(&0) {
            exps.pop();
        }
        Monomial(exps)
    }

    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(k: usize, e: i32) -> Self {
        let mut v = vec![0; k + 1];
        v[k] = e;
        Monomial::new(v)
    }

    pub fn exponent(&self, k: usize) -> i32 {
        self.0.get(k).copied().unwrap_or(0)
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    fn combine(&self, other: &Monomial, f: impl Fn(i32, i32) -> i32) -> Monomial {
        let n = self.0.len().max(other.0.len());
        Monomial::new((0..n).map(|k| f(self.exponent(k), other.exponent(k))).collect())
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        self.combine(other, |a, b| a + b)
    }

    pub fn div(&self, other: &Monomial) -> Monomial {
        self.combine(other, |a, b| a - b)
    }
}

impl Ord for Monomial {
    /// Lexicographic on zero-padded exponent vectors.
    fn cmp(&self, other: &Self) -> Ordering {
        let n = self.0.len().max(other.0.len());
        for k in 0..n {
            match self.exponent(k).cmp(&other.exponent(k)) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentPoly {
    terms: BTreeMap<Monomial, BigInt>,
}

impl LaurentPoly {
    pub fn constant<T: Into<BigInt>>(c: T) -> Self {
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        LaurentPoly { terms }
    }

    /// The variable `u{k+1}`.
    pub fn var(k: usize) -> Self {
        Self::monomial(Monomial::var(k, 1), 1)
    }

    pub fn monomial<T: Into<BigInt>>(m: Monomial, c: T) -> Self {
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        LaurentPoly { terms }
    }

    /// `u{k+1} - 1`.
    pub fn var_minus_one(k: usize) -> Self {
        Self::var(k) - Self::one()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn constant_term(&self) -> BigInt {
        self.coeff(&Monomial::one())
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_one())
    }

    /// Number of variable slots touched by any term.
    pub fn nvars(&self) -> usize {
        self.terms.keys().map(|m| m.nvars()).max().unwrap_or(0)
    }

    fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        LaurentPoly { terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect() }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Self {
        LaurentPoly { terms: self.terms.iter().map(|(k, c)| (k.mul(m), c.clone())).collect() }
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Substitutes `u_k ↦ values[k]`; every variable occurring must have a
    /// nonzero value.
    pub fn specialize(&self, values: &[BigRational]) -> Result<BigRational, LaurentError> {
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            let mut t = BigRational::from_integer(c.clone());
            for (k, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let v = values.get(k).ok_or(LaurentError::MissingValue(k))?;
                if v.is_zero() {
                    return Err(LaurentError::ZeroValue(k));
                }
                t *= pow_rational(v, e);
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Specialization modulo a prime `p`; `values[k]` must be nonzero mod `p`.
    pub fn specialize_mod(&self, p: u64, values: &[u64]) -> Result<u64, LaurentError> {
        let mut acc: u128 = 0;
        let pb = BigInt::from(p);
        for (m, c) in &self.terms {
            let cr = c.mod_floor(&pb);
            let mut t: u128 = cr.try_into().expect("reduced below p");
            for (k, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let v = *values.get(k).ok_or(LaurentError::MissingValue(k))? % p;
                if v == 0 {
                    return Err(LaurentError::ZeroValue(k));
                }
                let base = if e < 0 { mod_inverse(v, p) } else { v };
                t = t * mod_pow(base, e.unsigned_abs() as u64, p) as u128 % p as u128;
            }
            acc = (acc + t) % p as u128;
        }
        Ok(acc as u64)
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &LaurentPoly) -> Option<LaurentPoly> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        if d.terms.len() == 1 {
            let (dm, dc) = d.terms.iter().next().unwrap();
            let mut q = BTreeMap::new();
            for (m, c) in &self.terms {
                let (quo, rem) = c.div_rem(dc);
                if !rem.is_zero() {
                    return None;
                }
                q.insert(m.div(dm), quo);
            }
            return Some(LaurentPoly { terms: q });
        }
        // exponent box every quotient term must live in
        let n = self.nvars().max(d.nvars());
        let (lo_a, hi_a) = self.degree_bounds(n);
        let (lo_d, hi_d) = d.degree_bounds(n);
        let lo: Vec<i32> = (0..n).map(|k| lo_a[k] - lo_d[k]).collect();
        let hi: Vec<i32> = (0..n).map(|k| hi_a[k] - hi_d[k]).collect();
        if (0..n).any(|k| lo[k] > hi[k]) {
            return None;
        }
        let (dm, dc) = d.terms.iter().next_back().unwrap();
        let mut rem = self.clone();
        let mut quot = LaurentPoly::zero();
        while let Some((rm, rc)) = rem.terms.iter().next_back() {
            let (c, r) = rc.div_rem(dc);
            if !r.is_zero() {
                return None;
            }
            let m = rm.div(dm);
            if (0..n).any(|k| m.exponent(k) < lo[k] || m.exponent(k) > hi[k]) {
                return None;
            }
            let t = LaurentPoly::monomial(m, c);
            rem = &rem - &(&t * d);
            quot += t;
        }
        Some(quot)
    }

    fn degree_bounds(&self, n: usize) -> (Vec<i32>, Vec<i32>) {
        let mut lo = vec![i32::MAX; n];
        let mut hi = vec![i32::MIN; n];
        for m in self.terms.keys() {
            for k in 0..n {
                lo[k] = lo[k].min(m.exponent(k));
                hi[k] = hi[k].max(m.exponent(k));
            }
        }
        (lo, hi)
    }
}

fn pow_rational(v: &BigRational, e: i32) -> BigRational {
    let base = if e < 0 { v.recip() } else { v.clone() };
    num_traits::pow(base, e.unsigned_abs() as usize)
}

pub(crate) fn mod_pow(b: u64, mut e: u64, p: u64) -> u64 {
    let mut r: u128 = 1;
    let mut b128 = (b % p) as u128;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b128 % p as u128;
        }
        b128 = b128 * b128 % p as u128;
        e >>= 1;
    }
    r as u64
}

pub(crate) fn mod_inverse(v: u64, p: u64) -> u64 {
    mod_pow(v, p - 2, p)
}

impl Zero for LaurentPoly {
    fn zero() -> Self {
        LaurentPoly { terms: BTreeMap::new() }
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for LaurentPoly {
    fn one() -> Self {
        Self::constant(1)
    }
}

impl<'a> Add<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;

    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        out += rhs.clone();
        out
    }
}

impl Add for LaurentPoly {
    type Output = LaurentPoly;

    fn add(mut self, rhs: LaurentPoly) -> LaurentPoly {
        self += rhs;
        self
    }
}

impl AddAssign for LaurentPoly {
    fn add_assign(&mut self, rhs: LaurentPoly) {
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
    }
}

impl AddAssign<&LaurentPoly> for LaurentPoly {
    fn add_assign(&mut self, rhs: &LaurentPoly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;

    fn neg(self) -> LaurentPoly {
        LaurentPoly { terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect() }
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;

    fn neg(self) -> LaurentPoly {
        -self.clone()
    }
}

impl<'a> Sub<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;

    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Sub for LaurentPoly {
    type Output = LaurentPoly;

    fn sub(self, rhs: LaurentPoly) -> LaurentPoly {
        &self - &rhs
    }
}

impl<'a> Mul<&'a LaurentPoly> for &'a LaurentPoly {
    type Output = LaurentPoly;

    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl Mul for LaurentPoly {
    type Output = LaurentPoly;

    fn mul(self, rhs: LaurentPoly) -> LaurentPoly {
        &self * &rhs
    }
}

impl fmt::Display for LaurentPoly {
    /// Terms in decreasing monomial order, e.g. `3*u1^2*u2^-1 - u1^1 + 2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let vars: Vec<String> = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e != 0)
                .map(|(k, e)| format!("u{}^{}", k + 1, e))
                .collect();
            if vars.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{mag}*{}", vars.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({self})")
    }
}

/// Determinant by Laplace expansion along the first row.
pub fn det_cofactor(m: &[Vec<LaurentPoly>]) -> Result<LaurentPoly, LaurentError> {
    let n = m.len();
    if m.iter().any(|row| row.len() != n) {
        return Err(LaurentError::NotSquare);
    }
    Ok(cofactor_rec(m))
}

fn cofactor_rec(m: &[Vec<LaurentPoly>]) -> LaurentPoly {
    let n = m.len();
    match n {
        0 => LaurentPoly::one(),
        1 => m[0][0].clone(),
        _ => {
            let mut acc = LaurentPoly::zero();
            for j in 0..n {
                if m[0][j].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<LaurentPoly>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, x)| x.clone()).collect())
                    .collect();
                let term = &m[0][j] * &cofactor_rec(&minor);
                if j % 2 == 0 {
                    acc += term;
                } else {
                    acc = &acc - &term;
                }
            }
            acc
        }
    }
}

/// Exact determinant. Fraction-free Bareiss elimination with row pivoting;
/// matrices of size at most 3 go through cofactor expansion.
pub fn det(m: &[Vec<LaurentPoly>]) -> Result<LaurentPoly, LaurentError> {
    let n = m.len();
    if m.iter().any(|row| row.len() != n) {
        return Err(LaurentError::NotSquare);
    }
    if n <= 3 {
        return Ok(cofactor_rec(m));
    }
    let mut a: Vec<Vec<LaurentPoly>> = m.to_vec();
    let mut sign_flip = false;
    let mut prev = LaurentPoly::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign_flip = !sign_flip;
                }
                None => return Ok(LaurentPoly::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = num.div_exact(&prev).expect("Bareiss division is exact");
            }
            a[i][k] = LaurentPoly::zero();
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    Ok(if sign_flip { -d } else { d })
}
