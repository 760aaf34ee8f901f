//! Exact arithmetic over prime fields `F_p`, dense univariate polynomials in
//! `F_p[t]`, residue fields `F_p[t]/(π)` and complete factorization into
//! monic irreducibles.
//!
//! Factorization runs the classical three stages: square-free decomposition
//! (with `p`-th roots for derivative-free parts), distinct-degree
//! factorization, and Cantor–Zassenhaus equal-degree splitting. The splitting
//! step draws from a fixed-seed ChaCha stream, so factor lists are
//! reproducible run to run.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

const SPLIT_SEED: u64 = 0x6b33_7769_6c64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u64, u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operation on the zero polynomial")]
    ZeroPolynomial,
    #[error("modulus polynomial is not monic irreducible")]
    Reducible,
}

/// Deterministic trial division; moduli in this crate are small.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Validated handle for `F_p`. Primality is checked once here; values and
/// polynomials built through the handle carry `p` along.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, FieldError> {
        // keep products of two residues inside u64
        if !is_prime(p) || p >= 1 << 31 {
            return Err(FieldError::NotPrime(p));
        }
        Ok(PrimeField { p })
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn elem(&self, v: i64) -> Fp {
        Fp { value: reduce_signed(v, self.p), modulus: self.p }
    }

    /// Reduces a rational number `num/den` into the field.
    pub fn ratio(&self, num: i64, den: i64) -> Result<Fp, FieldError> {
        self.elem(num).checked_div(self.elem(den))
    }

    pub fn zero(&self) -> Fp {
        self.elem(0)
    }

    pub fn one(&self) -> Fp {
        self.elem(1)
    }

    pub fn elements(&self) -> impl Iterator<Item = Fp> + '_ {
        (0..self.p).map(move |v| Fp { value: v, modulus: self.p })
    }

    /// Polynomial from integer coefficients in ascending degree.
    pub fn poly(&self, coeffs: &[i64]) -> Poly {
        Poly::from_raw(self.p, coeffs.iter().map(|&c| reduce_signed(c, self.p)).collect())
    }

    pub fn poly_from_elems(&self, coeffs: &[Fp]) -> Result<Poly, FieldError> {
        let mut raw = Vec::with_capacity(coeffs.len());
        for c in coeffs {
            if c.modulus != self.p {
                return Err(FieldError::ModulusMismatch(c.modulus, self.p));
            }
            raw.push(c.value);
        }
        Ok(Poly::from_raw(self.p, raw))
    }

    pub fn t(&self) -> Poly {
        Poly::from_raw(self.p, vec![0, 1])
    }

    pub fn constant(&self, c: i64) -> Poly {
        self.poly(&[c])
    }

    /// `t^p - t`, whose roots are exactly the elements of `F_p`.
    pub fn artin_schreier(&self) -> Poly {
        let mut raw = vec![0; self.p as usize + 1];
        raw[1] = self.p - 1;
        raw[self.p as usize] = 1;
        Poly::from_raw(self.p, raw)
    }
}

fn reduce_signed(v: i64, p: u64) -> u64 {
    (v as i128).rem_euclid(p as i128) as u64
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    a * b % p
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

fn inv_mod(a: u64, p: u64) -> Option<u64> {
    if a.is_multiple_of(p) {
        None
    } else {
        Some(pow_mod(a, p - 2, p))
    }
}

/// Element of `F_p`, always fully reduced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp {
    value: u64,
    modulus: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl Fp {
    pub fn value(self) -> u64 {
        self.value
    }

    pub fn modulus(self) -> u64 {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    /// Representative in `(-p/2, p/2]`, used for display.
    pub fn signed(self) -> i64 {
        if self.value > self.modulus / 2 {
            self.value as i64 - self.modulus as i64
        } else {
            self.value as i64
        }
    }

    fn same_field(self, other: Fp) -> Result<u64, FieldError> {
        if self.modulus == other.modulus {
            Ok(self.modulus)
        } else {
            Err(FieldError::ModulusMismatch(self.modulus, other.modulus))
        }
    }

    pub fn checked_add(self, rhs: Fp) -> Result<Fp, FieldError> {
        let p = self.same_field(rhs)?;
        Ok(Fp { value: (self.value + rhs.value) % p, modulus: p })
    }

    pub fn checked_sub(self, rhs: Fp) -> Result<Fp, FieldError> {
        let p = self.same_field(rhs)?;
        Ok(Fp { value: (self.value + p - rhs.value) % p, modulus: p })
    }

    pub fn checked_mul(self, rhs: Fp) -> Result<Fp, FieldError> {
        let p = self.same_field(rhs)?;
        Ok(Fp { value: mul_mod(self.value, rhs.value, p), modulus: p })
    }

    pub fn checked_div(self, rhs: Fp) -> Result<Fp, FieldError> {
        self.same_field(rhs)?;
        self.checked_mul(rhs.inv()?)
    }

    pub fn inv(self) -> Result<Fp, FieldError> {
        inv_mod(self.value, self.modulus)
            .map(|value| Fp { value, modulus: self.modulus })
            .ok_or(FieldError::DivisionByZero)
    }

    pub fn pow(self, exp: u64) -> Fp {
        Fp { value: pow_mod(self.value, exp, self.modulus), modulus: self.modulus }
    }
}

/// Single entry point for the four field operations.
pub fn field_arith(a: Fp, b: Fp, op: FieldOp) -> Result<Fp, FieldError> {
    match op {
        FieldOp::Add => a.checked_add(b),
        FieldOp::Sub => a.checked_sub(b),
        FieldOp::Mul => a.checked_mul(b),
        FieldOp::Div => a.checked_div(b),
    }
}

// Operator forms panic on mixed moduli; use the checked_* methods to get an error.
impl Add for Fp {
    type Output = Fp;
    fn add(self, rhs: Fp) -> Fp {
        self.checked_add(rhs).expect("F_p addition")
    }
}

impl Sub for Fp {
    type Output = Fp;
    fn sub(self, rhs: Fp) -> Fp {
        self.checked_sub(rhs).expect("F_p subtraction")
    }
}

impl Mul for Fp {
    type Output = Fp;
    fn mul(self, rhs: Fp) -> Fp {
        self.checked_mul(rhs).expect("F_p multiplication")
    }
}

impl Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        Fp { value: (self.modulus - self.value) % self.modulus, modulus: self.modulus }
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// Dense polynomial over `F_p`, coefficients in ascending degree. The
/// coefficient vector never has a trailing zero, so the zero polynomial is
/// the empty vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<u64>,
    p: u64,
}

impl Poly {
    fn from_raw(p: u64, mut coeffs: Vec<u64>) -> Poly {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Poly { coeffs, p }
    }

    pub fn zero(field: PrimeField) -> Poly {
        Poly { coeffs: Vec::new(), p: field.p }
    }

    pub fn one(field: PrimeField) -> Poly {
        Poly { coeffs: vec![1], p: field.p }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn field(&self) -> PrimeField {
        PrimeField { p: self.p }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> Fp {
        Fp { value: self.coeffs.get(i).copied().unwrap_or(0), modulus: self.p }
    }

    /// Raw reduced coefficients in ascending degree.
    pub fn coefficients(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn leading_coeff(&self) -> Option<Fp> {
        self.coeffs.last().map(|&value| Fp { value, modulus: self.p })
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last() == Some(&1)
    }

    fn check(&self, other: &Poly) -> Result<(), FieldError> {
        if self.p == other.p {
            Ok(())
        } else {
            Err(FieldError::ModulusMismatch(self.p, other.p))
        }
    }

    pub fn checked_add(&self, other: &Poly) -> Result<Poly, FieldError> {
        self.check(other)?;
        let n = self.coeffs.len().max(other.coeffs.len());
        let raw = (0..n)
            .map(|i| (self.coeffs.get(i).copied().unwrap_or(0) + other.coeffs.get(i).copied().unwrap_or(0)) % self.p)
            .collect();
        Ok(Poly::from_raw(self.p, raw))
    }

    pub fn checked_sub(&self, other: &Poly) -> Result<Poly, FieldError> {
        self.check(other)?;
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &Poly) -> Result<Poly, FieldError> {
        self.check(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Poly { coeffs: Vec::new(), p: self.p });
        }
        let mut raw = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                raw[i + j] = (raw[i + j] + a * b) % self.p;
            }
        }
        Ok(Poly::from_raw(self.p, raw))
    }

    pub fn scale(&self, c: Fp) -> Poly {
        assert_eq!(c.modulus, self.p, "scalar from another field");
        Poly::from_raw(self.p, self.coeffs.iter().map(|&a| mul_mod(a, c.value, self.p)).collect())
    }

    /// Multiplication by `t^k`.
    pub fn shift_up(&self, k: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut raw = vec![0; k];
        raw.extend_from_slice(&self.coeffs);
        Poly { coeffs: raw, p: self.p }
    }

    /// Euclidean division: returns `(q, r)` with `self = q·divisor + r` and
    /// `deg r < deg divisor`.
    pub fn div_rem(&self, divisor: &Poly) -> Result<(Poly, Poly), FieldError> {
        self.check(divisor)?;
        let dd = divisor.degree().ok_or(FieldError::DivisionByZero)?;
        let lead_inv = inv_mod(divisor.coeffs[dd], self.p).expect("nonzero leading coefficient");
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Poly { coeffs: Vec::new(), p: self.p }, self.clone()));
        }
        let mut quot = vec![0u64; rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = mul_mod(rem[i + dd], lead_inv, self.p);
            quot[i] = c;
            if c == 0 {
                continue;
            }
            for (j, &d) in divisor.coeffs.iter().enumerate() {
                let sub = mul_mod(c, d, self.p);
                rem[i + j] = (rem[i + j] + self.p - sub) % self.p;
            }
        }
        rem.truncate(dd);
        Ok((Poly::from_raw(self.p, quot), Poly::from_raw(self.p, rem)))
    }

    pub fn rem(&self, divisor: &Poly) -> Result<Poly, FieldError> {
        self.div_rem(divisor).map(|(_, r)| r)
    }

    /// Exact quotient; errors if the division leaves a remainder.
    pub fn div_exact(&self, divisor: &Poly) -> Result<Poly, FieldError> {
        let (q, r) = self.div_rem(divisor)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(FieldError::DivisionByZero)
        }
    }

    pub fn monic(&self) -> Poly {
        match self.leading_coeff() {
            None => self.clone(),
            Some(lc) => self.scale(lc.inv().expect("nonzero")),
        }
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Poly) -> Result<Poly, FieldError> {
        self.check(other)?;
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b)?;
            a = b;
            b = r;
        }
        Ok(a.monic())
    }

    pub fn derivative(&self) -> Poly {
        let raw = self.coeffs.iter().enumerate().skip(1).map(|(i, &c)| mul_mod(c, i as u64 % self.p, self.p)).collect();
        Poly::from_raw(self.p, raw)
    }

    pub fn eval(&self, x: Fp) -> Fp {
        assert_eq!(x.modulus, self.p, "evaluation point from another field");
        let v = self.coeffs.iter().rev().fold(0u64, |acc, &c| (mul_mod(acc, x.value, self.p) + c) % self.p);
        Fp { value: v, modulus: self.p }
    }

    pub fn pow(&self, mut exp: u64) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly { coeffs: vec![1], p: self.p };
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            exp >>= 1;
            if exp > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// `self^exp mod modulus`.
    pub fn pow_mod(&self, mut exp: u64, modulus: &Poly) -> Result<Poly, FieldError> {
        let mut base = self.rem(modulus)?;
        let mut acc = Poly { coeffs: vec![1], p: self.p }.rem(modulus)?;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = (&acc * &base).rem(modulus)?;
            }
            exp >>= 1;
            if exp > 0 {
                base = (&base * &base).rem(modulus)?;
            }
        }
        Ok(acc)
    }

    /// `self(g(t))` by Horner's scheme.
    pub fn compose(&self, g: &Poly) -> Result<Poly, FieldError> {
        self.check(g)?;
        let mut acc = Poly { coeffs: Vec::new(), p: self.p };
        for &c in self.coeffs.iter().rev() {
            acc = acc.checked_mul(g)?;
            acc = acc.checked_add(&Poly::from_raw(self.p, vec![c]))?;
        }
        Ok(acc)
    }

    /// `self(t + c)`.
    pub fn translate(&self, c: Fp) -> Poly {
        let g = Poly::from_raw(self.p, vec![c.value, 1]);
        self.compose(&g).expect("same field")
    }

    /// Number of times `pi` divides `self`; `None` for the zero polynomial.
    pub fn valuation(&self, pi: &Poly) -> Option<u32> {
        if self.is_zero() {
            return None;
        }
        let mut v = 0;
        let mut cur = self.clone();
        loop {
            let (q, r) = cur.div_rem(pi).expect("valuation at nonzero polynomial");
            if !r.is_zero() {
                return Some(v);
            }
            cur = q;
            v += 1;
        }
    }

    /// Reverse of the coefficient vector padded to length `width + 1`:
    /// `t^width · self(1/t)`. Requires `deg self <= width`.
    pub fn reciprocal(&self, width: usize) -> Option<Poly> {
        if self.coeffs.len() > width + 1 {
            return None;
        }
        let mut raw = vec![0u64; width + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            raw[width - i] = c;
        }
        Some(Poly::from_raw(self.p, raw))
    }

    /// Coefficients as integers in `(-p/2, p/2]`.
    pub fn signed_coefficients(&self) -> Vec<i64> {
        (0..self.coeffs.len()).map(|i| self.coeff(i).signed()).collect()
    }

    /// Total order used for deterministic output: degree first, then the
    /// coefficient vector from the constant term upward.
    pub fn canonical_cmp(&self, other: &Poly) -> Ordering {
        self.coeffs.len().cmp(&other.coeffs.len()).then_with(|| self.coeffs.cmp(&other.coeffs))
    }

    fn pth_root(&self) -> Poly {
        // over F_p every coefficient is its own p-th root
        let p = self.p as usize;
        let raw = self.coeffs.iter().step_by(p).copied().collect();
        Poly::from_raw(self.p, raw)
    }
}

impl fmt::Display for Poly {
    /// Human-readable form such as `t^5 + 4t`, using the symbol `t`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for i in (0..self.coeffs.len()).rev() {
            let c = self.coeffs[i];
            if c == 0 {
                continue;
            }
            let s = self.coeff(i).signed();
            let (neg, mag) = (s < 0, s.unsigned_abs());
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            match (i, mag) {
                (0, m) => write!(f, "{m}")?,
                (1, 1) => write!(f, "t")?,
                (1, m) => write!(f, "{m}t")?,
                (_, 1) => write!(f, "t^{i}")?,
                (_, m) => write!(f, "{m}t^{i}")?,
            }
        }
        Ok(())
    }
}

macro_rules! poly_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&Poly> for &Poly {
            type Output = Poly;
            fn $method(self, rhs: &Poly) -> Poly {
                self.$checked(rhs).expect("polynomials over different fields")
            }
        }
        impl $trait<Poly> for Poly {
            type Output = Poly;
            fn $method(self, rhs: Poly) -> Poly {
                (&self).$method(&rhs)
            }
        }
    };
}

poly_binop!(Add, add, checked_add);
poly_binop!(Sub, sub, checked_sub);
poly_binop!(Mul, mul, checked_mul);

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::from_raw(self.p, self.coeffs.iter().map(|&c| (self.p - c) % self.p).collect())
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolyOp {
    Add,
    Mul,
    DivMod,
    Gcd,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PolyResult {
    Single(Poly),
    Pair(Poly, Poly),
}

pub fn poly_arith(f: &Poly, g: &Poly, op: PolyOp) -> Result<PolyResult, FieldError> {
    Ok(match op {
        PolyOp::Add => PolyResult::Single(f.checked_add(g)?),
        PolyOp::Mul => PolyResult::Single(f.checked_mul(g)?),
        PolyOp::DivMod => {
            let (q, r) = f.div_rem(g)?;
            PolyResult::Pair(q, r)
        }
        PolyOp::Gcd => PolyResult::Single(f.gcd(g)?),
    })
}

/// `unit · ∏ factor^multiplicity`, factors monic irreducible, pairwise
/// distinct, sorted by [`Poly::canonical_cmp`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub unit: Fp,
    pub factors: Vec<(Poly, u32)>,
}

impl Factorization {
    pub fn expand(&self) -> Poly {
        let field = PrimeField { p: self.unit.modulus };
        self.factors.iter().fold(Poly::from_raw(field.p, vec![self.unit.value]), |acc, (f, m)| &acc * &f.pow(*m as u64))
    }

    pub fn is_irreducible(&self) -> bool {
        self.factors.len() == 1 && self.factors[0].1 == 1
    }
}

/// Complete factorization of a nonzero polynomial over `F_p`.
pub fn poly_factor(f: &Poly) -> Result<Factorization, FieldError> {
    let unit = f.leading_coeff().ok_or(FieldError::ZeroPolynomial)?;
    let monic = f.monic();
    let mut rng = ChaCha8Rng::seed_from_u64(SPLIT_SEED);
    let mut factors = Vec::new();
    for (part, mult) in squarefree_decomposition(&monic) {
        for (block, d) in distinct_degree(&part) {
            let mut pieces = Vec::new();
            equal_degree(&block, d, &mut rng, &mut pieces);
            factors.extend(pieces.into_iter().map(|q| (q, mult)));
        }
    }
    factors.sort_by(|a, b| a.0.canonical_cmp(&b.0));
    Ok(Factorization { unit, factors })
}

/// Square-free parts of a monic polynomial with their multiplicities.
fn squarefree_decomposition(f: &Poly) -> Vec<(Poly, u32)> {
    let mut out = Vec::new();
    if f.degree().unwrap_or(0) == 0 {
        return out;
    }
    let deriv = f.derivative();
    let mut c = f.gcd(&deriv).expect("same field");
    let mut w = f.div_exact(&c).expect("gcd divides");
    let mut i = 1u32;
    while !w.is_one() {
        let y = w.gcd(&c).expect("same field");
        let fac = w.div_exact(&y).expect("gcd divides");
        if !fac.is_one() {
            out.push((fac, i));
        }
        w = y;
        c = c.div_exact(&w).expect("gcd divides");
        i += 1;
    }
    if !c.is_one() {
        let p = f.p as u32;
        for (g, m) in squarefree_decomposition(&c.pth_root()) {
            out.push((g, m * p));
        }
    }
    out
}

/// Splits a monic square-free polynomial into products of irreducibles of a
/// common degree.
fn distinct_degree(f: &Poly) -> Vec<(Poly, usize)> {
    let mut out = Vec::new();
    let t = f.field().t();
    let mut rest = f.clone();
    let mut h = t.clone();
    let mut d = 1;
    while rest.degree().unwrap_or(0) >= 2 * d {
        h = h.pow_mod(f.p, &rest).expect("nonzero modulus");
        let g = rest.gcd(&(&h - &t)).expect("same field");
        if !g.is_one() {
            rest = rest.div_exact(&g).expect("gcd divides");
            h = h.rem(&rest).expect("nonzero modulus");
            out.push((g, d));
        }
        d += 1;
    }
    if let Some(deg) = rest.degree().filter(|&deg| deg > 0) {
        out.push((rest, deg));
    }
    out
}

/// Cantor–Zassenhaus splitting of a product of distinct irreducibles of
/// degree `d`.
fn equal_degree(f: &Poly, d: usize, rng: &mut ChaCha8Rng, out: &mut Vec<Poly>) {
    let n = f.degree().expect("nonzero");
    if n == d {
        out.push(f.clone());
        return;
    }
    let p = f.p;
    loop {
        let raw: Vec<u64> = (0..n).map(|_| rng.random_range(0..p)).collect();
        let a = Poly::from_raw(p, raw);
        if a.degree().unwrap_or(0) == 0 {
            continue;
        }
        let probe = if p == 2 {
            // absolute trace a + a^2 + ... + a^(2^(d-1))
            let mut term = a.clone();
            let mut acc = a.clone();
            for _ in 1..d {
                term = term.pow_mod(2, f).expect("nonzero modulus");
                acc = &acc + &term;
            }
            acc
        } else {
            // a^((p^d - 1)/2) = (a · a^p ··· a^(p^(d-1)))^((p-1)/2)
            let mut term = a.rem(f).expect("nonzero modulus");
            let mut norm = term.clone();
            for _ in 1..d {
                term = term.pow_mod(p, f).expect("nonzero modulus");
                norm = (&norm * &term).rem(f).expect("nonzero modulus");
            }
            let one = Poly::from_raw(p, vec![1]);
            &norm.pow_mod((p - 1) / 2, f).expect("nonzero modulus") - &one
        };
        let g = f.gcd(&probe).expect("same field");
        let gd = g.degree().unwrap_or(0);
        if gd > 0 && gd < n {
            equal_degree(&g, d, rng, out);
            equal_degree(&f.div_exact(&g).expect("gcd divides"), d, rng, out);
            return;
        }
    }
}

/// `F_p[t]/(π)` for a monic irreducible `π`, checked at construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueField {
    modulus: Poly,
}

impl ResidueField {
    pub fn new(modulus: Poly) -> Result<Self, FieldError> {
        if !modulus.is_monic() || modulus.degree().unwrap_or(0) == 0 {
            return Err(FieldError::Reducible);
        }
        if !poly_factor(&modulus)?.is_irreducible() {
            return Err(FieldError::Reducible);
        }
        Ok(ResidueField { modulus })
    }

    pub fn modulus(&self) -> &Poly {
        &self.modulus
    }

    pub fn degree(&self) -> usize {
        self.modulus.degree().expect("nonconstant")
    }

    /// `p^deg π`, or `None` if it does not fit in a `u128`.
    pub fn order(&self) -> Option<u128> {
        (self.modulus.p as u128).checked_pow(self.degree() as u32)
    }

    pub fn reduce(&self, f: &Poly) -> Result<Poly, FieldError> {
        f.rem(&self.modulus)
    }

    pub fn mul(&self, a: &Poly, b: &Poly) -> Result<Poly, FieldError> {
        a.checked_mul(b)?.rem(&self.modulus)
    }

    pub fn inv(&self, a: &Poly) -> Result<Poly, FieldError> {
        let a = self.reduce(a)?;
        if a.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        // a^(p^d - 2), walking the base-p digits of the exponent:
        // the lowest digit is p - 2, every other digit is p - 1
        let mut acc = Poly::from_raw(a.p, vec![1]);
        let mut pw = a.clone();
        let p = a.p;
        for k in 0..self.degree() {
            let digit = if k == 0 { p - 2 } else { p - 1 };
            acc = self.mul(&acc, &pw.pow_mod(digit, &self.modulus)?)?;
            pw = pw.pow_mod(p, &self.modulus)?;
        }
        Ok(acc)
    }
}

/// `f mod π` after checking that `π` is monic irreducible.
pub fn residue_image(f: &Poly, pi: &Poly) -> Result<Poly, FieldError> {
    ResidueField::new(pi.clone())?.reduce(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn field_examples() {
        let k = f(11);
        assert_eq!(field_arith(k.elem(5), k.elem(1), FieldOp::Div).unwrap(), k.elem(5));
        assert_eq!(k.elem(5).inv().unwrap().value(), 9);
        assert_eq!(f(7).elem(27).value(), 6);
        assert_eq!(f(7).elem(-1).value(), 6);
    }

    #[test]
    fn field_errors() {
        assert_eq!(PrimeField::new(9), Err(FieldError::NotPrime(9)));
        assert_eq!(PrimeField::new(1), Err(FieldError::NotPrime(1)));
        let k = f(11);
        assert_eq!(k.elem(3).checked_div(k.zero()), Err(FieldError::DivisionByZero));
        assert_eq!(k.elem(3).checked_add(f(7).elem(3)), Err(FieldError::ModulusMismatch(11, 7)));
    }

    #[test]
    fn field_axioms_exhaustive() {
        for p in [2, 3, 5, 7, 11, 13] {
            let k = f(p);
            for a in k.elements() {
                if !a.is_zero() {
                    assert_eq!(a * a.inv().unwrap(), k.one());
                }
                for b in k.elements() {
                    for c in k.elements() {
                        assert_eq!((a * b) * c, a * (b * c));
                    }
                }
            }
        }
    }

    #[test]
    fn poly_examples() {
        let k = f(5);
        let as5 = k.artin_schreier();
        assert!(as5.rem(&k.t()).unwrap().is_zero());
        let g = as5.gcd(&k.poly(&[-1, 0, 1])).unwrap();
        assert_eq!(g, k.poly(&[-1, 0, 1]));
        assert_eq!(&as5 * &Poly::one(k), as5);
        assert_eq!(as5.div_rem(&Poly::zero(k)), Err(FieldError::DivisionByZero));
    }

    #[test]
    fn display_is_readable() {
        let k = f(5);
        assert_eq!(k.artin_schreier().to_string(), "t^5 - t");
        assert_eq!(k.poly(&[3, 2, 1]).to_string(), "t^2 + 2t - 2");
        assert_eq!(Poly::zero(k).to_string(), "0");
    }

    #[test]
    fn translation_by_one_fixes_artin_schreier() {
        let k = f(5);
        assert_eq!(k.artin_schreier().translate(k.one()), k.artin_schreier());
        assert_eq!(f(7).t().translate(f(7).one()), f(7).poly(&[1, 1]));
    }

    #[test]
    fn factor_artin_schreier_splits() {
        let k = f(11);
        let fac = poly_factor(&k.artin_schreier()).unwrap();
        assert_eq!(fac.factors.len(), 11);
        for (i, (q, m)) in fac.factors.iter().enumerate() {
            assert_eq!(*m, 1);
            assert_eq!(q.degree(), Some(1));
            // sorted by constant term
            assert_eq!(q.coeff(0).value(), i as u64);
        }
        assert_eq!(fac.expand(), k.artin_schreier());
    }

    fn has_root(g: &Poly) -> bool {
        g.field().elements().any(|x| g.eval(x).is_zero())
    }

    #[test]
    fn artin_schreier_twists_are_irreducible() {
        let k = f(11);
        for c in 1..11 {
            let g = &k.artin_schreier() - &k.constant(c);
            // brute-force root search: no linear factor
            assert!(!has_root(&g));
            let fac = poly_factor(&g).unwrap();
            assert!(fac.is_irreducible(), "c = {c}");
            assert_eq!(fac.factors[0].0.degree(), Some(11));
            assert_eq!(fac.expand(), g);
        }
    }

    #[test]
    fn factor_pure_power_and_zero() {
        let k = f(5);
        let fac = poly_factor(&k.t().pow(3)).unwrap();
        assert_eq!(fac.factors, vec![(k.t(), 3)]);
        assert_eq!(poly_factor(&Poly::zero(k)), Err(FieldError::ZeroPolynomial));
        let c = poly_factor(&k.constant(3)).unwrap();
        assert!(c.factors.is_empty());
        assert_eq!(c.unit, k.elem(3));
    }

    #[test]
    fn factor_inseparable_parts() {
        // (t^2 + 2)^5 (t + 1)^7 over F_5 needs a p-th root step
        let k = f(5);
        let g = &k.poly(&[2, 0, 1]).pow(5) * &k.poly(&[1, 1]).pow(7);
        let fac = poly_factor(&g.scale(k.elem(3))).unwrap();
        assert_eq!(fac.unit, k.elem(3));
        assert_eq!(fac.factors, vec![(k.poly(&[1, 1]), 7), (k.poly(&[2, 0, 1]), 5)]);
    }

    #[test]
    fn factor_characteristic_two() {
        let k = f(2);
        // t^4 + t = t (t + 1)(t^2 + t + 1)
        let fac = poly_factor(&k.poly(&[0, 1, 0, 0, 1])).unwrap();
        assert_eq!(fac.factors, vec![(k.poly(&[0, 1]), 1), (k.poly(&[1, 1]), 1), (k.poly(&[1, 1, 1]), 1)]);
        // product of the two irreducible quartics... t^16 - t contains all degree 1, 2, 4 irreducibles
        let t16 = &k.t().pow(16) - &k.t();
        let fac = poly_factor(&t16).unwrap();
        let degs: Vec<_> = fac.factors.iter().map(|(q, _)| q.degree().unwrap()).collect();
        assert_eq!(degs, vec![1, 1, 2, 4, 4, 4]);
        assert_eq!(fac.expand(), t16);
    }

    #[test]
    fn residue_examples() {
        let k5 = f(5);
        assert!(residue_image(&k5.artin_schreier(), &k5.t()).unwrap().is_zero());
        let k7 = f(7);
        assert_eq!(residue_image(&k7.poly(&[3, 1]), &k7.t()).unwrap(), k7.constant(3));
        // t^2 + 1 is irreducible over F_7 since -1 is a non-square
        let pi = k7.poly(&[1, 0, 1]);
        let r = residue_image(&k7.t().pow(2), &pi).unwrap();
        assert_eq!(r, k7.constant(-1));
        assert_eq!(residue_image(&k7.t(), &k7.poly(&[0, 0, 1])), Err(FieldError::Reducible));
    }

    #[test]
    fn residue_field_inverse() {
        let k7 = f(7);
        let field = ResidueField::new(k7.poly(&[1, 0, 1])).unwrap();
        assert_eq!(field.order(), Some(49));
        for a in 0..7 {
            for b in 0..7 {
                let x = k7.poly(&[a, b]);
                if x.is_zero() {
                    assert!(field.inv(&x).is_err());
                    continue;
                }
                let y = field.inv(&x).unwrap();
                assert!(field.mul(&x, &y).unwrap().is_one());
            }
        }
    }

    #[test]
    fn valuation_and_reciprocal() {
        let k = f(7);
        let g = &k.t().pow(3) * &k.poly(&[1, 1]);
        assert_eq!(g.valuation(&k.t()), Some(3));
        assert_eq!(g.valuation(&k.poly(&[1, 1])), Some(1));
        assert_eq!(Poly::zero(k).valuation(&k.t()), None);
        assert_eq!(k.poly(&[1, 2]).reciprocal(3).unwrap(), k.poly(&[0, 0, 2, 1]));
        assert!(k.poly(&[1, 2, 3]).reciprocal(1).is_none());
    }
}
