//! Dense univariate polynomials over a finite field.
//!
//! Multiplication is schoolbook below a crossover degree and Karatsuba above
//! it, which makes the measured cost superlinear but subquadratic — the M(n)
//! contract the series module leans on.

use std::fmt;

use crate::field::{Field, FieldElement, FieldError};

/// Degree at or above which multiply switches to Karatsuba.
pub const KARATSUBA_CROSSOVER: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PolyError {
    SpecMismatch,
    DivisionByZero,
    /// Antiderivative needs 1..=n invertible; the characteristic is too small.
    NonInvertibleIndex(u64),
    NotAPerfectSquare,
}

impl fmt::Display for PolyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolyError::SpecMismatch => write!(f, "polynomials over different fields"),
            PolyError::DivisionByZero => write!(f, "division by the zero polynomial"),
            PolyError::NonInvertibleIndex(i) => {
                write!(f, "index {} is not invertible in the field", i)
            }
            PolyError::NotAPerfectSquare => write!(f, "polynomial is not a perfect square"),
        }
    }
}

impl std::error::Error for PolyError {}

impl From<FieldError> for PolyError {
    fn from(e: FieldError) -> Self {
        match e {
            FieldError::DivisionByZero => PolyError::DivisionByZero,
            _ => PolyError::SpecMismatch,
        }
    }
}

/// Coefficients in ascending degree with no trailing zeros; the zero
/// polynomial has an empty coefficient vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    spec: Field,
    coeffs: Vec<FieldElement>,
}

impl Polynomial {
    pub fn new(spec: &Field, mut coeffs: Vec<FieldElement>) -> Self {
        while coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
            coeffs.pop();
        }
        Polynomial { spec: spec.clone(), coeffs }
    }

    pub fn zero(spec: &Field) -> Self {
        Polynomial { spec: spec.clone(), coeffs: vec![] }
    }

    pub fn one(spec: &Field) -> Self {
        Self::constant(FieldElement::one(spec))
    }

    pub fn constant(c: FieldElement) -> Self {
        let spec = c.spec().clone();
        Self::new(&spec, vec![c])
    }

    /// The monomial x.
    pub fn x(spec: &Field) -> Self {
        Self::new(spec, vec![FieldElement::zero(spec), FieldElement::one(spec)])
    }

    /// c * x^k
    pub fn monomial(c: FieldElement, k: usize) -> Self {
        let spec = c.spec().clone();
        let mut coeffs = vec![FieldElement::zero(&spec); k + 1];
        coeffs[k] = c;
        Self::new(&spec, coeffs)
    }

    pub fn from_u64s(spec: &Field, vals: &[u64]) -> Self {
        let coeffs = vals.iter().map(|&v| FieldElement::from_u64(spec, v)).collect();
        Self::new(spec, coeffs)
    }

    pub fn from_i64s(spec: &Field, vals: &[i64]) -> Self {
        let coeffs = vals.iter().map(|&v| FieldElement::from_i64(spec, v)).collect();
        Self::new(spec, coeffs)
    }

    pub fn spec(&self) -> &Field {
        &self.spec
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> FieldElement {
        self.coeffs.get(k).cloned().unwrap_or_else(|| FieldElement::zero(&self.spec))
    }

    pub fn leading(&self) -> Option<&FieldElement> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().map(|c| c.is_one()).unwrap_or(false)
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i).add(&other.coeff(i))).collect();
        Self::new(&self.spec, coeffs)
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i).sub(&other.coeff(i))).collect();
        Self::new(&self.spec, coeffs)
    }

    pub fn neg(&self) -> Polynomial {
        Self::new(&self.spec, self.coeffs.iter().map(|c| c.neg()).collect())
    }

    pub fn scale(&self, c: &FieldElement) -> Polynomial {
        Self::new(&self.spec, self.coeffs.iter().map(|a| a.mul(c)).collect())
    }

    /// Multiply by x^k.
    pub fn shift(&self, k: usize) -> Polynomial {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![FieldElement::zero(&self.spec); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Polynomial { spec: self.spec.clone(), coeffs }
    }

    pub fn multiply(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.spec, other.spec, "polynomials over different fields");
        if self.is_zero() || other.is_zero() {
            return Self::zero(&self.spec);
        }
        let coeffs = mul_rec(&self.spec, &self.coeffs, &other.coeffs);
        Self::new(&self.spec, coeffs)
    }

    pub fn square(&self) -> Polynomial {
        self.multiply(self)
    }

    pub fn pow(&self, mut e: u64) -> Polynomial {
        let mut acc = Self::one(&self.spec);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.multiply(&base);
            }
            base = base.square();
            e >>= 1;
        }
        acc
    }

    pub fn divide(&self, g: &Polynomial) -> Result<(Polynomial, Polynomial), PolyError> {
        if g.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        let dg = g.degree().unwrap();
        if self.degree().map(|d| d < dg).unwrap_or(true) {
            return Ok((Self::zero(&self.spec), self.clone()));
        }
        let lc_inv = g.leading().unwrap().invert()?;
        let mut rem = self.coeffs.clone();
        let dq = rem.len() - 1 - dg;
        let mut q = vec![FieldElement::zero(&self.spec); dq + 1];
        for k in (0..=dq).rev() {
            let top = rem[k + dg].clone();
            if top.is_zero() {
                continue;
            }
            let c = top.mul(&lc_inv);
            for (j, gj) in g.coeffs.iter().enumerate() {
                rem[k + j] = rem[k + j].sub(&c.mul(gj));
            }
            q[k] = c;
        }
        Ok((Self::new(&self.spec, q), Self::new(&self.spec, rem)))
    }

    /// Division asserting a zero remainder.
    pub fn divide_exact(&self, g: &Polynomial) -> Result<Polynomial, PolyError> {
        let (q, r) = self.divide(g)?;
        if !r.is_zero() {
            return Err(PolyError::NotAPerfectSquare);
        }
        Ok(q)
    }

    pub fn to_monic(&self) -> Polynomial {
        match self.leading() {
            None => self.clone(),
            Some(lc) if lc.is_one() => self.clone(),
            Some(lc) => self.scale(&lc.invert().unwrap()),
        }
    }

    pub fn gcd_monic(&self, other: &Polynomial) -> Polynomial {
        let (mut r0, mut r1) = (self.clone(), other.clone());
        while !r1.is_zero() {
            let r = r0.divide(&r1).unwrap().1;
            r0 = std::mem::replace(&mut r1, r);
        }
        r0.to_monic()
    }

    pub fn derivative(&self) -> Polynomial {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.mul(&FieldElement::from_u64(&self.spec, i as u64)))
            .collect();
        Self::new(&self.spec, coeffs)
    }

    /// Antiderivative with zero constant term; fails when some index 1..=n
    /// is a multiple of the characteristic.
    pub fn antiderivative(&self) -> Result<Polynomial, PolyError> {
        let mut coeffs = vec![FieldElement::zero(&self.spec)];
        for (i, c) in self.coeffs.iter().enumerate() {
            let idx = FieldElement::from_u64(&self.spec, (i + 1) as u64);
            let inv = idx.invert().map_err(|_| PolyError::NonInvertibleIndex((i + 1) as u64))?;
            coeffs.push(c.mul(&inv));
        }
        Ok(Self::new(&self.spec, coeffs))
    }

    pub fn evaluate(&self, a: &FieldElement) -> FieldElement {
        let mut acc = FieldElement::zero(&self.spec);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(a).add(c);
        }
        acc
    }

    /// f(alpha*x + beta), expanded by Horner in (alpha*x + beta).
    pub fn substitute_affine(&self, alpha: &FieldElement, beta: &FieldElement) -> Polynomial {
        let lin = Self::new(&self.spec, vec![beta.clone(), alpha.clone()]);
        let mut acc = Self::zero(&self.spec);
        for c in self.coeffs.iter().rev() {
            acc = acc.multiply(&lin).add(&Self::constant(c.clone()));
        }
        acc
    }

    /// f(g(x)) by Horner.
    pub fn compose(&self, g: &Polynomial) -> Polynomial {
        let mut acc = Self::zero(&self.spec);
        for c in self.coeffs.iter().rev() {
            acc = acc.multiply(g).add(&Self::constant(c.clone()));
        }
        acc
    }

    pub fn from_roots(spec: &Field, roots: &[FieldElement]) -> Polynomial {
        let mut acc = Self::one(spec);
        for r in roots {
            let lin = Self::new(spec, vec![r.neg(), FieldElement::one(spec)]);
            acc = acc.multiply(&lin);
        }
        acc
    }

    /// Monic square root of a monic even-degree polynomial, by matching
    /// coefficients from the top degree down; verified by squaring back.
    pub fn square_root(&self) -> Result<Polynomial, PolyError> {
        if self.is_one() {
            return Ok(self.clone());
        }
        let deg = self.degree().ok_or(PolyError::NotAPerfectSquare)?;
        if deg % 2 != 0 || !self.is_monic() {
            return Err(PolyError::NotAPerfectSquare);
        }
        let h = deg / 2;
        let two = FieldElement::from_u64(&self.spec, 2);
        let two_inv = two.invert().map_err(|_| PolyError::NotAPerfectSquare)?;
        let mut g = vec![FieldElement::zero(&self.spec); h + 1];
        g[h] = FieldElement::one(&self.spec);
        // coefficient of x^(h+k) in g^2 is 2*g_k*g_h plus cross terms whose
        // indices both lie strictly between k and h, all already known
        for k in (0..h).rev() {
            let mut cross = FieldElement::zero(&self.spec);
            for i in (k + 1)..h {
                let j = h + k - i;
                if j <= k || j >= h {
                    continue;
                }
                cross = cross.add(&g[i].mul(&g[j]));
            }
            let target = self.coeff(h + k).sub(&cross);
            g[k] = target.mul(&two_inv);
        }
        let root = Self::new(&self.spec, g);
        if root.square() != *self {
            return Err(PolyError::NotAPerfectSquare);
        }
        Ok(root)
    }

    /// Ascending coefficient list rendering, e.g. `[7,3,1]`.
    pub fn coeff_list_string(&self) -> String {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        format!("[{}]", parts.join(","))
    }
}

fn mul_schoolbook(spec: &Field, a: &[FieldElement], b: &[FieldElement]) -> Vec<FieldElement> {
    let mut out = vec![FieldElement::zero(spec); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(&ai.mul(bj));
        }
    }
    out
}

fn mul_rec(spec: &Field, a: &[FieldElement], b: &[FieldElement]) -> Vec<FieldElement> {
    if a.len() < KARATSUBA_CROSSOVER || b.len() < KARATSUBA_CROSSOVER {
        return mul_schoolbook(spec, a, b);
    }
    let m = a.len().max(b.len()).div_ceil(2);
    let (a0, a1) = a.split_at(m.min(a.len()));
    let (b0, b1) = b.split_at(m.min(b.len()));
    let z0 = mul_rec(spec, a0, b0);
    let z2 = if a1.is_empty() || b1.is_empty() { vec![] } else { mul_rec(spec, a1, b1) };
    let asum = slice_add(spec, a0, a1);
    let bsum = slice_add(spec, b0, b1);
    let z1full = mul_rec(spec, &asum, &bsum);
    // z1 = (a0+a1)(b0+b1) - z0 - z2
    let mut z1 = z1full;
    for (i, c) in z0.iter().enumerate() {
        z1[i] = z1[i].sub(c);
    }
    for (i, c) in z2.iter().enumerate() {
        z1[i] = z1[i].sub(c);
    }
    let mut out = vec![FieldElement::zero(spec); a.len() + b.len() - 1];
    for (i, c) in z0.into_iter().enumerate() {
        out[i] = out[i].add(&c);
    }
    for (i, c) in z1.into_iter().enumerate() {
        if i + m < out.len() {
            out[i + m] = out[i + m].add(&c);
        }
    }
    for (i, c) in z2.into_iter().enumerate() {
        out[i + 2 * m] = out[i + 2 * m].add(&c);
    }
    out
}

fn slice_add(spec: &Field, a: &[FieldElement], b: &[FieldElement]) -> Vec<FieldElement> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(|| FieldElement::zero(spec));
            let y = b.get(i).cloned().unwrap_or_else(|| FieldElement::zero(spec));
            x.add(&y)
        })
        .collect()
}

impl fmt::Display for Polynomial {
    /// Pretty form like `x^2 + 3*x + 7`, descending degree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{}", c)?,
                1 if c.is_one() => write!(f, "x")?,
                1 => write!(f, "{}*x", c)?,
                _ if c.is_one() => write!(f, "x^{}", i)?,
                _ => write!(f, "{}*x^{}", c, i)?,
            }
        }
        Ok(())
    }
}
