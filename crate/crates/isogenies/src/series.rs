//! Truncated power series and even-exponent Laurent series.
//!
//! Newton iterations for reciprocal/exp/log, linear and first-order
//! nonlinear ODE solvers, and the Weierstrass p-function expansion that
//! feeds the kernel-recovery algorithm.

use std::fmt;

use crate::field::{Field, FieldElement};
use crate::poly::Polynomial;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeriesError {
    SpecMismatch,
    ZeroConstantTerm,
    ConstantTermNotOne,
    NonZeroConstantTerm,
    NonInvertibleIndex(u64),
    SingularLeadingCoefficient,
    ZeroInitialDerivative,
    CharacteristicTooSmall,
    ZeroLeadingCoefficient,
}

impl fmt::Display for SeriesError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeriesError::SpecMismatch => write!(f, "series over different fields"),
            SeriesError::ZeroConstantTerm => write!(f, "constant term is zero"),
            SeriesError::ConstantTermNotOne => write!(f, "constant term is not one"),
            SeriesError::NonZeroConstantTerm => write!(f, "constant term is not zero"),
            SeriesError::NonInvertibleIndex(i) => {
                write!(f, "index {} is not invertible in the field", i)
            }
            SeriesError::SingularLeadingCoefficient => {
                write!(f, "leading ODE coefficient vanishes at zero")
            }
            SeriesError::ZeroInitialDerivative => write!(f, "initial derivative must be nonzero"),
            SeriesError::CharacteristicTooSmall => {
                write!(f, "field characteristic too small for the requested precision")
            }
            SeriesError::ZeroLeadingCoefficient => write!(f, "leading coefficient is zero"),
        }
    }
}

impl std::error::Error for SeriesError {}

// ---------------------------------------------------------------------------
// TruncatedSeries
// ---------------------------------------------------------------------------

/// A power series mod z^n; `coeffs` always holds exactly n entries, one per
/// power z^0..z^(n-1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    spec: Field,
    coeffs: Vec<FieldElement>,
}

impl TruncatedSeries {
    pub fn new(spec: &Field, mut coeffs: Vec<FieldElement>, n: usize) -> Self {
        coeffs.truncate(n);
        coeffs.resize(n, FieldElement::zero(spec));
        TruncatedSeries { spec: spec.clone(), coeffs }
    }

    pub fn zero(spec: &Field, n: usize) -> Self {
        Self::new(spec, vec![], n)
    }

    pub fn one(spec: &Field, n: usize) -> Self {
        Self::new(spec, vec![FieldElement::one(spec)], n)
    }

    pub fn from_poly(p: &Polynomial, n: usize) -> Self {
        Self::new(p.spec(), p.coeffs().to_vec(), n)
    }

    pub fn from_u64s(spec: &Field, vals: &[u64], n: usize) -> Self {
        Self::new(spec, vals.iter().map(|&v| FieldElement::from_u64(spec, v)).collect(), n)
    }

    pub fn spec(&self) -> &Field {
        &self.spec
    }

    pub fn precision(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> FieldElement {
        debug_assert!(i < self.coeffs.len(), "read past series precision");
        self.coeffs.get(i).cloned().unwrap_or_else(|| FieldElement::zero(&self.spec))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn truncate(&self, n: usize) -> Self {
        Self::new(&self.spec, self.coeffs.clone(), n.min(self.coeffs.len()))
    }

    /// Re-pad to a larger precision, treating unknown coefficients as zero.
    /// Only correct when the series is exactly a polynomial; used internally
    /// by the ODE doubling loop where that is the working assumption.
    fn pad(&self, n: usize) -> Self {
        Self::new(&self.spec, self.coeffs.clone(), n)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.precision().min(other.precision());
        let coeffs = (0..n).map(|i| self.coeffs[i].add(&other.coeffs[i])).collect();
        Self::new(&self.spec, coeffs, n)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.precision().min(other.precision());
        let coeffs = (0..n).map(|i| self.coeffs[i].sub(&other.coeffs[i])).collect();
        Self::new(&self.spec, coeffs, n)
    }

    pub fn neg(&self) -> Self {
        Self::new(&self.spec, self.coeffs.iter().map(|c| c.neg()).collect(), self.precision())
    }

    pub fn scale(&self, c: &FieldElement) -> Self {
        Self::new(&self.spec, self.coeffs.iter().map(|a| a.mul(c)).collect(), self.precision())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.precision().min(other.precision());
        mul_prefix(&self.spec, &self.coeffs, &other.coeffs, n)
    }

    pub fn derivative(&self) -> Self {
        let n = self.precision().saturating_sub(1);
        let coeffs = (0..n)
            .map(|i| self.coeffs[i + 1].mul(&FieldElement::from_u64(&self.spec, (i + 1) as u64)))
            .collect();
        Self::new(&self.spec, coeffs, n)
    }

    pub fn antiderivative(&self) -> Result<Self, SeriesError> {
        let n = self.precision() + 1;
        let mut coeffs = vec![FieldElement::zero(&self.spec)];
        for (i, c) in self.coeffs.iter().enumerate() {
            let idx = FieldElement::from_u64(&self.spec, (i + 1) as u64);
            let inv =
                idx.invert().map_err(|_| SeriesError::NonInvertibleIndex((i + 1) as u64))?;
            coeffs.push(c.mul(&inv));
        }
        Ok(Self::new(&self.spec, coeffs, n))
    }

    /// Horner evaluation of a polynomial at this series.
    pub fn compose_poly(&self, g: &Polynomial) -> Self {
        let n = self.precision();
        let mut acc = Self::zero(&self.spec, n);
        for c in g.coeffs().iter().rev() {
            acc = acc.mul(self);
            acc.coeffs[0] = acc.coeffs[0].add(c);
        }
        acc
    }
}

/// First n coefficients of a*b, using the polynomial Karatsuba multiplier so
/// measured costs inherit the M(n) contract.
fn mul_prefix(spec: &Field, a: &[FieldElement], b: &[FieldElement], n: usize) -> TruncatedSeries {
    let pa = Polynomial::new(spec, a[..a.len().min(n)].to_vec());
    let pb = Polynomial::new(spec, b[..b.len().min(n)].to_vec());
    let prod = pa.multiply(&pb);
    TruncatedSeries::new(spec, prod.coeffs().to_vec(), n)
}

/// Newton reciprocal: f*g = 1 mod z^n. Each refinement step only computes
/// the top half of the update, keeping the total cost within a small
/// constant multiple of one full-size multiplication.
pub fn reciprocal(f: &TruncatedSeries, n: usize) -> Result<TruncatedSeries, SeriesError> {
    let spec = f.spec().clone();
    let f0 = f.coeffs().first().cloned().unwrap_or_else(|| FieldElement::zero(&spec));
    if f0.is_zero() {
        return Err(SeriesError::ZeroConstantTerm);
    }
    let n = n.min(f.precision()).max(1);
    let mut g = vec![f0.invert().unwrap()];
    let mut m = 1usize;
    while m < n {
        let m2 = (2 * m).min(n);
        // e = 1 - f*g mod z^m2 has valuation >= m; only its top part matters
        let fg = mul_prefix(&spec, &f.coeffs()[..m2.min(f.precision())], &g, m2);
        let mut e_hi: Vec<FieldElement> = fg.coeffs()[m..m2].iter().map(|c| c.neg()).collect();
        if !e_hi.is_empty() {
            // delta = g * e_hi mod z^(m2-m); g += delta << m
            let delta = mul_prefix(&spec, &g, &e_hi, m2 - m);
            e_hi.clear();
            g.resize(m2, FieldElement::zero(&spec));
            for (i, c) in delta.coeffs().iter().enumerate() {
                g[m + i] = g[m + i].add(c);
            }
        }
        m = m2;
    }
    Ok(TruncatedSeries::new(&spec, g, n))
}

/// Quadratic-time reciprocal by direct convolution; the oracle the Newton
/// version is tested against.
pub fn reciprocal_naive(f: &TruncatedSeries, n: usize) -> Result<TruncatedSeries, SeriesError> {
    let spec = f.spec().clone();
    let f0 = f.coeffs().first().cloned().unwrap_or_else(|| FieldElement::zero(&spec));
    if f0.is_zero() {
        return Err(SeriesError::ZeroConstantTerm);
    }
    let n = n.min(f.precision()).max(1);
    let inv0 = f0.invert().unwrap();
    let mut g = vec![inv0.clone()];
    for i in 1..n {
        let mut s = FieldElement::zero(&spec);
        for j in 1..=i {
            let fj = if j < f.precision() { f.coeff(j) } else { FieldElement::zero(&spec) };
            s = s.add(&fj.mul(&g[i - j]));
        }
        g.push(s.neg().mul(&inv0));
    }
    Ok(TruncatedSeries::new(&spec, g, n))
}

/// log f = antiderivative(f' / f); requires f(0) = 1.
pub fn log_trunc(f: &TruncatedSeries, n: usize) -> Result<TruncatedSeries, SeriesError> {
    let spec = f.spec().clone();
    let n = n.min(f.precision()).max(1);
    let f0 = f.coeffs().first().cloned().unwrap_or_else(|| FieldElement::zero(&spec));
    if !f0.is_one() {
        return Err(SeriesError::ConstantTermNotOne);
    }
    if n == 1 {
        return Ok(TruncatedSeries::zero(&spec, 1));
    }
    let d = f.truncate(n).derivative();
    let r = reciprocal(&f.truncate(n - 1), n - 1)?;
    let q = d.mul(&r);
    q.antiderivative()
}

/// Newton exponential from g = 1: g <- g*(1 + f - log g); requires f(0) = 0.
pub fn exp_trunc(f: &TruncatedSeries, n: usize) -> Result<TruncatedSeries, SeriesError> {
    let spec = f.spec().clone();
    let n = n.min(f.precision()).max(1);
    let f0 = f.coeffs().first().cloned().unwrap_or_else(|| FieldElement::zero(&spec));
    if !f0.is_zero() {
        return Err(SeriesError::NonZeroConstantTerm);
    }
    let mut g = TruncatedSeries::one(&spec, 1);
    let mut m = 1usize;
    while m < n {
        let m2 = (2 * m).min(n);
        let g2 = g.pad(m2);
        let lg = log_trunc(&g2, m2)?;
        let mut corr = f.truncate(m2).sub(&lg);
        corr.coeffs[0] = corr.coeffs[0].add(&FieldElement::one(&spec));
        g = g2.mul(&corr);
        m = m2;
    }
    Ok(g)
}

/// Direct exponential Sum f^i / i!, the quadratic-time oracle.
pub fn exp_naive(f: &TruncatedSeries, n: usize) -> Result<TruncatedSeries, SeriesError> {
    let spec = f.spec().clone();
    let n = n.min(f.precision()).max(1);
    let f0 = f.coeffs().first().cloned().unwrap_or_else(|| FieldElement::zero(&spec));
    if !f0.is_zero() {
        return Err(SeriesError::NonZeroConstantTerm);
    }
    let mut acc = TruncatedSeries::one(&spec, n);
    let mut term = TruncatedSeries::one(&spec, n);
    for i in 1..n as u64 {
        let idx = FieldElement::from_u64(&spec, i);
        let inv = idx.invert().map_err(|_| SeriesError::NonInvertibleIndex(i))?;
        term = term.mul(&f.truncate(n)).scale(&inv);
        acc = acc.add(&term);
        if term.is_zero() {
            break;
        }
    }
    Ok(acc)
}

/// Solve a f' + b f = c mod z^n with f(0) = alpha, by the integrating-factor
/// recipe: B = b/a, C = c/a, J = exp(int B), f = (alpha + int C*J)/J.
pub fn solve_linear_ode(
    a: &TruncatedSeries,
    b: &TruncatedSeries,
    c: &TruncatedSeries,
    alpha: &FieldElement,
    n: usize,
) -> Result<TruncatedSeries, SeriesError> {
    let spec = a.spec().clone();
    let a0 = a.coeffs().first().cloned().unwrap_or_else(|| FieldElement::zero(&spec));
    if a0.is_zero() {
        return Err(SeriesError::SingularLeadingCoefficient);
    }
    if n == 0 {
        return Ok(TruncatedSeries::zero(&spec, 0));
    }
    if n == 1 {
        return Ok(TruncatedSeries::new(&spec, vec![alpha.clone()], 1));
    }
    let a_inv = reciprocal(&a.pad(n - 1), n - 1)?;
    let bb = b.pad(n - 1).mul(&a_inv);
    let cc = c.pad(n - 1).mul(&a_inv);
    let j = exp_trunc(&bb.antiderivative()?, n)?;
    let cj = cc.mul(&j.truncate(n - 1)).antiderivative()?;
    let mut num = cj;
    num.coeffs[0] = num.coeffs[0].add(alpha);
    let j_inv = reciprocal(&j, n)?;
    Ok(num.mul(&j_inv))
}

/// Solve (f')^2 = G(f) mod z^n with f(0) = alpha, f'(0) = beta != 0, by
/// Newton doubling (each pass solves the linearized equation
/// 2 f' g' - G'(f) g = G(f) - (f')^2 and the valid precision goes s -> 2s-1).
pub fn solve_nonlinear_ode(
    g_poly: &Polynomial,
    alpha: &FieldElement,
    beta: &FieldElement,
    n: usize,
) -> Result<TruncatedSeries, SeriesError> {
    let spec = g_poly.spec().clone();
    if beta.is_zero() {
        return Err(SeriesError::ZeroInitialDerivative);
    }
    let gprime = g_poly.derivative();
    let mut f = TruncatedSeries::new(&spec, vec![alpha.clone(), beta.clone()], 2.min(n.max(1)));
    let mut s = f.precision();
    while s < n {
        let s_new = (2 * s - 1).min(n);
        let fx = f.pad(s_new + 1);
        let fp = fx.derivative(); // precision s_new
        let a = fp.scale(&FieldElement::from_u64(&spec, 2));
        let b = fx.truncate(s_new).compose_poly(&gprime).neg();
        let c = fx.truncate(s_new).compose_poly(g_poly).sub(&fp.mul(&fp));
        let corr = solve_linear_ode(&a, &b, &c, &FieldElement::zero(&spec), s_new)?;
        f = fx.truncate(s_new).add(&corr);
        s = s_new;
    }
    Ok(f.truncate(n))
}

// ---------------------------------------------------------------------------
// EvenLaurentSeries
// ---------------------------------------------------------------------------

/// A Laurent series supported on even powers of z, stored at half exponents:
/// `coeffs[i]` is the coefficient of z^(2*(lo+i)), and the series is
/// trustworthy for all exponents 2k with k < valid_to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvenLaurentSeries {
    spec: Field,
    lo: i64,
    valid_to: i64,
    coeffs: Vec<FieldElement>,
}

impl EvenLaurentSeries {
    pub fn new(spec: &Field, mut lo: i64, valid_to: i64, mut coeffs: Vec<FieldElement>) -> Self {
        coeffs.truncate((valid_to - lo).max(0) as usize);
        coeffs.resize((valid_to - lo).max(0) as usize, FieldElement::zero(spec));
        // keep the lowest stored coefficient nonzero
        while coeffs.first().map(|c| c.is_zero()).unwrap_or(false) {
            coeffs.remove(0);
            lo += 1;
        }
        if coeffs.is_empty() {
            lo = valid_to;
        }
        EvenLaurentSeries { spec: spec.clone(), lo, valid_to, coeffs }
    }

    pub fn zero(spec: &Field, valid_to: i64) -> Self {
        Self::new(spec, valid_to, valid_to, vec![])
    }

    pub fn one(spec: &Field, valid_to: i64) -> Self {
        Self::new(spec, 0, valid_to, vec![FieldElement::one(spec)])
    }

    pub fn spec(&self) -> &Field {
        &self.spec
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Half of the valuation (the series starts at z^(2*lo())).
    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn valid_to(&self) -> i64 {
        self.valid_to
    }

    /// Coefficient of z^(2k).
    pub fn coeff_at(&self, k: i64) -> FieldElement {
        debug_assert!(k < self.valid_to, "read past series truncation bound");
        if k < self.lo || k >= self.lo + self.coeffs.len() as i64 {
            FieldElement::zero(&self.spec)
        } else {
            self.coeffs[(k - self.lo) as usize].clone()
        }
    }

    pub fn leading_coeff(&self) -> Option<&FieldElement> {
        self.coeffs.first()
    }

    pub fn truncate(&self, valid_to: i64) -> Self {
        Self::new(&self.spec, self.lo, valid_to.min(self.valid_to), self.coeffs.clone())
    }

    pub fn add(&self, other: &Self) -> Self {
        let valid_to = self.valid_to.min(other.valid_to);
        if self.is_zero() {
            return other.truncate(valid_to);
        }
        if other.is_zero() {
            return self.truncate(valid_to);
        }
        let lo = self.lo.min(other.lo);
        let n = (valid_to - lo).max(0) as usize;
        let coeffs = (0..n as i64)
            .map(|i| {
                let k = lo + i;
                let a = self.stored(k);
                let b = other.stored(k);
                a.add(&b)
            })
            .collect();
        Self::new(&self.spec, lo, valid_to, coeffs)
    }

    fn stored(&self, k: i64) -> FieldElement {
        if k < self.lo || k >= self.lo + self.coeffs.len() as i64 {
            FieldElement::zero(&self.spec)
        } else {
            self.coeffs[(k - self.lo) as usize].clone()
        }
    }

    pub fn neg(&self) -> Self {
        Self::new(
            &self.spec,
            self.lo,
            self.valid_to,
            self.coeffs.iter().map(|c| c.neg()).collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &FieldElement) -> Self {
        Self::new(
            &self.spec,
            self.lo,
            self.valid_to,
            self.coeffs.iter().map(|a| a.mul(c)).collect(),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            let vt = (self.lo + other.valid_to).min(other.lo + self.valid_to);
            return Self::zero(&self.spec, vt);
        }
        let lo = self.lo + other.lo;
        let valid_to = (self.lo + other.valid_to).min(other.lo + self.valid_to);
        let n = (valid_to - lo).max(0) as usize;
        let prod = mul_prefix(&self.spec, &self.coeffs, &other.coeffs, n.max(1));
        Self::new(&self.spec, lo, valid_to, prod.coeffs().to_vec())
    }

    pub fn reciprocal(&self) -> Result<Self, SeriesError> {
        let lead = self.leading_coeff().ok_or(SeriesError::ZeroLeadingCoefficient)?;
        if lead.is_zero() {
            return Err(SeriesError::ZeroLeadingCoefficient);
        }
        // f = z^(2 lo) * u with u a unit power series in z^2
        let m = self.coeffs.len();
        let unit = TruncatedSeries::new(&self.spec, self.coeffs.clone(), m);
        let inv = reciprocal(&unit, m)?;
        Ok(Self::new(&self.spec, -self.lo, -self.lo + m as i64, inv.coeffs().to_vec()))
    }

    pub fn pow(&self, e: u32) -> Self {
        // truncation bound for f^e matches e-1 self-multiplications
        let mut acc = match e {
            0 => return Self::one(&self.spec, self.valid_to - self.lo),
            _ => self.clone(),
        };
        for _ in 1..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// (d/dz of the series, squared) — still even, computed directly so the
    /// odd intermediate never needs representing.
    pub fn derivative_squared(&self) -> Self {
        if self.is_zero() {
            return Self::zero(&self.spec, 2 * self.valid_to);
        }
        // f' has terms 2k c_k z^(2k-1); the square has exponents 2(k+l-1)
        let d: Vec<FieldElement> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let k = self.lo + i as i64;
                c.mul(&FieldElement::from_i64(&self.spec, 2 * k))
            })
            .collect();
        let lo = 2 * self.lo - 1;
        // f' trustworthy below z^(2 valid_to - 1); square of two such factors
        // with valuation 2 lo - 1 is trustworthy below z^(2(lo + valid_to - 1))
        let valid_to = self.lo + self.valid_to - 1;
        let n = (valid_to - lo).max(0) as usize;
        let prod = mul_prefix(&self.spec, &d, &d, n.max(1));
        Self::new(&self.spec, lo, valid_to, prod.coeffs().to_vec())
    }
}

impl fmt::Display for EvenLaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let e = 2 * (self.lo + i as i64);
            match e {
                0 => write!(f, "{}", c)?,
                _ => write!(f, "{}*z^{}", c, e)?,
            }
        }
        write!(f, " + O(z^{})", 2 * self.valid_to)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WpMethod {
    Recurrence,
    Fast,
}

/// Weierstrass p-function of y^2 = x^3 + Ax + B as an even Laurent series:
/// z^-2 + c_1 z^2 + c_2 z^4 + ... with n coefficient slots (c_1..c_{n-1}).
pub fn wp_series(
    a: &FieldElement,
    b: &FieldElement,
    n: usize,
    method: WpMethod,
) -> Result<EvenLaurentSeries, SeriesError> {
    let spec = a.spec().clone();
    assert!(n >= 1);
    match method {
        WpMethod::Recurrence => {
            // divisions go up to 2(n-1)+3 = 2n+1, so require 2n+3 < p
            if spec.degree() == 1 && 2 * (n as u64) + 3 >= spec.p() {
                return Err(SeriesError::CharacteristicTooSmall);
            }
            if spec.p() <= 7 {
                return Err(SeriesError::CharacteristicTooSmall);
            }
            let mut c = vec![FieldElement::zero(&spec); n];
            if n >= 2 {
                let five = FieldElement::from_u64(&spec, 5);
                c[1] = a.neg().mul(&five.invert().map_err(|_| SeriesError::CharacteristicTooSmall)?);
            }
            if n >= 3 {
                let seven = FieldElement::from_u64(&spec, 7);
                c[2] =
                    b.neg().mul(&seven.invert().map_err(|_| SeriesError::CharacteristicTooSmall)?);
            }
            for j in 3..n {
                let mut s = FieldElement::zero(&spec);
                for i in 1..=(j - 2) {
                    s = s.add(&c[i].mul(&c[j - 1 - i]));
                }
                let denom = FieldElement::from_u64(&spec, ((j - 2) * (2 * j + 3)) as u64);
                let scale = FieldElement::from_u64(&spec, 3)
                    .mul(&denom.invert().map_err(|_| SeriesError::CharacteristicTooSmall)?);
                c[j] = scale.mul(&s);
            }
            // coefficient layout: z^-2, then c_0 slot (zero), c_1 z^2, ...
            let mut coeffs = vec![FieldElement::one(&spec)];
            coeffs.push(FieldElement::zero(&spec)); // z^0
            coeffs.extend(c.into_iter().skip(1));
            Ok(EvenLaurentSeries::new(&spec, -1, n as i64, coeffs))
        }
        WpMethod::Fast => {
            // R solves (R')^2 = B R^6 + A R^4 + 1 with R = z + ...; then
            // Q = R^2 = 1/p, inverted as a unit series in z^2
            let m = 2 * n + 6;
            if spec.degree() == 1 && (m as u64) >= spec.p() {
                return Err(SeriesError::CharacteristicTooSmall);
            }
            let g = Polynomial::new(
                &spec,
                vec![
                    FieldElement::one(&spec),
                    FieldElement::zero(&spec),
                    FieldElement::zero(&spec),
                    FieldElement::zero(&spec),
                    a.clone(),
                    FieldElement::zero(&spec),
                    b.clone(),
                ],
            );
            let r = solve_nonlinear_ode(
                &g,
                &FieldElement::zero(&spec),
                &FieldElement::one(&spec),
                m,
            )
            .map_err(|e| match e {
                SeriesError::NonInvertibleIndex(_) => SeriesError::CharacteristicTooSmall,
                other => other,
            })?;
            let q = r.mul(&r);
            // q = z^2 * unit; collect the even coefficients of the unit part
            debug_assert!(q.coeff(0).is_zero() && q.coeff(1).is_zero());
            let mut unit = Vec::with_capacity(n + 1);
            let mut i = 2;
            while i < q.precision() && unit.len() <= n {
                unit.push(q.coeff(i));
                i += 2;
            }
            let unit_ts = TruncatedSeries::new(&spec, unit, n + 1);
            let inv = reciprocal(&unit_ts, n + 1)?;
            Ok(EvenLaurentSeries::new(&spec, -1, n as i64, inv.coeffs().to_vec()))
        }
    }
}

/// Residual of the defining identity (p')^2 - 4(p^3 + A p + B); zero (to the
/// common precision) exactly when `wp` expands the p-function of (A, B).
pub fn wp_identity_residual(
    wp: &EvenLaurentSeries,
    a: &FieldElement,
    b: &FieldElement,
) -> EvenLaurentSeries {
    let spec = wp.spec().clone();
    let four = FieldElement::from_u64(&spec, 4);
    let lhs = wp.derivative_squared();
    let cube = wp.pow(3);
    let vt = lhs.valid_to().min(cube.valid_to());
    let mut rhs = cube.add(&wp.truncate(vt).scale(a));
    let b_series = EvenLaurentSeries::new(&spec, 0, vt, vec![b.clone()]);
    rhs = rhs.add(&b_series);
    lhs.truncate(vt).sub(&rhs.scale(&four))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{make_field, FieldElement};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn f101() -> Field {
        make_field(101, 1, None).unwrap()
    }

    #[test]
    fn reciprocal_geometric() {
        let f = f101();
        let s = TruncatedSeries::from_u64s(&f, &[1, 1], 4);
        let r = reciprocal(&s, 4).unwrap();
        assert_eq!(r, TruncatedSeries::from_u64s(&f, &[1, 100, 1, 100], 4));
        assert_eq!(reciprocal(&TruncatedSeries::one(&f, 5), 5).unwrap(), TruncatedSeries::one(&f, 5));
        assert!(matches!(
            reciprocal(&TruncatedSeries::zero(&f, 3), 3),
            Err(SeriesError::ZeroConstantTerm)
        ));
    }

    #[test]
    fn reciprocal_matches_naive() {
        let f = f101();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let n = rng.gen_range(1..64);
            let mut coeffs: Vec<u64> = (0..n).map(|_| rng.gen_range(0..101)).collect();
            if coeffs[0] == 0 {
                coeffs[0] = 1;
            }
            let s = TruncatedSeries::from_u64s(&f, &coeffs, n);
            let fast = reciprocal(&s, n).unwrap();
            let slow = reciprocal_naive(&s, n).unwrap();
            assert_eq!(fast, slow);
            assert_eq!(fast.mul(&s), TruncatedSeries::one(&f, n));
        }
    }

    #[test]
    fn log_mercator() {
        let f = f101();
        let s = TruncatedSeries::from_u64s(&f, &[1, 1], 4);
        let l = log_trunc(&s, 4).unwrap();
        let half = FieldElement::from_u64(&f, 2).invert().unwrap();
        let third = FieldElement::from_u64(&f, 3).invert().unwrap();
        assert_eq!(l.coeff(0), FieldElement::zero(&f));
        assert_eq!(l.coeff(1), FieldElement::one(&f));
        assert_eq!(l.coeff(2), half.neg());
        assert_eq!(l.coeff(3), third);
        assert!(log_trunc(&TruncatedSeries::one(&f, 4), 4).unwrap().is_zero());
    }

    #[test]
    fn exp_series_and_round_trip() {
        let f = f101();
        let z = TruncatedSeries::from_u64s(&f, &[0, 1], 4);
        let e = exp_trunc(&z, 4).unwrap();
        assert_eq!(e, exp_naive(&z, 4).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let n = 16;
            let mut coeffs: Vec<u64> = (0..n).map(|_| rng.gen_range(0..101)).collect();
            coeffs[0] = 0;
            let s = TruncatedSeries::from_u64s(&f, &coeffs, n);
            let e1 = exp_trunc(&s, n).unwrap();
            assert_eq!(e1, exp_naive(&s, n).unwrap());
            assert_eq!(log_trunc(&e1, n).unwrap(), s);
            // exp(log(1+f)) = 1+f
            let mut one_plus = s.clone();
            one_plus.coeffs[0] = FieldElement::one(&f);
            assert_eq!(exp_trunc(&log_trunc(&one_plus, n).unwrap(), n).unwrap(), one_plus);
        }
    }

    #[test]
    fn linear_ode_examples() {
        let f = f101();
        let one = TruncatedSeries::one(&f, 8);
        let zero = TruncatedSeries::zero(&f, 8);
        // f' = 1, f(0)=0 -> z
        let sol = solve_linear_ode(&one, &zero, &one, &FieldElement::zero(&f), 4).unwrap();
        assert_eq!(sol, TruncatedSeries::from_u64s(&f, &[0, 1], 4));
        // f' = -f, f(0)=1 -> 1 - z + z^2/2 - z^3/6
        let sol = solve_linear_ode(&one, &one, &zero, &FieldElement::one(&f), 4).unwrap();
        let half = FieldElement::from_u64(&f, 2).invert().unwrap();
        let sixth = FieldElement::from_u64(&f, 6).invert().unwrap();
        assert_eq!(sol.coeff(0), FieldElement::one(&f));
        assert_eq!(sol.coeff(1), FieldElement::one(&f).neg());
        assert_eq!(sol.coeff(2), half);
        assert_eq!(sol.coeff(3), sixth.neg());
    }

    #[test]
    fn linear_ode_plugback() {
        let f = f101();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let n = 16;
            let rand_series = |rng: &mut ChaCha8Rng, unit: bool| {
                let mut coeffs: Vec<u64> = (0..n).map(|_| rng.gen_range(0..101)).collect();
                if unit && coeffs[0] == 0 {
                    coeffs[0] = 1;
                }
                TruncatedSeries::from_u64s(&f, &coeffs, n)
            };
            let a = rand_series(&mut rng, true);
            let b = rand_series(&mut rng, false);
            let c = rand_series(&mut rng, false);
            let alpha = FieldElement::from_u64(&f, rng.gen_range(0..101));
            let sol = solve_linear_ode(&a, &b, &c, &alpha, n).unwrap();
            assert_eq!(sol.coeff(0), alpha);
            let resid = a.mul(&sol.derivative()).add(&b.mul(&sol)).sub(&c).truncate(n - 1);
            assert!(resid.is_zero(), "residual {:?}", resid);
        }
    }

    #[test]
    fn nonlinear_ode_examples() {
        let f = f101();
        // (f')^2 = 1, f(0)=0, f'(0)=1 -> f = z
        let g = Polynomial::from_u64s(&f, &[1]);
        let sol =
            solve_nonlinear_ode(&g, &FieldElement::zero(&f), &FieldElement::one(&f), 6).unwrap();
        assert_eq!(sol, TruncatedSeries::from_u64s(&f, &[0, 1], 6));
        // R' ^2 = B R^6 + A R^4 + 1 -> z + (A/10) z^5 + (B/14) z^7
        let a = FieldElement::from_u64(&f, 13);
        let b = FieldElement::from_u64(&f, 57);
        let g = Polynomial::new(
            &f,
            vec![
                FieldElement::one(&f),
                FieldElement::zero(&f),
                FieldElement::zero(&f),
                FieldElement::zero(&f),
                a.clone(),
                FieldElement::zero(&f),
                b.clone(),
            ],
        );
        let sol =
            solve_nonlinear_ode(&g, &FieldElement::zero(&f), &FieldElement::one(&f), 8).unwrap();
        let ten_inv = FieldElement::from_u64(&f, 10).invert().unwrap();
        let fourteen_inv = FieldElement::from_u64(&f, 14).invert().unwrap();
        assert_eq!(sol.coeff(1), FieldElement::one(&f));
        assert_eq!(sol.coeff(5), a.mul(&ten_inv));
        assert_eq!(sol.coeff(7), b.mul(&fourteen_inv));
        for i in [0, 2, 3, 4, 6] {
            assert!(sol.coeff(i).is_zero());
        }
    }

    #[test]
    fn nonlinear_ode_plugback() {
        let f = f101();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..10 {
            let n = 16;
            let deg = rng.gen_range(0..=6);
            let coeffs: Vec<u64> = (0..=deg).map(|_| rng.gen_range(0..101)).collect();
            let g = Polynomial::from_u64s(&f, &coeffs);
            let alpha = FieldElement::from_u64(&f, rng.gen_range(0..101));
            // (f'(0))^2 must equal G(alpha): pick beta first, adjust G's constant
            let beta = FieldElement::from_u64(&f, rng.gen_range(1..101));
            let mut gc = g.coeffs().to_vec();
            if gc.is_empty() {
                gc.push(FieldElement::zero(&f));
            }
            let val = g.evaluate(&alpha).sub(&gc[0].clone());
            gc[0] = beta.square().sub(&val);
            let g = Polynomial::new(&f, gc);
            let sol = solve_nonlinear_ode(&g, &alpha, &beta, n).unwrap();
            let fp = sol.pad(n + 1).derivative();
            let resid = fp.mul(&fp).sub(&sol.compose_poly(&g)).truncate(n - 1);
            assert!(resid.is_zero(), "residual {:?}", resid);
        }
    }

    #[test]
    fn wp_f19_example() {
        let f = make_field(19, 1, None).unwrap();
        let a = FieldElement::from_u64(&f, 1);
        let b = FieldElement::from_u64(&f, 2);
        let wp = wp_series(&a, &b, 3, WpMethod::Recurrence).unwrap();
        assert_eq!(wp.coeff_at(-1), FieldElement::one(&f));
        assert_eq!(wp.coeff_at(0), FieldElement::zero(&f));
        assert_eq!(wp.coeff_at(1), FieldElement::from_u64(&f, 15));
        assert_eq!(wp.coeff_at(2), FieldElement::from_u64(&f, 16));
    }

    #[test]
    fn wp_zero_curve() {
        let f = f101();
        let z = FieldElement::zero(&f);
        for method in [WpMethod::Recurrence, WpMethod::Fast] {
            let wp = wp_series(&z, &z, 8, method).unwrap();
            assert_eq!(wp.lo(), -1);
            assert!(wp.coeff_at(-1).is_one());
            for k in 0..8 {
                assert!(wp.coeff_at(k).is_zero());
            }
        }
    }

    #[test]
    fn wp_methods_agree_and_satisfy_identity() {
        for p in [101u64, 499] {
            let f = make_field(p, 1, None).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(p);
            for _ in 0..20 {
                let a = FieldElement::from_u64(&f, rng.gen_range(0..p));
                let b = FieldElement::from_u64(&f, rng.gen_range(0..p));
                let n = rng.gen_range(3..12);
                let w1 = wp_series(&a, &b, n, WpMethod::Recurrence).unwrap();
                let w2 = wp_series(&a, &b, n, WpMethod::Fast).unwrap();
                assert_eq!(w1, w2, "p={} A={} B={} n={}", p, a, b, n);
                let resid = wp_identity_residual(&w1, &a, &b);
                assert!(resid.is_zero(), "p={} A={} B={} n={} resid={}", p, a, b, n, resid);
            }
        }
    }

    #[test]
    fn wp_rejects_small_characteristic() {
        let f = make_field(19, 1, None).unwrap();
        let a = FieldElement::one(&f);
        let b = FieldElement::one(&f);
        assert!(matches!(
            wp_series(&a, &b, 10, WpMethod::Recurrence),
            Err(SeriesError::CharacteristicTooSmall)
        ));
    }

    #[test]
    fn laurent_arith_basics() {
        let f = f101();
        let zm2 = EvenLaurentSeries::new(&f, -1, 5, vec![FieldElement::one(&f)]);
        let prod = zm2.mul(&zm2);
        assert_eq!(prod.lo(), -2);
        assert!(prod.coeff_at(-2).is_one());

        let a = FieldElement::from_u64(&f, 7);
        let b = FieldElement::from_u64(&f, 11);
        let wp = wp_series(&a, &b, 6, WpMethod::Recurrence).unwrap();
        let inv = wp.reciprocal().unwrap();
        let back = wp.mul(&inv);
        assert_eq!(back.lo(), 0);
        assert!(back.coeff_at(0).is_one());
        for k in 1..back.valid_to() {
            assert!(back.coeff_at(k).is_zero());
        }
        let one = wp.pow(0);
        assert!(one.coeff_at(0).is_one());
    }
}
