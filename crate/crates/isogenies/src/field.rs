//! Exact arithmetic in prime fields F_p and extensions F_{p^d} = F_p[t]/(m(t)).
//!
//! Primes are limited to 62 bits so every product fits a u128 accumulator.
//! Elements are always stored fully reduced, with canonical representatives
//! in [0, p).

use std::cell::Cell;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const MAX_PRIME_BITS: u32 = 62;

thread_local! {
    static BASE_MUL_COUNT: Cell<u64> = const { Cell::new(0) };
}

/// Reset the thread-local counter of base-field multiplications.
pub fn reset_op_count() {
    BASE_MUL_COUNT.with(|c| c.set(0));
}

/// Number of base-field multiplications performed on this thread since the
/// last reset. Used by the benchmark ladder and the superlinearity checks.
pub fn op_count() -> u64 {
    BASE_MUL_COUNT.with(|c| c.get())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FieldError {
    /// p failed the primality test.
    CompositeModulus(u64),
    /// The extension modulus is not irreducible over F_p.
    ReducibleModulus,
    /// Modulus degree does not match the requested extension degree.
    DegreeMismatch { expected: usize, got: usize },
    /// Operands belong to different field specs.
    SpecMismatch,
    DivisionByZero,
    /// p in {2, 3} requires the explicit any-characteristic constructor.
    SmallCharacteristic(u64),
    /// p does not fit in 62 bits.
    PrimeTooLarge(u64),
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldError::CompositeModulus(p) => write!(f, "{} is not prime", p),
            FieldError::ReducibleModulus => write!(f, "modulus is reducible over F_p"),
            FieldError::DegreeMismatch { expected, got } => {
                write!(f, "modulus degree {} does not match extension degree {}", got, expected)
            }
            FieldError::SpecMismatch => write!(f, "elements belong to different fields"),
            FieldError::DivisionByZero => write!(f, "division by zero"),
            FieldError::SmallCharacteristic(p) => {
                write!(f, "characteristic {} requires the any-characteristic constructor", p)
            }
            FieldError::PrimeTooLarge(p) => write!(f, "prime {} exceeds 62 bits", p),
        }
    }
}

impl std::error::Error for FieldError {}

// ---------------------------------------------------------------------------
// base arithmetic mod p
// ---------------------------------------------------------------------------

#[inline]
fn addm(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b;
    if s >= p { s - p } else { s }
}

#[inline]
fn subm(a: u64, b: u64, p: u64) -> u64 {
    if a >= b { a - b } else { a + p - b }
}

#[inline]
fn mulm(a: u64, b: u64, p: u64) -> u64 {
    BASE_MUL_COUNT.with(|c| c.set(c.get() + 1));
    ((a as u128 * b as u128) % p as u128) as u64
}

// mulm without touching the op counter, for primality testing etc.
#[inline]
fn mulm_uncounted(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powm(mut base: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulm_uncounted(acc, base, p);
        }
        base = mulm_uncounted(base, base, p);
        e >>= 1;
    }
    acc
}

fn invm(a: u64, p: u64) -> Option<u64> {
    if a % p == 0 {
        return None;
    }
    // extended Euclid on (a, p)
    let (mut r0, mut r1) = (a as i128 % p as i128, p as i128);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    debug_assert_eq!(r0, 1);
    let mut s = s0 % p as i128;
    if s < 0 {
        s += p as i128;
    }
    Some(s as u64)
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Miller-Rabin with 40 rounds: the 12 deterministic small-prime bases plus
/// 28 pseudorandom ones.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == q {
            return true;
        }
        if n % q == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d & 1 == 0 {
        d >>= 1;
        s += 1;
    }
    let witness = |a: u64| -> bool {
        let a = a % n;
        if a == 0 {
            return true;
        }
        let mut x = powm(a, d, n);
        if x == 1 || x == n - 1 {
            return true;
        }
        for _ in 1..s {
            x = mulm_uncounted(x, x, n);
            if x == n - 1 {
                return true;
            }
        }
        false
    };
    let mut bases: Vec<u64> = vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    let mut st = n ^ 0xdeadbeefcafef00d;
    while bases.len() < 40 {
        bases.push(2 + splitmix64(&mut st) % (n - 3));
    }
    bases.into_iter().all(witness)
}

// ---------------------------------------------------------------------------
// dense polynomials over F_p (coefficient vectors), used internally for the
// extension-field modulus and element reduction
// ---------------------------------------------------------------------------

fn fp_trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn fp_mul(a: &[u64], b: &[u64], p: u64, counted: bool) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            let prod = if counted { mulm(ai, bj, p) } else { mulm_uncounted(ai, bj, p) };
            out[i + j] = addm(out[i + j], prod, p);
        }
    }
    fp_trim(&mut out);
    out
}

// remainder of a modulo monic m
fn fp_rem(a: &[u64], m: &[u64], p: u64, counted: bool) -> Vec<u64> {
    debug_assert_eq!(*m.last().unwrap(), 1, "modulus must be monic");
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for (j, &mj) in m.iter().enumerate().take(dm) {
                let prod = if counted { mulm(lead, mj, p) } else { mulm_uncounted(lead, mj, p) };
                r[shift + j] = subm(r[shift + j], prod, p);
            }
        }
        r.pop();
    }
    fp_trim(&mut r);
    r
}

fn fp_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let (mut r0, mut r1) = (a.to_vec(), b.to_vec());
    fp_trim(&mut r0);
    fp_trim(&mut r1);
    while !r1.is_empty() {
        // make r1 monic before reducing
        let lc = *r1.last().unwrap();
        if lc != 1 {
            let inv = invm(lc, p).unwrap();
            for c in r1.iter_mut() {
                *c = mulm_uncounted(*c, inv, p);
            }
        }
        let r = fp_rem(&r0, &r1, p, false);
        r0 = std::mem::replace(&mut r1, r);
    }
    if let Some(&lc) = r0.last() {
        if lc != 1 {
            let inv = invm(lc, p).unwrap();
            for c in r0.iter_mut() {
                *c = mulm_uncounted(*c, inv, p);
            }
        }
    }
    r0
}

// base^(p) mod m by square-and-multiply on the exponent p
fn fp_frobenius(base: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut sq = base.to_vec();
    let mut e = p;
    while e > 0 {
        if e & 1 == 1 {
            acc = fp_rem(&fp_mul(&acc, &sq, p, false), m, p, false);
        }
        sq = fp_rem(&fp_mul(&sq, &sq, p, false), m, p, false);
        e >>= 1;
    }
    acc
}

fn fp_is_irreducible(m: &[u64], p: u64) -> bool {
    let d = m.len() - 1;
    if d == 0 {
        return false;
    }
    let x = vec![0u64, 1];
    if d == 1 {
        return true;
    }
    // x^(p^k) mod m for k = 1..d
    let mut fr = x.clone();
    let mut frobs = Vec::with_capacity(d);
    for _ in 0..d {
        fr = fp_frobenius(&fr, m, p);
        frobs.push(fr.clone());
    }
    // x^(p^d) == x mod m
    let mut top = frobs[d - 1].clone();
    // top - x
    while top.len() < 2 {
        top.push(0);
    }
    top[1] = subm(top[1], 1, p);
    fp_trim(&mut top);
    if !top.is_empty() {
        return false;
    }
    // gcd(x^(p^(d/q)) - x, m) = 1 for each prime q | d
    let mut q = 2;
    let mut dd = d;
    let mut prime_divs = vec![];
    while q * q <= dd {
        if dd % q == 0 {
            prime_divs.push(q);
            while dd % q == 0 {
                dd /= q;
            }
        }
        q += 1;
    }
    if dd > 1 {
        prime_divs.push(dd);
    }
    for q in prime_divs {
        let k = d / q;
        let mut g = frobs[k - 1].clone();
        while g.len() < 2 {
            g.push(0);
        }
        g[1] = subm(g[1], 1, p);
        fp_trim(&mut g);
        if fp_gcd(&g, m, p).len() != 1 {
            return false;
        }
    }
    true
}

// ---------------------------------------------------------------------------
// FieldSpec
// ---------------------------------------------------------------------------

/// A concrete finite field F_{p^d}. For d > 1 the field is F_p[t] modulo a
/// monic irreducible of degree d. Two specs interoperate only when
/// (p, d, modulus) are identical.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    p: u64,
    d: usize,
    /// full coefficient vector of the monic modulus (length d+1); None for d = 1
    modulus: Option<Vec<u64>>,
}

pub type Field = Arc<FieldSpec>;

impl FieldSpec {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn modulus(&self) -> Option<&[u64]> {
        self.modulus.as_deref()
    }

    /// Field order p^d, if it fits in u64.
    pub fn order(&self) -> Option<u64> {
        let mut acc: u64 = 1;
        for _ in 0..self.d {
            acc = acc.checked_mul(self.p)?;
        }
        Some(acc)
    }
}

/// Default RNG seed for modulus generation, so repeated `make_field` calls
/// over the same (p, d) agree.
pub const DEFAULT_MODULUS_SEED: u64 = 0x5eed_1505;

pub fn make_field(p: u64, d: usize, modulus: Option<&[u64]>) -> Result<Field, FieldError> {
    if p <= 3 && is_prime(p) {
        return Err(FieldError::SmallCharacteristic(p));
    }
    make_field_seeded(p, d, modulus, DEFAULT_MODULUS_SEED)
}

/// Like `make_field` but accepts characteristic 2 and 3. Only the group law
/// and Velu's construction support such fields.
pub fn make_field_any_char(p: u64, d: usize, modulus: Option<&[u64]>) -> Result<Field, FieldError> {
    make_field_seeded(p, d, modulus, DEFAULT_MODULUS_SEED)
}

pub fn make_field_seeded(
    p: u64,
    d: usize,
    modulus: Option<&[u64]>,
    seed: u64,
) -> Result<Field, FieldError> {
    if p >> MAX_PRIME_BITS != 0 {
        return Err(FieldError::PrimeTooLarge(p));
    }
    if !is_prime(p) {
        return Err(FieldError::CompositeModulus(p));
    }
    assert!(d >= 1, "extension degree must be at least 1");
    if d == 1 {
        if let Some(m) = modulus {
            let mut v = m.to_vec();
            fp_trim(&mut v);
            if v.len() != 2 {
                return Err(FieldError::DegreeMismatch { expected: 1, got: v.len().saturating_sub(1) });
            }
        }
        return Ok(Arc::new(FieldSpec { p, d: 1, modulus: None }));
    }
    let m = match modulus {
        Some(m) => {
            let mut v: Vec<u64> = m.iter().map(|&c| c % p).collect();
            fp_trim(&mut v);
            if v.len() != d + 1 {
                return Err(FieldError::DegreeMismatch { expected: d, got: v.len().saturating_sub(1) });
            }
            if *v.last().unwrap() != 1 {
                // normalize to monic
                let inv = invm(*v.last().unwrap(), p).unwrap();
                for c in v.iter_mut() {
                    *c = mulm_uncounted(*c, inv, p);
                }
            }
            if !fp_is_irreducible(&v, p) {
                return Err(FieldError::ReducibleModulus);
            }
            v
        }
        None => {
            // random monic candidates, expected O(d) tries
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ p ^ (d as u64) << 32);
            loop {
                let mut v: Vec<u64> = (0..d).map(|_| rng.gen_range(0..p)).collect();
                v.push(1);
                if fp_is_irreducible(&v, p) {
                    break v;
                }
            }
        }
    };
    Ok(Arc::new(FieldSpec { p, d, modulus: Some(m) }))
}

// ---------------------------------------------------------------------------
// FieldElement
// ---------------------------------------------------------------------------

/// An element of F_{p^d}, stored as d canonical coefficients in [0, p).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    spec: Field,
    c: Vec<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithKind {
    Add,
    Sub,
    Mul,
    Neg,
}

impl FieldElement {
    pub fn zero(spec: &Field) -> Self {
        FieldElement { spec: spec.clone(), c: vec![0; spec.d] }
    }

    pub fn one(spec: &Field) -> Self {
        Self::from_u64(spec, 1)
    }

    pub fn from_u64(spec: &Field, v: u64) -> Self {
        let mut c = vec![0; spec.d];
        c[0] = v % spec.p;
        FieldElement { spec: spec.clone(), c }
    }

    pub fn from_i64(spec: &Field, v: i64) -> Self {
        let p = spec.p as i128;
        let mut r = v as i128 % p;
        if r < 0 {
            r += p;
        }
        Self::from_u64(spec, r as u64)
    }

    /// Element from ascending coefficients; shorter vectors are zero-padded.
    pub fn from_coeffs(spec: &Field, coeffs: &[u64]) -> Result<Self, FieldError> {
        if coeffs.len() > spec.d {
            return Err(FieldError::DegreeMismatch { expected: spec.d, got: coeffs.len() });
        }
        let mut c: Vec<u64> = coeffs.iter().map(|&v| v % spec.p).collect();
        c.resize(spec.d, 0);
        Ok(FieldElement { spec: spec.clone(), c })
    }

    pub fn spec(&self) -> &Field {
        &self.spec
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&v| v == 0)
    }

    pub fn is_one(&self) -> bool {
        self.c[0] == 1 && self.c[1..].iter().all(|&v| v == 0)
    }

    /// Canonical key defining a strict total order on field elements:
    /// coefficients in ascending degree, compared lexicographically.
    pub fn order_key(&self) -> Vec<u64> {
        self.c.clone()
    }

    fn check_spec(&self, other: &FieldElement) -> Result<(), FieldError> {
        if self.spec == other.spec {
            Ok(())
        } else {
            Err(FieldError::SpecMismatch)
        }
    }

    pub fn arith(&self, other: &FieldElement, kind: ArithKind) -> Result<FieldElement, FieldError> {
        if kind != ArithKind::Neg {
            self.check_spec(other)?;
        }
        let p = self.spec.p;
        let c = match kind {
            ArithKind::Add => {
                self.c.iter().zip(&other.c).map(|(&a, &b)| addm(a, b, p)).collect()
            }
            ArithKind::Sub => {
                self.c.iter().zip(&other.c).map(|(&a, &b)| subm(a, b, p)).collect()
            }
            ArithKind::Neg => self.c.iter().map(|&a| subm(0, a, p)).collect(),
            ArithKind::Mul => {
                if self.spec.d == 1 {
                    vec![mulm(self.c[0], other.c[0], p)]
                } else {
                    let prod = fp_mul(&self.c, &other.c, p, true);
                    let mut r = fp_rem(&prod, self.spec.modulus.as_ref().unwrap(), p, true);
                    r.resize(self.spec.d, 0);
                    r
                }
            }
        };
        Ok(FieldElement { spec: self.spec.clone(), c })
    }

    pub fn add(&self, other: &FieldElement) -> FieldElement {
        self.arith(other, ArithKind::Add).expect("field spec mismatch")
    }

    pub fn sub(&self, other: &FieldElement) -> FieldElement {
        self.arith(other, ArithKind::Sub).expect("field spec mismatch")
    }

    pub fn mul(&self, other: &FieldElement) -> FieldElement {
        self.arith(other, ArithKind::Mul).expect("field spec mismatch")
    }

    pub fn neg(&self) -> FieldElement {
        self.arith(self, ArithKind::Neg).unwrap()
    }

    pub fn double(&self) -> FieldElement {
        self.add(self)
    }

    pub fn square(&self) -> FieldElement {
        self.mul(self)
    }

    pub fn invert(&self) -> Result<FieldElement, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let p = self.spec.p;
        if self.spec.d == 1 {
            let inv = invm(self.c[0], p).ok_or(FieldError::DivisionByZero)?;
            return Ok(FieldElement { spec: self.spec.clone(), c: vec![inv] });
        }
        // extended Euclid on (a, modulus) over F_p[t]
        let m = self.spec.modulus.as_ref().unwrap();
        let mut a = self.c.clone();
        fp_trim(&mut a);
        let (mut r0, mut r1) = (m.clone(), a);
        let (mut s0, mut s1): (Vec<u64>, Vec<u64>) = (vec![], vec![1]);
        while !r1.is_empty() {
            // divide r0 by r1
            let lc = *r1.last().unwrap();
            let lc_inv = invm(lc, p).unwrap();
            let mut q = vec![0u64; r0.len().saturating_sub(r1.len()) + 1];
            let mut rem = r0.clone();
            while rem.len() >= r1.len() && !rem.is_empty() {
                let coeff = mulm(*rem.last().unwrap(), lc_inv, p);
                let shift = rem.len() - r1.len();
                q[shift] = coeff;
                for (j, &c1) in r1.iter().enumerate() {
                    rem[shift + j] = subm(rem[shift + j], mulm(coeff, c1, p), p);
                }
                fp_trim(&mut rem);
                if rem.len() < r1.len() {
                    break;
                }
            }
            fp_trim(&mut q);
            // s_next = s0 - q*s1
            let qs1 = fp_mul(&q, &s1, p, true);
            let n = s0.len().max(qs1.len());
            let mut s_next = vec![0u64; n];
            for (i, slot) in s_next.iter_mut().enumerate() {
                let a0 = s0.get(i).copied().unwrap_or(0);
                let b0 = qs1.get(i).copied().unwrap_or(0);
                *slot = subm(a0, b0, p);
            }
            fp_trim(&mut s_next);
            r0 = std::mem::replace(&mut r1, rem);
            s0 = std::mem::replace(&mut s1, s_next);
        }
        // r0 = gcd, a unit since modulus is irreducible and a != 0
        debug_assert_eq!(r0.len(), 1);
        let scale = invm(r0[0], p).unwrap();
        let mut c: Vec<u64> = s0.iter().map(|&v| mulm(v, scale, p)).collect();
        c.resize(self.spec.d, 0);
        Ok(FieldElement { spec: self.spec.clone(), c })
    }

    pub fn div(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        Ok(self.mul(&other.invert()?))
    }

    pub fn pow(&self, mut e: u128) -> FieldElement {
        let mut acc = Self::one(&self.spec);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.square();
            e >>= 1;
        }
        acc
    }

    /// Embed a prime-field element into an extension with the same p.
    pub fn embed(&self, target: &Field) -> Result<FieldElement, FieldError> {
        if self.spec.d != 1 || target.p != self.spec.p {
            return Err(FieldError::SpecMismatch);
        }
        Ok(FieldElement::from_u64(target, self.c[0]))
    }

    /// Inverse of `embed`: succeeds when every coefficient above degree 0 is zero.
    pub fn descend(&self, base: &Field) -> Option<FieldElement> {
        if base.d != 1 || base.p != self.spec.p {
            return None;
        }
        if self.c[1..].iter().all(|&v| v == 0) {
            Some(FieldElement::from_u64(base, self.c[0]))
        } else {
            None
        }
    }

    pub fn random<R: Rng>(spec: &Field, rng: &mut R) -> FieldElement {
        let c = (0..spec.d).map(|_| rng.gen_range(0..spec.p)).collect();
        FieldElement { spec: spec.clone(), c }
    }

    /// Symmetric representative string: coefficients in (-p/2, p/2].
    pub fn to_balanced_string(&self) -> String {
        let p = self.spec.p;
        let bal = |v: u64| -> i64 {
            if v > p / 2 {
                v as i64 - p as i64
            } else {
                v as i64
            }
        };
        if self.spec.d == 1 {
            format!("{}", bal(self.c[0]))
        } else {
            let parts: Vec<String> = self.c.iter().map(|&v| bal(v).to_string()).collect();
            format!("[{}]", parts.join(","))
        }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.spec.d == 1 {
            write!(f, "{}", self.c[0])
        } else {
            let parts: Vec<String> = self.c.iter().map(|v| v.to_string()).collect();
            write!(f, "[{}]", parts.join(","))
        }
    }
}

impl PartialOrd for FieldElement {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        if self.spec != other.spec {
            return None;
        }
        Some(self.c.cmp(&other.c))
    }
}

/// Iterate every element of the field, in order_key order. The caller is
/// responsible for keeping p^d within an enumeration bound.
pub fn all_elements(spec: &Field) -> impl Iterator<Item = FieldElement> + '_ {
    let order = spec.order().expect("field too large to enumerate");
    let spec = spec.clone();
    (0..order).map(move |mut idx| {
        let mut c = vec![0u64; spec.d];
        for slot in c.iter_mut() {
            *slot = idx % spec.p;
            idx /= spec.p;
        }
        FieldElement { spec: spec.clone(), c }
    })
}
