//! Separable normalized isogenies: construction from kernel points or
//! kernel polynomials, evaluation, composition, classification, and the
//! pullback-constant extraction that detects normalization.

mod general;
mod kohel;
mod velu;

pub use general::from_kernel_general;
pub use kohel::kohel;
pub use velu::velu;

use std::fmt;

use crate::curve::{
    two_torsion_polys, CurveError, Point, RationalMapPair, WeierstrassCurve,
    WeierstrassIsomorphism,
};
use crate::field::{Field, FieldElement};
use crate::poly::Polynomial;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IsogenyError {
    NotASubgroup,
    PointNotOnCurve,
    SingularCodomain,
    UnsupportedKernelShape,
    BadCharacteristic,
    InconsistentDegree,
    ModelMismatch,
    CurveMismatch,
    InconsistentMaps,
    NotAKernelPolynomial,
}

impl fmt::Display for IsogenyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IsogenyError::NotASubgroup => write!(f, "kernel points do not form a subgroup"),
            IsogenyError::PointNotOnCurve => write!(f, "kernel point not on the curve"),
            IsogenyError::SingularCodomain => write!(f, "computed codomain is singular"),
            IsogenyError::UnsupportedKernelShape => {
                write!(f, "kernel polynomial shape not supported by this construction")
            }
            IsogenyError::BadCharacteristic => write!(f, "characteristic 2 or 3 not supported"),
            IsogenyError::InconsistentDegree => {
                write!(f, "kernel polynomial degree inconsistent with the stated degree")
            }
            IsogenyError::ModelMismatch => write!(f, "inner codomain is not the outer domain"),
            IsogenyError::CurveMismatch => write!(f, "point does not belong to the domain"),
            IsogenyError::InconsistentMaps => {
                write!(f, "coordinate maps fail the differential identity")
            }
            IsogenyError::NotAKernelPolynomial => {
                write!(f, "polynomial does not define a rational kernel")
            }
        }
    }
}

impl std::error::Error for IsogenyError {}

impl From<CurveError> for IsogenyError {
    fn from(e: CurveError) -> Self {
        match e {
            CurveError::SingularCurve => IsogenyError::SingularCodomain,
            CurveError::BadCharacteristic => IsogenyError::BadCharacteristic,
            CurveError::PointNotOnCurve | CurveError::CurveMismatch => {
                IsogenyError::PointNotOnCurve
            }
            _ => IsogenyError::InconsistentMaps,
        }
    }
}

// ---------------------------------------------------------------------------
// rational functions in x
// ---------------------------------------------------------------------------

/// num/den, kept reduced with a monic denominator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatFn {
    pub num: Polynomial,
    pub den: Polynomial,
}

impl RatFn {
    pub fn new(num: Polynomial, den: Polynomial) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        RatFn { num, den }.reduced()
    }

    pub fn from_poly(p: Polynomial) -> Self {
        let one = Polynomial::one(p.spec());
        RatFn { num: p, den: one }
    }

    pub fn zero(spec: &Field) -> Self {
        RatFn { num: Polynomial::zero(spec), den: Polynomial::one(spec) }
    }

    pub fn x(spec: &Field) -> Self {
        RatFn { num: Polynomial::x(spec), den: Polynomial::one(spec) }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn reduced(self) -> Self {
        if self.num.is_zero() {
            let one = Polynomial::one(self.den.spec());
            return RatFn { num: self.num, den: one };
        }
        let g = self.num.gcd_monic(&self.den);
        let (num, den) = if g.is_one() {
            (self.num, self.den)
        } else {
            (self.num.divide(&g).unwrap().0, self.den.divide(&g).unwrap().0)
        };
        let lc_inv = den.leading().unwrap().invert().unwrap();
        RatFn { num: num.scale(&lc_inv), den: den.scale(&lc_inv) }
    }

    pub fn add(&self, other: &RatFn) -> RatFn {
        RatFn::new(
            self.num.multiply(&other.den).add(&other.num.multiply(&self.den)),
            self.den.multiply(&other.den),
        )
    }

    pub fn sub(&self, other: &RatFn) -> RatFn {
        RatFn::new(
            self.num.multiply(&other.den).sub(&other.num.multiply(&self.den)),
            self.den.multiply(&other.den),
        )
    }

    pub fn mul(&self, other: &RatFn) -> RatFn {
        RatFn::new(self.num.multiply(&other.num), self.den.multiply(&other.den))
    }

    pub fn scale(&self, c: &FieldElement) -> RatFn {
        RatFn { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn neg(&self) -> RatFn {
        RatFn { num: self.num.neg(), den: self.den.clone() }
    }

    /// (num' den - num den') / den^2, reduced.
    pub fn derivative(&self) -> RatFn {
        RatFn::new(
            self.num.derivative().multiply(&self.den).sub(&self.num.multiply(&self.den.derivative())),
            self.den.square(),
        )
    }

    /// Evaluate f(p/q) for a polynomial f by homogenizing: the result is
    /// (sum f_i p^i q^(N-i), q^N) with N = deg f.
    pub fn substitute_into(&self, f: &Polynomial) -> RatFn {
        let spec = f.spec();
        if f.is_zero() {
            return RatFn::zero(spec);
        }
        let n = f.degree().unwrap();
        let mut num = Polynomial::zero(spec);
        let mut p_pow = Polynomial::one(spec);
        // build q^(N-i) downward while p^i grows
        let mut q_pows = Vec::with_capacity(n + 1);
        let mut q_acc = Polynomial::one(spec);
        for _ in 0..=n {
            q_pows.push(q_acc.clone());
            q_acc = q_acc.multiply(&self.den);
        }
        for i in 0..=n {
            let term = p_pow.scale(&f.coeff(i)).multiply(&q_pows[n - i]);
            num = num.add(&term);
            if i < n {
                p_pow = p_pow.multiply(&self.num);
            }
        }
        RatFn::new(num, q_pows[n].clone())
    }
}

// ---------------------------------------------------------------------------
// Isogeny
// ---------------------------------------------------------------------------

/// A separable isogeny with explicit coordinate maps: x-map p/q, y-map
/// (n0 + n1 y)/d, kernel polynomial, and the pullback constant c (c = 1
/// exactly for normalized isogenies).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Isogeny {
    pub domain: WeierstrassCurve,
    pub codomain: WeierstrassCurve,
    pub degree: u64,
    pub kernel_poly: Polynomial,
    pub maps: RationalMapPair,
    pub c: FieldElement,
}

impl Isogeny {
    pub fn identity(e: &WeierstrassCurve) -> Self {
        let spec = e.spec();
        Isogeny {
            domain: e.clone(),
            codomain: e.clone(),
            degree: 1,
            kernel_poly: Polynomial::one(spec),
            maps: RationalMapPair::identity(spec),
            c: FieldElement::one(spec),
        }
    }

    /// Assemble an isogeny from externally computed pieces (used for
    /// serialized isogenies and for hand-built maps like Frobenius in tests).
    pub fn from_raw_parts(
        domain: WeierstrassCurve,
        codomain: WeierstrassCurve,
        degree: u64,
        kernel_poly: Polynomial,
        maps: RationalMapPair,
        c: FieldElement,
    ) -> Self {
        Isogeny { domain, codomain, degree, kernel_poly, maps, c }
    }

    pub fn spec(&self) -> &Field {
        self.domain.spec()
    }

    /// Map coefficients down to the base field when every one of them lies
    /// there; None otherwise.
    pub fn descend(&self, base: &Field) -> Option<Isogeny> {
        let dp = |p: &Polynomial| -> Option<Polynomial> {
            let mut coeffs = Vec::with_capacity(p.coeffs().len());
            for c in p.coeffs() {
                coeffs.push(c.descend(base)?);
            }
            Some(Polynomial::new(base, coeffs))
        };
        let dc = |e: &WeierstrassCurve| -> Option<WeierstrassCurve> {
            let a = e.a_invariants();
            let mut out = Vec::with_capacity(5);
            for c in a {
                out.push(c.descend(base)?);
            }
            crate::curve::make_curve(
                base,
                [out[0].clone(), out[1].clone(), out[2].clone(), out[3].clone(), out[4].clone()],
            )
            .ok()
        };
        Some(Isogeny {
            domain: dc(&self.domain)?,
            codomain: dc(&self.codomain)?,
            degree: self.degree,
            kernel_poly: dp(&self.kernel_poly)?,
            maps: RationalMapPair {
                p: dp(&self.maps.p)?,
                q: dp(&self.maps.q)?,
                n0: dp(&self.maps.n0)?,
                n1: dp(&self.maps.n1)?,
                d: dp(&self.maps.d)?,
            },
            c: self.c.descend(base)?,
        })
    }
}

/// Normalize a (n0, n1, d) triple: divide out the common factor and make d
/// monic.
pub(crate) fn reduce_y_maps(
    n0: Polynomial,
    n1: Polynomial,
    d: Polynomial,
) -> (Polynomial, Polynomial, Polynomial) {
    let g = n0.gcd_monic(&n1).gcd_monic(&d);
    let (n0, n1, d) = if g.is_one() {
        (n0, n1, d)
    } else {
        (
            n0.divide(&g).unwrap().0,
            n1.divide(&g).unwrap().0,
            d.divide(&g).unwrap().0,
        )
    };
    let lc_inv = d.leading().unwrap().invert().unwrap();
    (n0.scale(&lc_inv), n1.scale(&lc_inv), d.scale(&lc_inv))
}

/// y-maps of a normalized (c = 1) isogeny derived from its x-map via the
/// differential identity: n1/d = (p/q)' and
/// n0/d = (a1 x + a3)/2 * (p/q)' - (a1 p/q + a3)/2, where (a1, a3) are
/// shared by domain and codomain.
pub(crate) fn normalized_y_maps_from_x(
    p: &Polynomial,
    q: &Polynomial,
    a1: &FieldElement,
    a3: &FieldElement,
) -> (Polynomial, Polynomial, Polynomial) {
    let spec = p.spec();
    let half = FieldElement::from_u64(spec, 2).invert().unwrap();
    let n1 = p.derivative().multiply(q).sub(&p.multiply(&q.derivative()));
    let d = q.square();
    // n0 = (a1 x + a3)/2 * n1 - (a1 p q + a3 q^2)/2
    let lin = Polynomial::new(spec, vec![a3.clone(), a1.clone()]);
    let n0 = lin
        .multiply(&n1)
        .sub(&p.multiply(q).scale(a1).add(&d.scale(a3)))
        .scale(&half);
    reduce_y_maps(n0, n1, d)
}

/// Evaluate an isogeny at a point of its domain.
pub fn evaluate(phi: &Isogeny, p: &Point) -> Result<Point, IsogenyError> {
    if !phi.domain.contains(p) {
        return Err(IsogenyError::CurveMismatch);
    }
    let (x, y) = match p.xy() {
        None => return Ok(Point::Infinity),
        Some(v) => v,
    };
    let qx = phi.maps.q.evaluate(x);
    let dx = phi.maps.d.evaluate(x);
    if qx.is_zero() || dx.is_zero() {
        return Ok(Point::Infinity);
    }
    let img_x = phi.maps.p.evaluate(x).div(&qx).unwrap();
    let img_y = phi
        .maps
        .n0
        .evaluate(x)
        .add(&phi.maps.n1.evaluate(x).mul(y))
        .div(&dx)
        .unwrap();
    let img = Point::Affine { x: img_x, y: img_y };
    if !phi.codomain.contains(&img) {
        return Err(IsogenyError::InconsistentMaps);
    }
    Ok(img)
}

/// Extract the pullback constant c from the identity
/// 2 phi_y + a1' phi_x + a3' = (1/c) (p/q)' (2y + a1 x + a3):
/// comparing y-parts gives n1/d = (1/c)(p/q)', and the y-free parts must
/// then agree exactly.
pub fn pullback_constant(phi: &Isogeny) -> Result<FieldElement, IsogenyError> {
    let spec = phi.spec();
    let x_map = RatFn { num: phi.maps.p.clone(), den: phi.maps.q.clone() };
    let dx = x_map.derivative();
    if dx.is_zero() {
        return Err(IsogenyError::InconsistentMaps); // inseparable
    }
    // n1/d = (1/c) * dx  =>  1/c = (n1 * dx.den) / (d * dx.num), a constant
    let lhs = RatFn::new(phi.maps.n1.clone(), phi.maps.d.clone());
    let ratio = RatFn::new(lhs.num.multiply(&dx.den), lhs.den.multiply(&dx.num));
    if ratio.num.degree() != Some(0) || !ratio.den.is_one() {
        return Err(IsogenyError::InconsistentMaps);
    }
    let k = ratio.num.coeff(0); // k = 1/c
    let c = k.invert().map_err(|_| IsogenyError::InconsistentMaps)?;
    // verify the y-free part: n0/d = (a1 x + a3)/2 * n1/d - (a1' p/q + a3')/2
    let half = FieldElement::from_u64(spec, 2).invert().unwrap();
    let lin_dom = Polynomial::new(spec, vec![phi.domain.a3.clone(), phi.domain.a1.clone()]);
    let want = RatFn::from_poly(lin_dom).scale(&half).mul(&lhs).sub(
        &x_map
            .scale(&phi.codomain.a1)
            .add(&RatFn::from_poly(Polynomial::constant(phi.codomain.a3.clone())))
            .scale(&half),
    );
    let got = RatFn::new(phi.maps.n0.clone(), phi.maps.d.clone());
    if got != want {
        return Err(IsogenyError::InconsistentMaps);
    }
    Ok(c)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub degree: u64,
    pub separable: bool,
    pub normalized: bool,
}

pub fn classify(phi: &Isogeny) -> Classification {
    let sep = !phi
        .maps
        .p
        .derivative()
        .multiply(&phi.maps.q)
        .sub(&phi.maps.p.multiply(&phi.maps.q.derivative()))
        .is_zero();
    let normalized = sep && pullback_constant(phi).map(|c| c.is_one()).unwrap_or(false);
    let degree = phi
        .maps
        .p
        .degree()
        .unwrap_or(0)
        .max(phi.maps.q.degree().unwrap_or(0)) as u64;
    Classification { degree, separable: sep, normalized }
}

/// Monic kernel polynomial from the monic denominator D of a normalized
/// x-map: D = psi_2 * (psi_{>2})^2 where psi_2 collects the 2-torsion part.
pub fn kernel_poly_from_denominator(
    e: &WeierstrassCurve,
    d: &Polynomial,
) -> Result<Polynomial, IsogenyError> {
    let (_, two_uni) = two_torsion_polys(e);
    let psi2 = d.gcd_monic(&two_uni.to_monic());
    let rest = d
        .to_monic()
        .divide(&psi2)
        .map_err(|_| IsogenyError::InconsistentMaps)?;
    if !rest.1.is_zero() {
        return Err(IsogenyError::InconsistentMaps);
    }
    let sqrt = rest.0.square_root().map_err(|_| IsogenyError::NotAKernelPolynomial)?;
    Ok(psi2.multiply(&sqrt))
}

/// Lift a Weierstrass isomorphism to a degree-1 isogeny so it can be
/// composed with other isogenies.
pub fn isomorphism_as_isogeny(iso: &WeierstrassIsomorphism) -> Isogeny {
    let spec = iso.source.spec();
    let u_inv = iso.u.invert().unwrap();
    let u2 = u_inv.square();
    let u3 = u2.mul(&u_inv);
    // x' = (x - r)/u^2 ; y' = (y - s(x - r) - t)/u^3
    let p = Polynomial::new(spec, vec![iso.r.neg().mul(&u2), u2.clone()]);
    let n1 = Polynomial::constant(u3.clone());
    let n0 = Polynomial::new(
        spec,
        vec![
            iso.s.mul(&iso.r).sub(&iso.t).mul(&u3),
            iso.s.neg().mul(&u3),
        ],
    );
    // pullback of the differential under the inverse scaling is u
    Isogeny {
        domain: iso.source.clone(),
        codomain: iso.target.clone(),
        degree: 1,
        kernel_poly: Polynomial::one(spec),
        maps: RationalMapPair {
            p,
            q: Polynomial::one(spec),
            n0,
            n1,
            d: Polynomial::one(spec),
        },
        c: iso.u.clone(),
    }
}

/// Symbolic composition outer(inner(.)): degrees and pullback constants
/// multiply; the composite kernel polynomial is recovered from the reduced
/// x-map denominator.
pub fn compose(outer: &Isogeny, inner: &Isogeny) -> Result<Isogeny, IsogenyError> {
    if inner.codomain != outer.domain {
        return Err(IsogenyError::ModelMismatch);
    }
    let x_inner = RatFn { num: inner.maps.p.clone(), den: inner.maps.q.clone() };
    // x-map: p2(X)/q2(X) with X = inner x-map, homogenized over a shared
    // power of the inner denominator
    let px = x_inner.substitute_into(&outer.maps.p);
    let qx = x_inner.substitute_into(&outer.maps.q);
    let x_map = RatFn::new(px.num.multiply(&qx.den), qx.num.multiply(&px.den));
    // y-map: [n0_2(X) + n1_2(X) * Y] / d2(X) with Y = inner y-map
    let a0 = x_inner.substitute_into(&outer.maps.n0);
    let a1 = x_inner.substitute_into(&outer.maps.n1);
    let d2 = x_inner.substitute_into(&outer.maps.d);
    let y0_inner = RatFn::new(inner.maps.n0.clone(), inner.maps.d.clone());
    let y1_inner = RatFn::new(inner.maps.n1.clone(), inner.maps.d.clone());
    let d2_inv = RatFn::new(d2.den.clone(), d2.num.clone());
    let out0 = a0.add(&a1.mul(&y0_inner)).mul(&d2_inv);
    let out1 = a1.mul(&y1_inner).mul(&d2_inv);
    // common denominator for the pair
    let d = out0.den.multiply(&out1.den);
    let n0 = out0.num.multiply(&out1.den);
    let n1 = out1.num.multiply(&out0.den);
    let (n0, n1, d) = reduce_y_maps(n0, n1, d);
    let degree = inner.degree * outer.degree;
    let observed =
        x_map.num.degree().unwrap_or(0).max(x_map.den.degree().unwrap_or(0)) as u64;
    if observed != degree {
        return Err(IsogenyError::InconsistentDegree);
    }
    let kernel_poly = kernel_poly_from_denominator(&inner.domain, &x_map.den)?;
    // keep the numerator paired with the monic denominator
    Ok(Isogeny {
        domain: inner.domain.clone(),
        codomain: outer.codomain.clone(),
        degree,
        kernel_poly,
        maps: RationalMapPair { p: x_map.num, q: x_map.den, n0, n1, d },
        c: inner.c.mul(&outer.c),
    })
}

/// Compose an isomorphism after an isogeny.
pub fn compose_iso(
    outer: &WeierstrassIsomorphism,
    inner: &Isogeny,
) -> Result<Isogeny, IsogenyError> {
    compose(&isomorphism_as_isogeny(outer), inner)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{
        add_points, enumerate_points, make_curve_i64, make_curve_u64, mul_by_m_maps,
        scalar_mul,
    };
    use crate::field::make_field;

    fn f19() -> Field {
        make_field(19, 1, None).unwrap()
    }

    fn e19(spec: &Field) -> WeierstrassCurve {
        make_curve_u64(spec, [0, 0, 0, 1, 2]).unwrap()
    }

    fn pt(e: &WeierstrassCurve, x: u64, y: u64) -> Point {
        e.point_u64(x, y).unwrap()
    }

    fn golden_kernel(e: &WeierstrassCurve) -> Vec<Point> {
        vec![Point::Infinity, pt(e, 8, 3), pt(e, 8, 16)]
    }

    #[test]
    fn velu_golden_degree_three() {
        let f = f19();
        let e = e19(&f);
        let phi = velu(&e, &golden_kernel(&e)).unwrap();
        assert_eq!(phi.degree, 3);
        assert_eq!(phi.codomain, make_curve_u64(&f, [0, 0, 0, 9, 3]).unwrap());
        assert_eq!(phi.maps.p, Polynomial::from_u64s(&f, &[7, 13, 3, 1]));
        assert_eq!(phi.maps.q, Polynomial::from_u64s(&f, &[7, 3, 1]));
        assert_eq!(phi.maps.d, Polynomial::from_u64s(&f, &[1, 2, 14, 1]));
        assert_eq!(phi.kernel_poly, Polynomial::from_i64s(&f, &[-8, 1]));
        assert!(phi.c.is_one());
        assert_eq!(evaluate(&phi, &pt(&e, 14, 9)).unwrap(), pt(&phi.codomain, 16, 14));
        assert_eq!(evaluate(&phi, &pt(&e, 8, 3)).unwrap(), Point::Infinity);
        assert_eq!(evaluate(&phi, &Point::Infinity).unwrap(), Point::Infinity);
    }

    #[test]
    fn velu_rejects_non_subgroup() {
        let f = f19();
        let e = e19(&f);
        // (14, 9) has order 12; {O, P} is not closed under addition
        let bad = vec![Point::Infinity, pt(&e, 14, 9)];
        assert_eq!(velu(&e, &bad).unwrap_err(), IsogenyError::NotASubgroup);
    }

    #[test]
    fn kohel_matches_velu_on_odd_kernel() {
        let f = f19();
        let e = e19(&f);
        let psi = Polynomial::from_i64s(&f, &[-8, 1]);
        let via_kernel_poly = kohel(&e, &psi).unwrap();
        let via_points = velu(&e, &golden_kernel(&e)).unwrap();
        assert_eq!(via_kernel_poly, via_points);
    }

    #[test]
    fn general_matches_velu_on_odd_kernel() {
        let f = f19();
        let e = e19(&f);
        let psi = Polynomial::from_i64s(&f, &[-8, 1]);
        let general = from_kernel_general(&e, &psi, 3).unwrap();
        let via_points = velu(&e, &golden_kernel(&e)).unwrap();
        assert_eq!(general, via_points);
    }

    #[test]
    fn order_two_kernel_all_constructions_agree() {
        let f = f19();
        let e = e19(&f);
        // x = 18 is the unique rational root of x^3 + x + 2 over F_19
        let p2 = pt(&e, 18, 0);
        let psi = Polynomial::from_i64s(&f, &[-18, 1]);
        let via_points = velu(&e, &[Point::Infinity, p2.clone()]).unwrap();
        let via_kohel = kohel(&e, &psi).unwrap();
        let via_general = from_kernel_general(&e, &psi, 2).unwrap();
        assert_eq!(via_points.degree, 2);
        assert_eq!(via_points, via_kohel);
        assert_eq!(via_points, via_general);
        assert_eq!(evaluate(&via_points, &p2).unwrap(), Point::Infinity);
        assert!(pullback_constant(&via_points).unwrap().is_one());
    }

    #[test]
    fn full_two_torsion_kernel_all_constructions_agree() {
        let f = f19();
        let e = make_curve_i64(&f, [0, 0, 0, -1, 0]).unwrap();
        let kernel = vec![
            Point::Infinity,
            pt(&e, 0, 0),
            pt(&e, 1, 0),
            e.point(
                FieldElement::from_u64(&f, 18),
                FieldElement::zero(&f),
            )
            .unwrap(),
        ];
        let psi = Polynomial::from_i64s(&f, &[0, -1, 0, 1]);
        let via_points = velu(&e, &kernel).unwrap();
        let via_kohel = kohel(&e, &psi).unwrap();
        let via_general = from_kernel_general(&e, &psi, 4).unwrap();
        assert_eq!(via_points.degree, 4);
        assert_eq!(via_points, via_kohel);
        assert_eq!(via_points, via_general);
        for p in &kernel {
            assert_eq!(evaluate(&via_points, p).unwrap(), Point::Infinity);
        }
    }

    #[test]
    fn kohel_rejects_mixed_kernel_shape() {
        let f = f19();
        let e = make_curve_i64(&f, [0, 0, 0, -1, 0]).unwrap();
        // (x - 1)(x - 2): one 2-torsion root, one not, and not a square
        let psi = Polynomial::from_i64s(&f, &[2, -3, 1]);
        assert_eq!(kohel(&e, &psi).unwrap_err(), IsogenyError::UnsupportedKernelShape);
    }

    #[test]
    fn isogeny_is_a_homomorphism() {
        let f = f19();
        let e = e19(&f);
        let phi = velu(&e, &golden_kernel(&e)).unwrap();
        let pts = enumerate_points(&e).unwrap();
        assert_eq!(pts.len(), 12);
        for p in &pts {
            for q in &pts {
                let lhs = evaluate(&phi, &add_points(&e, p, q).unwrap()).unwrap();
                let rhs = add_points(
                    &phi.codomain,
                    &evaluate(&phi, p).unwrap(),
                    &evaluate(&phi, q).unwrap(),
                )
                .unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn kernel_size_equals_degree() {
        let f = f19();
        let e = e19(&f);
        let phi = velu(&e, &golden_kernel(&e)).unwrap();
        let killed = enumerate_points(&e)
            .unwrap()
            .iter()
            .filter(|p| evaluate(&phi, p).unwrap() == Point::Infinity)
            .count();
        assert_eq!(killed as u64, phi.degree);
    }

    #[test]
    fn pullback_constant_of_scalar_multiplication() {
        let f = f19();
        let e = e19(&f);
        for m in [2u64, 3, 5] {
            let maps = mul_by_m_maps(&e, m).unwrap();
            let kernel = crate::curve::division_polynomial(&e, m).unwrap().1.to_monic();
            let phi = Isogeny::from_raw_parts(
                e.clone(),
                e.clone(),
                m * m,
                kernel,
                maps,
                FieldElement::from_u64(&f, m),
            );
            assert_eq!(pullback_constant(&phi).unwrap(), FieldElement::from_u64(&f, m));
            let cls = classify(&phi);
            assert!(cls.separable);
            assert!(!cls.normalized);
            assert_eq!(cls.degree, m * m);
        }
    }

    #[test]
    fn pullback_constant_of_isomorphism_is_u() {
        let f = f19();
        let e = e19(&f);
        let u = FieldElement::from_u64(&f, 2);
        let iso = WeierstrassIsomorphism::new(
            &e,
            u.clone(),
            FieldElement::from_u64(&f, 3),
            FieldElement::from_u64(&f, 5),
            FieldElement::from_u64(&f, 7),
        )
        .unwrap();
        let phi = isomorphism_as_isogeny(&iso);
        assert_eq!(pullback_constant(&phi).unwrap(), u);
        for p in enumerate_points(&e).unwrap() {
            assert_eq!(evaluate(&phi, &p).unwrap(), iso.apply(&p).unwrap());
        }
    }

    #[test]
    fn frobenius_is_inseparable() {
        let f = f19();
        let e = e19(&f);
        let maps = RationalMapPair {
            p: Polynomial::monomial(FieldElement::one(&f), 19),
            q: Polynomial::one(&f),
            n0: Polynomial::zero(&f),
            n1: e.rhs_cubic().pow(9),
            d: Polynomial::one(&f),
        };
        let phi = Isogeny::from_raw_parts(
            e.clone(),
            e.clone(),
            19,
            Polynomial::one(&f),
            maps,
            FieldElement::zero(&f),
        );
        for p in enumerate_points(&e).unwrap() {
            let img = evaluate(&phi, &p).unwrap();
            // Frobenius fixes F_19-rational points
            assert_eq!(img, p);
        }
        let cls = classify(&phi);
        assert!(!cls.separable);
        assert!(!cls.normalized);
        assert_eq!(cls.degree, 19);
    }

    #[test]
    fn composition_matches_pointwise_evaluation() {
        let f = f19();
        let e = e19(&f);
        let phi = velu(&e, &golden_kernel(&e)).unwrap();
        // a 2-isogeny out of the codomain y^2 = x^3 + 9x + 3
        let cod = phi.codomain.clone();
        let two_pt = enumerate_points(&cod)
            .unwrap()
            .into_iter()
            .find(|p| !p.is_infinity() && scalar_mul(&cod, 2, p).unwrap().is_infinity())
            .unwrap();
        let psi2 = velu(&cod, &[Point::Infinity, two_pt]).unwrap();
        let both = compose(&psi2, &phi).unwrap();
        assert_eq!(both.degree, 6);
        assert_eq!(both.kernel_poly.degree(), Some(3)); // one 2-torsion x, two odd xs
        assert!(pullback_constant(&both).unwrap().is_one());
        for p in enumerate_points(&e).unwrap() {
            let direct = evaluate(&both, &p).unwrap();
            let stepwise = evaluate(&psi2, &evaluate(&phi, &p).unwrap()).unwrap();
            assert_eq!(direct, stepwise);
        }
    }

    #[test]
    fn compose_with_isomorphism_keeps_degree_and_kernel() {
        let f = f19();
        let e = e19(&f);
        let phi = velu(&e, &golden_kernel(&e)).unwrap();
        let iso = WeierstrassIsomorphism::new(
            &phi.codomain,
            FieldElement::from_u64(&f, 3),
            FieldElement::from_u64(&f, 1),
            FieldElement::zero(&f),
            FieldElement::from_u64(&f, 4),
        )
        .unwrap();
        let moved = compose_iso(&iso, &phi).unwrap();
        assert_eq!(moved.degree, 3);
        assert_eq!(moved.kernel_poly, phi.kernel_poly);
        assert_eq!(moved.codomain, iso.target);
        assert_eq!(
            pullback_constant(&moved).unwrap(),
            FieldElement::from_u64(&f, 3)
        );
    }

    #[test]
    fn kernel_poly_recovered_from_denominator() {
        let f = f19();
        let e = e19(&f);
        let phi = velu(&e, &golden_kernel(&e)).unwrap();
        let rec = kernel_poly_from_denominator(&e, &phi.maps.q).unwrap();
        assert_eq!(rec, phi.kernel_poly.to_monic());
    }

    #[test]
    fn velu_over_extension_field() {
        let f = f19();
        let e = e19(&f);
        // only one 2-torsion point is rational; the others live in F_19^2
        let (ext_curve, pts) = crate::curve::m_torsion(&e, 2, 2).unwrap();
        assert_eq!(pts.len(), 4);
        let gen = pts
            .iter()
            .find(|p| {
                p.xy().map(|(x, _)| x.descend(&f).is_none()).unwrap_or(false)
            })
            .expect("a 2-torsion point outside the base field");
        let phi = velu(&ext_curve, &[Point::Infinity, gen.clone()]).unwrap();
        assert_eq!(phi.degree, 2);
        assert_eq!(evaluate(&phi, gen).unwrap(), Point::Infinity);
        assert!(pullback_constant(&phi).unwrap().is_one());
        // coefficients genuinely leave the base field
        assert!(phi.descend(&f).is_none());
    }
}
