//! Kohel's formulas: a normalized isogeny from a kernel polynomial, for the
//! odd, order-2, and full-two-torsion kernel shapes.

use crate::curve::{make_curve, two_torsion_polys, RationalMapPair, WeierstrassCurve};
use crate::field::FieldElement;
use crate::isogeny::{normalized_y_maps_from_x, Isogeny, IsogenyError};
use crate::poly::Polynomial;

/// Power sums of the kernel roots read off a monic psi of degree n:
/// s1, s2, s3 as signed elementary symmetric functions (zero when n is too
/// small for them to exist).
fn symmetric_functions(psi: &Polynomial) -> (FieldElement, FieldElement, FieldElement) {
    let spec = psi.spec();
    let n = psi.degree().unwrap_or(0);
    let get = |i: usize| -> FieldElement {
        if i > n {
            FieldElement::zero(spec)
        } else {
            psi.coeff(n - i)
        }
    };
    let s1 = if n >= 1 { get(1).neg() } else { FieldElement::zero(spec) };
    let s2 = if n >= 2 { get(2) } else { FieldElement::zero(spec) };
    let s3 = if n >= 3 { get(3).neg() } else { FieldElement::zero(spec) };
    (s1, s2, s3)
}

pub fn kohel(e: &WeierstrassCurve, psi: &Polynomial) -> Result<Isogeny, IsogenyError> {
    if e.spec().p() == 2 {
        return Err(IsogenyError::BadCharacteristic);
    }
    if !psi.is_monic() && !psi.is_one() {
        return Err(IsogenyError::NotAKernelPolynomial);
    }
    if psi.is_one() {
        return Ok(Isogeny::identity(e));
    }
    let spec = e.spec().clone();
    let (_, two_uni) = two_torsion_polys(e);
    let two_monic = two_uni.to_monic();
    let g = psi.gcd_monic(&two_monic);

    let fe = |v: u64| FieldElement::from_u64(&spec, v);
    let half = fe(2).invert().unwrap();

    let (v, w, phi, denom_psi, degree) = if g.is_one() {
        // odd case: kernel order 2n + 1
        let n = psi.degree().unwrap() as u64;
        let ell = 2 * n + 1;
        let (s1, s2, s3) = symmetric_functions(psi);
        let p1 = s1.square().sub(&s2.double()); // sum of squared roots
        let v = fe(6)
            .mul(&p1)
            .add(&e.b2.mul(&s1))
            .add(&e.b4.mul(&fe(n)));
        let p3 = s1
            .square()
            .mul(&s1)
            .sub(&s1.mul(&s2).mul(&fe(3)))
            .add(&s3.mul(&fe(3))); // sum of cubed roots
        let w = fe(10)
            .mul(&p3)
            .add(&e.b2.mul(&p1).double())
            .add(&e.b4.mul(&s1).mul(&fe(3)))
            .add(&e.b6.mul(&fe(n)));
        // phi = (4x^3 + b2 x^2 + 2 b4 x + b6)(psi'^2 - psi'' psi)
        //       - (6x^2 + b2 x + b4) psi' psi + (l x - 2 s1) psi^2
        let quartic = Polynomial::new(
            &spec,
            vec![e.b6.clone(), e.b4.double(), e.b2.clone(), fe(4)],
        );
        let quadratic =
            Polynomial::new(&spec, vec![e.b4.clone(), e.b2.clone(), fe(6)]);
        let dpsi = psi.derivative();
        let ddpsi = dpsi.derivative();
        let phi = quartic
            .multiply(&dpsi.square().sub(&ddpsi.multiply(psi)))
            .sub(&quadratic.multiply(&dpsi).multiply(psi))
            .add(
                &Polynomial::new(&spec, vec![s1.double().neg(), fe(ell)])
                    .multiply(&psi.square()),
            );
        (v, w, phi, psi.square(), ell)
    } else if g == psi.to_monic() {
        match psi.degree().unwrap() {
            1 => {
                // order-2 kernel at x0 = root of psi
                let x0 = psi.coeff(0).neg();
                let y0 = e.a1.mul(&x0).add(&e.a3).neg().mul(&half);
                let v = fe(3)
                    .mul(&x0.square())
                    .add(&e.a2.mul(&x0).double())
                    .add(&e.a4)
                    .sub(&e.a1.mul(&y0));
                let w = x0.mul(&v);
                // phi = (x(x - x0) + v)(x - x0)
                let lin = Polynomial::new(&spec, vec![x0.neg(), FieldElement::one(&spec)]);
                let phi = Polynomial::x(&spec)
                    .multiply(&lin)
                    .add(&Polynomial::constant(v.clone()))
                    .multiply(&lin);
                (v, w, phi, psi.square(), 2)
            }
            3 => {
                // full two-torsion: psi must be the monic 2-torsion cubic
                if g != two_monic {
                    return Err(IsogenyError::UnsupportedKernelShape);
                }
                let (s1, s2, s3) = symmetric_functions(psi);
                let p1 = s1.square().sub(&s2.double());
                let p3 = s1
                    .square()
                    .mul(&s1)
                    .sub(&s1.mul(&s2).mul(&fe(3)))
                    .add(&s3.mul(&fe(3)));
                let v = fe(3)
                    .mul(&p1)
                    .add(&e.b2.mul(&s1).add(&e.b4.mul(&fe(3))).mul(&half));
                let w = fe(3)
                    .mul(&p3)
                    .add(&e.b2.mul(&p1).add(&e.b4.mul(&s1)).mul(&half));
                // phi1 = psi'^2 + (-2 psi'' + (4x - s1)) psi; x-map = phi1/psi
                let dpsi = psi.derivative();
                let ddpsi = dpsi.derivative();
                let adj = Polynomial::new(&spec, vec![s1.neg(), fe(4)])
                    .sub(&ddpsi.scale(&fe(2)));
                let phi1 = dpsi.square().add(&adj.multiply(psi));
                (v, w, phi1, psi.clone(), 4)
            }
            _ => return Err(IsogenyError::UnsupportedKernelShape),
        }
    } else {
        // mixed 2-torsion/odd factors are outside Kohel's three shapes
        return Err(IsogenyError::UnsupportedKernelShape);
    };

    let a4_new = e.a4.sub(&v.mul(&fe(5)));
    let a6_new = e.a6.sub(&e.b2.mul(&v)).sub(&w.mul(&fe(7)));
    let codomain = make_curve(
        &spec,
        [e.a1.clone(), e.a2.clone(), e.a3.clone(), a4_new, a6_new],
    )
    .map_err(|_| IsogenyError::SingularCodomain)?;

    // reduce the x-map (the order-2 case shares a linear factor) and keep
    // the denominator monic
    let xmap = crate::isogeny::RatFn::new(phi, denom_psi);
    debug_assert_eq!(xmap.num.degree(), Some(degree as usize));
    let (n0, n1, d) = normalized_y_maps_from_x(&xmap.num, &xmap.den, &e.a1, &e.a3);

    Ok(Isogeny {
        domain: e.clone(),
        codomain,
        degree,
        kernel_poly: psi.clone(),
        maps: RationalMapPair { p: xmap.num, q: xmap.den, n0, n1, d },
        c: FieldElement::one(&spec),
    })
}
