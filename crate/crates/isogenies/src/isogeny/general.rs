//! Kernel-polynomial isogeny construction for arbitrary (odd or even)
//! kernel orders: conjugate to short Weierstrass form, build the maps from
//! the symmetric functions of D = psi^2/psi_2, and conjugate back.

use crate::curve::{make_curve, short_form, RationalMapPair, WeierstrassCurve};
use crate::field::FieldElement;
use crate::isogeny::{
    compose, isomorphism_as_isogeny, Isogeny, IsogenyError, RatFn,
};
use crate::poly::Polynomial;

pub fn from_kernel_general(
    e: &WeierstrassCurve,
    psi: &Polynomial,
    ell: u64,
) -> Result<Isogeny, IsogenyError> {
    let spec = e.spec().clone();
    if spec.p() == 2 || spec.p() == 3 {
        return Err(IsogenyError::BadCharacteristic);
    }
    if !psi.is_monic() && !psi.is_one() {
        return Err(IsogenyError::NotAKernelPolynomial);
    }
    if ell == 0 {
        return Err(IsogenyError::InconsistentDegree);
    }
    let (es, rho, rho_inv) = short_form(e)?;
    // psi on the short model: kernel x-coordinates shift by rho's r
    let psit = psi.substitute_affine(&FieldElement::one(&spec), &rho.r);
    let a = es.a4.clone();
    let b = es.a6.clone();
    let cubic = Polynomial::new(
        &spec,
        vec![b.clone(), a.clone(), FieldElement::zero(&spec), FieldElement::one(&spec)],
    );
    let psi2 = psit.gcd_monic(&cubic);
    let (d_poly, rem) = psit.square().divide(&psi2).unwrap();
    if !rem.is_zero() {
        return Err(IsogenyError::NotAKernelPolynomial);
    }
    if d_poly.degree() != Some((ell - 1) as usize) {
        return Err(IsogenyError::InconsistentDegree);
    }
    let fe = |v: u64| FieldElement::from_u64(&spec, v);
    let deg = (ell - 1) as usize;
    let sigma = |i: usize| -> FieldElement {
        if i == 0 || i > deg {
            FieldElement::zero(&spec)
        } else {
            let c = d_poly.coeff(deg - i);
            if i % 2 == 1 {
                c.neg()
            } else {
                c
            }
        }
    };
    let s1 = sigma(1);
    let s2 = sigma(2);
    let s3 = sigma(3);
    // alpha(x) = l x - s1 - (3x^2 + A) D'/D - 2 (x^3 + Ax + B)(D'/D)'
    let dprime = d_poly.derivative();
    let i_fn = RatFn::new(dprime.clone(), d_poly.clone());
    let i_prime = i_fn.derivative();
    let lead = Polynomial::new(&spec, vec![s1.neg(), fe(ell)]);
    let quad = Polynomial::new(&spec, vec![a.clone(), FieldElement::zero(&spec), fe(3)]);
    let alpha = RatFn::from_poly(lead)
        .sub(&RatFn::from_poly(quad).mul(&i_fn))
        .sub(&RatFn::from_poly(cubic.clone()).mul(&i_prime).scale(&fe(2)));
    debug_assert_eq!(alpha.den, d_poly.to_monic());
    // beta = y * alpha'(x)
    let beta = alpha.derivative();
    // codomain on the short model
    let p1 = s1.square().sub(&s2.double());
    let p3 = s1
        .square()
        .mul(&s1)
        .sub(&s1.mul(&s2).mul(&fe(3)))
        .add(&s3.mul(&fe(3)));
    let v = a.mul(&fe(ell - 1)).add(&p1.mul(&fe(3)));
    let w = a
        .mul(&s1)
        .mul(&fe(3))
        .add(&b.mul(&fe(ell - 1)).double())
        .add(&p3.mul(&fe(5)));
    let a_new = a.sub(&v.mul(&fe(5)));
    let b_new = b.sub(&w.mul(&fe(7)));
    let cod_short = make_curve(
        &spec,
        [
            FieldElement::zero(&spec),
            FieldElement::zero(&spec),
            FieldElement::zero(&spec),
            a_new,
            b_new,
        ],
    )
    .map_err(|_| IsogenyError::SingularCodomain)?;

    let phit = Isogeny {
        domain: es.clone(),
        codomain: cod_short.clone(),
        degree: ell,
        kernel_poly: psit.clone(),
        maps: RationalMapPair {
            p: alpha.num.clone(),
            q: alpha.den.clone(),
            n0: Polynomial::zero(&spec),
            n1: beta.num.clone(),
            d: beta.den.clone(),
        },
        c: FieldElement::one(&spec),
    };
    if ell == 1 {
        // identity on the short model; conjugation still applies below
        debug_assert!(phit.maps.p == Polynomial::x(&spec));
    }
    // conjugate back: phi = tau . phit . rho, where tau undoes the same
    // normalized change of variables on the codomain side
    let tau = crate::curve::WeierstrassIsomorphism::new(
        &cod_short,
        FieldElement::one(&spec),
        rho_inv.r.clone(),
        rho_inv.s.clone(),
        rho_inv.t.clone(),
    )
    .map_err(|_| IsogenyError::SingularCodomain)?;
    let composed = compose(&phit, &isomorphism_as_isogeny(&rho))?;
    let full = compose(&isomorphism_as_isogeny(&tau), &composed)?;
    debug_assert_eq!(full.domain, *e);
    // the recovered kernel polynomial from the denominator equals psi; keep
    // the caller's psi to preserve its exact form
    Ok(Isogeny { kernel_poly: psi.clone(), ..full })
}
