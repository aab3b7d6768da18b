//! Velu's formulas: a separable normalized isogeny from an explicit finite
//! kernel subgroup.

use crate::curve::{
    add_points, make_curve, two_torsion_polys, Point, RationalMapPair, WeierstrassCurve,
};
use crate::field::FieldElement;
use crate::isogeny::{reduce_y_maps, Isogeny, IsogenyError, RatFn};
use crate::poly::Polynomial;

/// Construct the isogeny with the given kernel. Kernel points may live over
/// an extension of the curve's field; the result is then defined over that
/// extension. The point list is validated as a subgroup unless
/// `skip_validation` is set.
pub fn velu_with_options(
    e: &WeierstrassCurve,
    kernel: &[Point],
    skip_validation: bool,
) -> Result<Isogeny, IsogenyError> {
    // field of definition: the widest spec among the kernel points
    let work_spec = kernel
        .iter()
        .find_map(|p| p.xy().map(|(x, _)| x.spec().clone()))
        .unwrap_or_else(|| e.spec().clone());
    let ec = if &work_spec == e.spec() {
        e.clone()
    } else {
        e.base_change(&work_spec).map_err(|_| IsogenyError::PointNotOnCurve)?
    };
    let mut affine: Vec<Point> = Vec::new();
    for p in kernel {
        match p {
            Point::Infinity => {}
            Point::Affine { .. } => {
                if !ec.contains(p) {
                    return Err(IsogenyError::PointNotOnCurve);
                }
                if !affine.contains(p) {
                    affine.push(p.clone());
                }
            }
        }
    }
    if !skip_validation {
        // closure under negation and pairwise addition
        for p in &affine {
            let n = ec.negate(p);
            if !n.is_infinity() && !affine.contains(&n) {
                return Err(IsogenyError::NotASubgroup);
            }
            for q in &affine {
                let s = add_points(&ec, p, q).map_err(|_| IsogenyError::PointNotOnCurve)?;
                if !s.is_infinity() && !affine.contains(&s) {
                    return Err(IsogenyError::NotASubgroup);
                }
            }
        }
    }
    let spec = ec.spec().clone();
    let degree = (affine.len() + 1) as u64;
    if affine.is_empty() {
        return Ok(Isogeny::identity(&ec));
    }

    // partition: 2-torsion points all enter S; of each +-pair exactly one
    // does, chosen by the canonical order on y-coordinates
    let (two_biv, _) = two_torsion_polys(&ec);
    let mut s_set: Vec<Point> = Vec::new();
    for p in &affine {
        let is_two = two_biv.evaluate(p).unwrap().is_zero();
        if is_two {
            s_set.push(p.clone());
        } else {
            let n = ec.negate(p);
            let (_, y) = p.xy().unwrap();
            let (_, ny) = n.xy().unwrap();
            if y.order_key() < ny.order_key() {
                s_set.push(p.clone());
            }
        }
    }

    // per-point quantities and the v, w sums
    let mut v = FieldElement::zero(&spec);
    let mut w = FieldElement::zero(&spec);
    struct Term {
        xq: FieldElement,
        yq: FieldElement,
        uq: FieldElement,
        vq: FieldElement,
        gx: FieldElement,
        gy: FieldElement,
    }
    let mut terms = Vec::with_capacity(s_set.len());
    for p in &s_set {
        let (xq, yq) = p.xy().unwrap();
        let three = FieldElement::from_u64(&spec, 3);
        let gx = three
            .mul(&xq.square())
            .add(&ec.a2.mul(xq).double())
            .add(&ec.a4)
            .sub(&ec.a1.mul(yq));
        let gy = yq.double().neg().sub(&ec.a1.mul(xq)).sub(&ec.a3);
        let is_two = two_biv.evaluate(p).unwrap().is_zero();
        let vq = if is_two { gx.clone() } else { gx.double().sub(&ec.a1.mul(&gy)) };
        let uq = gy.square();
        v = v.add(&vq);
        w = w.add(&uq.add(&xq.mul(&vq)));
        terms.push(Term {
            xq: xq.clone(),
            yq: yq.clone(),
            uq,
            vq,
            gx,
            gy,
        });
    }

    // codomain: same a1, a2, a3; a4 and a6 shifted by the kernel sums
    let b2 = ec.b2.clone();
    let a4_new = ec.a4.sub(&v.mul(&FieldElement::from_u64(&spec, 5)));
    let a6_new = ec
        .a6
        .sub(&b2.mul(&v))
        .sub(&w.mul(&FieldElement::from_u64(&spec, 7)));
    let codomain = make_curve(
        &spec,
        [ec.a1.clone(), ec.a2.clone(), ec.a3.clone(), a4_new, a6_new],
    )
    .map_err(|_| IsogenyError::SingularCodomain)?;

    // x-map: alpha = x + sum_Q [ v_Q/(x - x_Q) + u_Q/(x - x_Q)^2 ]
    let mut alpha = RatFn::x(&spec);
    for t in &terms {
        let lin = Polynomial::new(&spec, vec![t.xq.neg(), FieldElement::one(&spec)]);
        alpha = alpha.add(&RatFn::new(Polynomial::constant(t.vq.clone()), lin.clone()));
        if !t.uq.is_zero() {
            alpha = alpha.add(&RatFn::new(Polynomial::constant(t.uq.clone()), lin.square()));
        }
    }

    // y-map: beta = y - sum_Q [ u_Q (2y + a1 x + a3)/(x-x_Q)^3
    //   + v_Q (a1 (x-x_Q) + y - y_Q)/(x-x_Q)^2 + (a1 u_Q - g^x g^y)/(x-x_Q)^2 ]
    // split into the y coefficient and the y-free part
    let mut beta_y = RatFn::from_poly(Polynomial::one(&spec));
    let mut beta_0 = RatFn::zero(&spec);
    for t in &terms {
        let lin = Polynomial::new(&spec, vec![t.xq.neg(), FieldElement::one(&spec)]);
        let lin2 = lin.square();
        let lin3 = lin2.multiply(&lin);
        // y parts: 2 u_Q/(x-x_Q)^3 + v_Q/(x-x_Q)^2
        beta_y = beta_y
            .sub(&RatFn::new(Polynomial::constant(t.uq.double()), lin3.clone()))
            .sub(&RatFn::new(Polynomial::constant(t.vq.clone()), lin2.clone()));
        // y-free parts
        let a1x_a3 = Polynomial::new(&spec, vec![ec.a3.clone(), ec.a1.clone()]);
        beta_0 = beta_0.sub(&RatFn::new(a1x_a3.scale(&t.uq), lin3));
        let vq_part = lin.scale(&ec.a1).sub(&Polynomial::constant(t.yq.clone())).scale(&t.vq);
        beta_0 = beta_0.sub(&RatFn::new(vq_part, lin2.clone()));
        let const_part = ec.a1.mul(&t.uq).sub(&t.gx.mul(&t.gy));
        beta_0 = beta_0.sub(&RatFn::new(Polynomial::constant(const_part), lin2));
    }

    // assemble the RationalMapPair with monic denominators
    let lc_inv = alpha.den.leading().unwrap().invert().unwrap();
    let p = alpha.num.scale(&lc_inv);
    let q = alpha.den.scale(&lc_inv);
    let d = beta_0.den.multiply(&beta_y.den);
    let n0 = beta_0.num.multiply(&beta_y.den);
    let n1 = beta_y.num.multiply(&beta_0.den);
    let (n0, n1, d) = reduce_y_maps(n0, n1, d);

    // kernel polynomial: one linear factor per distinct kernel x-coordinate
    let kernel_poly = Polynomial::from_roots(&spec, &terms.iter().map(|t| t.xq.clone()).collect::<Vec<_>>());

    Ok(Isogeny {
        domain: ec,
        codomain,
        degree,
        kernel_poly,
        maps: RationalMapPair { p, q, n0, n1, d },
        c: FieldElement::one(&spec),
    })
}

pub fn velu(e: &WeierstrassCurve, kernel: &[Point]) -> Result<Isogeny, IsogenyError> {
    velu_with_options(e, kernel, false)
}
