//! Approximation inside the Lipschitz cones: pushing a pseudometric into the
//! admissible metrics, pulling a boundary element strictly inside `LPM_k`, and
//! the open neighbourhood that keeps an element outside the closure.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::pseudometric::Pseudometric;
use crate::rational::{self, Rational};
use crate::space::Doubleton;

fn require_positive(what: &'static str, value: &Rational) -> Result<()> {
    if value.is_positive() {
        Ok(())
    } else {
        Err(Error::NotPositive {
            what,
            value: value.clone(),
        })
    }
}

/// `δ = min{ε/‖d_Z‖, k − lip(d)} / 2`.
pub fn perturbation_delta(d: &Pseudometric, k: &Rational, eps: &Rational) -> Result<Rational> {
    require_positive("k", k)?;
    require_positive("eps", eps)?;
    let lip = d.lip_constant()?;
    if lip >= *k {
        return Err(Error::NotInLpmk { lip, k: k.clone() });
    }
    let diameter = d.space().diameter();
    let gap = k - &lip;
    let by_eps = eps / &diameter;
    Ok(rational::min(&by_eps, &gap) / rational::int(2))
}

/// `d + δ·d_Z`: admissible, still in `LPM_k`, within `eps` of `d`.
pub fn perturb_to_admissible(
    d: &Pseudometric,
    k: &Rational,
    eps: &Rational,
) -> Result<Pseudometric> {
    let delta = perturbation_delta(d, k, eps)?;
    d.add(&Pseudometric::base(d.space()).scale(&delta))
}

/// `δ = min{1, ε/‖d‖} / 2`.
pub fn shrink_delta(d: &Pseudometric, eps: &Rational) -> Result<Rational> {
    require_positive("eps", eps)?;
    let norm = d.sup_norm();
    if norm.is_zero() {
        return Err(Error::ZeroPseudometric);
    }
    let by_eps = eps / &norm;
    Ok(rational::min(&Rational::one(), &by_eps) / rational::int(2))
}

/// `(1 − δ)·d`, which has `lip < lip(d)` and lies within `eps` of `d`.
///
/// Intended for elements on the boundary `lip(d) = k`, but valid for any
/// nonzero `d`.
pub fn shrink_into_lpmk(d: &Pseudometric, eps: &Rational) -> Result<Pseudometric> {
    let delta = shrink_delta(d, eps)?;
    Ok(d.scale(&(Rational::one() - delta)))
}

/// For `lip(d) > k`, a pair with `d(x, y) > k·d_Z(x, y)` and the radius
/// `d(x, y) − k·d_Z(x, y)`. Every pseudometric strictly closer than the
/// radius in sup-norm still has `lip > k`. The pair with the largest radius
/// is returned; ties go to the first in doubleton order.
pub fn separation_radius(d: &Pseudometric, k: &Rational) -> Result<(Doubleton, Rational)> {
    require_positive("k", k)?;
    let lip = d.lip_constant()?;
    if lip <= *k {
        return Err(Error::InClosure { lip, k: k.clone() });
    }
    let space = d.space();
    let mut best: Option<(Doubleton, Rational)> = None;
    for pair in space.doubletons() {
        let (x, y) = (pair.first(), pair.second());
        let radius = d.get(x, y) - k * space.dist(x, y);
        if best.as_ref().is_none_or(|(_, r)| radius > *r) {
            best = Some((pair, radius));
        }
    }
    let (pair, radius) = best.expect("lip > k needs a pair");
    debug_assert!(radius.is_positive() && !radius.is_zero());
    Ok((pair, radius))
}
