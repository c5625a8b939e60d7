//! Cone membership: sup-norm maximizers, the unique-peak class `Pp`,
//! admissibility and the k-Lipschitz cones.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::pseudometric::Pseudometric;
use crate::rational::{self, Rational};
use crate::space::Doubleton;

/// The doubletons `{z, w}` with `d(z, w) = ‖d‖`.
pub fn maximizer_doubletons(d: &Pseudometric) -> Result<BTreeSet<Doubleton>> {
    let norm = d.sup_norm();
    if norm.is_zero() {
        return Err(Error::ZeroPseudometric);
    }
    Ok(d.space()
        .doubletons()
        .into_iter()
        .filter(|p| *d.get(p.first(), p.second()) == norm)
        .collect())
}

/// The unique maximizing doubleton, if `d ∈ Pp`.
pub fn unique_peak(d: &Pseudometric) -> Option<Doubleton> {
    let set = maximizer_doubletons(d).ok()?;
    if set.len() == 1 {
        set.into_iter().next()
    } else {
        None
    }
}

pub fn is_admissible(d: &Pseudometric) -> bool {
    let n = d.len();
    (0..n).all(|i| (0..n).all(|j| i == j || d.get(i, j).is_positive()))
}

/// Everything [`cone_report`] computes for one pseudometric and one `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeReport {
    pub sup_norm: Rational,
    /// Zero on a one-point space.
    pub lip: Rational,
    pub is_admissible: bool,
    /// Empty for the zero pseudometric.
    pub maximizers: BTreeSet<Doubleton>,
    pub in_pp: bool,
    pub k: Rational,
    /// `lip < k`.
    pub in_lpmk: bool,
    /// `lip ≤ k`.
    pub in_lpmk_closure: bool,
}

pub fn cone_report(d: &Pseudometric, k: &Rational) -> Result<ConeReport> {
    if !k.is_positive() {
        return Err(Error::NotPositive {
            what: "k",
            value: k.clone(),
        });
    }
    let lip = d.lip_constant().unwrap_or_else(|_| rational::zero());
    // the zero pseudometric has no distinguished maximizer and is never in Pp
    let maximizers = maximizer_doubletons(d).unwrap_or_default();
    Ok(ConeReport {
        sup_norm: d.sup_norm(),
        is_admissible: is_admissible(d),
        in_pp: maximizers.len() == 1,
        maximizers,
        in_lpmk: lip < *k,
        in_lpmk_closure: lip <= *k,
        lip,
        k: k.clone(),
    })
}
