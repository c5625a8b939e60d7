//! Extension of a pseudometric from a subset to the whole space, keeping the
//! sup-norm and the Lipschitz constant exactly.
//!
//! With `L` the Lipschitz constant of `d` on the subset `A` and `M = ‖d‖`,
//! the extension is
//!
//! ```text
//! g(x, y) = min( L·d_Z(x, y), min_{a, b ∈ A} L·d_Z(x, a) + d(a, b) + L·d_Z(b, y) )
//! d̃       = min(g, M)
//! ```
//!
//! `g` is the largest `L`-Lipschitz pseudometric that agrees with `d` on `A`;
//! truncating at the constant `M` keeps the axioms and pins the norm. The
//! inner minimum is evaluated in two passes (over `a`, then over `b`), which
//! is the same minimum in `O(n²·|A|)`.

use std::sync::Arc;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::pseudometric::Pseudometric;
use crate::rational::{self, Rational};
use crate::space::{check_axioms, flatten, Space};

/// A pseudometric given only on a subset of the points of a space.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialPseudometric {
    space: Arc<Space>,
    subset: Vec<usize>,
    values: Vec<Rational>,
}

impl PartialPseudometric {
    /// `subset` lists point indices in any order; `matrix` is indexed in
    /// that same order. Duplicates are rejected.
    pub fn new(space: &Arc<Space>, subset: Vec<usize>, matrix: Vec<Vec<Rational>>) -> Result<Self> {
        if subset.is_empty() {
            return Err(Error::EmptySubset);
        }
        if let Some(&bad) = subset.iter().find(|&&p| p >= space.len()) {
            return Err(Error::UnknownPoint(format!("#{bad}")));
        }
        let m = subset.len();
        let values = flatten(m, matrix)?;
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by_key(|&k| subset[k]);
        if let Some(w) = order.windows(2).find(|w| subset[w[0]] == subset[w[1]]) {
            return Err(Error::DuplicateLabel(space.label(subset[w[0]]).to_string()));
        }
        let sorted_values = order
            .iter()
            .flat_map(|&i| order.iter().map(move |&j| (i, j)))
            .map(|(i, j)| values[i * m + j].clone())
            .collect();
        let sorted = order.iter().map(|&k| subset[k]).collect();
        Self::from_flat(space, sorted, sorted_values)
    }

    /// Like [`PartialPseudometric::new`] with labels instead of indices.
    pub fn from_labels(
        space: &Arc<Space>,
        subset: &[String],
        matrix: Vec<Vec<Rational>>,
    ) -> Result<Self> {
        let indices = subset
            .iter()
            .map(|l| space.index_of(l))
            .collect::<Result<Vec<_>>>()?;
        Self::new(space, indices, matrix)
    }

    /// `subset` must be strictly increasing.
    pub(crate) fn from_flat(
        space: &Arc<Space>,
        subset: Vec<usize>,
        values: Vec<Rational>,
    ) -> Result<Self> {
        if subset.is_empty() {
            return Err(Error::EmptySubset);
        }
        debug_assert!(subset.windows(2).all(|w| w[0] < w[1]));
        let m = subset.len();
        if values.len() != m * m {
            return Err(Error::DimensionMismatch {
                expected: m * m,
                found: values.len(),
            });
        }
        let labels: Vec<String> = subset.iter().map(|&p| space.label(p).to_string()).collect();
        check_axioms(&labels, &values, false)?;
        Ok(PartialPseudometric {
            space: Arc::clone(space),
            subset,
            values,
        })
    }

    /// The restriction of a full pseudometric to `subset` (sorted, deduplicated).
    pub fn restrict(d: &Pseudometric, subset: &[usize]) -> Result<Self> {
        let mut subset = subset.to_vec();
        subset.sort_unstable();
        subset.dedup();
        let values = subset
            .iter()
            .flat_map(|&a| subset.iter().map(move |&b| (a, b)))
            .map(|(a, b)| d.get(a, b).clone())
            .collect();
        Self::from_flat(d.space(), subset, values)
    }

    pub fn space(&self) -> &Arc<Space> {
        &self.space
    }

    pub fn subset(&self) -> &[usize] {
        &self.subset
    }

    /// Value between the `i`-th and `j`-th subset points.
    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.values[i * self.subset.len() + j]
    }

    pub fn sup_norm(&self) -> Rational {
        self.values
            .iter()
            .max()
            .cloned()
            .unwrap_or_else(rational::zero)
    }

    /// Lipschitz constant over subset pairs; zero for a singleton.
    pub fn lip_constant(&self) -> Rational {
        let m = self.subset.len();
        let mut best = rational::zero();
        for i in 0..m {
            for j in i + 1..m {
                let ratio = self.get(i, j) / self.space.dist(self.subset[i], self.subset[j]);
                if ratio > best {
                    best = ratio;
                }
            }
        }
        best
    }
}

/// Extends `pd` to the whole space with the same sup-norm and Lipschitz
/// constant; a singleton subset extends to the zero pseudometric.
pub fn extend_lip_preserving(pd: &PartialPseudometric) -> Pseudometric {
    extend(pd, true)
}

/// Norm-preserving extension. On a finite space every pseudometric is
/// Lipschitz, so this is [`extend_lip_preserving`].
pub fn extend_norm_preserving(pd: &PartialPseudometric) -> Pseudometric {
    extend_lip_preserving(pd)
}

/// The infimal convolution `g` without the final truncation. Not norm
/// preserving in general; the fuzz harness uses it as an injected fault.
pub(crate) fn extend_untruncated(pd: &PartialPseudometric) -> Pseudometric {
    extend(pd, false)
}

fn extend(pd: &PartialPseudometric, truncate: bool) -> Pseudometric {
    let space = &pd.space;
    let n = space.len();
    let subset = &pd.subset;
    let m = subset.len();
    if m == 1 {
        return Pseudometric::zero(space);
    }
    if m == n {
        return Pseudometric::from_flat_unchecked(space, pd.values.clone());
    }
    let lip = pd.lip_constant();
    if lip.is_zero() {
        return Pseudometric::zero(space);
    }
    let norm = pd.sup_norm();

    let scaled: Vec<Rational> = space.metric_values().iter().map(|v| v * &lip).collect();
    let ld = |i: usize, j: usize| &scaled[i * n + j];

    // reach[x][b] = min_a L·d_Z(x, a) + d(a, b)
    let mut reach = Vec::with_capacity(n * m);
    for x in 0..n {
        for b in 0..m {
            let best = (0..m)
                .map(|a| ld(x, subset[a]) + pd.get(a, b))
                .min()
                .expect("subset is nonempty");
            reach.push(best);
        }
    }

    let mut values = Vec::with_capacity(n * n);
    for x in 0..n {
        for y in 0..n {
            if x == y {
                values.push(rational::zero());
                continue;
            }
            let mut g = ld(x, y).clone();
            for b in 0..m {
                let via = &reach[x * m + b] + ld(subset[b], y);
                if via < g {
                    g = via;
                }
            }
            if truncate && g > norm {
                g = norm.clone();
            }
            values.push(g);
        }
    }
    Pseudometric::from_flat_unchecked(space, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn z3() -> Arc<Space> {
        Space::discrete(vec!["p".into(), "q".into(), "r".into()])
    }

    #[test]
    fn discrete_pair_extension() {
        let z = z3();
        let pd = PartialPseudometric::new(
            &z,
            vec![0, 1],
            vec![vec![int(0), int(1)], vec![int(1), int(0)]],
        )
        .unwrap();
        let ext = extend_lip_preserving(&pd);
        assert_eq!(*ext.get(2, 0), int(1));
        assert_eq!(*ext.get(2, 1), int(1));
        assert_eq!(*ext.get(0, 1), int(1));
        assert_eq!(ext.sup_norm(), int(1));
        assert_eq!(ext.lip_constant().unwrap(), int(1));
    }

    #[test]
    fn zero_extends_to_zero() {
        let z = z3();
        let pd = PartialPseudometric::new(
            &z,
            vec![0, 2],
            vec![vec![int(0), int(0)], vec![int(0), int(0)]],
        )
        .unwrap();
        assert!(extend_lip_preserving(&pd).is_zero());
    }

    #[test]
    fn whole_space_is_identity() {
        let z = Space::on_line(
            vec!["a".into(), "b".into(), "c".into()],
            &[int(0), int(1), int(3)],
        )
        .unwrap();
        let d = Pseudometric::base(&z).scale(&frac(1, 3));
        let pd = PartialPseudometric::restrict(&d, &[0, 1, 2]).unwrap();
        assert_eq!(extend_lip_preserving(&pd), d);
    }

    #[test]
    fn singleton_extends_to_zero() {
        let z = Space::discrete(vec!["x".into(), "y".into()]);
        let pd = PartialPseudometric::new(&z, vec![1], vec![vec![int(0)]]).unwrap();
        assert!(extend_norm_preserving(&pd).is_zero());
    }

    #[test]
    fn labels_are_reordered() {
        let z = z3();
        let pd = PartialPseudometric::from_labels(
            &z,
            &["r".into(), "p".into()],
            vec![vec![int(0), int(2)], vec![int(2), int(0)]],
        )
        .unwrap();
        assert_eq!(pd.subset(), &[0, 2]);
        assert_eq!(*pd.get(0, 1), int(2));
    }

    #[test]
    fn invalid_partial_is_rejected() {
        let z = z3();
        assert!(PartialPseudometric::new(&z, vec![], vec![]).is_err());
        assert!(PartialPseudometric::new(
            &z,
            vec![0, 1],
            vec![vec![int(0), int(1)], vec![int(2), int(0)]]
        )
        .is_err());
        assert!(PartialPseudometric::new(
            &z,
            vec![1, 1],
            vec![vec![int(0), int(0)], vec![int(0), int(0)]]
        )
        .is_err());
    }

    #[test]
    fn untruncated_can_exceed_norm() {
        // far point on a line: L·d_Z reaches past ‖d‖ before truncation
        let z = Space::on_line(
            vec!["a".into(), "b".into(), "c".into()],
            &[int(0), int(1), int(10)],
        )
        .unwrap();
        let pd = PartialPseudometric::new(
            &z,
            vec![0, 1],
            vec![vec![int(0), int(1)], vec![int(1), int(0)]],
        )
        .unwrap();
        assert_eq!(extend_untruncated(&pd).sup_norm(), int(10));
        assert_eq!(extend_lip_preserving(&pd).sup_norm(), int(1));
    }
}
