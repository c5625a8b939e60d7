//! Pseudometrics on a finite [`Space`] and the arithmetic the cone is closed under.

use std::fmt;
use std::sync::Arc;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::space::{check_axioms, flatten, Bijection, Space};

/// A symmetric, nonnegative, zero-diagonal matrix satisfying every triangle
/// inequality. Distinct points may sit at distance zero.
#[derive(Clone)]
pub struct Pseudometric {
    space: Arc<Space>,
    values: Vec<Rational>,
}

impl PartialEq for Pseudometric {
    fn eq(&self, other: &Self) -> bool {
        same_space(&self.space, &other.space) && self.values == other.values
    }
}

impl Eq for Pseudometric {}

impl fmt::Debug for Pseudometric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.len();
        let mut rows = f.debug_list();
        for i in 0..n {
            let row: Vec<String> = (0..n).map(|j| self.get(i, j).to_string()).collect();
            rows.entry(&row);
        }
        rows.finish()
    }
}

pub(crate) fn same_space(a: &Arc<Space>, b: &Arc<Space>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Validates `matrix` against the pseudometric axioms on `space`.
pub fn validate_pseudometric(
    space: &Arc<Space>,
    matrix: Vec<Vec<Rational>>,
) -> Result<Pseudometric> {
    Pseudometric::new(space, matrix)
}

impl Pseudometric {
    pub fn new(space: &Arc<Space>, matrix: Vec<Vec<Rational>>) -> Result<Pseudometric> {
        let values = flatten(space.len(), matrix)?;
        Self::from_flat(space, values)
    }

    pub(crate) fn from_flat(space: &Arc<Space>, values: Vec<Rational>) -> Result<Pseudometric> {
        if values.len() != space.len() * space.len() {
            return Err(Error::DimensionMismatch {
                expected: space.len() * space.len(),
                found: values.len(),
            });
        }
        check_axioms(space.labels(), &values, false)?;
        Ok(Pseudometric {
            space: Arc::clone(space),
            values,
        })
    }

    /// Skips validation; callers guarantee the axioms by construction.
    pub(crate) fn from_flat_unchecked(space: &Arc<Space>, values: Vec<Rational>) -> Pseudometric {
        debug_assert!(check_axioms(space.labels(), &values, false).is_ok());
        Pseudometric {
            space: Arc::clone(space),
            values,
        }
    }

    /// `f(i, j)` off the diagonal, zero on it; validated.
    pub fn from_fn<F>(space: &Arc<Space>, f: F) -> Result<Pseudometric>
    where
        F: Fn(usize, usize) -> Rational,
    {
        let n = space.len();
        let mut values = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                values.push(if i == j { rational::zero() } else { f(i, j) });
            }
        }
        Self::from_flat(space, values)
    }

    /// The zero pseudometric `0_{Z²}`.
    pub fn zero(space: &Arc<Space>) -> Pseudometric {
        Pseudometric {
            space: Arc::clone(space),
            values: vec![rational::zero(); space.len() * space.len()],
        }
    }

    /// The base metric `d_Z` viewed as an element of the cone.
    pub fn base(space: &Arc<Space>) -> Pseudometric {
        Pseudometric {
            space: Arc::clone(space),
            values: space.metric_values().to_vec(),
        }
    }

    /// Distance one between every pair of distinct points.
    pub fn discrete(space: &Arc<Space>) -> Pseudometric {
        let n = space.len();
        let values = (0..n * n)
            .map(|k| {
                if k / n == k % n {
                    rational::zero()
                } else {
                    rational::one()
                }
            })
            .collect();
        Pseudometric::from_flat_unchecked(space, values)
    }

    pub fn space(&self) -> &Arc<Space> {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.values[i * self.len() + j]
    }

    pub fn rows(&self) -> Vec<Vec<Rational>> {
        self.values.chunks(self.len()).map(|r| r.to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }

    fn zip_with<F>(&self, other: &Pseudometric, f: F) -> Result<Pseudometric>
    where
        F: Fn(&Rational, &Rational) -> Rational,
    {
        if !same_space(&self.space, &other.space) {
            return Err(Error::SpaceMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| f(a, b))
            .collect();
        Ok(Pseudometric::from_flat_unchecked(&self.space, values))
    }

    /// `d + e`.
    pub fn add(&self, other: &Pseudometric) -> Result<Pseudometric> {
        self.zip_with(other, |a, b| a + b)
    }

    /// Pointwise `max(d, e)`.
    pub fn max(&self, other: &Pseudometric) -> Result<Pseudometric> {
        self.zip_with(other, |a, b| rational::max(a, b).clone())
    }

    /// Entrywise difference; the result is generally not a pseudometric, so
    /// only its sup-norm is returned.
    pub fn sup_distance(&self, other: &Pseudometric) -> Result<Rational> {
        if !same_space(&self.space, &other.space) {
            return Err(Error::SpaceMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .max()
            .unwrap_or_else(rational::zero))
    }

    /// `t·d` for `t ≥ 0`.
    ///
    /// Panics on a negative scalar.
    pub fn scale(&self, t: &Rational) -> Pseudometric {
        assert!(!t.is_negative(), "pseudometrics only scale by t >= 0");
        let values = self.values.iter().map(|v| v * t).collect();
        Pseudometric::from_flat_unchecked(&self.space, values)
    }

    /// `min(d, c)` off the diagonal, for a constant `c ≥ 0`.
    pub fn truncate(&self, c: &Rational) -> Pseudometric {
        assert!(!c.is_negative(), "truncation level must be >= 0");
        let values = self
            .values
            .iter()
            .map(|v| rational::min(v, c).clone())
            .collect();
        Pseudometric::from_flat_unchecked(&self.space, values)
    }

    /// The pullback `(y, y') ↦ d(φ(y), φ(y'))` onto `target`, where `phi`
    /// maps the points of `target` onto the points of `self.space()`.
    pub fn pullback(&self, target: &Arc<Space>, phi: &Bijection) -> Pseudometric {
        let n = target.len();
        assert_eq!(n, self.len(), "pullback needs equally sized spaces");
        let mut values = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                values.push(self.get(phi.apply(i), phi.apply(j)).clone());
            }
        }
        Pseudometric::from_flat_unchecked(target, values)
    }

    /// `‖d‖`, the largest entry.
    pub fn sup_norm(&self) -> Rational {
        self.values
            .iter()
            .max()
            .cloned()
            .unwrap_or_else(rational::zero)
    }

    /// `lip(d) = max d(x, y) / d_Z(x, y)` over distinct pairs.
    pub fn lip_constant(&self) -> Result<Rational> {
        let n = self.len();
        if n < 2 {
            return Err(Error::DegenerateSpace);
        }
        let mut best = rational::zero();
        for i in 0..n {
            for j in i + 1..n {
                let ratio = self.get(i, j) / self.space.dist(i, j);
                if ratio > best {
                    best = ratio;
                }
            }
        }
        Ok(best)
    }
}

pub fn sup_norm(d: &Pseudometric) -> Rational {
    d.sup_norm()
}

pub fn lip_constant(d: &Pseudometric) -> Result<Rational> {
    d.lip_constant()
}

/// `d(F)(x, y) = max_{f ∈ F} |f(x) − f(y)|`.
///
/// Each function is given by its values in point order.
pub fn d_of_functions<F: AsRef<[Rational]>>(
    space: &Arc<Space>,
    functions: &[F],
) -> Result<Pseudometric> {
    if functions.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let n = space.len();
    for f in functions {
        if f.as_ref().len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: f.as_ref().len(),
            });
        }
    }
    let mut values = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let v = functions
                .iter()
                .map(|f| (&f.as_ref()[i] - &f.as_ref()[j]).abs())
                .max()
                .expect("nonempty family");
            values.push(v);
        }
    }
    Pseudometric::from_flat(space, values)
}
