//! Finite base spaces, doubletons and point bijections.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{Signed, Zero};

use crate::error::{AxiomKind, AxiomViolation, Error, Result};
use crate::rational::{self, Rational};

/// A finite set of labeled points with an admissible base metric `d_Z`.
///
/// Points are addressed by their position in the label list; that order is
/// fixed at construction and is the row/column order of every matrix built on
/// the space.
#[derive(Debug, Clone)]
pub struct Space {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    metric: Vec<Rational>,
}

impl PartialEq for Space {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels && self.metric == other.metric
    }
}

impl Eq for Space {}

impl Space {
    /// Builds a space from labels and a square base-metric matrix. The matrix
    /// must be a genuine metric: symmetric, zero diagonal, strictly positive
    /// off the diagonal, and satisfy every triangle inequality.
    pub fn new(labels: Vec<String>, matrix: Vec<Vec<Rational>>) -> Result<Arc<Space>> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::EmptySpace);
        }
        let values = flatten(n, matrix)?;
        Self::from_flat(labels, values)
    }

    pub(crate) fn from_flat(labels: Vec<String>, metric: Vec<Rational>) -> Result<Arc<Space>> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::EmptySpace);
        }
        let mut index = HashMap::with_capacity(n);
        for (i, label) in labels.iter().enumerate() {
            if index.insert(label.clone(), i).is_some() {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }
        check_axioms(&labels, &metric, true)?;
        Ok(Arc::new(Space {
            labels,
            index,
            metric,
        }))
    }

    /// Builds a space whose base metric is `f(i, j)` for `i != j`.
    pub fn from_fn<F>(labels: Vec<String>, f: F) -> Result<Arc<Space>>
    where
        F: Fn(usize, usize) -> Rational,
    {
        let n = labels.len();
        let mut metric = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                metric.push(if i == j { rational::zero() } else { f(i, j) });
            }
        }
        Self::from_flat(labels, metric)
    }

    /// Every pair of distinct points at distance one.
    pub fn discrete(labels: Vec<String>) -> Arc<Space> {
        Self::from_fn(labels, |_, _| rational::one()).expect("discrete metric is admissible")
    }

    /// Points `0..n` on a line at the given coordinates, labeled by `labels`.
    pub fn on_line(labels: Vec<String>, coords: &[Rational]) -> Result<Arc<Space>> {
        if coords.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: labels.len(),
                found: coords.len(),
            });
        }
        Self::from_fn(labels, |i, j| (&coords[i] - &coords[j]).abs())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, point: usize) -> &str {
        &self.labels[point]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownPoint(label.to_string()))
    }

    pub fn dist(&self, i: usize, j: usize) -> &Rational {
        &self.metric[i * self.len() + j]
    }

    pub(crate) fn metric_values(&self) -> &[Rational] {
        &self.metric
    }

    /// `‖d_Z‖`, the largest base distance.
    pub fn diameter(&self) -> Rational {
        self.metric
            .iter()
            .max()
            .cloned()
            .unwrap_or_else(rational::zero)
    }

    /// All doubletons in canonical order.
    pub fn doubletons(&self) -> Vec<Doubleton> {
        let n = self.len();
        let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                out.push(Doubleton {
                    first: i,
                    second: j,
                });
            }
        }
        out
    }

    /// Renders a doubleton with this space's labels.
    pub fn show(&self, pair: Doubleton) -> String {
        format!(
            "{{{}, {}}}",
            self.label(pair.first),
            self.label(pair.second)
        )
    }
}

/// An unordered pair of distinct points, stored with `first < second`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Doubleton {
    first: usize,
    second: usize,
}

impl Doubleton {
    /// Returns `None` when `a == b`.
    pub fn new(a: usize, b: usize) -> Option<Doubleton> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Some(Doubleton {
                first: a,
                second: b,
            }),
            std::cmp::Ordering::Greater => Some(Doubleton {
                first: b,
                second: a,
            }),
            std::cmp::Ordering::Equal => None,
        }
    }

    pub fn first(self) -> usize {
        self.first
    }

    pub fn second(self) -> usize {
        self.second
    }

    pub fn contains(self, point: usize) -> bool {
        self.first == point || self.second == point
    }

    /// The points shared with `other`.
    pub fn intersection(self, other: Doubleton) -> Vec<usize> {
        [self.first, self.second]
            .into_iter()
            .filter(|&p| other.contains(p))
            .collect()
    }
}

impl fmt::Display for Doubleton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}, {}}}", self.first, self.second)
    }
}

/// A bijection from the points of one space (the source) onto the points of
/// another (the target), as an index table.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bijection {
    forward: Vec<usize>,
    backward: Vec<usize>,
}

impl Bijection {
    pub fn new(forward: Vec<usize>) -> Result<Bijection> {
        let n = forward.len();
        let mut backward = vec![usize::MAX; n];
        for (i, &j) in forward.iter().enumerate() {
            if j >= n {
                return Err(Error::NotBijection(format!("image {j} out of range")));
            }
            if backward[j] != usize::MAX {
                return Err(Error::NotBijection(format!(
                    "points {} and {i} share the image {j}",
                    backward[j]
                )));
            }
            backward[j] = i;
        }
        Ok(Bijection { forward, backward })
    }

    pub fn identity(n: usize) -> Bijection {
        Bijection::new((0..n).collect()).expect("identity is a bijection")
    }

    /// Builds a bijection from `(source label, target label)` pairs.
    pub fn from_labels<'a, I>(source: &Space, target: &Space, pairs: I) -> Result<Bijection>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        if source.len() != target.len() {
            return Err(Error::NotBijection(format!(
                "spaces have {} and {} points",
                source.len(),
                target.len()
            )));
        }
        let mut forward = vec![usize::MAX; source.len()];
        for (from, to) in pairs {
            let i = source.index_of(from)?;
            if forward[i] != usize::MAX {
                return Err(Error::NotBijection(format!("`{from}` mapped twice")));
            }
            forward[i] = target.index_of(to)?;
        }
        if let Some(i) = forward.iter().position(|&j| j == usize::MAX) {
            return Err(Error::NotBijection(format!(
                "`{}` has no image",
                source.label(i)
            )));
        }
        Bijection::new(forward)
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    pub fn apply(&self, point: usize) -> usize {
        self.forward[point]
    }

    pub fn apply_inverse(&self, point: usize) -> usize {
        self.backward[point]
    }

    pub fn inverse(&self) -> Bijection {
        Bijection {
            forward: self.backward.clone(),
            backward: self.forward.clone(),
        }
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.forward
    }

    pub fn image(&self, pair: Doubleton) -> Doubleton {
        Doubleton::new(self.apply(pair.first), self.apply(pair.second))
            .expect("bijections preserve distinctness")
    }

    /// Every bijection on `n` points, in lexicographic order.
    pub fn all(n: usize) -> Vec<Bijection> {
        let mut out = Vec::new();
        let mut current: Vec<usize> = (0..n).collect();
        loop {
            out.push(Bijection::new(current.clone()).expect("permutation"));
            // next lexicographic permutation
            let Some(i) = (1..n).rev().find(|&i| current[i - 1] < current[i]) else {
                break;
            };
            let j = (i..n).rev().find(|&j| current[j] > current[i - 1]).unwrap();
            current.swap(i - 1, j);
            current[i..].reverse();
        }
        out
    }

    /// Renders as `source -> target` label pairs.
    pub fn show(&self, source: &Space, target: &Space) -> String {
        self.forward
            .iter()
            .enumerate()
            .map(|(i, &j)| format!("{} -> {}", source.label(i), target.label(j)))
            .collect::<Vec<_>>()
            .join(", ")
    }
}

pub(crate) fn flatten(n: usize, matrix: Vec<Vec<Rational>>) -> Result<Vec<Rational>> {
    if matrix.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: matrix.len(),
        });
    }
    let mut values = Vec::with_capacity(n * n);
    for row in matrix {
        if row.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: row.len(),
            });
        }
        values.extend(row);
    }
    Ok(values)
}

/// Checks the pseudometric axioms on a row-major `n x n` matrix; with
/// `separating`, distinct points must also be at positive distance.
pub(crate) fn check_axioms(
    labels: &[String],
    values: &[Rational],
    separating: bool,
) -> std::result::Result<(), AxiomViolation> {
    let n = labels.len();
    let at = |i: usize, j: usize| &values[i * n + j];
    let witness = |kind, i: usize, j: usize, k: usize| AxiomViolation {
        kind,
        witness: (labels[i].clone(), labels[j].clone(), labels[k].clone()),
    };
    for i in 0..n {
        if !at(i, i).is_zero() {
            return Err(witness(AxiomKind::NonzeroDiagonal, i, i, i));
        }
        for j in 0..n {
            if at(i, j).is_negative() {
                return Err(witness(AxiomKind::Negative, i, j, j));
            }
            if at(i, j) != at(j, i) {
                return Err(witness(AxiomKind::Asymmetry, i, j, j));
            }
            if separating && i != j && at(i, j).is_zero() {
                return Err(witness(AxiomKind::NotSeparating, i, j, j));
            }
        }
    }
    for x in 0..n {
        for z in x + 1..n {
            let direct = at(x, z);
            for y in 0..n {
                if y == x || y == z {
                    continue;
                }
                if *direct > at(x, y) + at(y, z) {
                    return Err(witness(AxiomKind::Triangle, x, y, z));
                }
            }
        }
    }
    Ok(())
}
