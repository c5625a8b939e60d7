//! Seeded generators for spaces, pseudometrics, subsets and bijections.
//!
//! All entries share one denominator per draw, so values stay small and exact.
//! Metrics come from shortest-path closure of random edge weights, which
//! makes the triangle inequality hold by construction.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::pseudometric::{d_of_functions, Pseudometric};
use crate::rational::{self, Rational};
use crate::space::{Bijection, Space};

pub fn labels(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// `k / den` with `k` uniform in `lo..=hi`.
pub fn rational_in<R: Rng>(rng: &mut R, lo: i64, hi: i64, den: i64) -> Rational {
    rational::frac(rng.gen_range(lo..=hi), den)
}

/// Shortest-path closure, in place, of a symmetric nonnegative weight matrix.
fn close(n: usize, w: &mut [Rational]) {
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = &w[i * n + k] + &w[k * n + j];
                if via < w[i * n + j] {
                    w[i * n + j] = via;
                }
            }
        }
    }
}

fn random_weights<R: Rng>(rng: &mut R, n: usize, den: i64, allow_zero: bool) -> Vec<Rational> {
    let mut w = vec![rational::zero(); n * n];
    let lo = if allow_zero { 0 } else { 1 };
    for i in 0..n {
        for j in i + 1..n {
            let v = rational_in(rng, lo, 4 * den, den);
            w[i * n + j] = v.clone();
            w[j * n + i] = v;
        }
    }
    close(n, &mut w);
    w
}

/// A random metric space on `n` points with entries in `(0, 4]` over a
/// random denominator in `1..=max_den`.
pub fn random_space<R: Rng>(rng: &mut R, prefix: &str, n: usize, max_den: i64) -> Arc<Space> {
    let den = rng.gen_range(1..=max_den);
    let metric = random_weights(rng, n, den, false);
    Space::from_flat(labels(prefix, n), metric).expect("closed positive weights form a metric")
}

/// A random pseudometric on `space`, drawn from a mix of shapes: closed
/// random weights with zeros allowed, `d(F)` of random functions, a scaled
/// base metric, a truncated sum, and occasionally zero.
pub fn random_pseudometric<R: Rng>(rng: &mut R, space: &Arc<Space>, max_den: i64) -> Pseudometric {
    let n = space.len();
    let den = rng.gen_range(1..=max_den);
    match rng.gen_range(0..10) {
        0 => Pseudometric::zero(space),
        1 | 2 => {
            let count = rng.gen_range(1..=3);
            let functions: Vec<Vec<Rational>> = (0..count)
                .map(|_| {
                    (0..n)
                        .map(|_| rational_in(rng, -4 * den, 4 * den, den))
                        .collect()
                })
                .collect();
            d_of_functions(space, &functions).expect("nonempty family")
        }
        3 => Pseudometric::base(space).scale(&rational_in(rng, 1, 4 * den, den)),
        4 => {
            let a = Pseudometric::base(space).scale(&rational_in(rng, 0, 2 * den, den));
            let b =
                Pseudometric::from_flat(space, random_weights(rng, n, den, true)).expect("closure");
            a.add(&b)
                .expect("same space")
                .truncate(&rational_in(rng, 1, 4 * den, den))
        }
        _ => Pseudometric::from_flat(space, random_weights(rng, n, den, true)).expect("closure"),
    }
}

/// A nonempty subset of `0..n`, sorted.
pub fn random_subset<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    let size = rng.gen_range(1..=n);
    let mut all: Vec<usize> = (0..n).collect();
    all.shuffle(rng);
    let mut subset = all[..size].to_vec();
    subset.sort_unstable();
    subset
}

pub fn random_bijection<R: Rng>(rng: &mut R, n: usize) -> Bijection {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    Bijection::new(perm).expect("shuffle is a permutation")
}

/// Two distinct points of `0..n`, `n ≥ 2`.
pub fn random_pair<R: Rng>(rng: &mut R, n: usize) -> (usize, usize) {
    let x = rng.gen_range(0..n);
    let mut y = rng.gen_range(0..n - 1);
    if y >= x {
        y += 1;
    }
    (x, y)
}

/// A space `Y` isometric to `x` through `phi: Y → X`, with its own labels.
pub fn isometric_copy(x: &Arc<Space>, prefix: &str, phi: &Bijection) -> Arc<Space> {
    Space::from_fn(labels(prefix, x.len()), |i, j| {
        x.dist(phi.apply(i), phi.apply(j)).clone()
    })
    .expect("pullback of a metric along a bijection is a metric")
}

/// A space whose metric is `c` times the pullback of `y`'s metric along
/// `phi⁻¹`, so that `phi: Y → X` scales every distance by `c`.
pub fn scaled_copy(y: &Arc<Space>, prefix: &str, phi: &Bijection, c: &Rational) -> Arc<Space> {
    let inv = phi.inverse();
    Space::from_fn(labels(prefix, y.len()), |i, j| {
        y.dist(inv.apply(i), inv.apply(j)) * c
    })
    .expect("positive multiple of a metric is a metric")
}
