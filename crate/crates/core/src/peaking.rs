//! Peaking pseudometrics.
//!
//! Given `d` and a target pair `(x, y)`, [`build_peaking`] produces `ρ` with
//!
//! * `ρ(x, y) ≥ ρ(z, w)` for every pair, and
//! * `d(x, y) + ρ(x, y) > d(z, w) + ρ(z, w)` for every pair other than
//!   `(x, y)` and `(y, x)`,
//!
//! so that `d + ρ` attains its sup-norm only at `{x, y}`.
//!
//! The construction: `e = min{d_Z / d_Z(x, y), 1}`, `d' = d + e`,
//! `a = d'(x, y)`, `b = min{max_z d'(x, z), max_z d'(y, z)}`. For each level
//! `n ≥ 1` the points split into the closed `d'`-balls of radius `a/2^{n+1}`
//! around `x` and `y` and the set of points at distance at least `a/2^n` from
//! both; points in between are left out. The block pseudometric `ρ_n` on those
//! three blocks takes the values `4b` (x-ball to y-ball), `2b` (outer set to
//! either ball) and `0` (within a block), and is extended to the whole space.
//! Then `ρ = e + Σ_n ρ_n / 2^n`.
//!
//! `d'` is a metric, so once `a/2^n` drops to the smallest `d'`-distance from
//! `x` or `y` to any third point, both balls are singletons, every point is in
//! some block and `ρ_n` no longer changes. From that level `n0` on the series
//! is geometric and sums in closed form to `ρ_{n0} / 2^{n0-1}`.

use std::sync::Arc;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::extend::{extend_lip_preserving, PartialPseudometric};
use crate::pseudometric::{same_space, Pseudometric};
use crate::rational::{self, Rational};
use crate::space::Space;

/// The three blocks of one level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Annulus {
    pub level: u32,
    /// Closed ball around `x` of radius `a/2^{level+1}`.
    pub near_x: Vec<usize>,
    /// Closed ball around `y` of radius `a/2^{level+1}`.
    pub near_y: Vec<usize>,
    /// Points at distance `≥ a/2^level` from both `x` and `y`.
    pub outer: Vec<usize>,
}

impl Annulus {
    /// `W_n`, in point order.
    pub fn support(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self
            .near_x
            .iter()
            .chain(&self.near_y)
            .chain(&self.outer)
            .copied()
            .collect();
        all.sort_unstable();
        all
    }

    fn block_of(&self, point: usize) -> Option<Block> {
        if self.near_x.contains(&point) {
            Some(Block::NearX)
        } else if self.near_y.contains(&point) {
            Some(Block::NearY)
        } else if self.outer.contains(&point) {
            Some(Block::Outer)
        } else {
            None
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Block {
    NearX,
    NearY,
    Outer,
}

/// Splits the points for level `n` around the pair `(x, y)` using `d'`.
pub fn annulus(d_prime: &Pseudometric, x: usize, y: usize, a: &Rational, n: u32) -> Annulus {
    let outer_radius = a * rational::inv_pow2(n);
    let inner_radius = a * rational::inv_pow2(n + 1);
    let mut near_x = Vec::new();
    let mut near_y = Vec::new();
    let mut outer = Vec::new();
    for z in 0..d_prime.len() {
        let (dx, dy) = (d_prime.get(x, z), d_prime.get(y, z));
        if *dx <= inner_radius {
            near_x.push(z);
        } else if *dy <= inner_radius {
            near_y.push(z);
        } else if *dx >= outer_radius && *dy >= outer_radius {
            outer.push(z);
        }
    }
    Annulus {
        level: n,
        near_x,
        near_y,
        outer,
    }
}

/// The level-`n` block pseudometric on `W_n`: `4b` between the two balls,
/// `2b` between the outer set and either ball, `0` within a block.
pub fn build_annulus_block(
    d_prime: &Pseudometric,
    x: usize,
    y: usize,
    a: &Rational,
    b: &Rational,
    n: u32,
) -> PartialPseudometric {
    block_pseudometric(d_prime.space(), &annulus(d_prime, x, y, a, n), b)
}

fn block_pseudometric(space: &Arc<Space>, ring: &Annulus, b: &Rational) -> PartialPseudometric {
    let four_b = b * rational::int(4);
    let two_b = b * rational::int(2);
    let support = ring.support();
    let values = support
        .iter()
        .flat_map(|&z| support.iter().map(move |&w| (z, w)))
        .map(|(z, w)| {
            let bz = ring.block_of(z).expect("support point");
            let bw = ring.block_of(w).expect("support point");
            match (bz, bw) {
                _ if bz == bw => rational::zero(),
                (Block::Outer, _) | (_, Block::Outer) => two_b.clone(),
                _ => four_b.clone(),
            }
        })
        .collect();
    PartialPseudometric::from_flat(space, support, values)
        .expect("block values satisfy 4b <= 2b + 2b")
}

/// Everything computed on the way to `ρ`.
#[derive(Debug, Clone)]
pub struct PeakingTranscript {
    pub d: Pseudometric,
    pub x: usize,
    pub y: usize,
    pub e: Pseudometric,
    pub d_prime: Pseudometric,
    pub a: Rational,
    pub b: Rational,
    /// First level from which `ρ_n` is constant.
    pub n0: u32,
    /// Levels `1..=n0`.
    pub annuli: Vec<Annulus>,
    /// Extended `ρ_n` for levels `1..=n0`.
    pub rho_levels: Vec<Pseudometric>,
    pub rho: Pseudometric,
}

impl PeakingTranscript {
    /// `d + ρ`, which lies in `Pp` with peak `{x, y}`.
    pub fn peaked(&self) -> Pseudometric {
        self.d.add(&self.rho).expect("same space")
    }

    /// `ρ_n` for any `n ≥ 1`; levels past `n0` repeat `ρ_{n0}`.
    pub fn level(&self, n: u32) -> &Pseudometric {
        assert!(n >= 1, "levels start at 1");
        let idx = (n.min(self.n0) - 1) as usize;
        &self.rho_levels[idx]
    }

    /// `Σ_{n=1}^{upto} ρ_n / 2^n`, without `e`.
    pub fn partial_series(&self, upto: u32) -> Pseudometric {
        let mut sum = Pseudometric::zero(self.d.space());
        for n in 1..=upto {
            sum = sum
                .add(&self.level(n).scale(&rational::inv_pow2(n)))
                .expect("same space");
        }
        sum
    }

    /// `lip(e) + 24·b·(lip(d) + lip(e)) / a`.
    pub fn lip_bound(&self) -> Rational {
        let lip_e = self.e.lip_constant().expect("two points");
        let lip_d = self.d.lip_constant().expect("two points");
        &lip_e + rational::int(24) * &self.b * (lip_d + &lip_e) / &self.a
    }
}

/// Builds a peaking pseudometric for `d` at the pair `(x, y)`.
pub fn build_peaking(d: &Pseudometric, x: usize, y: usize) -> Result<PeakingTranscript> {
    let space = d.space();
    let n = space.len();
    if x >= n {
        return Err(Error::UnknownPoint(format!("#{x}")));
    }
    if y >= n {
        return Err(Error::UnknownPoint(format!("#{y}")));
    }
    if x == y {
        return Err(Error::DegeneratePair(space.label(x).to_string()));
    }

    let dxy = space.dist(x, y).clone();
    let one = rational::one();
    let e = Pseudometric::from_fn(space, |z, w| {
        rational::min(&(space.dist(z, w) / &dxy), &one).clone()
    })
    .expect("truncated scaled metric is a metric");
    let d_prime = d.add(&e)?;
    let a = d_prime.get(x, y).clone();
    let reach = |p: usize| (0..n).map(|z| d_prime.get(p, z)).max().cloned().unwrap();
    let b = rational::min(&reach(x), &reach(y)).clone();

    let n0 = stabilization_level(&d_prime, x, y, &a);
    let mut annuli = Vec::with_capacity(n0 as usize);
    let mut rho_levels = Vec::with_capacity(n0 as usize);
    for level in 1..=n0 {
        let ring = annulus(&d_prime, x, y, &a, level);
        let block = block_pseudometric(space, &ring, &b);
        rho_levels.push(extend_lip_preserving(&block));
        annuli.push(ring);
    }
    debug_assert_eq!(annuli[n0 as usize - 1].support().len(), n);

    let mut rho = e.clone();
    for (idx, level) in rho_levels.iter().enumerate() {
        let n = idx as u32 + 1;
        // the last stored level stands for the whole geometric tail
        let weight = if n == n0 {
            rational::inv_pow2(n0 - 1)
        } else {
            rational::inv_pow2(n)
        };
        rho = rho.add(&level.scale(&weight))?;
    }

    Ok(PeakingTranscript {
        d: d.clone(),
        x,
        y,
        e,
        d_prime,
        a,
        b,
        n0,
        annuli,
        rho_levels,
        rho,
    })
}

/// Smallest `n ≥ 1` with `a/2^n` at most the distance from `x` or `y` to
/// the nearest third point.
fn stabilization_level(d_prime: &Pseudometric, x: usize, y: usize, a: &Rational) -> u32 {
    let nearest = (0..d_prime.len())
        .filter(|&z| z != x && z != y)
        .map(|z| rational::min(d_prime.get(x, z), d_prime.get(y, z)).clone())
        .min();
    let Some(nearest) = nearest else {
        return 1;
    };
    debug_assert!(!nearest.is_zero());
    let mut n = 1;
    while a * rational::inv_pow2(n) > nearest {
        n += 1;
    }
    n
}

/// Which half of the peak property failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PeakFailure {
    /// `ρ(z, w) > ρ(x, y)`.
    RhoExceeds,
    /// `d(z, w) + ρ(z, w) ≥ d(x, y) + ρ(x, y)`.
    NotStrict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PeakViolation {
    pub z: usize,
    pub w: usize,
    pub failure: PeakFailure,
}

/// Checks both peak inequalities for every pair other than `(x, y)` and
/// `(y, x)`. Returns the first violating pair.
///
/// Panics if `d` and `rho` live on different spaces.
pub fn verify_peak_property(
    d: &Pseudometric,
    rho: &Pseudometric,
    x: usize,
    y: usize,
) -> Result<(), PeakViolation> {
    assert!(
        same_space(d.space(), rho.space()),
        "d and rho must share a space"
    );
    let top_rho = rho.get(x, y);
    let top = d.get(x, y) + top_rho;
    let n = d.len();
    for z in 0..n {
        for w in 0..n {
            if (z, w) == (x, y) || (z, w) == (y, x) {
                continue;
            }
            if rho.get(z, w) > top_rho {
                return Err(PeakViolation {
                    z,
                    w,
                    failure: PeakFailure::RhoExceeds,
                });
            }
            if d.get(z, w) + rho.get(z, w) >= top {
                return Err(PeakViolation {
                    z,
                    w,
                    failure: PeakFailure::NotStrict,
                });
            }
        }
    }
    Ok(())
}
