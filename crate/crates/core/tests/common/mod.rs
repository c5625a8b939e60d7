//! Reference computations written directly from the definitions, used to
//! cross-check the library.

#![allow(dead_code)]

use std::sync::Arc;

use pmcone::pseudometric::Pseudometric;
use pmcone::rational::Rational;
use pmcone::space::Space;

pub type Matrix = Vec<Vec<Rational>>;

pub fn base(z: &Space) -> Matrix {
    (0..z.len())
        .map(|i| (0..z.len()).map(|j| z.dist(i, j).clone()).collect())
        .collect()
}

pub fn is_pseudometric(m: &Matrix) -> bool {
    let n = m.len();
    let zero = Rational::from_integer(0.into());
    for i in 0..n {
        if m[i].len() != n || m[i][i] != zero {
            return false;
        }
        for j in 0..n {
            if m[i][j] < zero || m[i][j] != m[j][i] {
                return false;
            }
            for k in 0..n {
                if m[i][k] > &m[i][j] + &m[j][k] {
                    return false;
                }
            }
        }
    }
    true
}

pub fn norm(m: &Matrix) -> Rational {
    let mut best = Rational::from_integer(0.into());
    for row in m {
        for v in row {
            if *v > best {
                best = v.clone();
            }
        }
    }
    best
}

/// `max d(i, j) / d_Z(i, j)` over distinct pairs; zero on one point.
pub fn lip(m: &Matrix, z: &Space) -> Rational {
    let mut best = Rational::from_integer(0.into());
    for (i, row) in m.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if i != j {
                let r = v / z.dist(i, j);
                if r > best {
                    best = r;
                }
            }
        }
    }
    best
}

pub fn sup_distance(a: &Matrix, b: &Matrix) -> Rational {
    let mut best = Rational::from_integer(0.into());
    for (ra, rb) in a.iter().zip(b) {
        for (x, y) in ra.iter().zip(rb) {
            let d = if x > y { x - y } else { y - x };
            if d > best {
                best = d;
            }
        }
    }
    best
}

/// The unordered pairs `(i, j)`, `i < j`, attaining the maximum.
pub fn argmax_pairs(m: &Matrix) -> Vec<(usize, usize)> {
    let top = norm(m);
    let mut out = Vec::new();
    for (i, row) in m.iter().enumerate() {
        for (j, v) in row.iter().enumerate().skip(i + 1) {
            if *v == top {
                out.push((i, j));
            }
        }
    }
    out
}

pub fn rows(d: &Pseudometric) -> Matrix {
    d.rows()
}

pub fn space_of(d: &Pseudometric) -> &Arc<Space> {
    d.space()
}
