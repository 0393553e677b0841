//! Seeded random generation of lattice vectors and isometries.
//!
//! The randomized property suites are all seed-fixed; this module gives
//! them deterministic streams of isotropic vectors, orthogonal complements
//! and transvection/reflection words on the standard block lattices.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::isometry::Isometry;
use crate::lattice::IntegralLattice;

pub struct Rand {
    rng: ChaCha8Rng,
}

impl Rand {
    pub fn new(seed: u64) -> Self {
        Rand {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn i64(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.random_range(lo..=hi)
    }

    pub fn usize(&mut self, hi: usize) -> usize {
        self.rng.random_range(0..hi)
    }

    pub fn bigint(&mut self, lo: i64, hi: i64) -> BigInt {
        BigInt::from(self.i64(lo, hi))
    }

    pub fn vector(&mut self, n: usize, bound: i64) -> Vec<BigInt> {
        (0..n).map(|_| self.bigint(-bound, bound)).collect()
    }
}

/// Index pairs `(i, j)` of standard hyperbolic planes visible as 2x2 blocks
/// `[[0,1],[1,0]]` of the Gram matrix.
pub fn hyperbolic_pairs(l: &IntegralLattice) -> Vec<(usize, usize)> {
    let g = l.gram();
    let n = l.rank();
    let mut pairs = Vec::new();
    let mut i = 0;
    while i + 1 < n {
        let is_u = g[(i, i)].is_zero()
            && g[(i + 1, i + 1)].is_zero()
            && g[(i, i + 1)].is_one()
            && (0..n).all(|j| j == i || j == i + 1 || (g[(i, j)].is_zero() && g[(i + 1, j)].is_zero()));
        if is_u {
            pairs.push((i, i + 1));
            i += 2;
        } else {
            i += 1;
        }
    }
    pairs
}

/// Extended gcd over a list: returns `(g, c)` with `sum c_i v_i = g >= 0`.
pub fn bezout(values: &[BigInt]) -> (BigInt, Vec<BigInt>) {
    let mut g = BigInt::zero();
    let mut coeffs = vec![BigInt::zero(); values.len()];
    for (i, v) in values.iter().enumerate() {
        if v.is_zero() {
            continue;
        }
        if g.is_zero() {
            coeffs[i] = if v.is_negative() { -BigInt::one() } else { BigInt::one() };
            g = v.abs();
            continue;
        }
        let e = g.extended_gcd(v);
        // e.gcd = e.x * g + e.y * v
        for c in coeffs.iter_mut() {
            *c *= &e.x;
        }
        coeffs[i] = e.y.clone();
        g = e.gcd;
    }
    (g, coeffs)
}

/// A nonzero isotropic vector supported on the hyperbolic blocks.
pub fn random_isotropic(rand: &mut Rand, l: &IntegralLattice, bound: i64) -> Vec<BigInt> {
    let pairs = hyperbolic_pairs(l);
    assert!(!pairs.is_empty(), "lattice has no visible hyperbolic block");
    'retry: loop {
        let mut v = vec![BigInt::zero(); l.rank()];
        let mut acc = BigInt::zero(); // sum of x_i * y_i over all but the last block
        for (idx, &(i, j)) in pairs.iter().enumerate() {
            if idx + 1 == pairs.len() {
                // close up: x * y = -acc
                let x = rand.bigint(-bound, bound);
                if x.is_zero() {
                    if !acc.is_zero() {
                        continue 'retry;
                    }
                    v[i] = BigInt::zero();
                    v[j] = rand.bigint(-bound, bound);
                } else if (&acc % &x).is_zero() {
                    v[i] = x.clone();
                    v[j] = -&acc / &x;
                } else {
                    continue 'retry;
                }
            } else {
                let x = rand.bigint(-bound, bound);
                let y = rand.bigint(-bound, bound);
                acc += &x * &y;
                v[i] = x;
                v[j] = y;
            }
        }
        if v.iter().any(|c| !c.is_zero()) {
            debug_assert!(l.square(&v).unwrap().is_zero());
            return v;
        }
    }
}

/// A random vector exactly orthogonal to `z`, produced by a Bezout
/// correction of a uniformly drawn vector. The pairing of any vector
/// against `z` is divisible by the divisibility of `z`, so the correction
/// is always integral.
pub fn random_orthogonal_to(rand: &mut Rand, l: &IntegralLattice, z: &[BigInt], bound: i64) -> Vec<BigInt> {
    let gz = l.gram().mul_vec(z);
    let (div, coeffs) = bezout(&gz);
    assert!(!div.is_zero(), "z pairs to zero with everything");
    let a = rand.vector(l.rank(), bound);
    let d = l.pair(&a, z).unwrap();
    let q = &d / &div;
    a.iter()
        .enumerate()
        .map(|(i, ai)| ai - &q * &coeffs[i])
        .collect()
}

/// A random Eichler transvection supported on the hyperbolic blocks.
pub fn random_transvection(rand: &mut Rand, l: &Arc<IntegralLattice>, bound: i64) -> Result<Isometry> {
    let z = random_isotropic(rand, l, bound);
    let a = random_orthogonal_to(rand, l, &z, bound);
    Isometry::transvection(l.clone(), &z, &a)
}

/// Basis-aligned vectors of square -2 (diagonal entries -2 and hyperbolic
/// differences e_i - f_i).
pub fn minus_two_vectors(l: &IntegralLattice) -> Vec<Vec<BigInt>> {
    let n = l.rank();
    let g = l.gram();
    let mut out = Vec::new();
    for i in 0..n {
        if g[(i, i)] == BigInt::from(-2) {
            let mut v = vec![BigInt::zero(); n];
            v[i] = BigInt::one();
            out.push(v);
        }
    }
    for (i, j) in hyperbolic_pairs(l) {
        let mut v = vec![BigInt::zero(); n];
        v[i] = BigInt::one();
        v[j] = -BigInt::one();
        out.push(v);
    }
    out
}

/// A random reflection in a vector of square -2 (always integral), moved
/// around by a random transvection so the fixed vector varies.
pub fn random_minus2_reflection(rand: &mut Rand, l: &Arc<IntegralLattice>, bound: i64) -> Result<Isometry> {
    let roots = minus_two_vectors(l);
    let root = roots[rand.usize(roots.len())].clone();
    let t = random_transvection(rand, l, bound)?;
    let u = t.apply(&root);
    Isometry::reflection(l.clone(), &u)
}

/// A random word in transvections and (-2)-reflections; every such word is
/// orientation preserving and acts as the identity on the discriminant
/// group.
pub fn random_w_word(rand: &mut Rand, l: &Arc<IntegralLattice>, len: usize, bound: i64) -> Result<Isometry> {
    let mut acc = Isometry::identity(l.clone());
    for _ in 0..len {
        let step = if rand.i64(0, 1) == 0 {
            random_transvection(rand, l, bound)?
        } else {
            random_minus2_reflection(rand, l, bound)?
        };
        acc = step.compose(&acc)?;
    }
    Ok(acc)
}
