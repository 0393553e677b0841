//! Integral lattices: a free Z-module of finite rank together with a
//! nondegenerate symmetric integer Gram matrix.
//!
//! Standard building blocks are the hyperbolic plane `U`, the negative
//! definite `E8(-1)` in Bourbaki node order, rank-one lattices `<n>`,
//! direct sums and rescalings. The named lattices "U", "E8m", "mukai" and
//! "Lk:<k>" are addressable through [`IntegralLattice::by_name`].

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::json;
use crate::matrix::{IntMat, RatMat};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IntegralLattice {
    name: Option<String>,
    gram: IntMat,
}

impl IntegralLattice {
    /// Wraps a Gram matrix after checking symmetry and nondegeneracy.
    pub fn new(name: Option<String>, gram: IntMat) -> Result<Self> {
        if !gram.is_square() {
            return Err(Error::DimensionMismatch("gram matrix must be square".into()));
        }
        if !gram.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        if gram.rows() > 0 && gram.det().is_zero() {
            return Err(Error::Degenerate("gram matrix has determinant 0".into()));
        }
        Ok(IntegralLattice { name, gram })
    }

    pub fn rank(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &IntMat {
        &self.gram
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = Some(name.to_string());
        self
    }

    pub fn det(&self) -> BigInt {
        self.gram.det()
    }

    /// Even means every vector has even square, equivalently every diagonal
    /// Gram entry is even.
    pub fn is_even(&self) -> bool {
        (0..self.rank()).all(|i| self.gram[(i, i)].is_even())
    }

    /// The hyperbolic plane, Gram [[0,1],[1,0]].
    pub fn hyperbolic() -> Self {
        IntegralLattice {
            name: Some("U".into()),
            gram: IntMat::from_rows(&[vec![0, 1], vec![1, 0]]),
        }
    }

    /// E8(-1): the negated E8 Cartan matrix, nodes in Bourbaki order
    /// (chain 1-3-4-5-6-7-8 with node 2 attached to node 4).
    pub fn e8_minus() -> Self {
        let edges: [(usize, usize); 7] = [(0, 2), (1, 3), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7)];
        let mut gram = IntMat::zeros(8, 8);
        for i in 0..8 {
            gram[(i, i)] = BigInt::from(-2);
        }
        for &(i, j) in &edges {
            gram[(i, j)] = BigInt::one();
            gram[(j, i)] = BigInt::one();
        }
        IntegralLattice {
            name: Some("E8m".into()),
            gram,
        }
    }

    /// Rank-one lattice `<n>`; `n = 0` is rejected as degenerate.
    pub fn rank1(n: &BigInt) -> Result<Self> {
        if n.is_zero() {
            return Err(Error::Degenerate("rank1(0) is degenerate".into()));
        }
        Ok(IntegralLattice {
            name: Some(format!("<{}>", n)),
            gram: IntMat::from_fn(1, 1, |_, _| n.clone()),
        })
    }

    /// Block-diagonal direct sum.
    pub fn direct_sum(parts: &[&IntegralLattice]) -> Self {
        let grams: Vec<&IntMat> = parts.iter().map(|l| &l.gram).collect();
        IntegralLattice {
            name: None,
            gram: IntMat::block_diag(&grams),
        }
    }

    /// Rescale the form by a nonzero integer `t`.
    pub fn rescale(&self, t: &BigInt) -> Result<Self> {
        if t.is_zero() {
            return Err(Error::Degenerate("rescale by 0 is degenerate".into()));
        }
        Ok(IntegralLattice {
            name: None,
            gram: self.gram.scale(t),
        })
    }

    /// `U^3 + E8(-1)^2 + <-2k>`, the abstract second-cohomology lattice of
    /// the moduli spaces considered here.
    pub fn lk(k: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("k must be >= 1".into()));
        }
        let u = Self::hyperbolic();
        let e8 = Self::e8_minus();
        let tail = Self::rank1(&BigInt::from(-2i64 * k as i64))?;
        Ok(Self::direct_sum(&[&u, &u, &u, &e8, &e8, &tail]).with_name(&format!("Lk:{}", k)))
    }

    /// The rank-24 even unimodular lattice of signature (4,20) in the fixed
    /// coordinate order `b0, b1, e1, f1, e2, f2, e3, f3, E8(-1), E8(-1)`.
    pub fn mukai() -> Self {
        let u = Self::hyperbolic();
        let e8 = Self::e8_minus();
        Self::direct_sum(&[&u, &u, &u, &u, &e8, &e8]).with_name("mukai")
    }

    /// Resolve one of the canonical built-in names.
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "U" => Ok(Self::hyperbolic()),
            "E8m" => Ok(Self::e8_minus()),
            "mukai" => Ok(Self::mukai()),
            _ => {
                if let Some(k) = name.strip_prefix("Lk:") {
                    let k: u64 = k
                        .parse()
                        .map_err(|_| Error::UnknownLattice(name.to_string()))?;
                    Self::lk(k)
                } else {
                    Err(Error::UnknownLattice(name.to_string()))
                }
            }
        }
    }

    fn check_vector(&self, v: &[BigInt]) -> Result<()> {
        if v.len() != self.rank() {
            return Err(Error::DimensionMismatch(format!(
                "vector length {} vs rank {}",
                v.len(),
                self.rank()
            )));
        }
        Ok(())
    }

    /// The bilinear pairing `x^T G y`.
    pub fn pair(&self, x: &[BigInt], y: &[BigInt]) -> Result<BigInt> {
        self.check_vector(x)?;
        self.check_vector(y)?;
        let gy = self.gram.mul_vec(y);
        Ok(x.iter().zip(gy.iter()).map(|(a, b)| a * b).sum())
    }

    pub fn square(&self, x: &[BigInt]) -> Result<BigInt> {
        self.pair(x, x)
    }

    /// Inertia indices `(p, n)` by exact symmetric reduction over Q.
    pub fn signature(&self) -> Result<(usize, usize)> {
        let n = self.rank();
        let mut a = self.gram.to_rational();
        let (mut pos, mut neg) = (0usize, 0usize);
        for k in 0..n {
            if a[(k, k)].is_zero() {
                // bring a nonzero entry onto the diagonal by x_k <- x_k +- x_j
                let j = match (k + 1..n).find(|&j| !a[(k, j)].is_zero()) {
                    Some(j) => j,
                    None => return Err(Error::Degenerate("zero row in symmetric reduction".into())),
                };
                let two = BigRational::from_integer(BigInt::from(2));
                let plus = &two * &a[(k, j)] + &a[(j, j)];
                let sign = if plus.is_zero() { -BigRational::one() } else { BigRational::one() };
                // row/col operation keeping symmetry
                for c in 0..n {
                    let t = &sign * &a[(j, c)];
                    a[(k, c)] += t;
                }
                for r in 0..n {
                    let t = &sign * &a[(r, j)];
                    a[(r, k)] += t;
                }
            }
            let d = a[(k, k)].clone();
            debug_assert!(!d.is_zero());
            if d.is_positive() {
                pos += 1;
            } else {
                neg += 1;
            }
            for i in k + 1..n {
                if a[(i, k)].is_zero() {
                    continue;
                }
                let f = &a[(i, k)] / &d;
                for c in 0..n {
                    let t = &f * &a[(k, c)];
                    a[(i, c)] -= t;
                }
                for r in 0..n {
                    let t = &f * &a[(r, k)];
                    a[(r, i)] -= t;
                }
            }
        }
        Ok((pos, neg))
    }

    /// True iff the coordinate gcd is 1.
    pub fn is_primitive(&self, v: &[BigInt]) -> Result<bool> {
        self.check_vector(v)?;
        if v.iter().all(|x| x.is_zero()) {
            return Err(Error::ZeroVector);
        }
        Ok(coord_gcd(v).is_one())
    }

    /// gcd of the pairings of `v` against the basis vectors.
    pub fn divisibility(&self, v: &[BigInt]) -> Result<BigInt> {
        self.check_vector(v)?;
        if v.iter().all(|x| x.is_zero()) {
            return Err(Error::ZeroVector);
        }
        Ok(coord_gcd(&self.gram.mul_vec(v)))
    }

    /// Saturated basis of the orthogonal complement of `v`.
    pub fn perp_basis(&self, v: &[BigInt]) -> Result<SublatticeBasis> {
        self.check_vector(v)?;
        if v.iter().all(|x| x.is_zero()) {
            return Err(Error::ZeroVector);
        }
        // dividing out the content keeps the basis identical for v and m*v
        let g = coord_gcd(v);
        let w: Vec<BigInt> = v.iter().map(|x| x / &g).collect();
        let row = IntMat::from_fn(1, self.rank(), |_, j| {
            self.gram.mul_vec(&w)[j].clone()
        });
        SublatticeBasis::from_kernel(self, &row)
    }

    /// Expresses `x` in the given basis `b` (columns), if `x` lies in the
    /// integral span.
    pub fn in_span(b: &IntMat, x: &[BigInt]) -> Option<Vec<BigInt>> {
        let bq = b.to_rational();
        let n = b.rows();
        let r = b.cols();
        // solve b * y = x by Gaussian elimination on the augmented system
        let mut aug = RatMat::from_fn(n, r + 1, |i, j| {
            if j < r {
                bq[(i, j)].clone()
            } else {
                BigRational::from_integer(x[i].clone())
            }
        });
        let mut pivots = Vec::new();
        let mut row = 0usize;
        for col in 0..r {
            let Some(p) = (row..n).find(|&i| !aug[(i, col)].is_zero()) else {
                continue;
            };
            for j in 0..r + 1 {
                let t = aug[(row, j)].clone();
                aug[(row, j)] = aug[(p, j)].clone();
                aug[(p, j)] = t;
            }
            let d = aug[(row, col)].clone();
            for j in 0..r + 1 {
                aug[(row, j)] /= d.clone();
            }
            for i in 0..n {
                if i == row || aug[(i, col)].is_zero() {
                    continue;
                }
                let f = aug[(i, col)].clone();
                for j in 0..r + 1 {
                    let t = &f * &aug[(row, j)];
                    aug[(i, j)] -= t;
                }
            }
            pivots.push((row, col));
            row += 1;
        }
        // consistency
        for i in row..n {
            if !aug[(i, r)].is_zero() {
                return None;
            }
        }
        let mut y = vec![BigRational::zero(); r];
        for (rr, cc) in pivots {
            y[cc] = aug[(rr, r)].clone();
        }
        if y.iter().any(|v| !v.is_integer()) {
            return None;
        }
        Some(y.into_iter().map(|v| v.to_integer()).collect())
    }
}

pub fn coord_gcd(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x))
}

/// A saturated (primitive) sublattice, recorded by a basis together with a
/// unimodular completion of that basis to the ambient lattice.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SublatticeBasis {
    ambient: Arc<IntegralLattice>,
    columns: IntMat,
    induced_gram: IntMat,
    /// unimodular; its first `columns.cols()` columns are `columns`
    completion: IntMat,
    completion_inv: IntMat,
}

impl SublatticeBasis {
    fn from_kernel(ambient: &IntegralLattice, rows: &IntMat) -> Result<SublatticeBasis> {
        let snf = rows.snf();
        let rank = snf.rank();
        let n = rows.cols();
        let r = n - rank;
        // kernel columns of v first, completed by the pivot columns
        let completion = IntMat::from_fn(n, n, |i, j| {
            if j < r {
                snf.v[(i, rank + j)].clone()
            } else {
                snf.v[(i, j - r)].clone()
            }
        });
        let completion_inv = completion.inverse_unimodular()?;
        let columns = completion.submatrix(0, 0, n, r);
        let induced_gram = columns.transpose().mul(ambient.gram()).mul(&columns);
        Ok(SublatticeBasis {
            ambient: Arc::new(ambient.clone()),
            columns,
            induced_gram,
            completion,
            completion_inv,
        })
    }

    pub fn ambient(&self) -> &Arc<IntegralLattice> {
        &self.ambient
    }

    pub fn rank(&self) -> usize {
        self.columns.cols()
    }

    pub fn columns(&self) -> &IntMat {
        &self.columns
    }

    pub fn induced_gram(&self) -> &IntMat {
        &self.induced_gram
    }

    /// A degenerate induced form (isotropic kernel vector) is representable
    /// but cannot back an `IntegralLattice`; downstream operations reject it.
    pub fn is_degenerate(&self) -> bool {
        self.rank() > 0 && self.induced_gram.det().is_zero()
    }

    pub fn induced_lattice(&self) -> Result<IntegralLattice> {
        if self.is_degenerate() {
            return Err(Error::Degenerate(
                "induced form on the sublattice is degenerate".into(),
            ));
        }
        IntegralLattice::new(None, self.induced_gram.clone())
    }

    /// The unimodular completion of the basis to the ambient lattice.
    pub fn completion_matrix(&self) -> &IntMat {
        &self.completion
    }

    pub fn completion_inverse(&self) -> &IntMat {
        &self.completion_inv
    }

    /// Coordinates of an ambient vector in the completion basis.
    fn completion_coords(&self, x: &[BigInt]) -> Vec<BigInt> {
        self.completion_inv.mul_vec(x)
    }

    /// Membership test: expresses `x` as an integral combination of the
    /// basis columns if possible.
    pub fn coords_of(&self, x: &[BigInt]) -> Option<Vec<BigInt>> {
        if x.len() != self.ambient.rank() {
            return None;
        }
        let c = self.completion_coords(x);
        if c[self.rank()..].iter().all(|t| t.is_zero()) {
            Some(c[..self.rank()].to_vec())
        } else {
            None
        }
    }

    /// Embeds sublattice coordinates back into the ambient lattice.
    pub fn embed(&self, y: &[BigInt]) -> Vec<BigInt> {
        self.columns.mul_vec(y)
    }
}

/// Serialization schema: `{"name": ..., "gram": [[..]]}`.
#[derive(Serialize, Deserialize)]
struct LatticeRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    gram: Vec<Vec<json::JsonInt>>,
}

impl Serialize for IntegralLattice {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        LatticeRepr {
            name: self.name.clone(),
            gram: json::mat_to_repr(&self.gram),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntegralLattice {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = LatticeRepr::deserialize(d)?;
        let gram = json::mat_from_repr(repr.gram).map_err(serde::de::Error::custom)?;
        IntegralLattice::new(repr.name, gram).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
pub(crate) fn vecb(xs: &[i64]) -> Vec<BigInt> {
    xs.iter().map(|&x| BigInt::from(x)).collect()
}
