//! Certified lattice isometries.
//!
//! An [`Isometry`] wraps an integer matrix `M` together with the lattice it
//! acts on; construction checks `M^T G M = G` and `|det M| = 1` exactly, so
//! a value of this type is always a genuine isometry. Reflections and
//! Eichler transvections are the two constructors beyond raw certification.
//!
//! Orientation is handled through positive frames: a maximal positive
//! definite set of columns. The character of an isometry is the sign of the
//! determinant of the projection of the transported frame back onto the
//! frame, which is independent of the chosen frame.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::disc::DiscriminantGroup;
use crate::error::{Error, Result};
use crate::json;
use crate::lattice::{IntegralLattice, SublatticeBasis};
use crate::matrix::{IntMat, RatMat};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Isometry {
    lattice: Arc<IntegralLattice>,
    matrix: IntMat,
}

impl Isometry {
    /// Certifies that `matrix` preserves the Gram matrix and is unimodular.
    pub fn certify(lattice: impl Into<Arc<IntegralLattice>>, matrix: IntMat) -> Result<Isometry> {
        let lattice = lattice.into();
        let n = lattice.rank();
        if matrix.rows() != n || matrix.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}x{}, lattice rank {}",
                matrix.rows(),
                matrix.cols(),
                n
            )));
        }
        let g = lattice.gram();
        if &matrix.transpose().mul(g).mul(&matrix) != g {
            return Err(Error::NotAnIsometry);
        }
        let det = matrix.det();
        if !det.abs().is_one() {
            return Err(Error::NotUnimodular(det.to_string()));
        }
        Ok(Isometry { lattice, matrix })
    }

    pub fn identity(lattice: impl Into<Arc<IntegralLattice>>) -> Isometry {
        let lattice = lattice.into();
        let matrix = IntMat::identity(lattice.rank());
        Isometry { lattice, matrix }
    }

    pub fn lattice(&self) -> &Arc<IntegralLattice> {
        &self.lattice
    }

    pub fn matrix(&self) -> &IntMat {
        &self.matrix
    }

    pub fn det(&self) -> BigInt {
        self.matrix.det()
    }

    pub fn apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        self.matrix.mul_vec(v)
    }

    pub fn apply_rational(&self, v: &[BigRational]) -> Vec<BigRational> {
        (0..self.matrix.rows())
            .map(|i| {
                (0..self.matrix.cols())
                    .map(|j| BigRational::from_integer(self.matrix[(i, j)].clone()) * &v[j])
                    .sum()
            })
            .collect()
    }

    /// `self . other` (apply `other` first).
    pub fn compose(&self, other: &Isometry) -> Result<Isometry> {
        if self.lattice.gram() != other.lattice.gram() {
            return Err(Error::LatticeMismatch);
        }
        Ok(Isometry {
            lattice: self.lattice.clone(),
            matrix: self.matrix.mul(&other.matrix),
        })
    }

    pub fn inverse(&self) -> Isometry {
        let matrix = self
            .matrix
            .inverse_unimodular()
            .expect("certified isometries are unimodular");
        Isometry {
            lattice: self.lattice.clone(),
            matrix,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.matrix == IntMat::identity(self.lattice.rank())
    }

    /// Negation `x -> -x`; an isometry of every lattice.
    pub fn negation(lattice: impl Into<Arc<IntegralLattice>>) -> Isometry {
        let lattice = lattice.into();
        let matrix = IntMat::identity(lattice.rank()).neg();
        Isometry { lattice, matrix }
    }

    /// The reflection `R_u(x) = x - (2 (x,u) / (u,u)) u`.
    ///
    /// Integral exactly when `(u,u)` divides `2 (x,u)` for every basis
    /// vector `x`; that always holds for `(u,u) = +-2`.
    pub fn reflection(lattice: impl Into<Arc<IntegralLattice>>, u: &[BigInt]) -> Result<Isometry> {
        let lattice = lattice.into();
        let usq = lattice.square(u)?;
        if usq.is_zero() {
            return Err(Error::IsotropicVector);
        }
        let gu = lattice.gram().mul_vec(u);
        let n = lattice.rank();
        let mut matrix = IntMat::identity(n);
        for j in 0..n {
            // column j: e_j - (2 (e_j, u) / usq) u
            let num = BigInt::from(2) * &gu[j];
            if !(&num % &usq).is_zero() {
                return Err(Error::NonIntegralReflection(format!("{:?}", u)));
            }
            let c = &num / &usq;
            for i in 0..n {
                let t = &c * &u[i];
                matrix[(i, j)] -= t;
            }
        }
        Isometry::certify(lattice, matrix)
    }

    /// The Eichler transvection
    /// `t(z,a)(x) = x - (a,x) z + (z,x) a - (a,a)/2 (z,x) z`
    /// for isotropic `z` and `a` orthogonal to `z` on an even lattice.
    ///
    /// Always a certified isometry of determinant 1 acting trivially on the
    /// discriminant group.
    pub fn transvection(
        lattice: impl Into<Arc<IntegralLattice>>,
        z: &[BigInt],
        a: &[BigInt],
    ) -> Result<Isometry> {
        let lattice = lattice.into();
        if !lattice.is_even() {
            return Err(Error::OddLattice);
        }
        if !lattice.square(z)?.is_zero() {
            return Err(Error::BadTransvection);
        }
        if !lattice.pair(z, a)?.is_zero() {
            return Err(Error::BadTransvection);
        }
        let asq_half = lattice.square(a)? / BigInt::from(2);
        let gz = lattice.gram().mul_vec(z);
        let ga = lattice.gram().mul_vec(a);
        let n = lattice.rank();
        let mut matrix = IntMat::identity(n);
        for j in 0..n {
            let az = &ga[j]; // (a, e_j)
            let zx = &gz[j]; // (z, e_j)
            for i in 0..n {
                let t = az * &z[i];
                matrix[(i, j)] -= t;
                let t = zx * &a[i];
                matrix[(i, j)] += t;
                let t = &asq_half * zx * &z[i];
                matrix[(i, j)] -= t;
            }
        }
        Isometry::certify(lattice, matrix)
    }
}

/// Serialization schema: `{"lattice": name-or-inline, "matrix": [[..]]}`.
#[derive(Serialize, Deserialize)]
struct IsometryRepr {
    lattice: serde_json::Value,
    matrix: Vec<Vec<json::JsonInt>>,
}

impl Serialize for Isometry {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let lattice = match self.lattice.name() {
            Some(name) if IntegralLattice::by_name(name).as_ref() == Ok(&self.lattice) => {
                serde_json::Value::String(name.to_string())
            }
            _ => serde_json::to_value(self.lattice.as_ref()).map_err(serde::ser::Error::custom)?,
        };
        IsometryRepr {
            lattice,
            matrix: json::mat_to_repr(&self.matrix),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Isometry {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = IsometryRepr::deserialize(d)?;
        let lattice = match repr.lattice {
            serde_json::Value::String(name) => {
                IntegralLattice::by_name(&name).map_err(serde::de::Error::custom)?
            }
            other => serde_json::from_value(other).map_err(serde::de::Error::custom)?,
        };
        let matrix = json::mat_from_repr(repr.matrix).map_err(serde::de::Error::custom)?;
        Isometry::certify(lattice, matrix).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Preserving,
    Reversing,
}

impl Orientation {
    pub fn bit(self) -> u8 {
        match self {
            Orientation::Preserving => 0,
            Orientation::Reversing => 1,
        }
    }

    pub fn sign(self) -> i8 {
        match self {
            Orientation::Preserving => 1,
            Orientation::Reversing => -1,
        }
    }

    pub fn compose(self, other: Orientation) -> Orientation {
        if self == other {
            Orientation::Preserving
        } else {
            Orientation::Reversing
        }
    }
}

/// An ordered basis of a maximal positive definite subspace, used to pin
/// down orientation.
#[derive(Clone, Debug)]
pub struct OrientationFrame {
    lattice: Arc<IntegralLattice>,
    columns: IntMat,
}

impl OrientationFrame {
    pub fn new(lattice: impl Into<Arc<IntegralLattice>>, columns: IntMat) -> Result<OrientationFrame> {
        let lattice = lattice.into();
        if columns.rows() != lattice.rank() {
            return Err(Error::DimensionMismatch("frame column length".into()));
        }
        let (p, _) = lattice.signature()?;
        if columns.cols() != p {
            return Err(Error::InvalidArgument(format!(
                "frame must have {} columns (the positive inertia index), got {}",
                p,
                columns.cols()
            )));
        }
        let a = columns.transpose().mul(lattice.gram()).mul(&columns);
        for k in 1..=p {
            if !a.submatrix(0, 0, k, k).det().is_positive() {
                return Err(Error::InvalidArgument("frame is not positive definite".into()));
            }
        }
        Ok(OrientationFrame { lattice, columns })
    }

    pub fn lattice(&self) -> &Arc<IntegralLattice> {
        &self.lattice
    }

    pub fn columns(&self) -> &IntMat {
        &self.columns
    }

    /// A positive frame obtained from the exact symmetric reduction of the
    /// Gram matrix: deterministic for a fixed lattice.
    pub fn default_for(lattice: impl Into<Arc<IntegralLattice>>) -> Result<OrientationFrame> {
        let lattice = lattice.into();
        let n = lattice.rank();
        let mut a = lattice.gram().to_rational();
        let mut basis = RatMat::identity(n);
        let mut positive_cols = Vec::new();
        for k in 0..n {
            if a[(k, k)].is_zero() {
                let j = (k + 1..n)
                    .find(|&j| !a[(k, j)].is_zero())
                    .ok_or_else(|| Error::Degenerate("zero row in symmetric reduction".into()))?;
                let two = BigRational::from_integer(BigInt::from(2));
                let plus = &two * &a[(k, j)] + &a[(j, j)];
                let sign = if plus.is_zero() { -BigRational::one() } else { BigRational::one() };
                for c in 0..n {
                    let t = &sign * &a[(j, c)];
                    a[(k, c)] += t;
                }
                for r in 0..n {
                    let t = &sign * &a[(r, j)];
                    a[(r, k)] += t;
                }
                for r in 0..n {
                    let t = &sign * &basis[(r, j)];
                    basis[(r, k)] += t;
                }
            }
            let d = a[(k, k)].clone();
            if d.is_positive() {
                positive_cols.push(k);
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
                for r in 0..n {
                    let t = &f * &basis[(r, k)];
                    basis[(r, i)] -= t;
                }
            }
        }
        // clear denominators column by column
        let mut columns = IntMat::zeros(n, positive_cols.len());
        for (jj, &k) in positive_cols.iter().enumerate() {
            let mut lcm = BigInt::one();
            for i in 0..n {
                lcm = num_integer::lcm(lcm, basis[(i, k)].denom().clone());
            }
            for i in 0..n {
                let scaled = &basis[(i, k)] * BigRational::from_integer(lcm.clone());
                columns[(i, jj)] = scaled.to_integer();
            }
        }
        OrientationFrame::new(lattice, columns)
    }

    /// The reference frame of the rank-24 Mukai lattice:
    /// `(e1 + 2 f1, e2 + f2, e3 + f3, b0 + b1)`.
    pub fn mukai() -> OrientationFrame {
        let lattice = IntegralLattice::mukai();
        let mut columns = IntMat::zeros(24, 4);
        columns[(2, 0)] = BigInt::one();
        columns[(3, 0)] = BigInt::from(2);
        columns[(4, 1)] = BigInt::one();
        columns[(5, 1)] = BigInt::one();
        columns[(6, 2)] = BigInt::one();
        columns[(7, 2)] = BigInt::one();
        columns[(0, 3)] = BigInt::one();
        columns[(1, 3)] = BigInt::one();
        OrientationFrame::new(lattice, columns).expect("fixed frame is positive definite")
    }
}

/// Whether `g` preserves the orientation of the positive cone.
///
/// Computed as the sign of `det(F^T G (g F))` for a positive frame `F`;
/// the value does not depend on the choice of frame.
pub fn orientation_character(g: &Isometry, frame: &OrientationFrame) -> Result<Orientation> {
    if g.lattice().gram() != frame.lattice().gram() {
        return Err(Error::LatticeMismatch);
    }
    let f = frame.columns();
    let proj = f.transpose().mul(g.lattice().gram()).mul(&g.matrix().mul(f));
    let d = proj.det();
    if d.is_zero() {
        return Err(Error::Degenerate("projection of transported frame collapsed".into()));
    }
    Ok(if d.is_positive() {
        Orientation::Preserving
    } else {
        Orientation::Reversing
    })
}

/// Membership in `W`: orientation preserving and acting as `+-id` on the
/// discriminant group.
pub fn in_w(g: &Isometry, frame: &OrientationFrame) -> Result<bool> {
    let disc = DiscriminantGroup::of(g.lattice())?;
    in_w_with(g, frame, &disc)
}

/// Same as [`in_w`] with a precomputed discriminant group.
pub fn in_w_with(g: &Isometry, frame: &OrientationFrame, disc: &DiscriminantGroup) -> Result<bool> {
    if orientation_character(g, frame)? == Orientation::Reversing {
        return Ok(false);
    }
    Ok(disc.action_of(g)?.is_plus_minus_id())
}

/// Restriction of an ambient isometry to the saturated orthogonal
/// complement of `v`; requires `g(v) = +-v`.
pub fn restrict_to_perp(g: &Isometry, v: &[BigInt]) -> Result<Isometry> {
    let perp = g.lattice().perp_basis(v)?;
    let gv = g.apply(v);
    let minus_v: Vec<BigInt> = v.iter().map(|x| -x.clone()).collect();
    if gv != v && gv != minus_v {
        return Err(Error::LineNotPreserved);
    }
    restrict_to_sublattice(g, &perp)
}

/// Matrix of `g` on a `g`-stable saturated sublattice, in the basis
/// recorded by `sub`.
pub fn restrict_to_sublattice(g: &Isometry, sub: &SublatticeBasis) -> Result<Isometry> {
    if g.lattice().gram() != sub.ambient().gram() {
        return Err(Error::LatticeMismatch);
    }
    let r = sub.rank();
    let n = g.lattice().rank();
    // completion coordinates of g * completion
    let c = sub
        .completion_inverse()
        .mul(&g.matrix().mul(sub.completion_matrix()));
    for i in r..n {
        for j in 0..r {
            if !c[(i, j)].is_zero() {
                return Err(Error::LineNotPreserved);
            }
        }
    }
    let restricted = c.submatrix(0, 0, r, r);
    Isometry::certify(sub.induced_lattice()?, restricted)
}

/// Extends an isometry of `v^perp` to the ambient lattice as `g (+) e*id`
/// on `v^perp (x) Q (+) Q v`, trying the sign dictated by the discriminant
/// action. Refused when `g` is not in `W(v^perp)`.
///
/// Returns the extension together with the sign `e` such that the extension
/// maps `v` to `e * v`.
pub fn extend_from_perp(
    ambient: &Arc<IntegralLattice>,
    v: &[BigInt],
    g: &Isometry,
) -> Result<(Isometry, i8)> {
    let perp = ambient.perp_basis(v)?;
    let induced = perp.induced_lattice()?;
    if g.lattice().gram() != induced.gram() {
        return Err(Error::LatticeMismatch);
    }
    let frame = OrientationFrame::default_for(induced)?;
    if orientation_character(g, &frame)? == Orientation::Reversing {
        return Err(Error::NotInW);
    }
    let action = DiscriminantGroup::of(g.lattice())?.action_of(g)?;
    let signs: Vec<i8> = match (action.is_plus_id(), action.is_minus_id()) {
        (true, true) => vec![1, -1],
        (true, false) => vec![1],
        (false, true) => vec![-1],
        (false, false) => return Err(Error::NotInW),
    };
    let n = ambient.rank();
    let r = perp.rank();
    let basis = perp.columns();
    // p2 = [basis | v], invertible over Q
    let p2 = IntMat::hstack(basis, &IntMat::column_vector(v));
    let p2q = p2.to_rational();
    let p2_inv = p2q
        .inverse()
        .ok_or_else(|| Error::Degenerate("perp basis plus v is singular".into()))?;
    for eps in signs {
        let mut block = RatMat::zeros(n, n);
        for i in 0..r {
            for j in 0..r {
                block[(i, j)] = BigRational::from_integer(g.matrix()[(i, j)].clone());
            }
        }
        block[(r, r)] = BigRational::from_integer(BigInt::from(eps));
        let ext = p2q.mul(&block).mul(&p2_inv);
        if let Some(m) = ext.to_integer() {
            let iso = Isometry::certify(ambient.clone(), m)?;
            return Ok((iso, eps));
        }
    }
    // an element of W always glues for one of the signs; reaching this
    // point means the precondition check above was violated
    Err(Error::NotInW)
}

/// One letter of a word in a fixed generator list.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct WordLetter {
    pub generator: usize,
    pub inverted: bool,
}

/// Bounded bidirectional breadth-first search for `target` as a word in
/// `generators` and their inverses. Words evaluate left to right:
/// `[a, b]` means the matrix product `M_a * M_b`.
///
/// Returns a shortest word within `max_len`, or `None` — absence of a word
/// within the bound is a value, not an error.
pub fn word_search(
    generators: &[Isometry],
    target: &Isometry,
    max_len: usize,
) -> Result<Option<Vec<WordLetter>>> {
    if max_len > 12 {
        return Err(Error::InvalidArgument("word search depth is capped at 12".into()));
    }
    if generators.is_empty() {
        return Ok(target.is_identity().then(Vec::new));
    }
    for g in generators {
        if g.lattice().gram() != target.lattice().gram() {
            return Err(Error::LatticeMismatch);
        }
    }
    struct Node {
        mat: IntMat,
        inv: IntMat,
        word: Vec<WordLetter>,
    }
    let letters: Vec<(WordLetter, IntMat, IntMat)> = generators
        .iter()
        .enumerate()
        .flat_map(|(i, g)| {
            let inv = g.inverse();
            [
                (
                    WordLetter { generator: i, inverted: false },
                    g.matrix().clone(),
                    inv.matrix().clone(),
                ),
                (
                    WordLetter { generator: i, inverted: true },
                    inv.matrix().clone(),
                    g.matrix().clone(),
                ),
            ]
        })
        .collect();
    let n = target.lattice().rank();
    let start = || Node {
        mat: IntMat::identity(n),
        inv: IntMat::identity(n),
        word: Vec::new(),
    };
    let expand = |level: &[Node], seen: &mut HashSet<IntMat>| -> Vec<Node> {
        let mut next = Vec::new();
        for node in level {
            for (letter, mat, inv) in &letters {
                if let Some(last) = node.word.last() {
                    if last.generator == letter.generator && last.inverted != letter.inverted {
                        continue; // reduced words only
                    }
                }
                let m = node.mat.mul(mat);
                if !seen.insert(m.clone()) {
                    continue;
                }
                let mut word = node.word.clone();
                word.push(*letter);
                next.push(Node { mat: m, inv: inv.mul(&node.inv), word });
            }
        }
        next
    };
    let mut fwd_levels = vec![vec![start()]];
    let mut bwd_levels: Vec<HashMap<IntMat, Vec<WordLetter>>> =
        vec![HashMap::from([(IntMat::identity(n), Vec::new())])];
    let mut bwd_nodes = vec![vec![start()]];
    let mut fwd_seen: HashSet<IntMat> = HashSet::from([IntMat::identity(n)]);
    let mut bwd_seen: HashSet<IntMat> = HashSet::from([IntMat::identity(n)]);
    for total in 0..=max_len {
        let a = total.div_ceil(2);
        let b = total - a;
        while fwd_levels.len() <= a {
            let prev = fwd_levels.last().unwrap();
            let next = expand(prev, &mut fwd_seen);
            fwd_levels.push(next);
        }
        while bwd_levels.len() <= b {
            let prev = bwd_nodes.last().unwrap();
            let next = expand(prev, &mut bwd_seen);
            bwd_levels.push(next.iter().map(|nd| (nd.mat.clone(), nd.word.clone())).collect());
            bwd_nodes.push(next);
        }
        for node in &fwd_levels[a] {
            // need suffix q with node.mat * q = target
            let key = node.inv.mul(target.matrix());
            if let Some(suffix) = bwd_levels[b].get(&key) {
                let mut word = node.word.clone();
                word.extend_from_slice(suffix);
                return Ok(Some(word));
            }
        }
    }
    Ok(None)
}

/// Evaluates a word produced by [`word_search`].
pub fn eval_word(generators: &[Isometry], word: &[WordLetter]) -> Result<Isometry> {
    let Some(first) = generators.first() else {
        return Err(Error::InvalidArgument("empty generator list".into()));
    };
    let mut acc = Isometry::identity(first.lattice().clone());
    for letter in word {
        let g = &generators[letter.generator];
        let step = if letter.inverted { g.inverse() } else { g.clone() };
        acc = acc.compose(&step)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::vecb;
    use crate::sampling::{random_minus2_reflection, random_orthogonal_to, random_transvection, Rand};

    fn u_lattice() -> Arc<IntegralLattice> {
        Arc::new(IntegralLattice::hyperbolic())
    }

    #[test]
    fn certify_accepts_and_rejects() {
        let u = u_lattice();
        assert!(Isometry::certify(u.clone(), IntMat::identity(2)).is_ok());
        // swap of e and f preserves [[0,1],[1,0]] with det -1
        let swap = IntMat::from_rows(&[vec![0, 1], vec![1, 0]]);
        let g = Isometry::certify(u.clone(), swap).unwrap();
        assert_eq!(g.det(), BigInt::from(-1));
        // shear changes (e+f)^2
        let shear = IntMat::from_rows(&[vec![1, 1], vec![0, 1]]);
        assert_eq!(Isometry::certify(u.clone(), shear), Err(Error::NotAnIsometry));
    }

    #[test]
    fn group_operations() {
        let u = u_lattice();
        let swap = Isometry::certify(u.clone(), IntMat::from_rows(&[vec![0, 1], vec![1, 0]])).unwrap();
        assert_eq!(swap.inverse(), swap); // involution
        assert!(swap.compose(&swap.inverse()).unwrap().is_identity());
        // associativity on a few random words over Lk:2
        let lk = Arc::new(IntegralLattice::lk(2).unwrap());
        let mut rand = Rand::new(3);
        for _ in 0..10 {
            let a = random_transvection(&mut rand, &lk, 3).unwrap();
            let b = random_minus2_reflection(&mut rand, &lk, 3).unwrap();
            let c = random_transvection(&mut rand, &lk, 3).unwrap();
            let left = a.compose(&b).unwrap().compose(&c).unwrap();
            let right = a.compose(&b.compose(&c).unwrap()).unwrap();
            assert_eq!(left, right);
        }
        let other = Arc::new(IntegralLattice::lk(3).unwrap());
        assert_eq!(
            Isometry::identity(lk).compose(&Isometry::identity(other)),
            Err(Error::LatticeMismatch)
        );
    }

    #[test]
    fn reflection_basics() {
        let lk = Arc::new(IntegralLattice::lk(2).unwrap());
        let mut u = vec![BigInt::zero(); 23];
        u[22] = BigInt::one(); // the <-2k> generator
        let r = Isometry::reflection(lk.clone(), &u).unwrap();
        let ru = r.apply(&u);
        assert_eq!(ru, u.iter().map(|x| -x.clone()).collect::<Vec<_>>());
        // orthogonal vectors are fixed
        let mut x = vec![BigInt::zero(); 23];
        x[0] = BigInt::from(5);
        x[7] = BigInt::from(-3);
        assert_eq!(r.apply(&x), x);
        // acts as -id on the discriminant group
        let action = DiscriminantGroup::of(&lk).unwrap().action_of(&r).unwrap();
        assert!(action.is_minus_id());
        // isotropic vectors cannot be reflected
        let e = {
            let mut e = vec![BigInt::zero(); 23];
            e[0] = BigInt::one();
            e
        };
        assert_eq!(Isometry::reflection(lk.clone(), &e), Err(Error::IsotropicVector));
        // non-integral reflection: square -4 vector pairing oddly
        let u4 = Arc::new(IntegralLattice::hyperbolic());
        let v = vecb(&[2, -1]); // square -4
        assert!(matches!(
            Isometry::reflection(u4, &v),
            Err(Error::NonIntegralReflection(_))
        ));
    }

    #[test]
    fn transvection_identities() {
        // t(z, 0) = id
        let uu = Arc::new(IntegralLattice::direct_sum(&[
            &IntegralLattice::hyperbolic(),
            &IntegralLattice::hyperbolic(),
        ]));
        let zbar = vecb(&[0, 0, 1, 0]); // e of the second copy
        let zero = vecb(&[0, 0, 0, 0]);
        assert!(Isometry::transvection(uu.clone(), &zbar, &zero).unwrap().is_identity());
        // additivity in the second slot with random a, b orthogonal to z
        let mut rand = Rand::new(9);
        for _ in 0..50 {
            let a = random_orthogonal_to(&mut rand, &uu, &zbar, 5);
            let b = random_orthogonal_to(&mut rand, &uu, &zbar, 5);
            let ab: Vec<BigInt> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
            let lhs = Isometry::transvection(uu.clone(), &zbar, &a)
                .unwrap()
                .compose(&Isometry::transvection(uu.clone(), &zbar, &b).unwrap())
                .unwrap();
            let rhs = Isometry::transvection(uu.clone(), &zbar, &ab).unwrap();
            assert_eq!(lhs, rhs);
            // inverse law
            let minus_a: Vec<BigInt> = a.iter().map(|x| -x).collect();
            assert_eq!(
                Isometry::transvection(uu.clone(), &zbar, &minus_a).unwrap(),
                Isometry::transvection(uu.clone(), &zbar, &a).unwrap().inverse()
            );
        }
        // precondition failures
        let not_isotropic = vecb(&[1, 1, 0, 0]);
        assert_eq!(
            Isometry::transvection(uu.clone(), &not_isotropic, &zero),
            Err(Error::BadTransvection)
        );
        let not_orthogonal = vecb(&[0, 0, 0, 1]);
        assert_eq!(
            Isometry::transvection(uu.clone(), &zbar, &not_orthogonal),
            Err(Error::BadTransvection)
        );
        let odd = Arc::new(IntegralLattice::new(None, IntMat::from_rows(&[vec![1]])).unwrap());
        assert_eq!(
            Isometry::transvection(odd, &vecb(&[0]), &vecb(&[0])),
            Err(Error::OddLattice)
        );
    }

    #[test]
    fn eichler_two_transvection_identity() {
        // t(zbar, e - r f) . t(zbar, -e + (r-1) f) = t(zbar, f)^-1 with r = 5
        let uu = Arc::new(IntegralLattice::direct_sum(&[
            &IntegralLattice::hyperbolic(),
            &IntegralLattice::hyperbolic(),
        ]));
        let r = 5i64;
        let zbar = vecb(&[0, 0, 1, 0]);
        let a1 = vecb(&[1, -r, 0, 0]);
        let a2 = vecb(&[-1, r - 1, 0, 0]);
        let f = vecb(&[0, 1, 0, 0]);
        let lhs = Isometry::transvection(uu.clone(), &zbar, &a1)
            .unwrap()
            .compose(&Isometry::transvection(uu.clone(), &zbar, &a2).unwrap())
            .unwrap();
        let rhs = Isometry::transvection(uu.clone(), &zbar, &f).unwrap().inverse();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn conjugation_moves_the_defining_vectors() {
        let l = Arc::new(IntegralLattice::direct_sum(&[
            &IntegralLattice::hyperbolic(),
            &IntegralLattice::hyperbolic(),
            &IntegralLattice::hyperbolic(),
        ]));
        let mut rand = Rand::new(21);
        for _ in 0..50 {
            let g = random_transvection(&mut rand, &l, 3).unwrap();
            // reflections: g R_u g^-1 = R_{g(u)}
            let u = {
                // a vector of square -2 in a hyperbolic block
                let mut u = vec![BigInt::zero(); 6];
                u[0] = BigInt::one();
                u[1] = -BigInt::one();
                u
            };
            let lhs = g
                .compose(&Isometry::reflection(l.clone(), &u).unwrap())
                .unwrap()
                .compose(&g.inverse())
                .unwrap();
            let rhs = Isometry::reflection(l.clone(), &g.apply(&u)).unwrap();
            assert_eq!(lhs, rhs);
        }
        // transvections: for g with g(z) = z, g t(z,a) g^-1 = t(z, g(a))
        for _ in 0..50 {
            let z = crate::sampling::random_isotropic(&mut rand, &l, 3);
            let b = random_orthogonal_to(&mut rand, &l, &z, 3);
            let g = Isometry::transvection(l.clone(), &z, &b).unwrap(); // fixes z
            let a = random_orthogonal_to(&mut rand, &l, &z, 3);
            let lhs = g
                .compose(&Isometry::transvection(l.clone(), &z, &a).unwrap())
                .unwrap()
                .compose(&g.inverse())
                .unwrap();
            let rhs = Isometry::transvection(l.clone(), &z, &g.apply(&a)).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn orientation_examples() {
        let lk = Arc::new(IntegralLattice::lk(1).unwrap());
        let frame = OrientationFrame::default_for(lk.clone()).unwrap();
        assert_eq!(
            orientation_character(&Isometry::identity(lk.clone()), &frame).unwrap(),
            Orientation::Preserving
        );
        // -id reverses a 3-dimensional positive part
        assert_eq!(
            orientation_character(&Isometry::negation(lk.clone()), &frame).unwrap(),
            Orientation::Reversing
        );
        // reflections in negative vectors preserve, in positive vectors reverse
        let mut rand = Rand::new(2);
        let refl = random_minus2_reflection(&mut rand, &lk, 3).unwrap();
        assert_eq!(orientation_character(&refl, &frame).unwrap(), Orientation::Preserving);
        let plus = {
            let mut v = vec![BigInt::zero(); 23];
            v[0] = BigInt::one();
            v[1] = BigInt::one(); // (e+f)^2 = 2
            v
        };
        let rplus = Isometry::reflection(lk.clone(), &plus).unwrap();
        assert_eq!(orientation_character(&rplus, &frame).unwrap(), Orientation::Reversing);
    }

    #[test]
    fn orientation_is_frame_independent_and_multiplicative() {
        let lk = Arc::new(IntegralLattice::lk(2).unwrap());
        let f1 = OrientationFrame::default_for(lk.clone()).unwrap();
        // a second frame: images of the first under some isometry words
        let mut rand = Rand::new(17);
        let h = crate::sampling::random_w_word(&mut rand, &lk, 3, 2).unwrap();
        let f2 = OrientationFrame::new(lk.clone(), h.matrix().mul(f1.columns())).unwrap();
        for _ in 0..100 {
            let g = if rand.i64(0, 1) == 0 {
                crate::sampling::random_w_word(&mut rand, &lk, 2, 2).unwrap()
            } else {
                Isometry::negation(lk.clone()).compose(
                    &crate::sampling::random_w_word(&mut rand, &lk, 2, 2).unwrap(),
                ).unwrap()
            };
            assert_eq!(
                orientation_character(&g, &f1).unwrap(),
                orientation_character(&g, &f2).unwrap()
            );
        }
        // character is a homomorphism
        for _ in 0..100 {
            let g1 = random_minus2_reflection(&mut rand, &lk, 2).unwrap();
            let g2 = Isometry::negation(lk.clone());
            let gh = g1.compose(&g2).unwrap();
            assert_eq!(
                orientation_character(&gh, &f1).unwrap(),
                orientation_character(&g1, &f1)
                    .unwrap()
                    .compose(orientation_character(&g2, &f1).unwrap())
            );
        }
    }

    #[test]
    fn w_membership() {
        let lk = Arc::new(IntegralLattice::lk(3).unwrap());
        let frame = OrientationFrame::default_for(lk.clone()).unwrap();
        let mut rand = Rand::new(4);
        // transvections are in W
        for _ in 0..20 {
            let t = random_transvection(&mut rand, &lk, 3).unwrap();
            assert!(in_w(&t, &frame).unwrap());
        }
        // -id reverses orientation on signature (3,20)
        assert!(!in_w(&Isometry::negation(lk.clone()), &frame).unwrap());
        // swap on <-2> + <-2> acts as a non-scalar automorphism of (Z/2)^2
        let d2 = Arc::new(IntegralLattice::new(
            None,
            IntMat::from_rows(&[vec![-2, 0], vec![0, -2]]),
        ).unwrap());
        let swap = Isometry::certify(d2.clone(), IntMat::from_rows(&[vec![0, 1], vec![1, 0]])).unwrap();
        let action = DiscriminantGroup::of(&d2).unwrap().action_of(&swap).unwrap();
        assert_eq!(action.sign_class(), crate::disc::SignClass::Other);
        let frame0 = OrientationFrame::default_for(d2.clone()).unwrap(); // empty frame
        assert!(!in_w(&swap, &frame0).unwrap());
    }

    #[test]
    fn restrict_and_extend_roundtrip() {
        let mukai = Arc::new(IntegralLattice::mukai());
        // v = (1,0,-1): coordinates (1, 1, 0, ...)
        let mut v = vec![BigInt::zero(); 24];
        v[0] = BigInt::one();
        v[1] = BigInt::one();
        let perp = mukai.perp_basis(&v).unwrap();
        assert_eq!(perp.rank(), 23);
        let induced = Arc::new(perp.induced_lattice().unwrap());
        assert_eq!(induced.signature().unwrap(), (3, 20));

        // identity restricts to identity, extends back with sign +1
        let id = Isometry::identity(mukai.clone());
        let restricted = restrict_to_perp(&id, &v).unwrap();
        assert!(restricted.is_identity());
        let (ext, eps) = extend_from_perp(&mukai, &v, &restricted).unwrap();
        assert!(ext.is_identity());
        assert_eq!(eps, 1);

        // random W words on the perp extend and restrict back exactly
        let mut rand = Rand::new(12);
        for _ in 0..20 {
            let g = crate::sampling::random_w_word(&mut rand, &induced, 3, 2).unwrap();
            let (ext, eps) = extend_from_perp(&mukai, &v, &g).unwrap();
            let back = restrict_to_perp(&ext, &v).unwrap();
            assert_eq!(back.matrix(), g.matrix());
            let ev = ext.apply(&v);
            let expect: Vec<BigInt> = v.iter().map(|x| x * BigInt::from(eps)).collect();
            assert_eq!(ev, expect);
        }

        // refusal for orientation-reversing input
        let bad = Isometry::negation(induced.clone());
        assert_eq!(extend_from_perp(&mukai, &v, &bad).err(), Some(Error::NotInW));
    }

    #[test]
    fn restriction_requires_a_preserved_line() {
        let mukai = Arc::new(IntegralLattice::mukai());
        let mut v = vec![BigInt::zero(); 24];
        v[0] = BigInt::from(2); // (2, 0, -4) as coordinates (2, 4, 0, ...)
        v[1] = BigInt::from(4);
        // the reflection in b0 + b1 moves v off its line
        let mut w = vec![BigInt::zero(); 24];
        w[0] = BigInt::one();
        w[1] = BigInt::one();
        let r = Isometry::reflection(mukai.clone(), &w).unwrap();
        assert!(r.apply(&v) != v);
        assert_eq!(restrict_to_perp(&r, &v).err(), Some(Error::LineNotPreserved));
    }

    #[test]
    fn word_search_examples() {
        let uu = Arc::new(IntegralLattice::direct_sum(&[
            &IntegralLattice::hyperbolic(),
            &IntegralLattice::hyperbolic(),
        ]));
        let zbar = vecb(&[0, 0, 1, 0]);
        let r = 3i64;
        let g1 = Isometry::transvection(uu.clone(), &zbar, &vecb(&[1, -r, 0, 0])).unwrap();
        let g2 = Isometry::transvection(uu.clone(), &zbar, &vecb(&[1, -(r - 1), 0, 0])).unwrap();
        let gens = vec![g1.clone(), g2.clone()];

        // the identity is the empty word
        let id = Isometry::identity(uu.clone());
        assert_eq!(word_search(&gens, &id, 4).unwrap(), Some(vec![]));

        // a generator is found as itself
        let w = word_search(&gens, &g1, 4).unwrap().unwrap();
        assert_eq!(w, vec![WordLetter { generator: 0, inverted: false }]);

        // t(zbar, f)^-1 = g1 . g2^-1
        let target = Isometry::transvection(uu.clone(), &zbar, &vecb(&[0, 1, 0, 0]))
            .unwrap()
            .inverse();
        let w = word_search(&gens, &target, 4).unwrap().unwrap();
        assert_eq!(w.len(), 2);
        assert_eq!(eval_word(&gens, &w).unwrap(), target);

        // depth cap
        assert!(word_search(&gens, &id, 13).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let lk = Arc::new(IntegralLattice::lk(2).unwrap());
        let mut rand = Rand::new(8);
        let g = random_transvection(&mut rand, &lk, 3).unwrap();
        let s = serde_json::to_string(&g).unwrap();
        let back: Isometry = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
        // named lattice serializes as its name
        assert!(s.contains("\"Lk:2\""));
    }
}
