//! Discriminant groups `A_L = L*/L` of nondegenerate even lattices, the
//! induced quadratic form with values in Q/2Z, and the action of isometries
//! on `A_L`.
//!
//! The Smith normal form of the Gram matrix drives everything: with
//! `u * G * v = d`, the classes of the columns of `v` divided by the
//! invariant factors generate `L*/L`, and the coordinates of a dual vector
//! `y` are read off from `u * (G * y)` modulo the invariant factors.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::isometry::Isometry;
use crate::lattice::IntegralLattice;
use crate::matrix::IntMat;

/// How an isometry acts on the discriminant group.
///
/// On a 2-torsion group `+id` and `-id` coincide; in that case both
/// predicates hold and `sign_class` reports `PlusId`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SignClass {
    PlusId,
    MinusId,
    Other,
}

#[derive(Clone, Debug)]
pub struct DiscriminantGroup {
    /// Invariant factors `d_1 | d_2 | ...`, each > 1.
    invariant_factors: Vec<BigInt>,
    /// Rational lifts of the chosen generators, as vectors in L (x) Q.
    generator_lifts: Vec<Vec<BigRational>>,
    /// Discriminant-form values of the generators, reduced into [0, 2).
    q_values: Vec<BigRational>,
    gram: IntMat,
    /// `snf_u * gram * snf_v = diag(full_diag)`
    snf_u: IntMat,
    full_diag: Vec<BigInt>,
    /// positions of the nontrivial invariant factors inside `full_diag`
    positions: Vec<usize>,
}

impl DiscriminantGroup {
    /// Computes `L*/L` with its quadratic form.
    pub fn of(lattice: &IntegralLattice) -> Result<DiscriminantGroup> {
        if lattice.rank() > 0 && lattice.det().is_zero() {
            return Err(Error::Degenerate("discriminant group of degenerate form".into()));
        }
        let snf = lattice.gram().snf();
        let full_diag = snf.diagonal();
        let positions: Vec<usize> = full_diag
            .iter()
            .enumerate()
            .filter(|(_, d)| !d.is_one())
            .map(|(i, _)| i)
            .collect();
        let invariant_factors: Vec<BigInt> = positions.iter().map(|&i| full_diag[i].clone()).collect();
        let mut generator_lifts = Vec::new();
        let mut q_values = Vec::new();
        for (&pos, d) in positions.iter().zip(&invariant_factors) {
            let col = snf.v.col(pos);
            let lift: Vec<BigRational> = col
                .iter()
                .map(|x| BigRational::new(x.clone(), d.clone()))
                .collect();
            // canonical generator: among unit rescalings u*g of the lift,
            // take the one whose q-value is smallest in [0, 2)
            let q0 = q_of(lattice.gram(), &lift);
            let mut best_u = BigInt::one();
            let mut best_q = reduce_mod2(&q0);
            let mut u = BigInt::from(2);
            while &u < d {
                if u.gcd(d).is_one() {
                    let q = reduce_mod2(&(&q0 * BigRational::from_integer(&u * &u)));
                    if q < best_q {
                        best_q = q.clone();
                        best_u = u.clone();
                    }
                }
                u += 1;
            }
            let lift: Vec<BigRational> = lift
                .iter()
                .map(|x| x * BigRational::from_integer(best_u.clone()))
                .collect();
            q_values.push(best_q);
            generator_lifts.push(lift);
        }
        Ok(DiscriminantGroup {
            invariant_factors,
            generator_lifts,
            q_values,
            gram: lattice.gram().clone(),
            snf_u: snf.u,
            full_diag,
            positions,
        })
    }

    pub fn invariant_factors(&self) -> &[BigInt] {
        &self.invariant_factors
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty()
    }

    pub fn order(&self) -> BigInt {
        self.invariant_factors.iter().product()
    }

    pub fn generator_lifts(&self) -> &[Vec<BigRational>] {
        &self.generator_lifts
    }

    pub fn q_values(&self) -> &[BigRational] {
        &self.q_values
    }

    /// Coordinates of a dual vector modulo L, one residue per generator.
    /// Errors if `y` is not in the dual lattice.
    pub fn class_of(&self, y: &[BigRational]) -> Result<Vec<BigInt>> {
        let n = self.gram.rows();
        if y.len() != n {
            return Err(Error::DimensionMismatch("dual vector length".into()));
        }
        // G * y must be integral for a dual vector
        let mut gy = vec![BigRational::zero(); n];
        for i in 0..n {
            for j in 0..n {
                gy[i] += BigRational::from_integer(self.gram[(i, j)].clone()) * &y[j];
            }
        }
        let gy_int: Option<Vec<BigInt>> = gy
            .iter()
            .map(|x| x.is_integer().then(|| x.to_integer()))
            .collect();
        let gy_int = gy_int.ok_or_else(|| {
            Error::InvalidArgument("vector is not in the dual lattice".into())
        })?;
        let c = self.snf_u.mul_vec(&gy_int);
        Ok(self
            .positions
            .iter()
            .map(|&i| c[i].mod_floor(&self.full_diag[i]))
            .collect())
    }

    /// The action of a certified isometry on the discriminant group.
    pub fn action_of(&self, g: &Isometry) -> Result<DiscriminantAction> {
        if g.lattice().gram() != &self.gram {
            return Err(Error::LatticeMismatch);
        }
        let r = self.invariant_factors.len();
        let mut matrix = IntMat::zeros(r, r);
        let mut is_plus = true;
        let mut is_minus = true;
        for (j, lift) in self.generator_lifts.iter().enumerate() {
            let image = g.apply_rational(lift);
            let coords = self.class_of(&image)?;
            // compare against +-(j-th unit class)
            let expect_plus = self.class_of(lift)?;
            let minus_lift: Vec<BigRational> = lift.iter().map(|x| -x.clone()).collect();
            let expect_minus = self.class_of(&minus_lift)?;
            if coords != expect_plus {
                is_plus = false;
            }
            if coords != expect_minus {
                is_minus = false;
            }
            for i in 0..r {
                matrix[(i, j)] = coords[i].clone();
            }
            // an isometry must preserve the discriminant form
            let qi = reduce_mod2(&q_of(&self.gram, &image));
            let qj = reduce_mod2(&q_of(&self.gram, lift));
            if qi != qj {
                return Err(Error::NotAnIsometry);
            }
        }
        let sign_class = if self.invariant_factors.is_empty() || is_plus {
            SignClass::PlusId
        } else if is_minus {
            SignClass::MinusId
        } else {
            SignClass::Other
        };
        Ok(DiscriminantAction {
            matrix,
            is_plus: is_plus || self.invariant_factors.is_empty(),
            is_minus: is_minus || self.invariant_factors.is_empty(),
            sign_class,
        })
    }
}

/// An isometry's action on `A_L`, reduced modulo the invariant factors.
#[derive(Clone, Debug)]
pub struct DiscriminantAction {
    /// column j = class coordinates of the image of the j-th generator;
    /// row i is reduced modulo the i-th invariant factor
    matrix: IntMat,
    is_plus: bool,
    is_minus: bool,
    sign_class: SignClass,
}

impl DiscriminantAction {
    pub fn matrix(&self) -> &IntMat {
        &self.matrix
    }

    /// True iff the action is the identity automorphism.
    pub fn is_plus_id(&self) -> bool {
        self.is_plus
    }

    /// True iff the action is negation.
    pub fn is_minus_id(&self) -> bool {
        self.is_minus
    }

    pub fn is_plus_minus_id(&self) -> bool {
        self.is_plus || self.is_minus
    }

    pub fn sign_class(&self) -> SignClass {
        self.sign_class
    }

    /// The sign as an integer, when the action is +-id.
    pub fn sign(&self) -> Option<i8> {
        match self.sign_class {
            SignClass::PlusId => Some(1),
            SignClass::MinusId => Some(-1),
            SignClass::Other => None,
        }
    }
}

/// q(x) = (x, x) as a rational, to be read modulo 2Z.
fn q_of(gram: &IntMat, x: &[BigRational]) -> BigRational {
    let n = gram.rows();
    let mut acc = BigRational::zero();
    for i in 0..n {
        for j in 0..n {
            acc += BigRational::from_integer(gram[(i, j)].clone()) * &x[i] * &x[j];
        }
    }
    acc
}

/// Reduce into the window [0, 2).
pub fn reduce_mod2(q: &BigRational) -> BigRational {
    let two = BigRational::from_integer(BigInt::from(2));
    let half = q / &two;
    let fl = half.floor();
    q - fl * two
}

/// Order of the orthogonal group of the discriminant form of `<-2k>`:
/// the number of units `u` of Z/2k with `u^2 = 1 mod 4k`, by exhaustive
/// search.
pub fn oq_unit_count(k: u64) -> Result<u64> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be >= 1".into()));
    }
    let n = 2 * k;
    let modulus = 4 * k;
    let mut count = 0;
    for u in 1..=n {
        if gcd_u64(u, n) == 1 && (u * u) % modulus == 1 {
            count += 1;
        }
    }
    Ok(count)
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd_u64(b, a % b)
    }
}
