//! The fixed rank-24 coordinate model of the Mukai lattice and the
//! cohomological actions on it.
//!
//! A Mukai vector `(r, xi, a)` squares to `xi^2 - 2 r a`. The coordinate
//! embedding uses the hyperbolic pair `b0 = (1,0,0)`, `b1 = (0,0,-1)`
//! followed by the 22 degree-two coordinates `e1, f1, e2, f2, e3, f3` and
//! two `E8(-1)` blocks, so a triple `(r, xi, a)` has ambient coordinates
//! `(r, -a, xi)`.
//!
//! Four actions are modelled, all as certified isometries of the full
//! lattice: tensoring by a line bundle with first Chern class `c`, the
//! ideal-of-the-diagonal transform `(r, xi, a) -> (a, -xi, r)`, its dual
//! `(r, xi, a) -> (a, xi, r)`, and the elliptic Poincare transform, which
//! acts on the span of `b0, b1, e1, f1` and by `-1` on the remaining
//! degree-two coordinates.

use std::sync::Arc;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::isometry::Isometry;
use crate::json::{self, JsonInt};
use crate::lattice::{coord_gcd, IntegralLattice};
use crate::matrix::IntMat;

pub const H2_RANK: usize = 22;
pub const MUKAI_RANK: usize = 24;

/// index of e1 in the ambient coordinates
const E1: usize = 2;
const F1: usize = 3;
const E2: usize = 4;
const F2: usize = 5;

static MUKAI: OnceLock<Arc<IntegralLattice>> = OnceLock::new();
static H2: OnceLock<Arc<IntegralLattice>> = OnceLock::new();

/// The shared rank-24 Mukai lattice.
pub fn mukai_lattice() -> &'static Arc<IntegralLattice> {
    MUKAI.get_or_init(|| Arc::new(IntegralLattice::mukai()))
}

/// The degree-two part `U^3 + E8(-1)^2`.
pub fn h2_lattice() -> &'static Arc<IntegralLattice> {
    H2.get_or_init(|| {
        let u = IntegralLattice::hyperbolic();
        let e8 = IntegralLattice::e8_minus();
        Arc::new(IntegralLattice::direct_sum(&[&u, &u, &u, &e8, &e8]).with_name("H2"))
    })
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MukaiVector {
    pub r: BigInt,
    pub xi: Vec<BigInt>,
    pub a: BigInt,
}

impl MukaiVector {
    pub fn new(r: BigInt, xi: Vec<BigInt>, a: BigInt) -> Result<MukaiVector> {
        if xi.len() != H2_RANK {
            return Err(Error::DimensionMismatch(format!(
                "xi must have {} coordinates, got {}",
                H2_RANK,
                xi.len()
            )));
        }
        Ok(MukaiVector { r, xi, a })
    }

    pub fn from_i64(r: i64, xi: &[i64], a: i64) -> MukaiVector {
        assert_eq!(xi.len(), H2_RANK);
        MukaiVector {
            r: BigInt::from(r),
            xi: xi.iter().map(|&x| BigInt::from(x)).collect(),
            a: BigInt::from(a),
        }
    }

    /// `(r, 0, a)` with all degree-two coordinates zero.
    pub fn rank_degree(r: i64, a: i64) -> MukaiVector {
        MukaiVector::from_i64(r, &[0; H2_RANK], a)
    }

    pub fn zero() -> MukaiVector {
        MukaiVector::rank_degree(0, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.r.is_zero() && self.a.is_zero() && self.xi.iter().all(|x| x.is_zero())
    }

    /// Ambient coordinates `(r, -a, xi...)`.
    pub fn coords(&self) -> Vec<BigInt> {
        let mut v = Vec::with_capacity(MUKAI_RANK);
        v.push(self.r.clone());
        v.push(-self.a.clone());
        v.extend(self.xi.iter().cloned());
        v
    }

    pub fn from_coords(coords: &[BigInt]) -> Result<MukaiVector> {
        if coords.len() != MUKAI_RANK {
            return Err(Error::DimensionMismatch(format!(
                "expected {} coordinates, got {}",
                MUKAI_RANK,
                coords.len()
            )));
        }
        Ok(MukaiVector {
            r: coords[0].clone(),
            a: -coords[1].clone(),
            xi: coords[2..].to_vec(),
        })
    }

    /// `xi^2 - 2 r a`, which equals the ambient square of the embedding.
    pub fn square(&self) -> BigInt {
        let xi2 = h2_lattice().square(&self.xi).expect("length checked");
        xi2 - BigInt::from(2) * &self.r * &self.a
    }

    pub fn pair(&self, other: &MukaiVector) -> BigInt {
        let xixj = h2_lattice().pair(&self.xi, &other.xi).expect("length checked");
        xixj - &self.r * &other.a - &other.r * &self.a
    }

    pub fn neg(&self) -> MukaiVector {
        MukaiVector {
            r: -self.r.clone(),
            xi: self.xi.iter().map(|x| -x.clone()).collect(),
            a: -self.a.clone(),
        }
    }

    /// Splits `v = m w` with `w` primitive and `k = w^2 / 2`.
    /// Requires `v^2 > 0` (which forces `w^2 = 2k > 0`).
    pub fn mk_decompose(&self) -> Result<MkTriple> {
        if self.is_zero() {
            return Err(Error::ZeroVector);
        }
        if !self.square().is_positive() {
            return Err(Error::IsotropicVector);
        }
        let coords = self.coords();
        let m = coord_gcd(&coords);
        let w = MukaiVector::from_coords(
            &coords.iter().map(|x| x / &m).collect::<Vec<_>>(),
        )?;
        let wsq = w.square();
        debug_assert!(wsq.is_positive() && wsq.is_even());
        let k = wsq / BigInt::from(2);
        Ok(MkTriple { m, w, k })
    }

    /// Tensor action: `(r, xi, a) -> (r, xi + r c, a + (xi, c) + r c^2/2)`.
    pub fn tensor(&self, c: &[BigInt]) -> Result<MukaiVector> {
        if c.len() != H2_RANK {
            return Err(Error::DimensionMismatch("c must have 22 coordinates".into()));
        }
        let h2 = h2_lattice();
        let csq_half = h2.square(c)? / BigInt::from(2);
        let xic = h2.pair(&self.xi, c)?;
        Ok(MukaiVector {
            r: self.r.clone(),
            xi: self
                .xi
                .iter()
                .zip(c)
                .map(|(x, ci)| x + &self.r * ci)
                .collect(),
            a: &self.a + xic + &self.r * csq_half,
        })
    }

    /// `(r, xi, a) -> (a, -xi, r)`.
    pub fn fm_delta(&self) -> MukaiVector {
        MukaiVector {
            r: self.a.clone(),
            xi: self.xi.iter().map(|x| -x.clone()).collect(),
            a: self.r.clone(),
        }
    }

    /// `(r, xi, a) -> (a, xi, r)`.
    pub fn fm_dual(&self) -> MukaiVector {
        MukaiVector {
            r: self.a.clone(),
            xi: self.xi.clone(),
            a: self.r.clone(),
        }
    }

    /// `(r, xi, a) -> (r, -xi, a)`.
    pub fn duality(&self) -> MukaiVector {
        MukaiVector {
            r: self.r.clone(),
            xi: self.xi.iter().map(|x| -x.clone()).collect(),
            a: self.a.clone(),
        }
    }

    /// The elliptic Poincare action.
    pub fn fm_poincare(&self) -> MukaiVector {
        MukaiVector::from_coords(&fm_poincare_isometry().apply(&self.coords()))
            .expect("isometry preserves length")
    }
}

impl Serialize for MukaiVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            r: JsonInt,
            xi: Vec<JsonInt>,
            a: JsonInt,
        }
        Repr {
            r: JsonInt(self.r.clone()),
            xi: json::vec_to_repr(&self.xi),
            a: JsonInt(self.a.clone()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MukaiVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            r: JsonInt,
            xi: Vec<JsonInt>,
            a: JsonInt,
        }
        let repr = Repr::deserialize(d)?;
        MukaiVector::new(repr.r.0, json::vec_from_repr(repr.xi), repr.a.0)
            .map_err(serde::de::Error::custom)
    }
}

/// A positive-square vector split into multiplicity and primitive part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MkTriple {
    pub m: BigInt,
    pub w: MukaiVector,
    pub k: BigInt,
}

fn isometry_from_triple_map(f: impl Fn(&MukaiVector) -> MukaiVector) -> Isometry {
    let lattice = mukai_lattice().clone();
    let mut matrix = IntMat::zeros(MUKAI_RANK, MUKAI_RANK);
    for j in 0..MUKAI_RANK {
        let mut basis = vec![BigInt::zero(); MUKAI_RANK];
        basis[j] = BigInt::one();
        let image = f(&MukaiVector::from_coords(&basis).unwrap()).coords();
        for (i, x) in image.into_iter().enumerate() {
            matrix[(i, j)] = x;
        }
    }
    Isometry::certify(lattice, matrix).expect("cohomological action is an isometry")
}

/// Matrix form of [`MukaiVector::fm_delta`].
pub fn fm_delta_isometry() -> Isometry {
    isometry_from_triple_map(MukaiVector::fm_delta)
}

/// Matrix form of [`MukaiVector::fm_dual`]; orientation reversing.
pub fn fm_dual_isometry() -> Isometry {
    isometry_from_triple_map(MukaiVector::fm_dual)
}

/// Matrix form of [`MukaiVector::duality`]; orientation reversing.
pub fn duality_isometry() -> Isometry {
    isometry_from_triple_map(MukaiVector::duality)
}

/// Matrix form of [`MukaiVector::tensor`] for a fixed class `c`.
pub fn tensor_isometry(c: &[BigInt]) -> Result<Isometry> {
    if c.len() != H2_RANK {
        return Err(Error::DimensionMismatch("c must have 22 coordinates".into()));
    }
    let c = c.to_vec();
    Ok(isometry_from_triple_map(move |v| v.tensor(&c).expect("length checked")))
}

static FM_POINCARE: OnceLock<Isometry> = OnceLock::new();

/// The elliptic Poincare transform: on the span of
/// `u0 = b0, ul = e1 - f1, uf = f1, u4 = -b1` it acts by
///
/// ```text
/// u0 -> ul + uf + u4,   ul -> -u0 - uf - u4,   uf -> u4,   u4 -> -uf
/// ```
///
/// and by `-1` on the remaining twenty degree-two coordinates. This is the
/// unique block map of that shape satisfying
/// `(m, 0, -mk) -> (0, m(l + (k+1) f), m)` and
/// `(1, b - f, k) -> (0, l - (k-1) f - b, 0)` for all `m, k` and all `b`
/// orthogonal to `l` and `f`.
pub fn fm_poincare_isometry() -> &'static Isometry {
    FM_POINCARE.get_or_init(|| {
        let mut matrix = IntMat::identity(MUKAI_RANK).neg();
        let one = BigInt::one();
        // columns of the active 4x4 block in ambient coordinates
        // b0 -> e1 - b1
        matrix[(0, 0)] = BigInt::zero();
        matrix[(1, 0)] = -one.clone();
        matrix[(E1, 0)] = one.clone();
        // b1 -> f1
        matrix[(1, 1)] = BigInt::zero();
        matrix[(F1, 1)] = one.clone();
        // e1 -> -b0 - f1
        matrix[(E1, E1)] = BigInt::zero();
        matrix[(0, E1)] = -one.clone();
        matrix[(F1, E1)] = -one.clone();
        // f1 -> -b1
        matrix[(F1, F1)] = BigInt::zero();
        matrix[(1, F1)] = -one.clone();
        Isometry::certify(mukai_lattice().clone(), matrix)
            .expect("the Poincare block map is an isometry")
    })
}

/// Ample-cone test on the elliptic lattice: `alpha e + beta f` is ample
/// iff `alpha > 0` and `beta / alpha > 1`.
pub fn ample_elliptic(alpha: &BigInt, beta: &BigInt) -> Result<bool> {
    if alpha.is_zero() && beta.is_zero() {
        return Err(Error::ZeroVector);
    }
    Ok(alpha.is_positive() && beta > alpha)
}

/// The standard vectors attached to a multiplicity/degree pair `(m, k)`:
/// `v = (m, 0, -mk)`, its primitive part `w`, the class
/// `beta = e2 + (k-1) f2` of square `2k - 2` orthogonal to `l` and `f`,
/// the `(-2)`-class `u = (1, beta - f, k)` orthogonal to `v`, and the four
/// polarisations `e + r f`, `e + (r-1) f`, `s e + p f`, `(s-1) e + p f`.
#[derive(Clone, Debug)]
pub struct StandardVectors {
    pub v: MukaiVector,
    pub w: MukaiVector,
    pub beta: Vec<BigInt>,
    pub u: MukaiVector,
    pub h1: Vec<BigInt>,
    pub h2: Vec<BigInt>,
    pub h3: Vec<BigInt>,
    pub h4: Vec<BigInt>,
}

pub fn standard_vectors(m: u64, k: u64, r: i64, s: i64, p: i64) -> Result<StandardVectors> {
    if m == 0 || k == 0 {
        return Err(Error::InvalidArgument("m and k must be >= 1".into()));
    }
    let mi = BigInt::from(m);
    let ki = BigInt::from(k);
    let v = MukaiVector::new(
        mi.clone(),
        vec![BigInt::zero(); H2_RANK],
        -(&mi * &ki),
    )?;
    let w = MukaiVector::new(BigInt::one(), vec![BigInt::zero(); H2_RANK], -ki.clone())?;
    let mut beta = vec![BigInt::zero(); H2_RANK];
    beta[E2 - 2] = BigInt::one();
    beta[F2 - 2] = &ki - 1;
    let mut u_xi = beta.clone();
    u_xi[F1 - 2] -= BigInt::one(); // beta - f
    let u = MukaiVector::new(BigInt::one(), u_xi, ki.clone())?;
    let h2_class = |ce: i64, cf: i64| {
        let mut h = vec![BigInt::zero(); H2_RANK];
        h[E1 - 2] = BigInt::from(ce);
        h[F1 - 2] = BigInt::from(cf);
        h
    };
    Ok(StandardVectors {
        v,
        w,
        beta,
        u,
        h1: h2_class(1, r),
        h2: h2_class(1, r - 1),
        h3: h2_class(s, p),
        h4: h2_class(s - 1, p),
    })
}

/// `l = e1 - f1` as a degree-two class: square -2, pairing 1 with `f = f1`.
pub fn elliptic_section_class() -> Vec<BigInt> {
    let mut l = vec![BigInt::zero(); H2_RANK];
    l[E1 - 2] = BigInt::one();
    l[F1 - 2] = -BigInt::one();
    l
}

pub fn elliptic_fiber_class() -> Vec<BigInt> {
    let mut f = vec![BigInt::zero(); H2_RANK];
    f[F1 - 2] = BigInt::one();
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isometry::{orientation_character, Orientation, OrientationFrame};

    fn vk(xs: &[(usize, i64)]) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); H2_RANK];
        for &(i, x) in xs {
            v[i] = BigInt::from(x);
        }
        v
    }

    #[test]
    fn square_formula_matches_ambient_pairing() {
        let v = MukaiVector::rank_degree(1, -1);
        assert_eq!(v.square(), BigInt::from(2));
        let mukai = mukai_lattice();
        // agreement with the ambient lattice on a spread of vectors
        let mut rand = crate::sampling::Rand::new(6);
        for _ in 0..200 {
            let coords = rand.vector(MUKAI_RANK, 5);
            let v = MukaiVector::from_coords(&coords).unwrap();
            assert_eq!(v.square(), mukai.square(&coords).unwrap());
            let coords2 = rand.vector(MUKAI_RANK, 5);
            let w = MukaiVector::from_coords(&coords2).unwrap();
            assert_eq!(v.pair(&w), mukai.pair(&coords, &coords2).unwrap());
        }
        // v = (m, 0, -mk) has square 2 m^2 k
        for (m, k) in [(1i64, 1i64), (2, 3), (3, 2), (5, 4)] {
            let v = MukaiVector::rank_degree(m, -m * k);
            assert_eq!(v.square(), BigInt::from(2 * m * m * k));
        }
    }

    #[test]
    fn mk_decomposition() {
        let v = MukaiVector::rank_degree(2, -4);
        let t = v.mk_decompose().unwrap();
        assert_eq!(t.m, BigInt::from(2));
        assert_eq!(t.w, MukaiVector::rank_degree(1, -2));
        assert_eq!(t.k, BigInt::from(2));

        let v = MukaiVector::rank_degree(3, -3);
        let t = v.mk_decompose().unwrap();
        assert_eq!((t.m, t.k), (BigInt::from(3), BigInt::one()));

        // isotropic input is rejected
        let v = MukaiVector::from_i64(0, &{
            let mut xs = [0i64; 22];
            xs[1] = 2; // 2 f1
            xs
        }, 0);
        assert_eq!(v.mk_decompose().err(), Some(Error::IsotropicVector));
        assert_eq!(MukaiVector::zero().mk_decompose().err(), Some(Error::ZeroVector));

        // random primitive w of positive square round-trips
        let mut rand = crate::sampling::Rand::new(31);
        let mut found = 0;
        while found < 50 {
            let coords = rand.vector(MUKAI_RANK, 4);
            let Ok(w) = MukaiVector::from_coords(&coords) else { continue };
            if w.is_zero() || !w.square().is_positive() {
                continue;
            }
            let w = match w.mk_decompose() {
                Ok(t) => t.w,
                Err(_) => continue,
            };
            let m = 1 + found % 4;
            let scaled = MukaiVector::from_coords(
                &w.coords().iter().map(|x| x * BigInt::from(m)).collect::<Vec<_>>(),
            )
            .unwrap();
            let t = scaled.mk_decompose().unwrap();
            assert_eq!(t.m, BigInt::from(m));
            assert_eq!(t.w, w);
            assert_eq!(t.k, w.square() / BigInt::from(2));
            found += 1;
        }
    }

    #[test]
    fn fm_delta_examples() {
        let v = MukaiVector::rank_degree(1, -1);
        assert_eq!(v.fm_delta(), MukaiVector::rank_degree(-1, 1));
        // involution
        let mut rand = crate::sampling::Rand::new(2);
        for _ in 0..100 {
            let v = MukaiVector::from_coords(&rand.vector(MUKAI_RANK, 6)).unwrap();
            assert_eq!(v.fm_delta().fm_delta(), v);
            let w = MukaiVector::from_coords(&rand.vector(MUKAI_RANK, 6)).unwrap();
            assert_eq!(v.fm_delta().pair(&w.fm_delta()), v.pair(&w));
        }
        assert!(fm_delta_isometry().det().abs() == BigInt::one());
    }

    #[test]
    fn fm_dual_examples() {
        for (m, k) in [(1i64, 2i64), (2, 3)] {
            let v = MukaiVector::rank_degree(m, -m * k);
            assert_eq!(v.fm_dual(), MukaiVector::rank_degree(-m * k, m));
        }
        let v = MukaiVector::from_i64(3, &{
            let mut xs = [0i64; 22];
            xs[4] = 7;
            xs
        }, -5);
        assert_eq!(v.duality().duality(), v);
        assert_eq!(v.fm_dual(), v.duality().fm_delta());
    }

    #[test]
    fn tensor_examples() {
        let v = MukaiVector::rank_degree(1, -3);
        let zero = vec![BigInt::zero(); H2_RANK];
        assert_eq!(v.tensor(&zero).unwrap(), v);
        // tensor by f1: (1, 0, -k) -> (1, f1, -k) since f1 is isotropic
        let f1 = vk(&[(1, 1)]);
        let vt = v.tensor(&f1).unwrap();
        assert_eq!(vt, MukaiVector::from_i64(1, &{
            let mut xs = [0i64; 22];
            xs[1] = 1;
            xs
        }, -3));
        // exponential property via the ambient pairing oracle
        let mut rand = crate::sampling::Rand::new(14);
        for _ in 0..50 {
            let c1 = rand.vector(H2_RANK, 3);
            let c2 = rand.vector(H2_RANK, 3);
            let c12: Vec<BigInt> = c1.iter().zip(&c2).map(|(a, b)| a + b).collect();
            let v = MukaiVector::from_coords(&rand.vector(MUKAI_RANK, 3)).unwrap();
            assert_eq!(v.tensor(&c2).unwrap().tensor(&c1).unwrap(), v.tensor(&c12).unwrap());
        }
        // the tensor isometry fixes (0, 0, 1) for every c
        for _ in 0..20 {
            let c = rand.vector(H2_RANK, 4);
            let iso = tensor_isometry(&c).unwrap();
            let pt = MukaiVector::rank_degree(0, 1).coords();
            assert_eq!(iso.apply(&pt), pt);
        }
    }

    #[test]
    fn poincare_matrix_matches_derivation_oracle() {
        let derived = crate::verify::derive_poincare_matrix();
        assert_eq!(fm_poincare_isometry().matrix(), &derived);
    }

    #[test]
    fn poincare_identity_families() {
        for m in 1..=20i64 {
            for k in 1..=20i64 {
                // (m, 0, -mk) -> (0, m(l + (k+1) f), m)
                let v = MukaiVector::rank_degree(m, -m * k);
                let image = v.fm_poincare();
                let mut xi = elliptic_section_class();
                xi[1] += BigInt::from(k + 1); // l + (k+1) f
                let expected = MukaiVector::new(
                    BigInt::zero(),
                    xi.iter().map(|x| x * BigInt::from(m)).collect(),
                    BigInt::from(m),
                )
                .unwrap();
                assert_eq!(image, expected, "first family m={} k={}", m, k);
                // squares preserved
                assert_eq!(image.square(), v.square());

                // (1, beta - f, k) -> (0, l - (k-1) f - beta, 0)
                let sv = standard_vectors(1, k as u64, 3, 3, 7).unwrap();
                let image = sv.u.fm_poincare();
                let mut xi = elliptic_section_class();
                xi[1] -= BigInt::from(k - 1);
                for (x, b) in xi.iter_mut().zip(&sv.beta) {
                    *x -= b;
                }
                let expected = MukaiVector::new(BigInt::zero(), xi, BigInt::zero()).unwrap();
                assert_eq!(image, expected, "second family k={}", k);
            }
        }
        // (0, f, 0) -> (0, 0, 1)
        let f = MukaiVector::new(BigInt::zero(), elliptic_fiber_class(), BigInt::zero()).unwrap();
        assert_eq!(f.fm_poincare(), MukaiVector::rank_degree(0, 1));
    }

    #[test]
    fn orientation_of_the_four_actions() {
        let frame = OrientationFrame::mukai();
        assert_eq!(
            orientation_character(&fm_delta_isometry(), &frame).unwrap(),
            Orientation::Preserving
        );
        assert_eq!(
            orientation_character(fm_poincare_isometry(), &frame).unwrap(),
            Orientation::Preserving
        );
        assert_eq!(
            orientation_character(&duality_isometry(), &frame).unwrap(),
            Orientation::Reversing
        );
        assert_eq!(
            orientation_character(&fm_dual_isometry(), &frame).unwrap(),
            Orientation::Reversing
        );
        let mut rand = crate::sampling::Rand::new(3);
        for _ in 0..10 {
            let c = rand.vector(H2_RANK, 3);
            assert_eq!(
                orientation_character(&tensor_isometry(&c).unwrap(), &frame).unwrap(),
                Orientation::Preserving
            );
        }
    }

    #[test]
    fn orientation_character_is_a_homomorphism_on_the_ambient_lattice() {
        use crate::isometry::Isometry;
        use crate::sampling::{random_minus2_reflection, random_transvection, Rand};
        let frame = OrientationFrame::mukai();
        let lattice = mukai_lattice();
        let mut rand = crate::sampling::Rand::new(25);
        let mut draw = |rand: &mut Rand| -> Isometry {
            match rand.i64(0, 3) {
                0 => random_transvection(rand, lattice, 2).unwrap(),
                1 => random_minus2_reflection(rand, lattice, 2).unwrap(),
                2 => duality_isometry(),
                _ => fm_delta_isometry(),
            }
        };
        for _ in 0..500 {
            let g = draw(&mut rand);
            let h = draw(&mut rand);
            let gh = g.compose(&h).unwrap();
            assert_eq!(
                orientation_character(&gh, &frame).unwrap(),
                orientation_character(&g, &frame)
                    .unwrap()
                    .compose(orientation_character(&h, &frame).unwrap())
            );
        }
    }

    #[test]
    fn restriction_of_the_standard_transforms() {
        use crate::isometry::restrict_to_perp;
        let lattice = mukai_lattice();
        let (m, k) = (2u64, 3u64);
        let v = standard_vectors(m, k, 2, 2, 5).unwrap().v.coords();
        let perp = lattice.perp_basis(&v).unwrap();
        // duality fixes v and negates the degree-two block while fixing
        // the rank-one direction u0 = b0 - k b1
        let delta = duality_isometry();
        assert_eq!(delta.apply(&v), v);
        let restricted = restrict_to_perp(&delta, &v).unwrap();
        let mut u0 = vec![BigInt::zero(); MUKAI_RANK];
        u0[0] = BigInt::one();
        u0[1] = -BigInt::from(k);
        let u0c = perp.coords_of(&u0).unwrap();
        assert_eq!(restricted.apply(&u0c), u0c);
        let h2vec = {
            let mut x = vec![BigInt::zero(); MUKAI_RANK];
            x[4] = BigInt::from(3);
            x[9] = -BigInt::from(2);
            x
        };
        let h2c = perp.coords_of(&h2vec).unwrap();
        let negated: Vec<BigInt> = h2c.iter().map(|x| -x.clone()).collect();
        assert_eq!(restricted.apply(&h2c), negated);

        // the diagonal transform sends (m,0,-mk) to (-mk,0,m): that is -v
        // exactly when k = 1, so restriction is rejected for k > 1
        let fm = fm_delta_isometry();
        assert!(restrict_to_perp(&fm, &v).is_err());
        let v1 = standard_vectors(2, 1, 2, 2, 5).unwrap().v;
        assert_eq!(fm.apply(&v1.coords()), v1.neg().coords());
        assert!(restrict_to_perp(&fm, &v1.coords()).is_ok());
    }

    #[test]
    fn composed_reflections_stay_in_w() {
        use crate::isometry::in_w;
        use crate::isometry::Isometry;
        // R_u for the rank-one generator of Lk:k composed with a (-2)-root
        // reflection in an E8 block: orientation preserving, disc action -id
        let lk = std::sync::Arc::new(IntegralLattice::lk(4).unwrap());
        let frame = OrientationFrame::default_for(lk.clone()).unwrap();
        let mut u = vec![BigInt::zero(); 23];
        u[22] = BigInt::one();
        let ru = Isometry::reflection(lk.clone(), &u).unwrap();
        let mut w = vec![BigInt::zero(); 23];
        w[6] = BigInt::one(); // an E8 basis vector, square -2
        let rw = Isometry::reflection(lk.clone(), &w).unwrap();
        let composite = ru.compose(&rw).unwrap();
        assert!(in_w(&composite, &frame).unwrap());
    }

    #[test]
    fn ample_cone_test() {
        // e + r f is ample for r = 5
        assert!(ample_elliptic(&BigInt::one(), &BigInt::from(5)).unwrap());
        // ratio exactly 1 is not ample
        assert!(!ample_elliptic(&BigInt::one(), &BigInt::one()).unwrap());
        // pure fiber class is not ample
        assert!(!ample_elliptic(&BigInt::zero(), &BigInt::one()).unwrap());
        assert!(ample_elliptic(&BigInt::zero(), &BigInt::zero()).is_err());
        assert!(!ample_elliptic(&BigInt::from(-1), &BigInt::from(-5)).unwrap());
    }

    #[test]
    fn standard_vector_identities() {
        for k in 1..=10u64 {
            for m in 1..=10u64 {
                let sv = standard_vectors(m, k, 5, 4, 9).unwrap();
                assert_eq!(sv.v.square(), BigInt::from(2 * m * m * k));
                assert_eq!(sv.u.square(), BigInt::from(-2));
                assert_eq!(sv.u.pair(&sv.v), BigInt::zero());
                let h2 = h2_lattice();
                assert_eq!(h2.square(&sv.beta).unwrap(), BigInt::from(2 * k - 2));
                // beta is orthogonal to l and f
                assert!(h2.pair(&sv.beta, &elliptic_section_class()).unwrap().is_zero());
                assert!(h2.pair(&sv.beta, &elliptic_fiber_class()).unwrap().is_zero());
            }
        }
        // l^2 = -2, (l, f) = 1, f^2 = 0
        let h2 = h2_lattice();
        let l = elliptic_section_class();
        let f = elliptic_fiber_class();
        assert_eq!(h2.square(&l).unwrap(), BigInt::from(-2));
        assert_eq!(h2.pair(&l, &f).unwrap(), BigInt::one());
        assert!(h2.square(&f).unwrap().is_zero());
        assert!(standard_vectors(0, 1, 2, 2, 2).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let v = MukaiVector::rank_degree(2, -6);
        let s = serde_json::to_string(&v).unwrap();
        let back: MukaiVector = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
        // malformed xi length
        let bad = r#"{"r": 1, "xi": [0, 0], "a": 2}"#;
        assert!(serde_json::from_str::<MukaiVector>(bad).is_err());
    }
}
