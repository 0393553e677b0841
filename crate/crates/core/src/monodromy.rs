//! The monodromy-membership test on the orthogonal complement of
//! `v = (m, 0, -mk)` in the Mukai lattice.
//!
//! The second cohomology of the moduli space attached to `(m, k)` is
//! represented as the sublattice `v^perp` itself; under that convention
//! membership in the locally trivial monodromy group is exactly membership
//! in `W`: orientation preserving and acting as `+-id` on the discriminant
//! group. The index of `W` inside the orientation-preserving isometries is
//! `2^(rho(k) - 1)` with `rho` the number of distinct primes of `k`, and is
//! checked against the brute-force unit count of the discriminant form.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::disc::{oq_unit_count, DiscriminantGroup};
use crate::error::{Error, Result};
use crate::isometry::{in_w_with, Isometry, OrientationFrame};
use crate::lattice::{IntegralLattice, SublatticeBasis};
use crate::mukai::{h2_lattice, mukai_lattice, standard_vectors, MukaiVector, H2_RANK};
use crate::sampling::{minus_two_vectors, random_isotropic, random_orthogonal_to, Rand};

pub struct MonodromyContext {
    m: u64,
    k: u64,
    v: MukaiVector,
    perp: SublatticeBasis,
    induced: Arc<IntegralLattice>,
    frame: OrientationFrame,
    disc: DiscriminantGroup,
}

impl MonodromyContext {
    /// Builds the context for `v = (m, 0, -mk)`, verifying that the
    /// complement has signature (3, 20) and discriminant group of order 2k.
    pub fn new(m: u64, k: u64) -> Result<MonodromyContext> {
        if m == 0 || k == 0 {
            return Err(Error::InvalidArgument("m and k must be >= 1".into()));
        }
        let v = standard_vectors(m, k, 2, 2, 5)?.v;
        let ambient = mukai_lattice();
        let perp = ambient.perp_basis(&v.coords())?;
        let induced = Arc::new(perp.induced_lattice()?);
        if induced.signature()? != (3, 20) {
            return Err(Error::Degenerate("complement does not have signature (3,20)".into()));
        }
        let disc = DiscriminantGroup::of(&induced)?;
        if disc.order() != BigInt::from(2 * k) {
            return Err(Error::Degenerate(format!(
                "discriminant group has order {}, expected {}",
                disc.order(),
                2 * k
            )));
        }
        let frame = OrientationFrame::default_for(induced.clone())?;
        Ok(MonodromyContext { m, k, v, perp, induced, frame, disc })
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn mukai_vector(&self) -> &MukaiVector {
        &self.v
    }

    pub fn perp(&self) -> &SublatticeBasis {
        &self.perp
    }

    pub fn induced_lattice(&self) -> &Arc<IntegralLattice> {
        &self.induced
    }

    pub fn frame(&self) -> &OrientationFrame {
        &self.frame
    }

    pub fn disc(&self) -> &DiscriminantGroup {
        &self.disc
    }

    /// The monodromy-membership verdict for an isometry of `v^perp`.
    pub fn is_monodromy(&self, g: &Isometry) -> Result<bool> {
        if g.lattice().gram() != self.induced.gram() {
            return Err(Error::LatticeMismatch);
        }
        in_w_with(g, &self.frame, &self.disc)
    }

    /// Coordinates of an ambient vector inside the complement, when it
    /// lies there.
    pub fn perp_coords(&self, ambient: &[BigInt]) -> Option<Vec<BigInt>> {
        self.perp.coords_of(ambient)
    }

    /// Generator sample: the reflection in `u = (1, beta - f, k)` together
    /// with isometries supported on the degree-two block (transvections and
    /// reflections fixing the rank/degree part pointwise), all restricted
    /// to the complement.
    pub fn generators(&self) -> Result<Vec<Isometry>> {
        let mut out = vec![self.minus_u_reflection()?];
        let h2 = h2_lattice();
        let roots = minus_two_vectors(h2);
        for u in roots.iter().take(4) {
            out.push(self.reflection_from_h2(u)?);
        }
        // a couple of fixed transvections in the degree-two block
        let e2 = unit_h2(2);
        let e3 = unit_h2(4);
        let f3 = unit_h2(5);
        out.push(self.transvection_from_h2(&e2, &e3)?);
        let diff: Vec<BigInt> = e3.iter().zip(&f3).map(|(a, b)| a - b).collect();
        out.push(self.transvection_from_h2(&e2, &diff)?);
        Ok(out)
    }

    /// The reflection in the `(-2)`-class `u = (1, beta - f, k)`.
    pub fn minus_u_reflection(&self) -> Result<Isometry> {
        let sv = standard_vectors(self.m, self.k, 2, 2, 5)?;
        let uc = self
            .perp_coords(&sv.u.coords())
            .ok_or_else(|| Error::InvalidArgument("u is not orthogonal to v".into()))?;
        Isometry::reflection(self.induced.clone(), &uc)
    }

    /// The reflection in the rank-one direction `u0 = b0 - k b1`, which
    /// generates the discriminant group; it acts as `-id` there.
    pub fn rank_one_reflection(&self) -> Result<Isometry> {
        let mut u0 = vec![BigInt::zero(); 24];
        u0[0] = BigInt::one();
        u0[1] = -BigInt::from(self.k);
        let uc = self
            .perp_coords(&u0)
            .ok_or_else(|| Error::InvalidArgument("u0 is not orthogonal to v".into()))?;
        Isometry::reflection(self.induced.clone(), &uc)
    }

    fn reflection_from_h2(&self, u: &[BigInt]) -> Result<Isometry> {
        let uc = self
            .perp_coords(&h2_embed(u))
            .ok_or_else(|| Error::InvalidArgument("class is not orthogonal to v".into()))?;
        Isometry::reflection(self.induced.clone(), &uc)
    }

    fn transvection_from_h2(&self, z: &[BigInt], a: &[BigInt]) -> Result<Isometry> {
        let zc = self
            .perp_coords(&h2_embed(z))
            .ok_or_else(|| Error::InvalidArgument("class is not orthogonal to v".into()))?;
        let ac = self
            .perp_coords(&h2_embed(a))
            .ok_or_else(|| Error::InvalidArgument("class is not orthogonal to v".into()))?;
        Isometry::transvection(self.induced.clone(), &zc, &ac)
    }

    /// A random word in transvections, `(-2)`-reflections and the rank-one
    /// reflection; every letter lies in `W`, so the word does too.
    pub fn random_w_element(&self, rand: &mut Rand, len: usize) -> Result<Isometry> {
        let h2 = h2_lattice();
        let mut acc = Isometry::identity(self.induced.clone());
        for _ in 0..len {
            let step = match rand.i64(0, 3) {
                0 => {
                    let z = random_isotropic(rand, h2, 3);
                    let a = random_orthogonal_to(rand, h2, &z, 3);
                    self.transvection_from_h2(&z, &a)?
                }
                1 => {
                    let roots = minus_two_vectors(h2);
                    let base = &roots[rand.usize(roots.len())];
                    let z = random_isotropic(rand, h2, 2);
                    let a = random_orthogonal_to(rand, h2, &z, 2);
                    let t = Isometry::transvection(h2.clone(), &z, &a)?;
                    self.reflection_from_h2(&t.apply(base))?
                }
                2 => self.minus_u_reflection()?,
                _ => self.rank_one_reflection()?,
            };
            acc = step.compose(&acc)?;
        }
        Ok(acc)
    }

    /// The pullback similitude to the primitive context: multiplication by
    /// `m`, which scales the form by `m^2`.
    pub fn similitude(&self, x: &[BigInt]) -> Result<Vec<BigInt>> {
        if x.len() != self.perp.rank() {
            return Err(Error::DimensionMismatch("complement coordinate length".into()));
        }
        let m = BigInt::from(self.m);
        Ok(x.iter().map(|c| c * &m).collect())
    }

    /// The context of the primitive vector `w = v / m`; the complement is
    /// the same sublattice with the same basis.
    pub fn to_primitive(&self) -> Result<MonodromyContext> {
        let prim = MonodromyContext::new(1, self.k)?;
        debug_assert_eq!(prim.perp.columns(), self.perp.columns());
        Ok(prim)
    }

    /// Transport of an isometry to the primitive context. Under the
    /// representation both complements are literally equal, so the matrix
    /// is unchanged; the verdict of [`Self::is_monodromy`] is preserved.
    pub fn transfer(&self, g: &Isometry, primitive: &MonodromyContext) -> Result<Isometry> {
        if g.lattice().gram() != self.induced.gram() {
            return Err(Error::LatticeMismatch);
        }
        Isometry::certify(primitive.induced.clone(), g.matrix().clone())
    }
}

fn unit_h2(i: usize) -> Vec<BigInt> {
    let mut v = vec![BigInt::zero(); H2_RANK];
    v[i] = BigInt::one();
    v
}

fn h2_embed(xi: &[BigInt]) -> Vec<BigInt> {
    MukaiVector::new(BigInt::zero(), xi.to_vec(), BigInt::zero())
        .expect("degree-two class has 22 coordinates")
        .coords()
}

/// Number of distinct prime factors.
pub fn distinct_prime_count(mut k: u64) -> u32 {
    let mut count = 0;
    let mut p = 2;
    while p * p <= k {
        if k % p == 0 {
            count += 1;
            while k % p == 0 {
                k /= p;
            }
        }
        p += 1;
    }
    if k > 1 {
        count += 1;
    }
    count
}

/// Index of `W` inside the orientation-preserving isometries:
/// `2^(rho(k) - 1)`, and 1 for `k = 1` where the discriminant form has a
/// trivial orthogonal group.
pub fn index_of_w(k: u64) -> Result<u64> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be >= 1".into()));
    }
    if k == 1 {
        return Ok(1);
    }
    Ok(1u64 << (distinct_prime_count(k) - 1))
}

/// Checks `index_of_w(k) = oq_unit_count(k) / 2` for `2 <= k <= k_max`;
/// returns the list of mismatches (empty on success).
pub fn verify_index(k_max: u64) -> Result<Vec<u64>> {
    let mut bad = Vec::new();
    for k in 2..=k_max {
        if index_of_w(k)? != oq_unit_count(k)? / 2 {
            bad.push(k);
        }
    }
    Ok(bad)
}
