//! The verification suite: every structural identity the library's
//! monodromy test rests on, run end to end with exact arithmetic and a
//! fixed seed. Each check reports pass/fail plus an optional witness; the
//! `verify` CLI command and the acceptance test target both run these.

use std::sync::Arc;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::disc::{oq_unit_count, DiscriminantGroup};
use crate::error::{Error, Result};
use crate::isometry::{
    extend_from_perp, orientation_character, restrict_to_perp, Isometry, Orientation,
    OrientationFrame,
};
use crate::lattice::IntegralLattice;
use crate::matrix::{IntMat, RatMat};
use crate::monodromy::{distinct_prime_count, index_of_w, MonodromyContext};
use crate::mukai::{
    duality_isometry, fm_delta_isometry, fm_dual_isometry, fm_poincare_isometry, h2_lattice,
    mukai_lattice, standard_vectors, tensor_isometry, MukaiVector, H2_RANK, MUKAI_RANK,
};
use crate::sampling::{random_isotropic, random_orthogonal_to, Rand};
use crate::word::random_loop;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Serialize)]
pub struct CheckResult {
    pub id: String,
    pub description: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<serde_json::Value>,
    pub millis: u128,
}

#[derive(Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.status == Status::Pass)
    }
}

struct Outcome {
    passed: bool,
    witness: Option<serde_json::Value>,
}

impl Outcome {
    fn pass() -> Outcome {
        Outcome { passed: true, witness: None }
    }

    fn fail(witness: serde_json::Value) -> Outcome {
        Outcome { passed: false, witness: Some(witness) }
    }
}

pub const CHECK_IDS: [&str; 10] = [
    "index-formula",
    "eichler-identity",
    "transvection-laws",
    "transvection-class",
    "fm-p-identities",
    "fm-orientation",
    "extension-lemma",
    "similitude",
    "image-in-w",
    "vector-arithmetic",
];

/// Runs the named checks (or all of them for `None`) with the given seed.
pub fn run(ids: Option<&[String]>, seed: u64) -> Result<VerifyReport> {
    let selected: Vec<&str> = match ids {
        None => CHECK_IDS.to_vec(),
        Some(list) => {
            let mut out = Vec::new();
            for id in list {
                if !CHECK_IDS.contains(&id.as_str()) {
                    return Err(Error::InvalidArgument(format!("unknown check id: {}", id)));
                }
                out.push(CHECK_IDS[CHECK_IDS.iter().position(|c| c == id).unwrap()]);
            }
            out
        }
    };
    let mut checks = Vec::new();
    for id in selected {
        let (description, run): (&str, fn(u64) -> Result<Outcome>) = match id {
            "index-formula" => (
                "index of W equals half the unit count of the rank-one discriminant form for 2 <= k <= 500",
                check_index_formula,
            ),
            "eichler-identity" => (
                "two-transvection identity t(zbar, e - r f) . t(zbar, -e + (r-1) f) = t(zbar, f)^-1 for 2 <= r <= 50, k in {1,2,3}",
                check_eichler_identity,
            ),
            "transvection-laws" => (
                "additivity t(z,a) . t(z,b) = t(z,a+b) and conjugation g . t(z,a) . g^-1 = t(z,g(a)), 1000 random cases each",
                check_transvection_laws,
            ),
            "transvection-class" => (
                "500 random transvections have det 1, preserve orientation and act trivially on the discriminant group",
                check_transvection_class,
            ),
            "fm-p-identities" => (
                "the elliptic transform reproduces both vector families for 1 <= m,k <= 20 and matches its constraint-solved derivation",
                check_fm_p_identities,
            ),
            "fm-orientation" => (
                "orientation characters: tensor, diagonal and elliptic transforms preserve; duality and the dual transform reverse",
                check_fm_orientation,
            ),
            "extension-lemma" => (
                "100 random W elements of the complement extend to the ambient lattice with the discriminant sign and restrict back exactly; 20 non-members are refused",
                check_extension_lemma,
            ),
            "similitude" => (
                "the pullback to the primitive context scales the form by m^2 and preserves membership verdicts",
                check_similitude,
            ),
            "image-in-w" => (
                "300 random evaluated loops all pass the monodromy-membership test",
                check_image_in_w,
            ),
            "vector-arithmetic" => (
                "v = (m,0,-mk) has square 2 m^2 k; u = (1, beta - f, k) has square -2 and is orthogonal to v, m,k <= 10",
                check_vector_arithmetic,
            ),
            _ => unreachable!(),
        };
        let start = Instant::now();
        let outcome = run(seed)?;
        checks.push(CheckResult {
            id: id.to_string(),
            description: description.to_string(),
            status: if outcome.passed { Status::Pass } else { Status::Fail },
            witness: outcome.witness,
            millis: start.elapsed().as_millis(),
        });
    }
    Ok(VerifyReport { seed, checks })
}

fn check_index_formula(_seed: u64) -> Result<Outcome> {
    for k in 2..=500u64 {
        let expected = 1u64 << (distinct_prime_count(k) - 1);
        let observed = oq_unit_count(k)? / 2;
        if expected != observed || index_of_w(k)? != expected {
            return Ok(Outcome::fail(serde_json::json!({
                "k": k, "formula": expected, "unit_count_half": observed,
            })));
        }
    }
    Ok(Outcome::pass())
}

fn check_eichler_identity(_seed: u64) -> Result<Outcome> {
    for k in 1..=3u64 {
        let u = IntegralLattice::hyperbolic();
        let tail = IntegralLattice::rank1(&BigInt::from(-2i64 * k as i64))?;
        let l = Arc::new(IntegralLattice::direct_sum(&[&u, &u, &tail]));
        let zbar = veci(5, &[(2, 1)]);
        let f = veci(5, &[(1, 1)]);
        for r in 2..=50i64 {
            let a1 = veci(5, &[(0, 1), (1, -r)]);
            let a2 = veci(5, &[(0, -1), (1, r - 1)]);
            let lhs = Isometry::transvection(l.clone(), &zbar, &a1)?
                .compose(&Isometry::transvection(l.clone(), &zbar, &a2)?)?;
            let rhs = Isometry::transvection(l.clone(), &zbar, &f)?.inverse();
            if lhs != rhs {
                return Ok(Outcome::fail(serde_json::json!({ "k": k, "r": r })));
            }
        }
    }
    Ok(Outcome::pass())
}

fn check_transvection_laws(seed: u64) -> Result<Outcome> {
    let u = IntegralLattice::hyperbolic();
    let l = Arc::new(IntegralLattice::direct_sum(&[&u, &u, &u]));
    let mut rand = Rand::new(seed ^ 0x7261);
    for case in 0..1000 {
        let z = random_isotropic(&mut rand, &l, 5);
        let a = random_orthogonal_to(&mut rand, &l, &z, 5);
        let b = random_orthogonal_to(&mut rand, &l, &z, 5);
        let ab: Vec<BigInt> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        let lhs = Isometry::transvection(l.clone(), &z, &a)?
            .compose(&Isometry::transvection(l.clone(), &z, &b)?)?;
        if lhs != Isometry::transvection(l.clone(), &z, &ab)? {
            return Ok(Outcome::fail(serde_json::json!({ "law": "additivity", "case": case })));
        }
    }
    for case in 0..1000 {
        let z = random_isotropic(&mut rand, &l, 4);
        let a = random_orthogonal_to(&mut rand, &l, &z, 4);
        // a transvection along the same isotropic vector fixes z
        let b = random_orthogonal_to(&mut rand, &l, &z, 4);
        let g = Isometry::transvection(l.clone(), &z, &b)?;
        let lhs = g
            .compose(&Isometry::transvection(l.clone(), &z, &a)?)?
            .compose(&g.inverse())?;
        if lhs != Isometry::transvection(l.clone(), &z, &g.apply(&a))? {
            return Ok(Outcome::fail(serde_json::json!({ "law": "conjugation", "case": case })));
        }
    }
    Ok(Outcome::pass())
}

fn check_transvection_class(seed: u64) -> Result<Outcome> {
    let mut rand = Rand::new(seed ^ 0x7463);
    for k in 1..=10u64 {
        let l = Arc::new(IntegralLattice::lk(k)?);
        let frame = OrientationFrame::default_for(l.clone())?;
        let disc = DiscriminantGroup::of(&l)?;
        for case in 0..50 {
            let z = random_isotropic(&mut rand, &l, 4);
            let a = random_orthogonal_to(&mut rand, &l, &z, 4);
            let t = Isometry::transvection(l.clone(), &z, &a)?;
            let det_ok = t.det().is_one();
            let or_ok = orientation_character(&t, &frame)? == Orientation::Preserving;
            let disc_ok = disc.action_of(&t)?.is_plus_id();
            if !(det_ok && or_ok && disc_ok) {
                return Ok(Outcome::fail(serde_json::json!({
                    "k": k, "case": case, "det": det_ok, "orientation": or_ok, "disc": disc_ok,
                })));
            }
        }
    }
    Ok(Outcome::pass())
}

fn check_fm_p_identities(_seed: u64) -> Result<Outcome> {
    let derived = derive_poincare_matrix();
    if fm_poincare_isometry().matrix() != &derived {
        return Ok(Outcome::fail(serde_json::json!({ "stage": "derivation mismatch" })));
    }
    for m in 1..=20u64 {
        for k in 1..=20u64 {
            let sv = standard_vectors(m, k, 3, 3, 7)?;
            let image = sv.v.fm_poincare();
            let mut xi = crate::mukai::elliptic_section_class();
            xi[1] += BigInt::from(k + 1);
            let expected = MukaiVector::new(
                BigInt::zero(),
                xi.iter().map(|x| x * BigInt::from(m)).collect(),
                BigInt::from(m),
            )?;
            if image != expected {
                return Ok(Outcome::fail(serde_json::json!({
                    "family": "rank-degree", "m": m, "k": k,
                })));
            }
            if image.square() != sv.v.square() {
                return Ok(Outcome::fail(serde_json::json!({
                    "family": "square", "m": m, "k": k,
                })));
            }
            let image = sv.u.fm_poincare();
            let mut xi = crate::mukai::elliptic_section_class();
            xi[1] -= BigInt::from(k as i64 - 1);
            for (x, b) in xi.iter_mut().zip(&sv.beta) {
                *x -= b;
            }
            if image != MukaiVector::new(BigInt::zero(), xi, BigInt::zero())? {
                return Ok(Outcome::fail(serde_json::json!({
                    "family": "minus-two class", "m": m, "k": k,
                })));
            }
        }
    }
    Ok(Outcome::pass())
}

fn check_fm_orientation(_seed: u64) -> Result<Outcome> {
    let frame = OrientationFrame::mukai();
    let mut rand = Rand::new(0xfeed);
    let mut cases: Vec<(&str, Isometry, Orientation)> = vec![
        ("fm_delta", fm_delta_isometry(), Orientation::Preserving),
        ("fm_p", fm_poincare_isometry().clone(), Orientation::Preserving),
        ("duality", duality_isometry(), Orientation::Reversing),
        ("fm_dual", fm_dual_isometry(), Orientation::Reversing),
    ];
    for _ in 0..5 {
        let c = rand.vector(H2_RANK, 3);
        cases.push(("tensor", tensor_isometry(&c)?, Orientation::Preserving));
    }
    for (name, iso, expected) in cases {
        if orientation_character(&iso, &frame)? != expected {
            return Ok(Outcome::fail(serde_json::json!({ "action": name })));
        }
    }
    Ok(Outcome::pass())
}

fn check_extension_lemma(seed: u64) -> Result<Outcome> {
    let pairs = [(1u64, 1u64), (2, 1), (1, 2), (2, 3), (3, 2)];
    let ambient = mukai_lattice();
    let mut rand = Rand::new(seed ^ 0x6578);
    for (m, k) in pairs {
        let ctx = MonodromyContext::new(m, k)?;
        let v = ctx.mukai_vector().coords();
        for case in 0..20 {
            let g = ctx.random_w_element(&mut rand, 1 + case % 3)?;
            let (ext, eps) = match extend_from_perp(ambient, &v, &g) {
                Ok(pair) => pair,
                Err(e) => {
                    return Ok(Outcome::fail(serde_json::json!({
                        "stage": "extension refused for a W element",
                        "m": m, "k": k, "case": case, "error": e.to_string(),
                    })));
                }
            };
            // the sign matches the discriminant action
            let action = ctx.disc().action_of(&g)?;
            let sign_ok = match eps {
                1 => action.is_plus_id(),
                -1 => action.is_minus_id(),
                _ => false,
            };
            let ev = ext.apply(&v);
            let expected: Vec<BigInt> = v.iter().map(|x| x * BigInt::from(eps)).collect();
            let maps_v = ev == expected;
            let back = restrict_to_perp(&ext, &v)?;
            let roundtrip = back.matrix() == g.matrix();
            if !(sign_ok && maps_v && roundtrip) {
                return Ok(Outcome::fail(serde_json::json!({
                    "stage": "extension properties",
                    "m": m, "k": k, "case": case,
                    "sign_ok": sign_ok, "maps_v": maps_v, "roundtrip": roundtrip,
                })));
            }
        }
        // constructed non-members: orientation reversers
        for case in 0..4 {
            let w = ctx.random_w_element(&mut rand, case % 2 + 1)?;
            let bad = Isometry::negation(ctx.induced_lattice().clone()).compose(&w)?;
            match extend_from_perp(ambient, &v, &bad) {
                Err(Error::NotInW) => {}
                other => {
                    return Ok(Outcome::fail(serde_json::json!({
                        "stage": "refusal",
                        "m": m, "k": k, "case": case,
                        "got": format!("{:?}", other.map(|(_, e)| e)),
                    })));
                }
            }
        }
    }
    Ok(Outcome::pass())
}

fn check_similitude(seed: u64) -> Result<Outcome> {
    let mut rand = Rand::new(seed ^ 0x7369);
    for m in [2u64, 3, 5] {
        for k in [1u64, 2, 6] {
            let ctx = MonodromyContext::new(m, k)?;
            let prim = ctx.to_primitive()?;
            let l = ctx.induced_lattice();
            for case in 0..23 {
                let x = rand.vector(l.rank(), 6);
                let y = rand.vector(l.rank(), 6);
                let ix = ctx.similitude(&x)?;
                let iy = ctx.similitude(&y)?;
                let lhs = prim.induced_lattice().pair(&ix, &iy)?;
                let rhs = BigInt::from(m * m) * l.pair(&x, &y)?;
                if lhs != rhs {
                    return Ok(Outcome::fail(serde_json::json!({
                        "stage": "scaling", "m": m, "k": k, "case": case,
                    })));
                }
            }
            // membership verdicts transfer along the conjugation
            for case in 0..5 {
                let g = if case % 2 == 0 {
                    ctx.random_w_element(&mut rand, 2)?
                } else {
                    Isometry::negation(l.clone()).compose(&ctx.random_w_element(&mut rand, 1)?)?
                };
                let tg = ctx.transfer(&g, &prim)?;
                if ctx.is_monodromy(&g)? != prim.is_monodromy(&tg)? {
                    return Ok(Outcome::fail(serde_json::json!({
                        "stage": "verdict transfer", "m": m, "k": k, "case": case,
                    })));
                }
            }
        }
    }
    Ok(Outcome::pass())
}

fn check_image_in_w(seed: u64) -> Result<Outcome> {
    let mut rand = Rand::new(seed ^ 0x696d);
    let mut contexts = std::collections::HashMap::new();
    for case in 0..300 {
        let m = 1 + (case % 4) as u64;
        let k = 1 + rand.usize(4) as u64;
        let ctx = match contexts.entry((m, k)) {
            std::collections::hash_map::Entry::Occupied(e) => e.into_mut(),
            std::collections::hash_map::Entry::Vacant(e) => e.insert(MonodromyContext::new(m, k)?),
        };
        let word = random_loop(&mut rand, m, k, 8)?;
        if word.steps.len() > 8 {
            return Ok(Outcome::fail(serde_json::json!({
                "stage": "loop generator exceeded the length bound",
                "len": word.steps.len(),
            })));
        }
        let ev = word.eval_parallel_transport()?;
        if !ev.is_loop() {
            return Ok(Outcome::fail(serde_json::json!({
                "stage": "loop did not close",
                "word": serde_json::to_value(&word)?,
            })));
        }
        let iso = ev.to_isometry()?;
        if !ctx.is_monodromy(&iso)? {
            return Ok(Outcome::fail(serde_json::json!({
                "stage": "membership",
                "m": m, "k": k, "case": case,
                "word": serde_json::to_value(&word)?,
            })));
        }
    }
    Ok(Outcome::pass())
}

fn check_vector_arithmetic(_seed: u64) -> Result<Outcome> {
    for m in 1..=10u64 {
        for k in 1..=10u64 {
            let sv = standard_vectors(m, k, 4, 3, 8)?;
            let ok = sv.v.square() == BigInt::from(2 * m * m * k)
                && sv.u.square() == BigInt::from(-2)
                && sv.u.pair(&sv.v).is_zero()
                && h2_lattice().square(&sv.beta)? == BigInt::from(2 * k - 2);
            if !ok {
                return Ok(Outcome::fail(serde_json::json!({ "m": m, "k": k })));
            }
        }
    }
    Ok(Outcome::pass())
}

fn veci(n: usize, entries: &[(usize, i64)]) -> Vec<BigInt> {
    let mut v = vec![BigInt::zero(); n];
    for &(i, x) in entries {
        v[i] = BigInt::from(x);
    }
    v
}

/// Re-derives the elliptic transform from its two defining identity
/// families by exact linear algebra; the independent check for the
/// hard-coded matrix.
///
/// The block on the span of `u0 = b0, ul = e1 - f1, uf = f1, u4 = -b1` is
/// pinned by the images of `u0 - k u4` and `u0 - uf + k u4` for `k = 1, 2`,
/// and the image of `ul` is completed from the pairing constraints plus
/// the norm condition, which is linear because the orthogonal direction is
/// isotropic.
pub fn derive_poincare_matrix() -> IntMat {
    let q = |x: i64| BigRational::from_integer(BigInt::from(x));
    // images of u0, uf, u4, solved from the identities with k = 1, 2
    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    let mut rhs: Vec<Vec<BigRational>> = Vec::new();
    for k in [1i64, 2] {
        // T(u0) - k T(u4) = ul + (k+1) uf + u4
        rows.push(vec![q(1), q(0), q(-k)]);
        rhs.push(vec![q(0), q(1), q(k + 1), q(1)]);
        // T(u0) - T(uf) + k T(u4) = ul - (k-1) uf
        rows.push(vec![q(1), q(-1), q(k)]);
        rhs.push(vec![q(0), q(1), q(-(k - 1)), q(0)]);
    }
    let a = RatMat::from_fn(4, 3, |i, j| rows[i][j].clone());
    let ata_inv = a.transposed_mul(&a).inverse().expect("full column rank");
    let mut images = RatMat::zeros(4, 3); // columns: T(u0), T(uf), T(u4)
    for coord in 0..4 {
        let b = RatMat::from_fn(4, 1, |i, _| rhs[i][coord].clone());
        let sol = ata_inv.mul(&a.transposed_mul(&b));
        for jj in 0..3 {
            images[(coord, jj)] = sol[(jj, 0)].clone();
        }
        let back = a.mul(&RatMat::from_fn(3, 1, |i, _| images[(coord, i)].clone()));
        for i in 0..4 {
            assert_eq!(back[(i, 0)], rhs[i][coord], "inconsistent identity system");
        }
    }
    // gram of (u0, ul, uf, u4)
    let gram = IntMat::from_rows(&[
        vec![0, 0, 0, -1],
        vec![0, -2, 1, 0],
        vec![0, 1, 0, 0],
        vec![-1, 0, 0, 0],
    ]);
    let gram_q = gram.to_rational();
    // (T(ul), T(x)) = (ul, x) for x = u0, uf, u4
    let mut constraints = RatMat::zeros(3, 4);
    let pairs = [q(0), q(1), q(0)];
    for jj in 0..3 {
        let img = RatMat::from_fn(4, 1, |i, _| images[(i, jj)].clone());
        let row = gram_q.mul(&img);
        for c in 0..4 {
            constraints[(jj, c)] = row[(c, 0)].clone();
        }
    }
    let ct = constraints.transpose();
    let cct_inv = constraints.mul(&ct).inverse().expect("independent constraints");
    let b = RatMat::from_fn(3, 1, |i, _| pairs[i].clone());
    let x0 = ct.mul(&cct_inv.mul(&b));
    // kernel direction u4 is isotropic, so the norm condition is linear in t
    let n = RatMat::from_fn(4, 1, |i, _| if i == 3 { q(1) } else { q(0) });
    let x0sq = x0.transposed_mul(&gram_q.mul(&x0))[(0, 0)].clone();
    let cross = x0.transposed_mul(&gram_q.mul(&n))[(0, 0)].clone();
    let t = (q(-2) - x0sq) / (q(2) * cross);
    let tul = RatMat::from_fn(4, 1, |i, _| x0[(i, 0)].clone() + &t * &n[(i, 0)]);
    // assemble: change from the u-basis to the ambient basis on
    // (b0, b1, e1, f1), and -1 on the remaining coordinates
    let span = IntMat::from_rows(&[
        vec![1, 0, 0, 0],  // b0
        vec![0, 0, 0, -1], // b1
        vec![0, 1, 0, 0],  // e1
        vec![0, -1, 1, 0], // f1
    ]);
    let span_q = span.to_rational();
    let mut block = RatMat::zeros(4, 4);
    for (col, src) in [(0usize, 0usize), (2, 1), (3, 2)] {
        for i in 0..4 {
            block[(i, col)] = images[(i, src)].clone();
        }
    }
    for i in 0..4 {
        block[(i, 1)] = tul[(i, 0)].clone();
    }
    let amb = span_q.mul(&block.mul(&span_q.inverse().unwrap()));
    let mut full = IntMat::identity(MUKAI_RANK).neg();
    let idx = [0usize, 1, 2, 3];
    for (bi, &i) in idx.iter().enumerate() {
        for (bj, &j) in idx.iter().enumerate() {
            assert!(amb[(bi, bj)].is_integer(), "derived block is not integral");
            full[(i, j)] = amb[(bi, bj)].to_integer();
        }
    }
    full
}
