//! Belief dynamics: conditioning, conjunctive and disjunctive combination,
//! retraction and enlargement.
//!
//! Every rule here runs on the direct (transfer or transform) path. The
//! matrix forms in [`crate::specialization`] compute the same results and are
//! checked against these in the tests.

use crate::belief::{b_from_mass, normalize, q_from_mass, MassFunction};
use crate::error::{BeliefError, Result};
use crate::lattice::{mobius_subsets_in_place, mobius_supersets_in_place, LatticeVector, SubsetIndex};
use crate::DEFAULT_TOLERANCE;

/// Moves each `m(X)` to `target(X)`.
pub(crate) fn transfer(m: &[f64], target: impl Fn(SubsetIndex) -> SubsetIndex) -> Vec<f64> {
    let mut out = vec![0.0; m.len()];
    for (x, &v) in m.iter().enumerate() {
        if v != 0.0 {
            out[target(SubsetIndex(x as u32)).index()] += v;
        }
    }
    out
}

fn transferred(m: &MassFunction, target: impl Fn(SubsetIndex) -> SubsetIndex) -> MassFunction {
    let values = transfer(m.values(), target);
    MassFunction::trusted(LatticeVector::new(m.frame().clone(), values).expect("length"))
}

/// Unnormalized Dempster conditioning on `c`: each `m(X)` moves to `X ∩ C`.
///
/// Equivalently `m_C(B) = Σ_{Y⊆C̄} m(B∪Y)` for `B ⊆ C`; the sum includes
/// `Y = ∅`. Conditioning on `∅` puts all mass on `∅`.
pub fn condition(m: &MassFunction, c: SubsetIndex) -> Result<MassFunction> {
    m.frame().check(c)?;
    Ok(transferred(m, |x| x.intersection(c)))
}

/// Conjunctive (unnormalized Dempster) combination via `q01 = q0·q1`.
pub fn combine_conjunctive(m0: &MassFunction, m1: &MassFunction) -> Result<MassFunction> {
    m0.frame().ensure_same(m1.frame())?;
    let q0 = q_from_mass(m0);
    let q1 = q_from_mass(m1);
    let mut values: Vec<f64> = q0.values().iter().zip(q1.values()).map(|(a, b)| a * b).collect();
    mobius_supersets_in_place(&mut values);
    Ok(MassFunction::trusted(LatticeVector::new(m0.frame().clone(), values)?))
}

/// Conjunctive combination followed by normalization.
pub fn combine_normalized(m0: &MassFunction, m1: &MassFunction) -> Result<MassFunction> {
    normalize(&combine_conjunctive(m0, m1)?)
}

/// Disjunctive combination: `m(C) = Σ_{A∪B=C} mE(A)·mF(B)`, computed as the
/// product of implicabilities `b = bE·bF`.
pub fn combine_disjunctive(me: &MassFunction, mf: &MassFunction) -> Result<MassFunction> {
    me.frame().ensure_same(mf.frame())?;
    let be = b_from_mass(me);
    let bf = b_from_mass(mf);
    let mut values: Vec<f64> = be.values().iter().zip(bf.values()).map(|(a, b)| a * b).collect();
    mobius_subsets_in_place(&mut values);
    Ok(MassFunction::trusted(LatticeVector::new(me.frame().clone(), values)?))
}

/// Removes evidence `m_e` from a combined state: `q_F = q_EF / q_E`.
pub fn retract(m_ef: &MassFunction, m_e: &MassFunction) -> Result<MassFunction> {
    m_ef.frame().ensure_same(m_e.frame())?;
    let frame = m_ef.frame();
    let q_e = q_from_mass(m_e);
    // q_E is antitone, so q_E(Ω) is the first to vanish
    for a in std::iter::once(frame.full()).chain(frame.subsets()) {
        let v = q_e.get(a);
        if v.abs() <= DEFAULT_TOLERANCE {
            return Err(BeliefError::NonInvertibleEvidence {
                subset: frame.display(a),
                value: v,
            });
        }
    }
    let q_ef = q_from_mass(m_ef);
    let mut values: Vec<f64> = q_ef.values().iter().zip(q_e.values()).map(|(a, b)| a / b).collect();
    mobius_supersets_in_place(&mut values);
    MassFunction::from_inversion(
        LatticeVector::new(frame.clone(), values)?,
        DEFAULT_TOLERANCE,
        |subset, value| BeliefError::EvidenceNotContained { subset, value },
    )
}

/// Enlargement on `a`: each `m(X)` moves to `X ∪ A`, making the elements of
/// `A` indiscernible.
pub fn enlarge(m: &MassFunction, a: SubsetIndex) -> Result<MassFunction> {
    m.frame().check(a)?;
    Ok(transferred(m, |x| x.union(a)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::belief::vacuous;
    use crate::lattice::Frame;
    use crate::specialization::{
        apply, apply_generalization, conditioning_matrix, enlargement_matrix,
    };
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_mass(frame: &Frame, rng: &mut ChaCha8Rng) -> MassFunction {
        let mut v: Vec<f64> = (0..frame.size())
            .map(|_| if rng.gen_bool(0.4) { 0.0 } else { rng.gen::<f64>() })
            .collect();
        v[rng.gen_range(0..frame.size())] += 0.05;
        let s: f64 = v.iter().sum();
        v.iter_mut().for_each(|x| *x /= s);
        MassFunction::new(frame, v).unwrap()
    }

    fn pair() -> (Frame, MassFunction, MassFunction) {
        let f = Frame::new(&["a", "b"]).unwrap();
        let m0 = MassFunction::new(&f, vec![0.0, 0.5, 0.0, 0.5]).unwrap();
        let m1 = MassFunction::new(&f, vec![0.0, 0.0, 0.4, 0.6]).unwrap();
        (f, m0, m1)
    }

    // m_C(B) = Σ_{Y⊆C̄} m(B∪Y) for B ⊆ C, literally.
    fn condition_oracle(m: &MassFunction, c: SubsetIndex) -> Vec<f64> {
        let f = m.frame();
        let cbar = f.complement(c);
        f.subsets()
            .map(|b| {
                if !b.is_subset_of(c) {
                    return 0.0;
                }
                cbar.submasks().map(|y| m.get(b.union(y))).sum()
            })
            .collect()
    }

    fn conjunctive_oracle(m0: &MassFunction, m1: &MassFunction) -> Vec<f64> {
        let mut out = vec![0.0; m0.values().len()];
        for x in m0.frame().subsets() {
            for y in m0.frame().subsets() {
                out[x.intersection(y).index()] += m0.get(x) * m1.get(y);
            }
        }
        out
    }

    fn disjunctive_oracle(m0: &MassFunction, m1: &MassFunction) -> Vec<f64> {
        let mut out = vec![0.0; m0.values().len()];
        for x in m0.frame().subsets() {
            for y in m0.frame().subsets() {
                out[x.union(y).index()] += m0.get(x) * m1.get(y);
            }
        }
        out
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        crate::lattice::max_abs_diff(a, b) <= tol
    }

    #[test]
    fn condition_examples() {
        let f = Frame::new(&["a", "b", "c"]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = random_mass(&f, &mut rng);
        assert_eq!(condition(&m, f.full()).unwrap(), m);

        let m = MassFunction::from_focal(&f, &[(f.parse_key("a|b").unwrap(), 0.6), (f.full(), 0.4)])
            .unwrap();
        let a = f.parse_key("a").unwrap();
        let mc = condition(&m, a).unwrap();
        assert!((mc.get(a) - 1.0).abs() < 1e-12);
        assert!(close(mc.values(), &condition_oracle(&m, a), 1e-12));

        let all_empty = condition(&m, f.empty()).unwrap();
        assert_eq!(all_empty.conflict(), 1.0);
    }

    #[test]
    fn conditioning_three_ways() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..500 {
            let f = Frame::of_size(rng.gen_range(1..=6)).unwrap();
            let m = random_mass(&f, &mut rng);
            let c = SubsetIndex(rng.gen_range(0..f.size() as u32));
            let direct = condition(&m, c).unwrap();
            let via_matrix = apply(&m, &conditioning_matrix(&f, c).unwrap()).unwrap();
            assert!(direct.max_abs_diff(&via_matrix) < 1e-12);
            assert!(close(direct.values(), &condition_oracle(&m, c), 1e-12));

            let bel = m.bel();
            let bel_c = direct.bel();
            let cbar = f.complement(c);
            for b in f.subsets() {
                let closed = bel.get(b.union(cbar)) - bel.get(cbar);
                assert!((bel_c.get(b) - closed).abs() < 1e-9);
            }
            assert!(direct.pl().get(cbar).abs() < 1e-12);
        }
    }

    #[test]
    fn conditioning_composes() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let f = Frame::of_size(rng.gen_range(1..=6)).unwrap();
            let m = random_mass(&f, &mut rng);
            let c = SubsetIndex(rng.gen_range(0..f.size() as u32));
            let c2 = SubsetIndex(rng.gen_range(0..f.size() as u32));
            let twice = condition(&condition(&m, c).unwrap(), c2).unwrap();
            let once = condition(&m, c.intersection(c2)).unwrap();
            assert!(twice.max_abs_diff(&once) < 1e-12);
        }
    }

    #[test]
    fn conjunctive_worked_pair() {
        let (f, m0, m1) = pair();
        let m01 = combine_conjunctive(&m0, &m1).unwrap();
        assert!(close(m01.values(), &[0.2, 0.3, 0.2, 0.3], 1e-12));
        assert!(close(m01.values(), &conjunctive_oracle(&m0, &m1), 1e-12));
        assert!(combine_conjunctive(&m0, &vacuous(&f)).unwrap().max_abs_diff(&m0) < 1e-12);
    }

    #[test]
    fn conjunctive_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..300 {
            let f = Frame::of_size(rng.gen_range(1..=6)).unwrap();
            let (a, b, c) = (
                random_mass(&f, &mut rng),
                random_mass(&f, &mut rng),
                random_mass(&f, &mut rng),
            );
            let ab = combine_conjunctive(&a, &b).unwrap();
            assert!(close(ab.values(), &conjunctive_oracle(&a, &b), 1e-9));
            assert!(ab.max_abs_diff(&combine_conjunctive(&b, &a).unwrap()) < 1e-9);
            let left = combine_conjunctive(&ab, &c).unwrap();
            let right = combine_conjunctive(&a, &combine_conjunctive(&b, &c).unwrap()).unwrap();
            assert!(left.max_abs_diff(&right) < 1e-9);
            let (qa, qb, qab) = (a.q(), b.q(), ab.q());
            for s in f.subsets() {
                assert!((qab.get(s) - qa.get(s) * qb.get(s)).abs() < 1e-9);
            }
            let cset = SubsetIndex(rng.gen_range(0..f.size() as u32));
            let cat = MassFunction::categorical(&f, cset).unwrap();
            let via_combine = combine_conjunctive(&a, &cat).unwrap();
            assert!(via_combine.max_abs_diff(&condition(&a, cset).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn normalized_combination() {
        let (f, m0, m1) = pair();
        let m = combine_normalized(&m0, &m1).unwrap();
        assert!(close(m.values(), &[0.0, 0.375, 0.25, 0.375], 1e-12));

        let a = MassFunction::categorical(&f, f.parse_key("a").unwrap()).unwrap();
        let b = MassFunction::categorical(&f, f.parse_key("b").unwrap()).unwrap();
        assert!(matches!(
            combine_normalized(&a, &b),
            Err(BeliefError::NormalizationUndefined { .. })
        ));

        let m = MassFunction::new(&f, vec![0.2, 0.3, 0.2, 0.3]).unwrap();
        let got = combine_normalized(&m, &vacuous(&f)).unwrap();
        assert!(got.max_abs_diff(&normalize(&m).unwrap()) < 1e-12);
    }

    #[test]
    fn disjunctive_examples() {
        let (f, m0, m1) = pair();
        let or = combine_disjunctive(&m0, &m1).unwrap();
        assert!((or.get(f.full()) - 1.0).abs() < 1e-12);
        let empty = MassFunction::categorical(&f, f.empty()).unwrap();
        assert!(combine_disjunctive(&m0, &empty).unwrap().max_abs_diff(&m0) < 1e-12);
    }

    #[test]
    fn disjunctive_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..500 {
            let f = Frame::of_size(rng.gen_range(1..=6)).unwrap();
            let me = random_mass(&f, &mut rng);
            let mf = random_mass(&f, &mut rng);
            let or = combine_disjunctive(&me, &mf).unwrap();
            assert!(close(or.values(), &disjunctive_oracle(&me, &mf), 1e-9));
            let (be, bf, bor) = (me.b(), mf.b(), or.b());
            for a in f.subsets() {
                assert!((bor.get(a) - be.get(a) * bf.get(a)).abs() < 1e-9);
            }
            // the plain bel product needs m(∅) = 0 on both sides
            if me.conflict() > 0.99 || mf.conflict() > 0.99 {
                continue;
            }
            let (ne, nf) = (normalize(&me).unwrap(), normalize(&mf).unwrap());
            let nor = combine_disjunctive(&ne, &nf).unwrap();
            let (bel_e, bel_f, bel_or) = (ne.bel(), nf.bel(), nor.bel());
            for a in f.subsets() {
                assert!((bel_or.get(a) - bel_e.get(a) * bel_f.get(a)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn bel_product_fails_with_conflict() {
        let f = Frame::of_size(1).unwrap();
        let m = MassFunction::new(&f, vec![0.5, 0.5]).unwrap();
        let or = combine_disjunctive(&m, &m).unwrap();
        // bel(Ω) = .75 but bel(Ω)² = .25
        assert!((or.bel().get(f.full()) - 0.75).abs() < 1e-12);
    }

    #[test]
    fn retract_examples() {
        let (f, m0, m1) = pair();
        let m01 = combine_conjunctive(&m0, &m1).unwrap();
        assert!(close(m01.q().values(), &[1.0, 0.6, 0.5, 0.3], 1e-12));
        let back = retract(&m01, &m1).unwrap();
        assert!(back.max_abs_diff(&m0) < 1e-12);
        assert!(close(back.q().values(), &[1.0, 1.0, 0.5, 0.5], 1e-12));
        assert!(retract(&m0, &vacuous(&f)).unwrap().max_abs_diff(&m0) < 1e-12);
    }

    #[test]
    fn retract_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..200 {
            let f = Frame::of_size(rng.gen_range(1..=6)).unwrap();
            let m0 = random_mass(&f, &mut rng);
            let raw = random_mass(&f, &mut rng);
            // mixing with the vacuous mass keeps every commonality above .05
            let alpha = rng.gen_range(0.06..1.0);
            let values = raw
                .values()
                .iter()
                .enumerate()
                .map(|(i, &v)| (1.0 - alpha) * v + if i == f.full().index() { alpha } else { 0.0 })
                .collect();
            let m1 = MassFunction::new(&f, values).unwrap();
            let both = combine_conjunctive(&m0, &m1).unwrap();
            assert!(retract(&both, &m1).unwrap().max_abs_diff(&m0) < 1e-8);
        }
    }

    #[test]
    fn retract_errors() {
        let (f, m0, m1) = pair();
        let no_omega = MassFunction::categorical(&f, f.parse_key("a").unwrap()).unwrap();
        let err = retract(&m0, &no_omega).unwrap_err();
        assert_eq!(err.to_string(), "non-invertible evidence: q(Ω)=0");
        // m1 was never combined into the vacuous state
        assert!(matches!(
            retract(&vacuous(&f), &m1),
            Err(BeliefError::EvidenceNotContained { .. })
        ));
    }

    #[test]
    fn enlarge_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..=5 {
            let f = Frame::of_size(n).unwrap();
            let m = random_mass(&f, &mut rng);
            assert_eq!(enlarge(&m, f.empty()).unwrap(), m);
            assert!(enlarge(&m, f.full()).unwrap().max_abs_diff(&vacuous(&f)) < 1e-12);
            for a in f.subsets() {
                let direct = enlarge(&m, a).unwrap();
                let g = enlargement_matrix(&f, a).unwrap();
                assert!(direct.max_abs_diff(&apply_generalization(&m, &g).unwrap()) < 1e-12);
                // focal sets touching A contain all of A
                for (x, _) in direct.focal_sets() {
                    assert!(!x.intersects(a) || a.is_subset_of(x));
                }
            }
        }
    }

    #[test]
    fn frame_mismatch() {
        let (_, m0, _) = pair();
        let other = vacuous(&Frame::of_size(3).unwrap());
        assert!(matches!(combine_conjunctive(&m0, &other), Err(BeliefError::FrameMismatch)));
        assert!(combine_disjunctive(&m0, &other).is_err());
        assert!(retract(&m0, &other).is_err());
        assert!(condition(&m0, SubsetIndex(8)).is_err());
    }
}
