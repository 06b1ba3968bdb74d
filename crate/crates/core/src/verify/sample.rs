//! Random instances for the theorem checks.

use rand::Rng;

use crate::belief::MassFunction;
use crate::dynamics::transfer;
use crate::lattice::{Frame, LatticeVector, SubsetIndex};
use crate::specialization::{dempsterian_matrix, is_dempsterian, Matrix, SpecializationMatrix};

/// Random distribution over the subsets of `mask`, as a full-length vector.
fn distribution_over<R: Rng>(k: usize, mask: SubsetIndex, sparsity: f64, rng: &mut R) -> Vec<f64> {
    let mut out = vec![0.0; k];
    let support: Vec<SubsetIndex> = mask.submasks().collect();
    let mut total = 0.0;
    for b in &support {
        if !rng.gen_bool(sparsity) {
            let v: f64 = rng.gen();
            out[b.index()] = v;
            total += v;
        }
    }
    if total == 0.0 {
        let b = support[rng.gen_range(0..support.len())];
        out[b.index()] = 1.0;
        total = 1.0;
    }
    out.iter_mut().for_each(|x| *x /= total);
    out
}

/// A random mass function: uniform draws, a random share of them zeroed to
/// vary the focal structure, then normalized. `m(∅)` may be positive.
pub fn random_mass<R: Rng>(frame: &Frame, rng: &mut R) -> MassFunction {
    let sparsity = rng.gen_range(0.0..0.9);
    let values = distribution_over(frame.size(), frame.full(), sparsity, rng);
    MassFunction::new(frame, values).expect("normalized draw")
}

/// Random mass function with `m(∅) = 0`.
pub fn random_normalized_mass<R: Rng>(frame: &Frame, rng: &mut R) -> MassFunction {
    let m = random_mass(frame, rng);
    match crate::belief::normalize(&m) {
        Ok(n) => n,
        Err(_) => crate::belief::vacuous(frame),
    }
}

/// Random mass function whose commonalities all exceed `floor`: a random
/// mass mixed with the vacuous one at weight in `(floor, 1)`.
pub fn random_invertible_mass<R: Rng>(frame: &Frame, floor: f64, rng: &mut R) -> MassFunction {
    let raw = random_mass(frame, rng);
    let alpha = rng.gen_range(floor + 1e-3..1.0);
    let top = frame.full().index();
    let values = raw
        .values()
        .iter()
        .enumerate()
        .map(|(i, &v)| (1.0 - alpha) * v + if i == top { alpha } else { 0.0 })
        .collect();
    MassFunction::new(frame, values).expect("convex mix")
}

/// Random specialization whose row `A` is a distribution over the subsets
/// of `support(A)`; `support(A)` must be a subset of `A`.
pub fn random_specialization_with<R: Rng>(
    frame: &Frame,
    support: impl Fn(SubsetIndex) -> SubsetIndex,
    rng: &mut R,
) -> SpecializationMatrix {
    let k = frame.size();
    let mut s = Matrix::zeros(k, k);
    let sparsity = rng.gen_range(0.0..0.8);
    for a in frame.subsets() {
        let mask = support(a);
        debug_assert!(mask.is_subset_of(a));
        let row = distribution_over(k, mask, sparsity, rng);
        for (b, v) in row.into_iter().enumerate() {
            s[(a.index(), b)] = v;
        }
    }
    SpecializationMatrix::new(frame, s).expect("rows are distributions over subsets")
}

pub fn random_specialization<R: Rng>(frame: &Frame, rng: &mut R) -> SpecializationMatrix {
    random_specialization_with(frame, |a| a, rng)
}

/// A valid specialization that is not Dempsterian, or `None` when the frame
/// has none (one element: row ∅ is forced and row Ω generates the rest).
///
/// Half the draws are fully random specializations; the other half perturb
/// one row of a Dempsterian matrix by moving mass between two subsets of
/// that row's set.
pub fn random_non_dempsterian<R: Rng>(frame: &Frame, rng: &mut R) -> Option<SpecializationMatrix> {
    if frame.len() < 2 {
        return None;
    }
    loop {
        let s = if rng.gen_bool(0.5) {
            random_specialization(frame, rng).into_matrix()
        } else {
            perturb_row(&dempsterian_matrix(&random_mass(frame, rng)).ok()?, rng)
        };
        if !is_dempsterian(frame, &s) {
            return SpecializationMatrix::new(frame, s).ok();
        }
    }
}

/// Moves part of one entry of a non-trivial row to another subset of that row.
fn perturb_row<R: Rng>(s: &SpecializationMatrix, rng: &mut R) -> Matrix {
    let frame = s.frame();
    let mut out = s.matrix().clone();
    // rows with at least two subsets, excluding Ω so row Ω still names the generator
    let rows: Vec<SubsetIndex> = frame
        .subsets()
        .filter(|a| !a.is_empty() && *a != frame.full())
        .collect();
    let a = rows[rng.gen_range(0..rows.len())];
    let subs: Vec<SubsetIndex> = a.submasks().collect();
    let (from, _) = subs
        .iter()
        .map(|b| (*b, out[(a.index(), b.index())]))
        .fold((subs[0], -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
    let to = loop {
        let t = subs[rng.gen_range(0..subs.len())];
        if t != from {
            break t;
        }
    };
    let moved = out[(a.index(), from.index())] * rng.gen_range(0.2..0.8);
    out[(a.index(), from.index())] -= moved;
    out[(a.index(), to.index())] += moved;
    out
}

/// A specialization in Σ₀ for `m0`: every row `A` is a mass function on the
/// subsets of `A` whose plausibility is dominated by that of `m0`.
///
/// Each row first tries a few unconstrained draws and keeps one that is
/// dominated; otherwise it specializes `m0` conditioned on `A` further with a
/// random specialization, which is dominated by construction.
pub fn random_sigma_zero<R: Rng>(m0: &MassFunction, rng: &mut R) -> SpecializationMatrix {
    let frame = m0.frame();
    let k = frame.size();
    let pl0 = m0.pl();
    let mut s = Matrix::zeros(k, k);
    for a in frame.subsets() {
        let mut row = None;
        for _ in 0..8 {
            let cand = distribution_over(k, a, rng.gen_range(0.0..0.9), rng);
            let m = MassFunction::trusted(LatticeVector::new(frame.clone(), cand.clone()).expect("len"));
            let pl = m.pl();
            if pl.values().iter().zip(pl0.values()).all(|(x, y)| *x <= *y) {
                row = Some(cand);
                break;
            }
        }
        let row = row.unwrap_or_else(|| {
            let conditioned = transfer(m0.values(), |x| x.intersection(a));
            let r = random_specialization(frame, rng);
            let m = MassFunction::trusted(LatticeVector::new(frame.clone(), conditioned).expect("len"));
            crate::specialization::apply(&m, &r).expect("same frame").values().to_vec()
        });
        for (b, v) in row.into_iter().enumerate() {
            s[(a.index(), b)] = v;
        }
    }
    SpecializationMatrix::new(frame, s).expect("rows are distributions over subsets")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specialization::is_valid_specialization;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn samplers_produce_valid_objects() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..=4 {
            let f = Frame::of_size(n).unwrap();
            for _ in 0..50 {
                let m = random_mass(&f, &mut rng);
                assert!((m.masses().sum() - 1.0).abs() < 1e-12);
                assert_eq!(random_normalized_mass(&f, &mut rng).conflict(), 0.0);
                let inv = random_invertible_mass(&f, 0.05, &mut rng);
                assert!(inv.q().values().iter().all(|&q| q > 0.05));
                let s = random_specialization(&f, &mut rng);
                assert!(is_valid_specialization(&f, s.matrix()));
                match random_non_dempsterian(&f, &mut rng) {
                    Some(s) => assert!(!s.is_dempsterian()),
                    None => assert_eq!(n, 1),
                }
            }
        }
    }

    #[test]
    fn sigma_zero_rows_are_dominated() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = Frame::of_size(3).unwrap();
        for _ in 0..50 {
            let m0 = random_mass(&f, &mut rng);
            let s = random_sigma_zero(&m0, &mut rng);
            let pl0 = m0.pl();
            for a in f.subsets() {
                let pl = s.row_mass(a).pl();
                for (x, y) in pl.values().iter().zip(pl0.values()) {
                    assert!(*x <= y + 1e-12);
                }
            }
        }
    }
}
