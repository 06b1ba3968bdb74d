//! Basic belief assignments and their four equivalent set-function forms.
//!
//! Masses are unnormalized: `m(∅)` may be positive. All four forms are
//! reachable from a [`MassFunction`] by a single zeta transform and back by
//! the matching Möbius inversion:
//!
//! | kind | definition                     | transform             |
//! |------|--------------------------------|-----------------------|
//! | bel  | `Σ_{∅≠X⊆A} m(X)`               | subset sum minus m(∅) |
//! | pl   | `Σ_{X∩A≠∅} m(X)`               | `1 - b(Ā)`            |
//! | q    | `Σ_{B⊇A} m(B)`                 | superset sum          |
//! | b    | `Σ_{X⊆A} m(X) = bel(A) + m(∅)` | subset sum            |

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{BeliefError, Result};
use crate::lattice::{
    mobius_subsets_in_place, mobius_supersets_in_place, zeta_subsets_in_place,
    zeta_supersets_in_place, Frame, LatticeVector, SubsetIndex,
};
use crate::DEFAULT_TOLERANCE;

/// A basic belief assignment on a frame.
#[derive(Debug, Clone, PartialEq)]
pub struct MassFunction {
    masses: LatticeVector,
}

impl MassFunction {
    /// Validates nonnegativity and unit total mass at the default tolerance.
    pub fn new(frame: &Frame, masses: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(frame, masses, DEFAULT_TOLERANCE)
    }

    pub fn with_tolerance(frame: &Frame, masses: Vec<f64>, tol: f64) -> Result<Self> {
        let masses = LatticeVector::new(frame.clone(), masses)?;
        validate(&masses, tol)?;
        Ok(MassFunction { masses })
    }

    pub fn from_lattice(masses: LatticeVector) -> Result<Self> {
        validate(&masses, DEFAULT_TOLERANCE)?;
        Ok(MassFunction { masses })
    }

    /// Builds a mass function from `(subset, mass)` pairs; unlisted subsets get 0.
    pub fn from_focal(frame: &Frame, focal: &[(SubsetIndex, f64)]) -> Result<Self> {
        let mut values = vec![0.0; frame.size()];
        for &(a, v) in focal {
            frame.check(a)?;
            values[a.index()] += v;
        }
        Self::new(frame, values)
    }

    /// All mass on `a`.
    pub fn categorical(frame: &Frame, a: SubsetIndex) -> Result<Self> {
        Ok(MassFunction {
            masses: LatticeVector::indicator(frame, a)?,
        })
    }

    /// Result of an operation known to preserve validity.
    pub(crate) fn trusted(masses: LatticeVector) -> Self {
        MassFunction { masses }
    }

    /// Result of an inversion: small negatives are clamped, larger ones rejected.
    pub(crate) fn from_inversion(
        masses: LatticeVector,
        tol: f64,
        on_negative: impl Fn(String, f64) -> BeliefError,
    ) -> Result<Self> {
        let frame = masses.frame().clone();
        let mut values = masses.into_values();
        for (i, v) in values.iter_mut().enumerate() {
            if *v < -tol {
                return Err(on_negative(frame.display(SubsetIndex(i as u32)), *v));
            }
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        let masses = LatticeVector::new(frame, values)?;
        validate(&masses, tol)?;
        Ok(MassFunction { masses })
    }

    pub fn frame(&self) -> &Frame {
        self.masses.frame()
    }

    pub fn get(&self, a: SubsetIndex) -> f64 {
        self.masses.get(a)
    }

    pub fn masses(&self) -> &LatticeVector {
        &self.masses
    }

    pub fn values(&self) -> &[f64] {
        self.masses.values()
    }

    /// Mass on the empty set.
    pub fn conflict(&self) -> f64 {
        self.masses.values()[0]
    }

    /// Subsets with positive mass.
    pub fn focal_sets(&self) -> impl Iterator<Item = (SubsetIndex, f64)> + '_ {
        self.values()
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > 0.0)
            .map(|(i, &v)| (SubsetIndex(i as u32), v))
    }

    pub fn max_abs_diff(&self, other: &MassFunction) -> f64 {
        self.masses.max_abs_diff(&other.masses)
    }

    pub fn bel(&self) -> ValueFunction {
        bel_from_mass(self)
    }

    pub fn pl(&self) -> ValueFunction {
        pl_from_mass(self)
    }

    pub fn q(&self) -> ValueFunction {
        q_from_mass(self)
    }

    pub fn b(&self) -> ValueFunction {
        b_from_mass(self)
    }
}

fn validate(masses: &LatticeVector, tol: f64) -> Result<()> {
    let frame = masses.frame();
    for (i, &v) in masses.values().iter().enumerate() {
        if !v.is_finite() {
            return Err(BeliefError::NotABeliefFunction(format!(
                "m({}) is not finite",
                frame.display(SubsetIndex(i as u32))
            )));
        }
        if v < -tol {
            return Err(BeliefError::NotABeliefFunction(format!(
                "m({}) = {v} is negative",
                frame.display(SubsetIndex(i as u32))
            )));
        }
    }
    let total = masses.sum();
    if (total - 1.0).abs() > tol {
        return Err(BeliefError::NotABeliefFunction(format!(
            "masses sum to {total}, not 1"
        )));
    }
    Ok(())
}

/// Which of the four set functions a [`ValueFunction`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Bel,
    Pl,
    Q,
    B,
}

impl Kind {
    pub const ALL: [Kind; 4] = [Kind::Bel, Kind::Pl, Kind::Q, Kind::B];

    pub fn name(self) -> &'static str {
        match self {
            Kind::Bel => "bel",
            Kind::Pl => "pl",
            Kind::Q => "q",
            Kind::B => "b",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One of bel, pl, q or b, as a tagged vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueFunction {
    kind: Kind,
    values: LatticeVector,
}

impl ValueFunction {
    /// Wraps raw values; validity is checked when converting back to masses.
    pub fn new(kind: Kind, values: LatticeVector) -> Self {
        ValueFunction { kind, values }
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn frame(&self) -> &Frame {
        self.values.frame()
    }

    pub fn get(&self, a: SubsetIndex) -> f64 {
        self.values.get(a)
    }

    pub fn values(&self) -> &[f64] {
        self.values.values()
    }

    pub fn lattice(&self) -> &LatticeVector {
        &self.values
    }

    fn expect_kind(&self, kind: Kind) -> Result<()> {
        if self.kind == kind {
            Ok(())
        } else {
            Err(BeliefError::WrongKind {
                expected: kind.to_string(),
                got: self.kind.to_string(),
            })
        }
    }
}

fn with_values(m: &MassFunction, f: impl FnOnce(&mut Vec<f64>)) -> LatticeVector {
    let mut values = m.values().to_vec();
    f(&mut values);
    LatticeVector::new(m.frame().clone(), values).expect("length preserved")
}

pub fn bel_from_mass(m: &MassFunction) -> ValueFunction {
    let empty = m.conflict();
    let values = with_values(m, |v| {
        zeta_subsets_in_place(v);
        v.iter_mut().for_each(|x| *x -= empty);
        v[0] = 0.0;
    });
    ValueFunction::new(Kind::Bel, values)
}

/// Implicability `b(A) = Σ_{X⊆A} m(X)`.
pub fn b_from_mass(m: &MassFunction) -> ValueFunction {
    ValueFunction::new(Kind::B, with_values(m, |v| zeta_subsets_in_place(v)))
}

pub fn pl_from_mass(m: &MassFunction) -> ValueFunction {
    let total = m.masses().sum();
    let full = m.frame().full().index();
    let values = with_values(m, |v| {
        zeta_subsets_in_place(v);
        let b = v.clone();
        for (a, x) in v.iter_mut().enumerate() {
            *x = total - b[full ^ a];
        }
        v[0] = 0.0;
    });
    ValueFunction::new(Kind::Pl, values)
}

/// `pl(A) = bel(Ω) - bel(Ā)`.
pub fn pl_from_bel(bel: &ValueFunction) -> Result<ValueFunction> {
    bel.expect_kind(Kind::Bel)?;
    let frame = bel.frame();
    let top = bel.get(frame.full());
    let values = frame
        .subsets()
        .map(|a| top - bel.get(frame.complement(a)))
        .collect();
    Ok(ValueFunction::new(
        Kind::Pl,
        LatticeVector::new(frame.clone(), values)?,
    ))
}

pub fn q_from_mass(m: &MassFunction) -> ValueFunction {
    ValueFunction::new(Kind::Q, with_values(m, |v| zeta_supersets_in_place(v)))
}

/// Recovers the mass function behind any of the four representations.
///
/// Total mass is taken to be 1, which fixes `m(∅) = 1 - bel(Ω)` for bel
/// and `b(A) = 1 - pl(Ā)` for pl.
pub fn mass_from(v: &ValueFunction) -> Result<MassFunction> {
    mass_from_with_tolerance(v, DEFAULT_TOLERANCE)
}

pub fn mass_from_with_tolerance(v: &ValueFunction, tol: f64) -> Result<MassFunction> {
    let frame = v.frame().clone();
    let mut values = v.values().to_vec();
    match v.kind {
        Kind::Q => mobius_supersets_in_place(&mut values),
        Kind::B => mobius_subsets_in_place(&mut values),
        Kind::Bel => {
            let empty = 1.0 - values[frame.full().index()];
            values.iter_mut().for_each(|x| *x += empty);
            mobius_subsets_in_place(&mut values);
        }
        Kind::Pl => {
            let full = frame.full().index();
            let pl = values.clone();
            for (a, x) in values.iter_mut().enumerate() {
                *x = 1.0 - pl[full ^ a];
            }
            mobius_subsets_in_place(&mut values);
        }
    }
    MassFunction::from_inversion(LatticeVector::new(frame, values)?, tol, |subset, value| {
        BeliefError::NotABeliefFunction(format!("inversion gives m({subset}) = {value}"))
    })
}

/// Total ignorance: `m(Ω) = 1`.
pub fn vacuous(frame: &Frame) -> MassFunction {
    MassFunction::categorical(frame, frame.full()).expect("Ω is in range")
}

/// Closed-world rescaling: drops `m(∅)` and rescales the rest by `1/(1 - m(∅))`.
pub fn normalize(m: &MassFunction) -> Result<MassFunction> {
    let conflict = m.conflict();
    let keep = 1.0 - conflict;
    if keep <= DEFAULT_TOLERANCE {
        return Err(BeliefError::NormalizationUndefined { conflict });
    }
    let values = with_values(m, |v| {
        v.iter_mut().for_each(|x| *x /= keep);
        v[0] = 0.0;
    });
    Ok(MassFunction::trusted(values))
}

/// Least committed mass function meeting lower bounds `bel(A_i) ≥ v_i` on
/// pairwise disjoint sets: each `v_i` goes to `A_i` and the rest to Ω.
pub fn least_committed_from_disjoint_constraints(
    frame: &Frame,
    constraints: &[(SubsetIndex, f64)],
) -> Result<MassFunction> {
    let mut seen = SubsetIndex::EMPTY;
    let mut total = 0.0;
    for &(a, v) in constraints {
        frame.check(a)?;
        if a.is_empty() {
            return Err(BeliefError::InfeasibleConstraints(
                "constraint on the empty set".into(),
            ));
        }
        if v.is_nan() || v < 0.0 {
            return Err(BeliefError::InfeasibleConstraints(format!(
                "bel({}) = {v} is negative",
                frame.display(a)
            )));
        }
        if seen.intersects(a) {
            return Err(BeliefError::InfeasibleConstraints(format!(
                "{} overlaps an earlier constraint set",
                frame.display(a)
            )));
        }
        seen = seen.union(a);
        total += v;
    }
    if total > 1.0 + DEFAULT_TOLERANCE {
        return Err(BeliefError::InfeasibleConstraints(format!(
            "constraint values sum to {total} > 1"
        )));
    }
    let mut values = vec![0.0; frame.size()];
    for &(a, v) in constraints {
        values[a.index()] += v;
    }
    values[frame.full().index()] += (1.0 - total).max(0.0);
    MassFunction::new(frame, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn abc() -> Frame {
        Frame::new(&["a", "b", "c"]).unwrap()
    }

    fn key(f: &Frame, k: &str) -> SubsetIndex {
        f.parse_key(k).unwrap()
    }

    fn worked_example(f: &Frame) -> MassFunction {
        MassFunction::from_focal(
            f,
            &[(key(f, "a"), 0.3), (key(f, "b|c"), 0.5), (f.full(), 0.2)],
        )
        .unwrap()
    }

    fn random_mass(frame: &Frame, rng: &mut ChaCha8Rng) -> MassFunction {
        let mut v: Vec<f64> = (0..frame.size())
            .map(|_| if rng.gen_bool(0.4) { 0.0 } else { rng.gen::<f64>() })
            .collect();
        v[frame.full().index()] += 1e-3;
        let s: f64 = v.iter().sum();
        v.iter_mut().for_each(|x| *x /= s);
        MassFunction::new(frame, v).unwrap()
    }

    // Σ_{X∩A≠∅} m(X), literally.
    fn pl_oracle(m: &MassFunction, a: SubsetIndex) -> f64 {
        m.frame()
            .subsets()
            .filter(|x| x.intersects(a))
            .map(|x| m.get(x))
            .sum()
    }

    #[test]
    fn validation_rejects_bad_masses() {
        let f = Frame::of_size(2).unwrap();
        assert!(MassFunction::new(&f, vec![0.0, 0.5, 0.6, -0.1]).is_err());
        assert!(MassFunction::new(&f, vec![0.0, 0.5, 0.6, 0.0]).is_err());
        assert!(MassFunction::new(&f, vec![0.0, 0.5, 0.5]).is_err());
        assert!(MassFunction::new(&f, vec![0.2, 0.3, 0.3, 0.2]).is_ok());
        assert!(MassFunction::new(&f, vec![0.0, 0.5, 0.5 + 5e-10, 0.0]).is_ok());
    }

    #[test]
    fn bel_of_vacuous() {
        let f = abc();
        let bel = vacuous(&f).bel();
        for a in f.subsets() {
            assert_eq!(bel.get(a), if a == f.full() { 1.0 } else { 0.0 });
        }
    }

    #[test]
    fn bel_of_worked_example() {
        let f = abc();
        let bel = worked_example(&f).bel();
        assert!((bel.get(key(&f, "a")) - 0.3).abs() < 1e-12);
        assert!((bel.get(key(&f, "b|c")) - 0.5).abs() < 1e-12);
        assert!((bel.get(f.full()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bel_ignores_empty_mass() {
        let f = abc();
        let m = MassFunction::from_focal(&f, &[(f.empty(), 0.2), (f.full(), 0.8)]).unwrap();
        let bel = m.bel();
        for a in f.subsets() {
            let want = if a == f.full() { 0.8 } else { 0.0 };
            assert!((bel.get(a) - want).abs() < 1e-12);
        }
    }

    #[test]
    fn pl_examples() {
        let f = abc();
        let pl = vacuous(&f).pl();
        for a in f.subsets() {
            assert_eq!(pl.get(a), if a.is_empty() { 0.0 } else { 1.0 });
        }
        let m = worked_example(&f);
        let pl = m.pl();
        let a = key(&f, "a");
        assert!((pl.get(a) - pl_oracle(&m, a)).abs() < 1e-12);
        assert!((pl.get(a) - 0.5).abs() < 1e-12);

        let m = MassFunction::from_focal(&f, &[(f.empty(), 0.25), (key(&f, "b"), 0.75)]).unwrap();
        assert!((m.pl().get(f.full()) - 0.75).abs() < 1e-12);
    }

    #[test]
    fn pl_routes_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=6 {
            let f = Frame::of_size(n).unwrap();
            for _ in 0..40 {
                let m = random_mass(&f, &mut rng);
                let direct = m.pl();
                let via_bel = pl_from_bel(&m.bel()).unwrap();
                assert!(direct.lattice().max_abs_diff(via_bel.lattice()) < 1e-12);
                for a in f.subsets() {
                    assert!((direct.get(a) - pl_oracle(&m, a)).abs() < 1e-12);
                }
            }
        }
        assert!(matches!(
            pl_from_bel(&vacuous(&abc()).q()),
            Err(BeliefError::WrongKind { .. })
        ));
    }

    #[test]
    fn q_examples() {
        let f = Frame::new(&["a", "b"]).unwrap();
        assert!(vacuous(&f).q().values().iter().all(|&x| x == 1.0));
        let m1 = MassFunction::from_focal(&f, &[(key(&f, "b"), 0.4), (f.full(), 0.6)]).unwrap();
        let q = m1.q();
        let want = [1.0, 0.6, 1.0, 0.6];
        for (got, want) in q.values().iter().zip(want) {
            assert!((got - want).abs() < 1e-12);
        }
        let q = MassFunction::categorical(&f, f.empty()).unwrap().q();
        assert_eq!(q.values(), &[1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn mass_from_each_kind() {
        let f = abc();
        let q = ValueFunction::new(Kind::Q, LatticeVector::constant(&f, 1.0));
        assert_eq!(mass_from(&q).unwrap(), vacuous(&f));

        let m = worked_example(&f);
        let back = mass_from(&m.bel()).unwrap();
        assert!(back.max_abs_diff(&m) < 1e-12);
    }

    #[test]
    fn mass_from_rejects_non_belief() {
        let f = Frame::of_size(2).unwrap();
        // q not antitone
        let q = ValueFunction::new(
            Kind::Q,
            LatticeVector::new(f.clone(), vec![1.0, 0.2, 0.2, 0.5]).unwrap(),
        );
        assert!(matches!(mass_from(&q), Err(BeliefError::NotABeliefFunction(_))));
    }

    #[test]
    fn round_trips_all_kinds() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in 1..=8 {
            let f = Frame::of_size(n).unwrap();
            for _ in 0..60 {
                let mut m = random_mass(&f, &mut rng);
                if rng.gen_bool(0.5) {
                    m = normalize(&m).unwrap();
                }
                for kind in Kind::ALL {
                    let v = match kind {
                        Kind::Bel => m.bel(),
                        Kind::Pl => m.pl(),
                        Kind::Q => m.q(),
                        Kind::B => m.b(),
                    };
                    assert!(mass_from(&v).unwrap().max_abs_diff(&m) < 1e-12, "{kind} n={n}");
                }
            }
        }
    }

    #[test]
    fn representation_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for n in 1..=6 {
            let f = Frame::of_size(n).unwrap();
            for _ in 0..30 {
                let m = random_mass(&f, &mut rng);
                let (bel, pl, q, b) = (m.bel(), m.pl(), m.q(), m.b());
                let top = bel.get(f.full());
                assert!((q.get(f.empty()) - 1.0).abs() < 1e-12);
                assert!((b.get(f.full()) - 1.0).abs() < 1e-12);
                for a in f.subsets() {
                    assert!((bel.get(a) + pl.get(f.complement(a)) - top).abs() < 1e-12);
                    assert!((b.get(a) - bel.get(a) - m.conflict()).abs() < 1e-12 || a.is_empty());
                    for s in f.subsets().filter(|s| a.is_subset_of(*s)) {
                        assert!(bel.get(a) <= bel.get(s) + 1e-12);
                        assert!(pl.get(a) <= pl.get(s) + 1e-12);
                        assert!(q.get(a) >= q.get(s) - 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn vacuous_on_single_element() {
        let f = Frame::of_size(1).unwrap();
        assert_eq!(vacuous(&f).values(), &[0.0, 1.0]);
    }

    #[test]
    fn normalize_cases() {
        let f = Frame::new(&["a", "b"]).unwrap();
        let m = worked_example(&abc());
        assert_eq!(normalize(&m).unwrap(), m);

        let m = MassFunction::new(&f, vec![0.2, 0.3, 0.2, 0.3]).unwrap();
        let n = normalize(&m).unwrap();
        let want = [0.0, 0.375, 0.25, 0.375];
        for (got, want) in n.values().iter().zip(want) {
            assert!((got - want).abs() < 1e-12);
        }

        let m = MassFunction::categorical(&f, f.empty()).unwrap();
        assert!(matches!(
            normalize(&m),
            Err(BeliefError::NormalizationUndefined { .. })
        ));
    }

    #[test]
    fn least_committed_examples() {
        let f = abc();
        let m = least_committed_from_disjoint_constraints(
            &f,
            &[(key(&f, "a"), 0.3), (key(&f, "b|c"), 0.5)],
        )
        .unwrap();
        assert!(m.max_abs_diff(&worked_example(&f)) < 1e-12);

        assert_eq!(least_committed_from_disjoint_constraints(&f, &[]).unwrap(), vacuous(&f));

        let f2 = Frame::new(&["a", "b"]).unwrap();
        let m = least_committed_from_disjoint_constraints(&f2, &[(key(&f2, "a"), 1.0)]).unwrap();
        assert_eq!(m, MassFunction::categorical(&f2, key(&f2, "a")).unwrap());
    }

    #[test]
    fn least_committed_rejects_infeasible() {
        let f = abc();
        let overlap = [(key(&f, "a|b"), 0.3), (key(&f, "b"), 0.2)];
        assert!(matches!(
            least_committed_from_disjoint_constraints(&f, &overlap),
            Err(BeliefError::InfeasibleConstraints(_))
        ));
        let too_much = [(key(&f, "a"), 0.7), (key(&f, "b"), 0.4)];
        assert!(least_committed_from_disjoint_constraints(&f, &too_much).is_err());
        assert!(least_committed_from_disjoint_constraints(&f, &[(f.empty(), 0.1)]).is_err());
        assert!(least_committed_from_disjoint_constraints(&f, &[(key(&f, "a"), -0.1)]).is_err());
    }
}
