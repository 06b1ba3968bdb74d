//! Specialization and generalization matrices.
//!
//! Mass functions are row vectors acted on from the right: `m' = m·S`, so
//! `s(A, B)` is the share of `m(A)` that flows to `B`. Rows and columns are
//! indexed by [`SubsetIndex`] bitmasks. A specialization only moves mass to
//! subsets (`s(A, B) = 0` unless `B ⊆ A`), a generalization only to
//! supersets.
//!
//! Matrix deviations are reported as the largest absolute entry of the
//! difference.

use nalgebra::{DMatrix, RowDVector};

use crate::belief::{q_from_mass, MassFunction};
use crate::dynamics::transfer;
use crate::error::{BeliefError, Result};
use crate::lattice::{mobius_supersets_in_place, Frame, LatticeVector, SubsetIndex};
use crate::DEFAULT_TOLERANCE;

pub type Matrix = DMatrix<f64>;

/// Largest absolute entry.
pub fn max_abs(m: &Matrix) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

fn check_shape(frame: &Frame, s: &Matrix) -> Result<()> {
    frame.check_matrix_cap()?;
    let k = frame.size();
    if s.nrows() != k || s.ncols() != k {
        return Err(BeliefError::InvalidMatrix(format!(
            "expected {k}x{k}, got {}x{}",
            s.nrows(),
            s.ncols()
        )));
    }
    Ok(())
}

/// Entries in `[0, 1]`, rows summing to 1, support where `allowed(row, col)`.
fn stochastic_violation(
    frame: &Frame,
    s: &Matrix,
    tol: f64,
    allowed: impl Fn(SubsetIndex, SubsetIndex) -> bool,
) -> Option<String> {
    if let Err(e) = check_shape(frame, s) {
        return Some(e.to_string());
    }
    for a in frame.subsets() {
        let mut total = 0.0;
        for b in frame.subsets() {
            let v = s[(a.index(), b.index())];
            if !v.is_finite() || v < -tol || v > 1.0 + tol {
                return Some(format!(
                    "entry ({}, {}) = {v} outside [0, 1]",
                    frame.display(a),
                    frame.display(b)
                ));
            }
            if !allowed(a, b) && v.abs() > tol {
                return Some(format!(
                    "entry ({}, {}) = {v} outside the allowed support",
                    frame.display(a),
                    frame.display(b)
                ));
            }
            total += v;
        }
        if (total - 1.0).abs() > tol {
            return Some(format!("row {} sums to {total}", frame.display(a)));
        }
    }
    None
}

/// Row-stochastic with `s(A, B) = 0` unless `B ⊆ A`.
pub fn is_valid_specialization(frame: &Frame, s: &Matrix) -> bool {
    stochastic_violation(frame, s, DEFAULT_TOLERANCE, |a, b| b.is_subset_of(a)).is_none()
}

/// Valid specialization whose rows satisfy
/// `s(A, B) = Σ_{X⊆Ā} s(Ω, B∪X)` for `B ⊆ A`, i.e. row `A` is row `Ω`
/// conditioned on `A`.
pub fn is_dempsterian(frame: &Frame, s: &Matrix) -> bool {
    is_valid_specialization(frame, s) && dempsterian_deviation(frame, s) <= DEFAULT_TOLERANCE
}

/// Largest gap between `s` and the Dempsterian matrix generated by its row Ω.
fn dempsterian_deviation(frame: &Frame, s: &Matrix) -> f64 {
    let top = frame.full().index();
    let generator: Vec<f64> = s.row(top).iter().copied().collect();
    let mut worst: f64 = 0.0;
    for a in frame.subsets() {
        let expected = transfer(&generator, |x| x.intersection(a));
        for (b, e) in expected.iter().enumerate() {
            worst = worst.max((s[(a.index(), b)] - e).abs());
        }
    }
    worst
}

/// A valid specialization matrix on a frame.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecializationMatrix {
    frame: Frame,
    s: Matrix,
}

impl SpecializationMatrix {
    pub fn new(frame: &Frame, s: Matrix) -> Result<Self> {
        if let Some(why) =
            stochastic_violation(frame, &s, DEFAULT_TOLERANCE, |a, b| b.is_subset_of(a))
        {
            return Err(BeliefError::InvalidMatrix(why));
        }
        Ok(SpecializationMatrix {
            frame: frame.clone(),
            s,
        })
    }

    /// Identity: the specialization that changes nothing.
    pub fn identity(frame: &Frame) -> Result<Self> {
        frame.check_matrix_cap()?;
        Ok(SpecializationMatrix {
            frame: frame.clone(),
            s: Matrix::identity(frame.size(), frame.size()),
        })
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn matrix(&self) -> &Matrix {
        &self.s
    }

    pub fn into_matrix(self) -> Matrix {
        self.s
    }

    pub fn get(&self, a: SubsetIndex, b: SubsetIndex) -> f64 {
        self.s[(a.index(), b.index())]
    }

    /// Row `A` as a mass function: where a unit mass on `A` ends up.
    pub fn row_mass(&self, a: SubsetIndex) -> MassFunction {
        let values: Vec<f64> = self.s.row(a.index()).iter().copied().collect();
        MassFunction::trusted(LatticeVector::new(self.frame.clone(), values).expect("row length"))
    }

    pub fn is_dempsterian(&self) -> bool {
        is_dempsterian(&self.frame, &self.s)
    }

    /// Product `self·other`: apply `self` first, then `other`.
    pub fn then(&self, other: &SpecializationMatrix) -> Result<SpecializationMatrix> {
        self.frame.ensure_same(&other.frame)?;
        Ok(SpecializationMatrix {
            frame: self.frame.clone(),
            s: &self.s * &other.s,
        })
    }
}

fn row_times(frame: &Frame, m: &[f64], s: &Matrix) -> LatticeVector {
    let row = RowDVector::from_row_slice(m) * s;
    LatticeVector::new(frame.clone(), row.iter().copied().collect()).expect("row length")
}

/// `m0·S`.
pub fn apply(m0: &MassFunction, s: &SpecializationMatrix) -> Result<MassFunction> {
    m0.frame().ensure_same(&s.frame)?;
    Ok(MassFunction::trusted(row_times(&s.frame, m0.values(), &s.s)))
}

/// `S_C`: each `A` sends its whole mass to `A ∩ C`.
pub fn conditioning_matrix(frame: &Frame, c: SubsetIndex) -> Result<SpecializationMatrix> {
    frame.check(c)?;
    frame.check_matrix_cap()?;
    let k = frame.size();
    let s = Matrix::from_fn(k, k, |a, b| {
        if b as u32 == a as u32 & c.bits() {
            1.0
        } else {
            0.0
        }
    });
    Ok(SpecializationMatrix {
        frame: frame.clone(),
        s,
    })
}

/// `S_m`: row `A` is `m` conditioned on `A`, so `m'·S_m` is the conjunctive
/// combination of `m'` and `m`.
pub fn dempsterian_matrix(m: &MassFunction) -> Result<SpecializationMatrix> {
    let frame = m.frame();
    frame.check_matrix_cap()?;
    let k = frame.size();
    let mut s = Matrix::zeros(k, k);
    for a in frame.subsets() {
        let row = transfer(m.values(), |x| x.intersection(a));
        for (b, v) in row.into_iter().enumerate() {
            s[(a.index(), b)] = v;
        }
    }
    Ok(SpecializationMatrix {
        frame: frame.clone(),
        s,
    })
}

/// Whether `S1·S2 = S2·S1`, with the largest absolute deviation.
pub fn commute_check(
    s1: &SpecializationMatrix,
    s2: &SpecializationMatrix,
) -> Result<(bool, f64)> {
    s1.frame.ensure_same(&s2.frame)?;
    let dev = max_abs(&(&s1.s * &s2.s - &s2.s * &s1.s));
    Ok((dev <= DEFAULT_TOLERANCE, dev))
}

pub fn idempotence_deviation(s: &SpecializationMatrix) -> f64 {
    max_abs(&(&s.s * &s.s - &s.s))
}

pub fn idempotence_check(s: &SpecializationMatrix) -> bool {
    idempotence_deviation(s) <= DEFAULT_TOLERANCE
}

/// The subset-incidence matrix `T` (`t(A, B) = 1` iff `B ⊆ A`) and its
/// inverse, whose entries are the Möbius coefficients `(-1)^{|A|-|B|}`.
///
/// `m·T` is the commonality function of `m`.
pub fn transform_matrix_t(frame: &Frame) -> Result<(Matrix, Matrix)> {
    frame.check_matrix_cap()?;
    let k = frame.size();
    let t = Matrix::from_fn(k, k, |a, b| if b & !a == 0 { 1.0 } else { 0.0 });
    let t_inv = Matrix::from_fn(k, k, |a, b| {
        if b & !a != 0 {
            0.0
        } else if (a.count_ones() - b.count_ones()) % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    });
    Ok((t, t_inv))
}

/// Eigendecomposition `S_m = T·Λ·T⁻¹` of a Dempsterian matrix, with the
/// residuals measured on the actual matrices.
#[derive(Debug, Clone)]
pub struct EigenStructure {
    pub t: Matrix,
    /// Diagonal of `Λ`: the commonality function of the generating mass.
    pub eigenvalues: Vec<f64>,
    pub t_inv: Matrix,
    /// `max |s(A, A) - q(A)|`.
    pub diagonal_deviation: f64,
    /// `max |S_m - T·Λ·T⁻¹|`.
    pub reconstruction_error: f64,
    /// Worst `|t·S_m - q(A)·t|` over rows `t` of `T⁻¹`.
    pub eigenvector_residual: f64,
}

impl EigenStructure {
    pub fn lambda(&self) -> Matrix {
        Matrix::from_diagonal(&nalgebra::DVector::from_column_slice(&self.eigenvalues))
    }
}

/// Generating mass function of a Dempsterian matrix (its row Ω).
fn generator(s: &SpecializationMatrix) -> Result<MassFunction> {
    if !s.is_dempsterian() {
        return Err(BeliefError::NotDempsterian(format!(
            "rows deviate from the conditioned row Ω by {:e}",
            dempsterian_deviation(&s.frame, &s.s)
        )));
    }
    Ok(s.row_mass(s.frame.full()))
}

pub fn eigen_structure(s: &SpecializationMatrix) -> Result<EigenStructure> {
    let m = generator(s)?;
    let q = q_from_mass(&m).values().to_vec();
    let (t, t_inv) = transform_matrix_t(&s.frame)?;
    let lambda = Matrix::from_diagonal(&nalgebra::DVector::from_column_slice(&q));

    let diagonal_deviation = s
        .s
        .diagonal()
        .iter()
        .zip(&q)
        .map(|(d, q)| (d - q).abs())
        .fold(0.0, f64::max);
    let reconstruction_error = max_abs(&(&s.s - &t * &lambda * &t_inv));
    // rows of T⁻¹ S_m - Λ T⁻¹
    let eigenvector_residual = max_abs(&(&t_inv * &s.s - &lambda * &t_inv));

    Ok(EigenStructure {
        t,
        eigenvalues: q,
        t_inv,
        diagonal_deviation,
        reconstruction_error,
        eigenvector_residual,
    })
}

/// Inverse of a Dempsterian specialization. Entries may be negative, so it
/// only maps some mass functions to mass functions.
#[derive(Debug, Clone, PartialEq)]
pub struct DespecializationMatrix {
    frame: Frame,
    d: Matrix,
}

impl DespecializationMatrix {
    pub fn identity(frame: &Frame) -> Result<Self> {
        frame.check_matrix_cap()?;
        Ok(DespecializationMatrix {
            frame: frame.clone(),
            d: Matrix::identity(frame.size(), frame.size()),
        })
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn matrix(&self) -> &Matrix {
        &self.d
    }
}

/// `D = T·Λ⁻¹·T⁻¹` for a Dempsterian `S_m` whose commonalities are all nonzero.
pub fn despecialize_matrix(s: &SpecializationMatrix) -> Result<DespecializationMatrix> {
    let m = generator(s)?;
    let frame = s.frame.clone();
    let q = q_from_mass(&m).values().to_vec();
    // q is antitone, so q(Ω) is the first to vanish
    let order = std::iter::once(frame.full()).chain(frame.subsets());
    for a in order {
        let v = q[a.index()];
        if v.abs() <= DEFAULT_TOLERANCE {
            return Err(BeliefError::SingularSpecialization {
                subset: frame.display(a),
                value: v,
            });
        }
    }
    // Row A of T·Λ⁻¹·T⁻¹ is the Möbius (superset) inverse of 1/q restricted to subsets of A.
    let k = frame.size();
    let mut d = Matrix::zeros(k, k);
    for a in frame.subsets() {
        let mut row: Vec<f64> = (0..k)
            .map(|c| if c as u32 & !a.bits() == 0 { 1.0 / q[c] } else { 0.0 })
            .collect();
        mobius_supersets_in_place(&mut row);
        for (b, v) in row.into_iter().enumerate() {
            d[(a.index(), b)] = v;
        }
    }
    Ok(DespecializationMatrix { frame, d })
}

/// `m·D`, accepted only when the result is a mass function. Masses in
/// `[-tol, 0)` are clamped to zero.
pub fn apply_despecialization(
    m: &MassFunction,
    d: &DespecializationMatrix,
) -> Result<MassFunction> {
    m.frame().ensure_same(&d.frame)?;
    let out = row_times(&d.frame, m.values(), &d.d);
    MassFunction::from_inversion(out, DEFAULT_TOLERANCE, |subset, value| {
        BeliefError::NotRetractable { subset, value }
    })
}

/// Row-stochastic with `g(A, B) = 0` unless `A ⊆ B`.
pub fn is_valid_generalization(frame: &Frame, g: &Matrix) -> bool {
    stochastic_violation(frame, g, DEFAULT_TOLERANCE, |a, b| a.is_subset_of(b)).is_none()
}

/// A valid generalization matrix on a frame.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizationMatrix {
    frame: Frame,
    g: Matrix,
}

impl GeneralizationMatrix {
    pub fn new(frame: &Frame, g: Matrix) -> Result<Self> {
        if let Some(why) =
            stochastic_violation(frame, &g, DEFAULT_TOLERANCE, |a, b| a.is_subset_of(b))
        {
            return Err(BeliefError::InvalidMatrix(why));
        }
        Ok(GeneralizationMatrix {
            frame: frame.clone(),
            g,
        })
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn matrix(&self) -> &Matrix {
        &self.g
    }
}

pub fn apply_generalization(m: &MassFunction, g: &GeneralizationMatrix) -> Result<MassFunction> {
    m.frame().ensure_same(&g.frame)?;
    Ok(MassFunction::trusted(row_times(&g.frame, m.values(), &g.g)))
}

/// Enlargement on `A`: each `X` sends its mass to `X ∪ A`.
pub fn enlargement_matrix(frame: &Frame, a: SubsetIndex) -> Result<GeneralizationMatrix> {
    frame.check(a)?;
    frame.check_matrix_cap()?;
    let k = frame.size();
    let g = Matrix::from_fn(k, k, |x, b| {
        if b as u32 == x as u32 | a.bits() {
            1.0
        } else {
            0.0
        }
    });
    Ok(GeneralizationMatrix {
        frame: frame.clone(),
        g,
    })
}

/// `g_m(A, B) = Σ_{X: A∪X=B} m(X)`; applying it is disjunctive combination with `m`.
pub fn disjunctive_matrix(m: &MassFunction) -> Result<GeneralizationMatrix> {
    let frame = m.frame();
    frame.check_matrix_cap()?;
    let k = frame.size();
    let mut g = Matrix::zeros(k, k);
    for a in frame.subsets() {
        let row = transfer(m.values(), |x| x.union(a));
        for (b, v) in row.into_iter().enumerate() {
            g[(a.index(), b)] = v;
        }
    }
    Ok(GeneralizationMatrix {
        frame: frame.clone(),
        g,
    })
}
