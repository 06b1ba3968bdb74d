//! Hand-checked instances on small frames, through the public API only.

use tbm_core::belief::least_committed_from_disjoint_constraints;
use tbm_core::dynamics::{combine_conjunctive, combine_normalized, condition, retract};
use tbm_core::specialization::{dempsterian_matrix, despecialize_matrix, eigen_structure};
use tbm_core::verify::{run_all, RunConfig};
use tbm_core::{BeliefError, Frame, MassFunction};

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

#[test]
fn least_committed_completion() {
    let f = Frame::new(&["a", "b", "c"]).unwrap();
    let m = least_committed_from_disjoint_constraints(
        &f,
        &[(f.parse_key("a").unwrap(), 0.3), (f.parse_key("b|c").unwrap(), 0.5)],
    )
    .unwrap();
    assert!(close(m.values(), &[0.0, 0.3, 0.0, 0.0, 0.0, 0.0, 0.5, 0.2], 1e-12));
    let bel = m.bel();
    assert!((bel.get(f.parse_key("a").unwrap()) - 0.3).abs() < 1e-12);
    assert!((bel.get(f.parse_key("b|c").unwrap()) - 0.5).abs() < 1e-12);
}

#[test]
fn two_element_pipeline() {
    let f = Frame::new(&["a", "b"]).unwrap();
    let m0 = MassFunction::new(&f, vec![0.0, 0.5, 0.0, 0.5]).unwrap();
    let m1 = MassFunction::new(&f, vec![0.0, 0.0, 0.4, 0.6]).unwrap();

    let both = combine_conjunctive(&m0, &m1).unwrap();
    assert!(close(both.values(), &[0.2, 0.3, 0.2, 0.3], 1e-12));
    assert!(close(both.q().values(), &[1.0, 0.6, 0.5, 0.3], 1e-12));
    let norm = combine_normalized(&m0, &m1).unwrap();
    assert!(close(norm.values(), &[0.0, 0.375, 0.25, 0.375], 1e-12));

    let back = retract(&both, &m1).unwrap();
    assert!(close(back.values(), m0.values(), 1e-12));

    let s1 = dempsterian_matrix(&m1).unwrap();
    let e = eigen_structure(&s1).unwrap();
    assert!(close(e.eigenvalues.as_slice(), &[1.0, 0.6, 1.0, 0.6], 1e-12));
    let d1 = despecialize_matrix(&s1).unwrap();
    let prod = s1.matrix() * d1.matrix();
    assert!((prod - tbm_core::Matrix::identity(4, 4)).abs().max() < 1e-12);

    let c = condition(&m1, f.parse_key("a").unwrap()).unwrap();
    assert!(close(c.values(), &[0.4, 0.6, 0.0, 0.0], 1e-12));
}

#[test]
fn retraction_preconditions() {
    let f = Frame::of_size(2).unwrap();
    let m = MassFunction::new(&f, vec![0.2, 0.3, 0.2, 0.3]).unwrap();
    let no_top = MassFunction::new(&f, vec![0.0, 0.5, 0.5, 0.0]).unwrap();
    let err = retract(&m, &no_top).unwrap_err();
    assert!(matches!(err, BeliefError::NonInvertibleEvidence { .. }));
    assert_eq!(err.to_string(), "non-invertible evidence: q(Ω)=0");

    let vac = MassFunction::new(&f, vec![0.0, 0.0, 0.0, 1.0]).unwrap();
    let m1 = MassFunction::new(&f, vec![0.0, 0.0, 0.4, 0.6]).unwrap();
    assert!(matches!(retract(&vac, &m1), Err(BeliefError::EvidenceNotContained { .. })));
}

#[test]
fn suite_passes_with_small_budget() {
    let cfg = RunConfig { samples: Some(25), seed: 11, ..RunConfig::default() };
    let reports = run_all(&cfg).unwrap();
    assert!(reports.iter().all(|r| r.passed()));
}
