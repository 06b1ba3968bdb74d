//! Executable checks of the structural theorems on sampled and enumerated
//! instances.
//!
//! Every check is a pure function of `(frame size, samples, seed)` and
//! returns a [`VerificationReport`]. A failing report carries a JSON witness
//! holding the offending instance.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::belief::{mass_from, MassFunction};
use crate::commitment::compare;
use crate::dynamics::{combine_conjunctive, combine_disjunctive, condition, enlarge, retract};
use crate::lattice::{Frame, SubsetIndex};
use crate::specialization::{
    apply, apply_generalization, commute_check, conditioning_matrix, dempsterian_matrix,
    disjunctive_matrix, eigen_structure, idempotence_deviation, max_abs, Matrix,
    SpecializationMatrix,
};

pub mod sample;

use sample::{
    random_invertible_mass, random_mass, random_non_dempsterian, random_normalized_mass,
    random_sigma_zero, random_specialization, random_specialization_with,
};

/// Outcome of one check on one frame size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub n: usize,
    pub instances: usize,
    pub violations: usize,
    /// Largest deviation seen, in the units of the check (absolute gap for
    /// identities, excess for inequalities).
    pub worst_deviation: f64,
    pub tolerance: f64,
    /// Extra per-check statistics.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub stats: BTreeMap<String, f64>,
    /// First violating instance, when there is one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

impl VerificationReport {
    fn new(check: &str, n: usize, tolerance: f64) -> Self {
        VerificationReport {
            check: check.to_string(),
            n,
            instances: 0,
            violations: 0,
            worst_deviation: 0.0,
            tolerance,
            stats: BTreeMap::new(),
            witness: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    /// Records one instance with deviation `dev` against `tol`; the witness
    /// is only built for the first violation.
    fn record(&mut self, dev: f64, tol: f64, witness: impl FnOnce() -> Value) {
        self.instances += 1;
        self.worst_deviation = self.worst_deviation.max(dev);
        if dev.is_nan() || dev > tol {
            self.violations += 1;
            if self.witness.is_none() {
                self.witness = Some(witness());
            }
        }
    }
}

fn matrix_json(s: &Matrix) -> Value {
    json!((0..s.nrows())
        .map(|i| s.row(i).iter().copied().collect::<Vec<f64>>())
        .collect::<Vec<_>>())
}

fn mass_json(m: &MassFunction) -> Value {
    json!(m.values())
}

/// FNV-1a, for stable per-check seeds.
fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

fn rng_for(check: &str, n: usize, seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ fnv1a(check) ^ (n as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn frame(n: usize) -> Frame {
    Frame::of_size(n).expect("frame size within caps")
}

fn random_subset<R: Rng>(f: &Frame, rng: &mut R) -> SubsetIndex {
    SubsetIndex(rng.gen_range(0..f.size() as u32))
}

/// Largest `lhs(D) - rhs(D)`, clamped at 0.
fn excess(lhs: &[f64], rhs: &[f64]) -> f64 {
    lhs.iter().zip(rhs).map(|(a, b)| a - b).fold(0.0, f64::max)
}

fn diff(lhs: &[f64], rhs: &[f64]) -> f64 {
    crate::lattice::max_abs_diff(lhs, rhs)
}

/// Conditioning is the least committed specialization that empties `C̄`:
/// for random `S` in Σ* (rows supported on subsets of `A ∩ C`), `pl'(C̄) = 0`
/// and `pl_C ≥ pl'` pointwise.
pub fn check_theorem1(n: usize, samples: usize, seed: u64) -> VerificationReport {
    let tol = crate::DEFAULT_TOLERANCE;
    let f = frame(n);
    let mut rng = rng_for("theorem1", n, seed);
    let mut report = VerificationReport::new("theorem1", n, tol);
    for _ in 0..samples {
        let c = random_subset(&f, &mut rng);
        let s = random_specialization_with(&f, |a| a.intersection(c), &mut rng);
        let m = random_mass(&f, &mut rng);
        let pl_prime = apply(&m, &s).expect("same frame").pl();
        let pl_c = apply(&m, &conditioning_matrix(&f, c).expect("cap"))
            .expect("same frame")
            .pl();
        let dev = pl_prime
            .get(f.complement(c))
            .abs()
            .max(excess(pl_prime.values(), pl_c.values()));
        report.record(dev, tol, || {
            json!({"c": c.bits(), "m": mass_json(&m), "s": matrix_json(s.matrix())})
        });
    }
    report
}

/// Conditioning matrices are idempotent and compose as `S_C·S_C' = S_{C∩C'}`,
/// exhaustively and exactly.
pub fn check_lemma1(n: usize) -> VerificationReport {
    let f = frame(n);
    let mut report = VerificationReport::new("lemma1", n, 0.0);
    let mats: Vec<SpecializationMatrix> = f
        .subsets()
        .map(|c| conditioning_matrix(&f, c).expect("cap"))
        .collect();
    for c in f.subsets() {
        let dev = idempotence_deviation(&mats[c.index()]);
        report.record(dev, 0.0, || json!({"c": c.bits()}));
    }
    for c in f.subsets() {
        for c2 in f.subsets() {
            let prod = mats[c.index()].matrix() * mats[c2.index()].matrix();
            let dev = max_abs(&(prod - mats[c.intersection(c2).index()].matrix()));
            report.record(dev, 0.0, || json!({"c": c.bits(), "c2": c2.bits()}));
        }
    }
    report
}

/// Dempsterian matrices commute with every conditioning matrix, and every
/// sampled non-Dempsterian specialization fails to commute with some `S_C`.
///
/// `samples` sets both the number of Dempsterian and of non-Dempsterian
/// draws. One-element frames have no non-Dempsterian specializations.
pub fn check_theorem2(n: usize, samples: usize, seed: u64) -> VerificationReport {
    let tol = crate::DEFAULT_TOLERANCE;
    let f = frame(n);
    let mut rng = rng_for("theorem2", n, seed);
    let mut report = VerificationReport::new("theorem2", n, tol);
    let conds: Vec<SpecializationMatrix> = f
        .subsets()
        .map(|c| conditioning_matrix(&f, c).expect("cap"))
        .collect();

    for _ in 0..samples {
        let m = random_mass(&f, &mut rng);
        let s = dempsterian_matrix(&m).expect("cap");
        let (worst_c, dev) = conds
            .iter()
            .enumerate()
            .map(|(c, sc)| (c, commute_check(&s, sc).expect("same frame").1))
            .fold((0, 0.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        report.record(dev, tol, || json!({"m": mass_json(&m), "c": worst_c}));
    }

    let mut searched = 0usize;
    let mut min_gap = f64::INFINITY;
    for _ in 0..samples {
        let Some(s) = random_non_dempsterian(&f, &mut rng) else {
            break;
        };
        searched += 1;
        let gap = conds
            .iter()
            .map(|sc| commute_check(&s, sc).expect("same frame").1)
            .fold(0.0, f64::max);
        min_gap = min_gap.min(gap);
        // no witness: a non-Dempsterian matrix that commutes with every S_C
        let dev = if gap > tol { 0.0 } else { f64::INFINITY };
        report.record(dev, tol, || {
            json!({"non_dempsterian": matrix_json(s.matrix()), "max_commutator": gap})
        });
    }
    report.stats.insert("non_dempsterian_searched".into(), searched as f64);
    if searched > 0 {
        report.stats.insert("min_witness_gap".into(), min_gap);
    }
    report
}

fn perturb_generator(s: &SpecializationMatrix) -> Matrix {
    let top = s.frame().full().index();
    let mut out = s.matrix().clone();
    let (j, v) = out
        .row(top)
        .iter()
        .copied()
        .enumerate()
        .fold((0, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
    let dest = if j == 0 { top } else { 0 };
    out[(top, j)] -= v / 2.0;
    out[(top, dest)] += v / 2.0;
    out
}

/// Dempsterian matrices commute and their product is the matrix of the
/// combined mass: `S_{m1}·S_{m2} = S_{m2}·S_{m1} = S_{m1⊕m2}`.
pub fn check_theorem3(n: usize, samples: usize, seed: u64) -> VerificationReport {
    check_theorem3_with(n, samples, seed, false)
}

/// `inject_fault` perturbs row Ω of every `S_{m1}` before multiplying, which
/// must surface as violations.
pub fn check_theorem3_with(
    n: usize,
    samples: usize,
    seed: u64,
    inject_fault: bool,
) -> VerificationReport {
    let tol = crate::DEFAULT_TOLERANCE;
    let f = frame(n);
    let mut rng = rng_for("theorem3", n, seed);
    let mut report = VerificationReport::new("theorem3", n, tol);
    for _ in 0..samples {
        let m1 = random_mass(&f, &mut rng);
        let m2 = random_mass(&f, &mut rng);
        let s1 = dempsterian_matrix(&m1).expect("cap");
        let s1 = if inject_fault { perturb_generator(&s1) } else { s1.into_matrix() };
        let s2 = dempsterian_matrix(&m2).expect("cap").into_matrix();
        let s12 = dempsterian_matrix(&combine_conjunctive(&m1, &m2).expect("same frame"))
            .expect("cap")
            .into_matrix();
        let p12 = &s1 * &s2;
        let p21 = &s2 * &s1;
        let dev = max_abs(&(&p12 - &p21))
            .max(max_abs(&(&p12 - &s12)))
            .max(max_abs(&(&p21 - &s12)));
        report.record(dev, tol, || {
            json!({"m1": mass_json(&m1), "m2": mass_json(&m2), "s1": matrix_json(&s1)})
        });
    }
    report
}

/// Dempster's rule is the least committed combination among specializations
/// whose output is always at least as committed as `m0`: for `S` in Σ₀
/// (sampled by row domination), `pl(m·S) ≤ pl(m·S_{m0})`, and
/// `m·S_{m0} = m ⊕ m0`.
pub fn check_theorem4(n: usize, samples: usize, seed: u64) -> VerificationReport {
    let tol = crate::DEFAULT_TOLERANCE;
    let identity_tol = 1e-12;
    let f = frame(n);
    let mut rng = rng_for("theorem4", n, seed);
    let mut report = VerificationReport::new("theorem4", n, tol);
    let mut worst_identity: f64 = 0.0;
    for _ in 0..samples {
        let m0 = random_mass(&f, &mut rng);
        let s0 = dempsterian_matrix(&m0).expect("cap");
        let s = random_sigma_zero(&m0, &mut rng);
        let m = random_mass(&f, &mut rng);
        let via_s = apply(&m, &s).expect("same frame");
        let via_s0 = apply(&m, &s0).expect("same frame");
        let combined = combine_conjunctive(&m, &m0).expect("same frame");
        let identity_gap = via_s0.max_abs_diff(&combined);
        worst_identity = worst_identity.max(identity_gap);
        let dominance = excess(via_s.pl().values(), via_s0.pl().values());
        // both parts must hold; scale the identity gap onto the main tolerance
        let dev = if identity_gap > identity_tol { f64::INFINITY } else { dominance };
        report.record(dev, tol, || {
            json!({
                "m0": mass_json(&m0),
                "m": mass_json(&m),
                "s": matrix_json(s.matrix()),
                "identity_gap": identity_gap,
            })
        });
    }
    report.stats.insert("worst_combination_identity_gap".into(), worst_identity);
    report
}

/// `diag(S_m) = q`, `S_m = T·Λ·T⁻¹` and rows of `T⁻¹` are left eigenvectors.
pub fn check_eigen(n: usize, samples: usize, seed: u64) -> VerificationReport {
    let tol = crate::DEFAULT_TOLERANCE;
    let f = frame(n);
    let mut rng = rng_for("eigen", n, seed);
    let mut report = VerificationReport::new("eigen", n, tol);
    let mut worst_diag: f64 = 0.0;
    for _ in 0..samples {
        let m = random_mass(&f, &mut rng);
        let e = eigen_structure(&dempsterian_matrix(&m).expect("cap")).expect("Dempsterian");
        worst_diag = worst_diag.max(e.diagonal_deviation);
        let dev = if e.diagonal_deviation > 1e-12 {
            f64::INFINITY
        } else {
            e.reconstruction_error.max(e.eigenvector_residual)
        };
        report.record(dev, tol, || json!({"m": mass_json(&m)}));
    }
    report.stats.insert("worst_diagonal_deviation".into(), worst_diag);
    report
}

/// Every conversion to bel, pl, q and b inverts back to the mass function.
pub fn check_representations(n: usize, samples: usize, seed: u64) -> VerificationReport {
    let tol = crate::DEFAULT_TOLERANCE;
    let f = frame(n);
    let mut rng = rng_for("representations", n, seed);
    let mut report = VerificationReport::new("representations", n, tol);
    for _ in 0..samples {
        let m = random_mass(&f, &mut rng);
        let dev = [m.bel(), m.pl(), m.q(), m.b()]
            .iter()
            .map(|v| mass_from(v).map_or(f64::INFINITY, |back| back.max_abs_diff(&m)))
            .fold(0.0, f64::max);
        report.record(dev, tol, || json!({"m": mass_json(&m)}));
    }
    report
}

/// `q(m0 ⊕ m1) = q0·q1`.
pub fn check_q_product(n: usize, samples: usize, seed: u64) -> VerificationReport {
    let tol = crate::DEFAULT_TOLERANCE;
    let f = frame(n);
    let mut rng = rng_for("q_product", n, seed);
    let mut report = VerificationReport::new("q_product", n, tol);
    for _ in 0..samples {
        let m0 = random_mass(&f, &mut rng);
        let m1 = random_mass(&f, &mut rng);
        let q01 = combine_conjunctive(&m0, &m1).expect("same frame").q();
        let prod: Vec<f64> = m0.q().values().iter().zip(m1.q().values()).map(|(a, b)| a * b).collect();
        report.record(diff(q01.values(), &prod), tol, || {
            json!({"m0": mass_json(&m0), "m1": mass_json(&m1)})
        });
    }
    report
}

/// Transfer rule, `S_C` matrix path and the bel closed form agree, and the
/// conditioned plausibility of `C̄` is zero.
pub fn check_conditioning(n: usize, samples: usize, seed: u64) -> VerificationReport {
    let tol = crate::DEFAULT_TOLERANCE;
    let f = frame(n);
    let mut rng = rng_for("conditioning", n, seed);
    let mut report = VerificationReport::new("conditioning", n, tol);
    for _ in 0..samples {
        let m = random_mass(&f, &mut rng);
        let c = random_subset(&f, &mut rng);
        let direct = condition(&m, c).expect("in range");
        let via_matrix = apply(&m, &conditioning_matrix(&f, c).expect("cap")).expect("same frame");
        let bel = m.bel();
        let cbar = f.complement(c);
        let closed: Vec<f64> = f
            .subsets()
            .map(|b| bel.get(b.union(cbar)) - bel.get(cbar))
            .collect();
        let dev = direct
            .max_abs_diff(&via_matrix)
            .max(diff(direct.bel().values(), &closed))
            .max(direct.pl().get(cbar).abs());
        report.record(dev, tol, || json!({"m": mass_json(&m), "c": c.bits()}));
    }
    report
}

/// `retract(m0 ⊕ m1, m1) = m0` whenever every `q1 > 0.05`.
pub fn check_retraction(n: usize, samples: usize, seed: u64) -> VerificationReport {
    let tol = 1e-8;
    let f = frame(n);
    let mut rng = rng_for("retraction", n, seed);
    let mut report = VerificationReport::new("retraction", n, tol);
    for _ in 0..samples {
        let m0 = random_mass(&f, &mut rng);
        let m1 = random_invertible_mass(&f, 0.05, &mut rng);
        let both = combine_conjunctive(&m0, &m1).expect("same frame");
        let dev = retract(&both, &m1).map_or(f64::INFINITY, |back| back.max_abs_diff(&m0));
        report.record(dev, tol, || json!({"m0": mass_json(&m0), "m1": mass_json(&m1)}));
    }
    report
}

/// Disjunctive rule: `b = bE·bF` always, `bel = belE·belF` when both inputs
/// are normalized, and the generalization-matrix path matches.
pub fn check_disjunctive(n: usize, samples: usize, seed: u64) -> VerificationReport {
    let tol = crate::DEFAULT_TOLERANCE;
    let f = frame(n);
    let mut rng = rng_for("disjunctive", n, seed);
    let mut report = VerificationReport::new("disjunctive", n, tol);
    for _ in 0..samples {
        let me = random_mass(&f, &mut rng);
        let mf = random_mass(&f, &mut rng);
        let or = combine_disjunctive(&me, &mf).expect("same frame");
        let b_prod: Vec<f64> = me.b().values().iter().zip(mf.b().values()).map(|(a, b)| a * b).collect();
        let via_matrix =
            apply_generalization(&me, &disjunctive_matrix(&mf).expect("cap")).expect("same frame");

        let ne = random_normalized_mass(&f, &mut rng);
        let nf = random_normalized_mass(&f, &mut rng);
        let nor = combine_disjunctive(&ne, &nf).expect("same frame");
        let bel_prod: Vec<f64> =
            ne.bel().values().iter().zip(nf.bel().values()).map(|(a, b)| a * b).collect();

        let dev = diff(or.b().values(), &b_prod)
            .max(or.max_abs_diff(&via_matrix))
            .max(diff(nor.bel().values(), &bel_prod));
        report.record(dev, tol, || {
            json!({"me": mass_json(&me), "mf": mass_json(&mf), "ne": mass_json(&ne), "nf": mass_json(&nf)})
        });
    }
    report
}

/// Gaps for one enlargement instance: conditioning `enlarge(m, A)` on `X ∪ Y`
/// (with `X ⊆ Ā`, `Y ⊆ A`) leaves every focal set meeting `A` exactly in `Y`,
/// and the part outside `A` does not depend on `Y`.
///
/// Returns `(mass on sets G with G ∩ A ≠ Y, largest change of the outside
/// pattern relative to Y = ∅)`.
pub fn enlargement_invariance_gaps(
    enlarged: &MassFunction,
    a: SubsetIndex,
    x: SubsetIndex,
    y: SubsetIndex,
) -> (f64, f64) {
    let f = enlarged.frame();
    let outside = |r: &MassFunction| {
        let mut p = vec![0.0; f.size()];
        for g in f.subsets() {
            p[g.difference(a).index()] += r.get(g);
        }
        p
    };
    let r = condition(enlarged, x.union(y)).expect("in range");
    let base = condition(enlarged, x).expect("in range");
    let stray: f64 = f
        .subsets()
        .filter(|g| g.intersection(a) != y)
        .map(|g| r.get(g).abs())
        .sum();
    (stray, diff(&outside(&r), &outside(&base)))
}

/// Enlargement makes `A` indiscernible: exhaustive over `(A, X, Y)`.
pub fn check_enlargement(n: usize, samples: usize, seed: u64) -> VerificationReport {
    let tol = crate::DEFAULT_TOLERANCE;
    let f = frame(n);
    let mut rng = rng_for("enlargement", n, seed);
    let mut report = VerificationReport::new("enlargement", n, tol);
    for _ in 0..samples {
        let m = random_mass(&f, &mut rng);
        for a in f.subsets() {
            let enlarged = enlarge(&m, a).expect("in range");
            for x in f.complement(a).submasks() {
                for y in a.submasks() {
                    let (stray, pattern) = enlargement_invariance_gaps(&enlarged, a, x, y);
                    report.record(stray.max(pattern), tol, || {
                        json!({"m": mass_json(&m), "a": a.bits(), "x": x.bits(), "y": y.bits()})
                    });
                }
            }
        }
    }
    report
}

/// Specializing never makes a belief state less committed.
pub fn check_specialization_monotonicity(n: usize, samples: usize, seed: u64) -> VerificationReport {
    let tol = crate::DEFAULT_TOLERANCE;
    let f = frame(n);
    let mut rng = rng_for("monotonicity", n, seed);
    let mut report = VerificationReport::new("monotonicity", n, tol);
    for _ in 0..samples {
        let m = random_mass(&f, &mut rng);
        let s = random_specialization(&f, &mut rng);
        let out = apply(&m, &s).expect("same frame");
        let dev = excess(out.pl().values(), m.pl().values());
        let ordered = compare(&out, &m).expect("same frame").first_at_least_as_committed();
        report.record(if ordered { dev } else { f64::INFINITY }, tol, || {
            json!({"m": mass_json(&m), "s": matrix_json(s.matrix())})
        });
    }
    report
}

/// Names accepted by [`run_all`] and the CLI.
pub const CHECKS: [&str; 13] = [
    "theorem1",
    "lemma1",
    "theorem2",
    "theorem3",
    "theorem4",
    "eigen",
    "representations",
    "q_product",
    "conditioning",
    "retraction",
    "disjunctive",
    "enlargement",
    "monotonicity",
];

/// What to run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub checks: Vec<String>,
    pub sizes: Vec<usize>,
    /// Overrides every check's default sample count.
    pub samples: Option<usize>,
    pub seed: u64,
    /// Perturbs the Dempsterian matrices of the theorem 3 check.
    pub inject_fault: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            checks: CHECKS.iter().map(|s| s.to_string()).collect(),
            sizes: vec![1, 2, 3, 4],
            samples: None,
            seed: 0,
            inject_fault: false,
        }
    }
}

/// Default sample count per check.
pub fn default_samples(check: &str) -> usize {
    match check {
        "theorem1" | "q_product" | "conditioning" | "disjunctive" => 500,
        "theorem2" => 100,
        "theorem3" | "eigen" | "retraction" | "monotonicity" => 200,
        "theorem4" => 300,
        "representations" => 1000,
        "enlargement" => 50,
        _ => 0,
    }
}

pub fn run_check(check: &str, n: usize, samples: usize, seed: u64, inject_fault: bool) -> Option<VerificationReport> {
    let r = match check {
        "theorem1" => check_theorem1(n, samples, seed),
        "lemma1" => check_lemma1(n),
        "theorem2" => check_theorem2(n, samples, seed),
        "theorem3" => check_theorem3_with(n, samples, seed, inject_fault),
        "theorem4" => check_theorem4(n, samples, seed),
        "eigen" => check_eigen(n, samples, seed),
        "representations" => check_representations(n, samples, seed),
        "q_product" => check_q_product(n, samples, seed),
        "conditioning" => check_conditioning(n, samples, seed),
        "retraction" => check_retraction(n, samples, seed),
        "disjunctive" => check_disjunctive(n, samples, seed),
        "enlargement" => check_enlargement(n, samples, seed),
        "monotonicity" => check_specialization_monotonicity(n, samples, seed),
        _ => return None,
    };
    Some(r)
}

/// Runs every requested check on every size, in parallel. Reports come back
/// in `(check, size)` order regardless of scheduling.
pub fn run_all(config: &RunConfig) -> crate::Result<Vec<VerificationReport>> {
    for check in &config.checks {
        if !CHECKS.contains(&check.as_str()) {
            return Err(crate::BeliefError::InvalidFrame(format!("unknown check {check:?}")));
        }
    }
    for &n in &config.sizes {
        // sizes go through the same caps as any frame
        Frame::of_size(n)?.check_matrix_cap()?;
    }
    let jobs: Vec<(&str, usize)> = config
        .checks
        .iter()
        .flat_map(|c| config.sizes.iter().map(move |&n| (c.as_str(), n)))
        .collect();
    Ok(jobs
        .par_iter()
        .map(|&(check, n)| {
            let samples = config.samples.unwrap_or_else(|| default_samples(check));
            run_check(check, n, samples, config.seed, config.inject_fault).expect("known check")
        })
        .collect())
}
