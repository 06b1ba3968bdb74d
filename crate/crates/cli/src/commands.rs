//! Each command is a pure function from parsed inputs to output text.

use std::fmt::Write as _;

use tbm_core::belief::Kind;
use tbm_core::dynamics::{
    combine_conjunctive, combine_disjunctive, combine_normalized, condition, enlarge, retract,
};
use tbm_core::specialization::{
    conditioning_matrix, dempsterian_matrix, despecialize_matrix, disjunctive_matrix,
};
use tbm_core::verify::{RunConfig, VerificationReport};
use tbm_core::{Frame, Matrix};

use crate::document::{round12, DocKind, EvidenceDocument};
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    Conjunctive,
    Normalized,
    Disjunctive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    Specialization,
    Dempsterian,
    Despecialization,
    Disjunctive,
}

impl MatrixKind {
    fn name(self) -> &'static str {
        match self {
            MatrixKind::Specialization => "specialization",
            MatrixKind::Dempsterian => "dempsterian",
            MatrixKind::Despecialization => "despecialization",
            MatrixKind::Disjunctive => "disjunctive",
        }
    }
}

pub fn convert(doc: &EvidenceDocument, target: DocKind) -> Result<EvidenceDocument, CliError> {
    let m = doc.to_mass()?;
    Ok(match target {
        DocKind::Mass => EvidenceDocument::from_mass(&m),
        DocKind::Value(Kind::Bel) => EvidenceDocument::from_values(&m.bel()),
        DocKind::Value(Kind::Pl) => EvidenceDocument::from_values(&m.pl()),
        DocKind::Value(Kind::Q) => EvidenceDocument::from_values(&m.q()),
        DocKind::Value(Kind::B) => EvidenceDocument::from_values(&m.b()),
    })
}

/// Left fold of the inputs under `rule`.
pub fn combine(docs: &[EvidenceDocument], rule: Rule) -> Result<EvidenceDocument, CliError> {
    if docs.len() < 2 {
        return Err(CliError::Input("combine needs at least two files".into()));
    }
    let masses = docs.iter().map(|d| d.to_mass()).collect::<Result<Vec<_>, _>>()?;
    let op = match rule {
        Rule::Conjunctive => combine_conjunctive,
        Rule::Normalized => combine_normalized,
        Rule::Disjunctive => combine_disjunctive,
    };
    let mut acc = masses[0].clone();
    for m in &masses[1..] {
        acc = op(&acc, m)?;
    }
    Ok(EvidenceDocument::from_mass(&acc))
}

pub fn condition_on(doc: &EvidenceDocument, key: &str) -> Result<EvidenceDocument, CliError> {
    let m = doc.to_mass()?;
    let c = doc.frame.parse_key(key)?;
    Ok(EvidenceDocument::from_mass(&condition(&m, c)?))
}

pub fn retract_evidence(
    doc: &EvidenceDocument,
    evidence: &EvidenceDocument,
) -> Result<EvidenceDocument, CliError> {
    let m = retract(&doc.to_mass()?, &evidence.to_mass()?)?;
    Ok(EvidenceDocument::from_mass(&m))
}

pub fn enlarge_on(doc: &EvidenceDocument, key: &str) -> Result<EvidenceDocument, CliError> {
    let m = doc.to_mass()?;
    let a = doc.frame.parse_key(key)?;
    Ok(EvidenceDocument::from_mass(&enlarge(&m, a)?))
}

/// Where `matrix` gets its operator from.
pub enum MatrixSource<'a> {
    Conditioning(&'a Frame, &'a str),
    Evidence(&'a EvidenceDocument),
}

pub fn matrix(source: MatrixSource<'_>, kind: MatrixKind) -> Result<String, CliError> {
    let (frame, mat) = match source {
        MatrixSource::Conditioning(frame, key) => {
            if kind != MatrixKind::Specialization {
                return Err(CliError::Input(format!(
                    "--conditioning builds a specialization matrix, not {}",
                    kind.name()
                )));
            }
            let c = frame.parse_key(key)?;
            (frame.clone(), conditioning_matrix(frame, c)?.into_matrix())
        }
        MatrixSource::Evidence(doc) => {
            let m = doc.to_mass()?;
            let mat = match kind {
                MatrixKind::Specialization | MatrixKind::Dempsterian => {
                    dempsterian_matrix(&m)?.into_matrix()
                }
                MatrixKind::Despecialization => {
                    despecialize_matrix(&dempsterian_matrix(&m)?)?.matrix().clone()
                }
                MatrixKind::Disjunctive => disjunctive_matrix(&m)?.matrix().clone(),
            };
            (m.frame().clone(), mat)
        }
    };
    Ok(format_matrix(&frame, kind, &mat))
}

/// Dense row-major text. Header lines start with `#`.
pub fn format_matrix(frame: &Frame, kind: MatrixKind, mat: &Matrix) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# kind: {}", kind.name());
    let _ = writeln!(out, "# labels: {}", frame.labels().join(" "));
    let _ = writeln!(
        out,
        "# index: row/column i is the subset holding label j iff bit j of i is set; rows act on row vectors (m' = m S)"
    );
    let order: Vec<String> = frame.subsets().map(|a| frame.display(a)).collect();
    let _ = writeln!(out, "# order: {}", order.join(" "));
    for i in 0..mat.nrows() {
        let row: Vec<String> = mat.row(i).iter().map(|&x| round12(x).to_string()).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

/// Parses text produced by [`format_matrix`], ignoring header lines.
pub fn parse_matrix(text: &str) -> Result<Matrix, CliError> {
    let rows: Vec<Vec<f64>> = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| {
            l.split_whitespace()
                .map(|x| x.parse::<f64>().map_err(|e| CliError::Input(e.to_string())))
                .collect()
        })
        .collect::<Result<_, _>>()?;
    let k = rows.len();
    if rows.iter().any(|r| r.len() != k) {
        return Err(CliError::Input("matrix is not square".into()));
    }
    Ok(Matrix::from_fn(k, k, |i, j| rows[i][j]))
}

pub fn format_reports(config: &RunConfig, reports: &[VerificationReport]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# seed: {}", config.seed);
    for r in reports {
        let _ = write!(
            out,
            "{:<16} n={} {} instances={} violations={} worst={:.3e} tol={:.0e}",
            r.check,
            r.n,
            if r.passed() { "PASS" } else { "FAIL" },
            r.instances,
            r.violations,
            r.worst_deviation,
            r.tolerance
        );
        for (k, v) in &r.stats {
            let _ = write!(out, " {k}={v:.3e}");
        }
        out.push('\n');
        if let Some(w) = &r.witness {
            let _ = writeln!(out, "  witness: {w}");
        }
    }
    let failed = reports.iter().filter(|r| !r.passed()).count();
    let _ = writeln!(
        out,
        "{}: {} of {} checks passed",
        if failed == 0 { "PASS" } else { "FAIL" },
        reports.len() - failed,
        reports.len()
    );
    out
}
