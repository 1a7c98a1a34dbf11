use std::collections::BTreeMap;

use circlepat_core::geometry::{
    immersion_check, kite_classify, max_face_angle_error, sg_immersion_check, sg_radius_residual,
    SquareGrid,
};
use circlepat_core::lattice::SubIndex;
use circlepat_core::pattern_core::{
    calibrate_lax, default_mu_samples, max_constraint_residual, max_constraint_spread,
    max_cross_ratio_error, zero_curvature_residual,
};
use circlepat_core::radius_system::radius_residuals;
use circlepat_core::real::{Ext, Precision, Real};
use circlepat_core::RadiusField;

use crate::document::{Mode, PatternDocument, Typed};
use crate::{CheckName, CliError, Outcome, VerifyArgs, EXIT_MATH, EXIT_OK};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: CheckName,
    /// None when the document lacks the data the check needs
    pub residual: Option<f64>,
    pub tol: f64,
    pub pass: bool,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn get(&self, name: CheckName) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn summary(&self) -> BTreeMap<String, f64> {
        self.checks
            .iter()
            .filter_map(|c| {
                c.residual
                    .filter(|r| r.is_finite())
                    .map(|r| (c.name.name().to_string(), r))
            })
            .collect()
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let res = c
                .residual
                .map(|r| format!("{r:.3e}"))
                .unwrap_or_else(|| "n/a".into());
            let verdict = match (c.residual, c.pass) {
                (None, _) => "skip",
                (_, true) => "pass",
                (_, false) => "FAIL",
            };
            s.push_str(&format!(
                "{:<11} {:>10}  tol {:.0e}  {}",
                c.name.name(),
                res,
                c.tol,
                verdict
            ));
            if !c.note.is_empty() {
                s.push_str("  ");
                s.push_str(&c.note);
            }
            s.push('\n');
        }
        s
    }
}

pub struct CheckSet(pub Vec<CheckName>);

impl CheckSet {
    /// Every check the document has data for.
    pub fn applicable<R: Real>(mode: Mode, t: &Typed<R>) -> Self {
        let has_z = t.z.is_some();
        let has_r = t.radii.is_some();
        CheckSet(
            CheckName::ALL
                .into_iter()
                .filter(|c| match c {
                    CheckName::Crossratio
                    | CheckName::Constraint
                    | CheckName::Kite
                    | CheckName::Immersion => has_z,
                    CheckName::Laxzc => has_z && mode != Mode::Sg,
                    CheckName::Positivity => has_r,
                    CheckName::Radius => has_r && matches!(mode, Mode::Hex | Mode::Log | Mode::Z2),
                    CheckName::Sgresidual => has_r && mode == Mode::Erf,
                })
                .collect(),
        )
    }
}

/// Relative residual of the square-grid radius relation at the interior
/// grid points of an Erf-style field keyed (n, 0, m).
fn sg_residual<R: Real>(rf: &RadiusField<R>) -> Option<f64> {
    let alpha = &rf.params.alpha[2];
    let get = |n: i64, m: i64| rf.values.get(&SubIndex::new(n, 0, m));
    let mut worst: Option<f64> = None;
    for s in rf.values.keys() {
        let (n, m) = (s.k, s.m);
        let (Some(big), Some(r1), Some(r2), Some(r3), Some(r4)) = (
            get(n, m),
            get(n + 1, m),
            get(n, m + 1),
            get(n - 1, m),
            get(n, m - 1),
        ) else {
            continue;
        };
        let res = sg_radius_residual(big, [r1, r2, r3, r4], alpha).abs();
        let scale = big.clone() * big.clone() * (r1.clone() + r2.clone() + r3.clone() + r4.clone())
            + r1.clone() * r2.clone() * (r3.clone() + r4.clone())
            + r3.clone() * r4.clone() * (r1.clone() + r2.clone());
        let rel = (res / scale).to_f64();
        worst = Some(worst.map_or(rel, |w: f64| w.max(rel)));
    }
    worst
}

fn check<R: Real>(name: CheckName, mode: Mode, t: &Typed<R>, tol: f64) -> CheckResult {
    let mut note = String::new();
    let (residual, pass) = match name {
        CheckName::Crossratio => match &t.z {
            Some(z) => {
                let r = max_cross_ratio_error(z);
                (Some(r), r <= tol)
            }
            None => (None, true),
        },
        CheckName::Constraint => match &t.z {
            Some(z) => {
                let r = if z.params.c.is_zero() {
                    note = "constant sum at c=0".into();
                    max_constraint_spread(z)
                } else {
                    max_constraint_residual(z)
                };
                (Some(r), r <= tol)
            }
            None => (None, true),
        },
        CheckName::Laxzc => match t.z.as_ref().map(|z| (z, calibrate_lax(z))) {
            Some((z, Ok(cal))) => {
                let mus = default_mu_samples::<R>();
                let mut worst = 0.0f64;
                let mut faces = 0;
                for f in z.faces() {
                    if let Ok(r) = zero_curvature_residual(z, &f, &cal, &mus) {
                        worst = worst.max(r.to_f64());
                        faces += 1;
                    }
                }
                note = format!("{faces} faces");
                (Some(worst), worst <= tol)
            }
            Some((_, Err(e))) => {
                note = e.to_string();
                (None, true)
            }
            None => (None, true),
        },
        CheckName::Kite => match &t.z {
            Some(z) => {
                let mut bad = 0;
                for f in z.faces() {
                    let pts = z.face_points(&f).expect("face present");
                    // faces collapsed onto a point circle have no kite shape
                    if pts
                        .iter()
                        .enumerate()
                        .any(|(i, p)| pts[i + 1..].contains(p))
                    {
                        continue;
                    }
                    if kite_classify(&pts, &z.params.alpha[f.ty.index()]).is_err() {
                        bad += 1;
                    }
                }
                let r = max_face_angle_error(z);
                if bad > 0 {
                    note = format!("{bad} faces are not kites");
                }
                (Some(r), bad == 0 && r <= tol)
            }
            None => (None, true),
        },
        CheckName::Positivity => match &t.radii {
            Some(rf) => {
                let min = rf.min_value().map(|v| v.to_f64()).unwrap_or(f64::NAN);
                let ok = rf.all_positive();
                if !ok {
                    let bad: Vec<String> = rf
                        .values
                        .iter()
                        .filter(|(s, v)| !rf.singular.contains(s) && !(**v > R::zero()))
                        .take(3)
                        .map(|(s, _)| s.to_string())
                        .collect();
                    note = format!("nonpositive at {}", bad.join(", "));
                } else if !rf.singular.is_empty() {
                    note = format!("{} singular", rf.singular.len());
                }
                (Some(min), ok)
            }
            None => (None, true),
        },
        CheckName::Immersion => match &t.z {
            Some(z) => {
                let rep = if mode == Mode::Sg {
                    sg_immersion_check(&SquareGrid { field: z.clone() })
                } else {
                    immersion_check(z)
                };
                if let Some((p, kind)) = rep.failures.first() {
                    note = format!(
                        "{} failures, first {} at {p}",
                        rep.failures.len(),
                        kind.name()
                    );
                }
                (Some(rep.failures.len() as f64), rep.ok)
            }
            None => (None, true),
        },
        CheckName::Radius => match &t.radii {
            Some(rf) => {
                let r = radius_residuals(rf);
                note = format!("{} relations", r.count);
                (Some(r.max()), r.max() <= tol)
            }
            None => (None, true),
        },
        CheckName::Sgresidual => match t.radii.as_ref().and_then(sg_residual) {
            Some(r) => (Some(r), r <= tol),
            None => (None, true),
        },
    };
    let tol = match name {
        CheckName::Positivity | CheckName::Immersion => 0.0,
        _ => tol,
    };
    CheckResult {
        name,
        residual,
        tol,
        pass,
        note,
    }
}

pub fn evaluate<R: Real>(t: &Typed<R>, mode: Mode, checks: &CheckSet, tol: f64) -> VerifyReport {
    VerifyReport {
        checks: checks.0.iter().map(|c| check(*c, mode, t, tol)).collect(),
    }
}

/// Loads and checks a document in its declared precision.
pub fn verify_document(
    doc: &PatternDocument,
    checks: &[CheckName],
    tol: f64,
) -> Result<VerifyReport, CliError> {
    fn go<R: Real>(
        doc: &PatternDocument,
        checks: &[CheckName],
        tol: f64,
    ) -> Result<VerifyReport, CliError> {
        let t = doc.typed::<R>()?;
        let set = if checks.is_empty() {
            CheckSet::applicable(doc.params.mode, &t)
        } else {
            CheckSet(checks.to_vec())
        };
        Ok(evaluate(&t, doc.params.mode, &set, tol))
    }
    match doc.precision()? {
        Precision::Double => go::<f64>(doc, checks, tol),
        Precision::Extended => go::<Ext>(doc, checks, tol),
    }
}

/// Stored residuals the recomputed ones exceed by more than a factor 2.
pub fn summary_drift(doc: &PatternDocument, report: &VerifyReport) -> Vec<String> {
    let floor = match doc.precision() {
        Ok(Precision::Extended) => <Ext as Real>::eps().to_f64(),
        _ => f64::EPSILON,
    } * 4.0;
    let mut out = Vec::new();
    for (name, new) in report.summary() {
        if let Some(old) = doc.residuals.get(&name) {
            let within = if matches!(name.as_str(), "positivity") {
                (new - old).abs() <= 1e-12 * old.abs().max(1.0)
            } else {
                new <= 2.0 * old.abs().max(floor)
            };
            if !within {
                out.push(format!("{name}: stored {old:.3e}, now {new:.3e}"));
            }
        }
    }
    out
}

pub fn cmd_verify(a: &VerifyArgs) -> Result<Outcome, CliError> {
    let doc = PatternDocument::load(&a.file)?;
    let report = verify_document(&doc, &a.checks, a.tol)?;
    let mut out = format!(
        "{} ({} mode, {}, {} route)\n",
        a.file.display(),
        doc.params.mode.name(),
        doc.params.precision,
        serde_json::to_value(doc.provenance)
            .ok()
            .and_then(|v| v.as_str().map(String::from))
            .unwrap_or_default()
    );
    out.push_str(&report.render());
    let drift = summary_drift(&doc, &report);
    if drift.is_empty() {
        out.push_str("summary     matches stored residuals\n");
    } else {
        out.push_str(&format!(
            "summary     differs from stored residuals: {}\n",
            drift.join("; ")
        ));
    }
    let pass = report.pass();
    out.push_str(if pass {
        "result      pass\n"
    } else {
        "result      FAIL\n"
    });
    Ok(Outcome {
        stdout: out,
        code: if pass { EXIT_OK } else { EXIT_MATH },
    })
}
