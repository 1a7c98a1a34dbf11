use std::collections::{BTreeMap, BTreeSet};

use circlepat_core::geometry::{erf_radius, reconstruct, sg_slice};
use circlepat_core::lattice::SubIndex;
use circlepat_core::pattern_core::generate_z;
use circlepat_core::radius_system::{
    dual, generate_radii, generate_radii_from, resolve_seeds, SeedSource,
};
use circlepat_core::real::{Ext, Precision, Real};
use circlepat_core::{PatternParams, RadiusField, ZField};

use crate::document::{Mode, PatternDocument, Provenance};
use crate::verify::{evaluate, CheckSet};
use crate::{parse_alpha, parse_real, CliError, GenerateArgs, Outcome, Route};

pub fn cmd_generate(a: &GenerateArgs) -> Result<Outcome, CliError> {
    let doc = match Precision::from(a.precision) {
        Precision::Double => build::<f64>(a)?,
        Precision::Extended => build::<Ext>(a)?,
    };
    doc.save(&a.out)?;
    let mut out = format!(
        "wrote {} ({} mode, {} vertices, {} radii, {})\n",
        a.out.display(),
        doc.params.mode.name(),
        doc.vertices.len(),
        doc.radii.len(),
        doc.params.precision
    );
    for (k, v) in &doc.residuals {
        out.push_str(&format!("  {k:<11} {v:.3e}\n"));
    }
    Ok(Outcome {
        stdout: out,
        code: crate::EXIT_OK,
    })
}

/// Radii of the sum-zero and sum-one labels up to generation `g`, read off
/// a cross-ratio field.
fn radii_from_z<R: Real>(zf: &ZField<R>, g: i64) -> RadiusField<R> {
    let mut values = BTreeMap::new();
    let mut singular = BTreeSet::new();
    for (s, r) in zf.extract_radii() {
        if (s.sum() == 0 || s.sum() == 1) && s.generation() <= g && s.k >= 0 && s.l >= 0 {
            if r.is_zero() {
                singular.insert(s);
            }
            values.insert(s, r);
        }
    }
    RadiusField {
        params: zf.params.clone(),
        values,
        sources: BTreeMap::new(),
        singular,
        generation: g,
        normalized: true,
    }
}

/// Every even-vertex radius of a field, keyed by label.
fn all_radii<R: Real>(zf: &ZField<R>) -> RadiusField<R> {
    let values: BTreeMap<SubIndex, R> = zf.extract_radii();
    let singular = values
        .iter()
        .filter(|(_, v)| v.is_zero())
        .map(|(s, _)| *s)
        .collect();
    RadiusField {
        params: zf.params.clone(),
        values,
        sources: BTreeMap::new(),
        singular,
        generation: 0,
        normalized: true,
    }
}

fn seeded_radii<R: Real>(
    params: &PatternParams<R>,
    n: i64,
    scale: &R,
) -> Result<RadiusField<R>, CliError> {
    if scale.is_one() {
        return Ok(generate_radii(params, n, &SeedSource::Closed)?);
    }
    let mut seeds = resolve_seeds(params, &SeedSource::Closed)?;
    seeds.a10 = seeds.a10 * scale.clone();
    Ok(generate_radii_from(params, n, &seeds)?)
}

/// Square-grid radii e^{nm} on [-n, n]^2, stored as labels (n, 0, m).
fn erf_field<R: Real>(params: &PatternParams<R>, n: i64) -> RadiusField<R> {
    let mut values = BTreeMap::new();
    for i in -n..=n {
        for j in -n..=n {
            values.insert(SubIndex::new(i, 0, j), erf_radius::<R>(i, j));
        }
    }
    RadiusField {
        params: params.clone(),
        values,
        sources: BTreeMap::new(),
        singular: BTreeSet::new(),
        generation: n,
        normalized: false,
    }
}

pub fn build<R: Real>(a: &GenerateArgs) -> Result<PatternDocument, CliError> {
    let n = a.n;
    if n < 1 {
        return Err(CliError::usage("--n must be at least 1"));
    }
    let alpha = parse_alpha::<R>(&a.alpha)?;
    let c = match a.mode {
        Mode::Z2 | Mode::Log => R::from_i64(2),
        _ => parse_real::<R>(&a.c, "--c")?,
    };
    let params = PatternParams::new(alpha, c)?;
    let scale = parse_real::<R>(&a.seed_scale, "--seed-scale")?;
    if !(scale > R::zero()) {
        return Err(CliError::usage("--seed-scale must be positive"));
    }
    let (prov, z, rf) = match (a.mode, a.route) {
        (Mode::Erf, _) => (Provenance::Radius, None, Some(erf_field(&params, n))),
        (Mode::Log, _) => {
            let rf = dual(&seeded_radii(&params, n, &scale)?);
            let zf = reconstruct(&rf)?;
            (Provenance::Reconstructed, Some(zf), Some(rf))
        }
        (Mode::Hex | Mode::Sg | Mode::Z2, Route::Crossratio) => {
            if a.mode != Mode::Z2 && params.is_c(0.0) {
                return Err(CliError::usage("the cross-ratio route needs c > 0"));
            }
            let zf = generate_z(&params, n)?;
            let rf = if a.mode == Mode::Z2 {
                seeded_radii(&params, (n - 1) / 2, &scale)?
            } else {
                radii_from_z(&zf, (n - 1) / 2)
            };
            (Provenance::CrossRatio, Some(zf), Some(rf))
        }
        (Mode::Hex | Mode::Sg | Mode::Z2, Route::Radius) => {
            let rf = seeded_radii(&params, n, &scale)?;
            let zf = reconstruct(&rf)?;
            (Provenance::Reconstructed, Some(zf), Some(rf))
        }
    };
    let (z, rf) = if a.mode == Mode::Sg {
        let sg = sg_slice(z.as_ref().expect("sg has vertices")).field;
        let radii = all_radii(&sg);
        (Some(sg), Some(radii))
    } else {
        (z, rf)
    };
    // the log field carries the dual exponent
    let params = rf.as_ref().map(|r| r.params.clone()).unwrap_or(params);
    let mut doc = PatternDocument::new(a.mode, prov, &params, z.as_ref(), rf.as_ref());
    let typed = doc.typed::<R>()?;
    let report = evaluate(&typed, a.mode, &CheckSet::applicable(a.mode, &typed), 1e-9);
    doc.residuals = report.summary();
    Ok(doc)
}
