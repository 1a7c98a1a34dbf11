use std::f64::consts::PI;
use std::fmt::Write as _;

use circlepat_core::lattice::MultiIndex;
use circlepat_core::painleve::{run_from, sector_of, shoot, x0_closed};
use circlepat_core::pattern_core::generate_z;
use circlepat_core::real::{cabs, carg, Ext, Precision, Real};
use circlepat_core::riccati::{p0_closed, p0_via_series, riccati_run, RiccatiParams};
use circlepat_core::PatternParams;

use crate::{
    parse_angle, parse_real, AnalyzeArgs, AnalyzeKind, CliError, Outcome, EXIT_MATH, EXIT_OK,
};

pub fn cmd_analyze(a: &AnalyzeArgs) -> Result<Outcome, CliError> {
    match Precision::from(a.precision) {
        Precision::Double => run::<f64>(a),
        Precision::Extended => run::<Ext>(a),
    }
}

fn run<R: Real>(a: &AnalyzeArgs) -> Result<Outcome, CliError> {
    let c = parse_real::<R>(&a.c, "--c")?;
    let alpha = parse_angle::<R>(&a.alpha)?;
    if !(alpha > R::zero() && alpha < R::pi()) {
        return Err(CliError::usage("--alpha must lie in (0, pi)"));
    }
    match a.kind {
        AnalyzeKind::Painleve => {
            if !(c > R::zero() && c <= R::from_i64(2)) {
                return Err(CliError::usage("--c must lie in (0, 2]"));
            }
            painleve(&c, &alpha, a.n.unwrap_or(25))
        }
        AnalyzeKind::Riccati => {
            if !(c > R::zero() && c < R::from_i64(2)) {
                return Err(CliError::usage("--c must lie in (0, 2)"));
            }
            riccati(c, alpha, a.n.unwrap_or(40))
        }
        AnalyzeKind::P0 => {
            if !(c > R::zero() && c < R::from_i64(2)) {
                return Err(CliError::usage("--c must lie in (0, 2)"));
            }
            p0(c.to_f64(), alpha.to_f64())
        }
    }
}

fn painleve<R: Real>(c: &R, alpha: &R, n: usize) -> Result<Outcome, CliError> {
    let x0 = x0_closed(c, alpha);
    let tr = run_from(c, alpha, x0.clone(), n)?;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "# painleve c={} alpha={} precision={}",
        c.to_f64(),
        alpha.to_f64(),
        R::PRECISION.name()
    );
    let _ = writeln!(s, "{:>4}  {:>22}  sector", "n", "beta_n");
    for (i, x) in tr.xs.iter().enumerate() {
        let _ = writeln!(
            s,
            "{:>4}  {:>22.15e}  {}",
            i,
            carg(x).to_f64(),
            sector_of(x, alpha).name()
        );
    }
    match tr.exit {
        None => {
            let _ = writeln!(s, "trajectory stays in A_I through n={n}");
        }
        Some((k, tag)) => {
            let _ = writeln!(s, "trajectory leaves A_I at n={k} into {}", tag.name());
        }
    }
    if (c.to_f64() - 1.0).abs() == 0.0 {
        let dev = tr
            .xs
            .iter()
            .map(|x| cabs(&(x.clone() - x0.clone())).to_f64())
            .fold(0.0, f64::max);
        let _ = writeln!(s, "constant trajectory: max |x_n - x_0| = {dev:.3e}");
    }
    let beta = c.clone() * alpha.clone() / R::from_i64(2);
    let mut code = EXIT_OK;
    match shoot(c, alpha, n.max(1), &R::from_f64(1e-6)) {
        Ok(b) => {
            let _ = writeln!(
                s,
                "shoot N={n}: [{:.15e}, {:.15e}] width {:.3e}, c*alpha/2 = {:.15e} {}",
                b.lo.to_f64(),
                b.hi.to_f64(),
                b.width().to_f64(),
                beta.to_f64(),
                if b.contains(&beta) {
                    "inside"
                } else {
                    "OUTSIDE"
                }
            );
            if !b.contains(&beta) {
                code = EXIT_MATH;
            }
        }
        Err(e) => {
            let _ = writeln!(s, "shoot N={n}: {e}");
            code = EXIT_MATH;
        }
    }
    Ok(Outcome { stdout: s, code })
}

fn riccati<R: Real>(c: R, alpha: R, n: usize) -> Result<Outcome, CliError> {
    let prm = RiccatiParams::new(c.clone(), alpha.clone())?;
    let p0 = p0_closed(&c, &alpha)?;
    let tr = riccati_run(p0.clone(), n, &prm)?;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "# riccati c={} alpha={} precision={}",
        c.to_f64(),
        alpha.to_f64(),
        R::PRECISION.name()
    );
    let _ = writeln!(s, "{:>4}  {:>22}  {:>10}", "n", "p_n", "p_n - 1");
    for (i, p) in tr.values.iter().enumerate() {
        let v = p.to_f64();
        let _ = writeln!(s, "{i:>4}  {v:>22.15e}  {:>10.3e}", v - 1.0);
    }
    match tr.first_nonpositive {
        None => {
            let _ = writeln!(s, "p_n > 0 for all n <= {n}");
        }
        Some(k) => {
            let _ = writeln!(s, "p_{k} is nonpositive");
        }
    }
    for f in [1e-3, -1e-3] {
        let pert = riccati_run(p0.clone() * R::from_f64(1.0 + f), n, &prm)?;
        let what = pert
            .first_nonpositive
            .map(|k| format!("nonpositive at n={k}"))
            .unwrap_or_else(|| "positive".into());
        let _ = writeln!(s, "p0*(1{f:+e}): {what}");
    }
    let code = if tr.first_nonpositive.is_none() {
        EXIT_OK
    } else {
        EXIT_MATH
    };
    Ok(Outcome { stdout: s, code })
}

/// Border ratio |z(1,0,-1) - z(1,0,0)| / |z(1,0,0)| of the pattern with
/// alpha3 = alpha and alpha1 = alpha2.
pub fn p0_from_pattern(c: f64, alpha: f64) -> Result<f64, CliError> {
    let rest = (PI - alpha) / 2.0;
    let prm = PatternParams::new([rest, rest, alpha], c)?;
    let zf = generate_z(&prm, 3)?;
    let z = |k, l, m| zf.values[&MultiIndex::new(k, l, m)];
    Ok((z(1, 0, -1) - z(1, 0, 0)).norm() / (z(1, 0, 0) - z(0, 0, 0)).norm())
}

fn p0(c: f64, alpha: f64) -> Result<Outcome, CliError> {
    let closed = p0_closed(&c, &alpha)?;
    let series = p0_via_series(&RiccatiParams::new(c, alpha)?)?;
    let pattern = p0_from_pattern(c, alpha)?;
    let dev = (closed - series)
        .abs()
        .max((closed - pattern).abs())
        .max((series - pattern).abs());
    let mut s = String::new();
    let _ = writeln!(s, "# p0 c={c} alpha={alpha}");
    let _ = writeln!(s, "closed   {closed:.15e}");
    let _ = writeln!(s, "series   {series:.15e}");
    let _ = writeln!(s, "pattern  {pattern:.15e}");
    let _ = writeln!(s, "max deviation {dev:.3e}");
    let code = if dev <= 1e-8 { EXIT_OK } else { EXIT_MATH };
    Ok(Outcome { stdout: s, code })
}
