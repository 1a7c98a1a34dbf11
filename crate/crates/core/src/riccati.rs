//! Border radius ratios p_n = R_n / r_n: the discrete Riccati recurrence,
//! its linearization with hypergeometric solutions, and the closed-form
//! initial value of the unique positive solution.

use crate::error::{Error, Result};
use crate::real::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct RiccatiParams<R> {
    pub c: R,
    pub alpha: R,
    pub t: R,
}

impl<R: Real> RiccatiParams<R> {
    pub fn new(c: R, alpha: R) -> Result<Self> {
        if !(alpha > R::zero() && alpha < R::pi()) {
            return Err(Error::InvalidParams("alpha outside (0, pi)".into()));
        }
        let t = alpha.cos();
        Ok(RiccatiParams { c, alpha, t })
    }
}

/// g_n(c) = (2n + c) / (2n + 2 - c).
pub fn g<R: Real>(n: i64, c: &R) -> Result<R> {
    let den = R::from_i64(2 * n + 2) - c.clone();
    if den.is_zero() {
        return Err(Error::InvalidParams(format!(
            "g_{n} has a pole at c={}",
            c.to_f64()
        )));
    }
    Ok((R::from_i64(2 * n) + c.clone()) / den)
}

/// p_{n+1} = (g_n - t p_n) / (p_n - t g_n).
pub fn riccati_step<R: Real>(p: &R, n: i64, prm: &RiccatiParams<R>) -> Result<R> {
    let gn = g(n, &prm.c)?;
    let den = p.clone() - prm.t.clone() * gn.clone();
    if den.is_zero() {
        return Err(Error::StepPole(n));
    }
    Ok((gn - prm.t.clone() * p.clone()) / den)
}

/// sin(c alpha / 2) / sin((2 - c) alpha / 2).
pub fn p0_closed<R: Real>(c: &R, alpha: &R) -> Result<R> {
    if !(*c > R::zero() && *c < R::from_i64(2)) {
        return Err(Error::InvalidParams(
            "closed-form p0 needs 0 < c < 2".into(),
        ));
    }
    let half = alpha.clone() / R::from_i64(2);
    Ok((c.clone() * half.clone()).sin() / ((R::from_i64(2) - c.clone()) * half).sin())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<R> {
    pub values: Vec<R>,
    pub first_nonpositive: Option<usize>,
}

impl<R: Real> Trajectory<R> {
    pub fn last(&self) -> &R {
        self.values.last().expect("trajectory holds p0")
    }
}

/// Iterates the Riccati map from p0 through p_n; keeps going after a sign
/// change and stops only at a pole.
pub fn riccati_run<R: Real>(p0: R, n: usize, prm: &RiccatiParams<R>) -> Result<Trajectory<R>> {
    let mut values = Vec::with_capacity(n + 1);
    let mut first = None;
    let mut p = p0;
    for i in 0..=n {
        if first.is_none() && !(p > R::zero()) {
            first = Some(i);
        }
        values.push(p.clone());
        if i < n {
            p = riccati_step(&p, i as i64, prm)?;
        }
    }
    Ok(Trajectory {
        values,
        first_nonpositive: first,
    })
}

/// p_N along the trajectory started at the closed-form p0.
pub fn p_limit_check<R: Real>(prm: &RiccatiParams<R>, n: usize) -> Result<R> {
    let p0 = p0_closed(&prm.c, &prm.alpha)?;
    Ok(riccati_run(p0, n, prm)?.last().clone())
}

/// Gauss series F(a, b; cc; z). Truncation is only allowed once the term
/// ratio has settled (k + cc > 0) and two consecutive terms are below
/// `tol |sum|`.
pub fn hyp_f(a: f64, b: f64, cc: f64, z: f64, tol: f64) -> Result<f64> {
    hyp_series(a, b, cc, z, tol, 0)
}

/// d/dz F(a, b; cc; z) by term-wise differentiation.
pub fn hyp_f_deriv(a: f64, b: f64, cc: f64, z: f64, tol: f64) -> Result<f64> {
    hyp_series(a, b, cc, z, tol, 1)
}

const MAX_TERMS: usize = 10_000;

fn hyp_series(a: f64, b: f64, cc: f64, z: f64, tol: f64, deriv: u32) -> Result<f64> {
    if !(z.abs() < 1.0) {
        return Err(Error::Domain(format!(
            "hypergeometric series needs |z| < 1, got {z}"
        )));
    }
    if cc <= 0.0 && cc.fract() == 0.0 {
        return Err(Error::Domain(format!("cc={cc} is a nonpositive integer")));
    }
    // coefficient of z^k is (a)_k (b)_k / ((cc)_k k!)
    let mut coef = 1.0f64;
    let mut zk = 1.0f64;
    let mut sum = if deriv == 0 { 1.0 } else { 0.0 };
    let mut small = 0;
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        coef *= (a + kf) * (b + kf) / ((cc + kf) * (kf + 1.0));
        let term = if deriv == 0 {
            zk *= z;
            coef * zk
        } else {
            // derivative of coef_{k+1} z^{k+1}
            let t = coef * (kf + 1.0) * zk;
            zk *= z;
            t
        };
        sum += term;
        if coef == 0.0 {
            return Ok(sum);
        }
        if kf + cc > 0.0 && term.abs() <= tol * sum.abs() {
            small += 1;
            if small >= 2 {
                return Ok(sum);
            }
        } else {
            small = 0;
        }
    }
    Err(Error::Domain(
        "hypergeometric series did not converge".into(),
    ))
}

fn ln_gamma(x: f64) -> Result<f64> {
    let (v, sign) = libm::lgamma_r(x);
    if !v.is_finite() || sign < 0 {
        return Err(Error::InvalidParams(format!(
            "gamma pole or negative value at {x}"
        )));
    }
    Ok(v)
}

/// Gamma(n + 1/2) / Gamma(n + 1 - c/2), via log differences.
pub fn gamma_ratio(n: i64, c: f64) -> Result<f64> {
    let nf = n as f64;
    Ok((ln_gamma(nf + 0.5)? - ln_gamma(nf + 1.0 - c / 2.0)?).exp())
}

/// The same ratio from Stirling's approximation of each factor.
pub fn gamma_ratio_stirling(n: i64, c: f64) -> f64 {
    let ln_st = |x: f64| 0.5 * (2.0 * std::f64::consts::PI).ln() - x + (x - 0.5) * x.ln();
    let nf = n as f64;
    (ln_st(nf + 0.5) - ln_st(nf + 1.0 - c / 2.0)).exp()
}

const SERIES_TOL: f64 = 1e-17;

/// Solution of the linearized recurrence
/// y_{n+2} + t (g_{n+1} + 1) y_{n+1} + (t^2 - 1) g_n y_n = 0
/// as c1 u_n + c2 v_n, where u_n grows like (-1-t)^n and v_n is the
/// subdominant solution behaving like (1-t)^n.
pub fn y_closed(n: i64, c1: f64, c2: f64, prm: &RiccatiParams<f64>) -> Result<f64> {
    if n < 0 {
        return Err(Error::InvalidParams("n must be nonnegative".into()));
    }
    let mut y = 0.0;
    if c1 != 0.0 {
        y += c1 * y_dominant(n, prm)?;
    }
    if c2 != 0.0 {
        y += c2 * y_minimal(n, prm)?;
    }
    Ok(y)
}

fn series_params(c: f64) -> (f64, f64) {
    ((3.0 - c) / 2.0, (c - 1.0) / 2.0)
}

fn y_dominant(n: i64, prm: &RiccatiParams<f64>) -> Result<f64> {
    let (c, t) = (prm.c, prm.t);
    let (a, b) = series_params(c);
    let nf = n as f64;
    let f = hyp_f(a, b, 0.5 - nf, (1.0 - t) / 2.0, SERIES_TOL)?;
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let ln_mag =
        ln_gamma(nf + 0.5)? - ln_gamma(nf + 1.0 - c / 2.0)? + (nf + 1.0 - c / 2.0) * (1.0 + t).ln();
    Ok(sign * ln_mag.exp() * f)
}

fn y_minimal(n: i64, prm: &RiccatiParams<f64>) -> Result<f64> {
    let (c, t) = (prm.c, prm.t);
    let (a, b) = series_params(c);
    let nf = n as f64;
    let f = hyp_f(a, b, nf + 1.5, (1.0 - t) / 2.0, SERIES_TOL)?;
    let ln_mag = ln_gamma(nf + c / 2.0)? + ln_gamma(nf + 2.0 - c / 2.0)?
        - ln_gamma(nf + 1.0 - c / 2.0)?
        - ln_gamma(nf + 1.5)?
        + (nf + 1.0 - c / 2.0) * (1.0 - t).ln();
    Ok(ln_mag.exp() * f)
}

/// Relative residual of the linear recurrence at (y_n, y_{n+1}, y_{n+2}).
pub fn linear_residual(n: i64, y: [f64; 3], prm: &RiccatiParams<f64>) -> Result<f64> {
    let t = prm.t;
    let g0 = g(n, &prm.c)?;
    let g1 = g(n + 1, &prm.c)?;
    let terms = [y[2], t * (g1 + 1.0) * y[1], (t * t - 1.0) * g0 * y[0]];
    let scale = terms.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return Ok(0.0);
    }
    Ok((terms[0] + terms[1] + terms[2]).abs() / scale)
}

/// p0 from the hypergeometric series s(z) = F(a, b; 3/2; 1 - z),
/// z = (1 + t)/2.
pub fn p0_via_series(prm: &RiccatiParams<f64>) -> Result<f64> {
    let c = prm.c;
    if !(c > 0.0 && c < 2.0) {
        return Err(Error::InvalidParams("series p0 needs 0 < c < 2".into()));
    }
    let z = (1.0 + prm.t) / 2.0;
    if z == 0.0 {
        return Ok(1.0);
    }
    let (a, b) = series_params(c);
    let s = hyp_f(a, b, 1.5, 1.0 - z, SERIES_TOL)?;
    let ds = -hyp_f_deriv(a, b, 1.5, 1.0 - z, SERIES_TOL)?;
    Ok(1.0 + 2.0 * (c - 1.0) * z / (2.0 - c) + 4.0 * z * (z - 1.0) * ds / ((2.0 - c) * s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::Ext;
    use std::f64::consts::PI;

    fn prm(c: f64, a: f64) -> RiccatiParams<f64> {
        RiccatiParams::new(c, a).unwrap()
    }

    #[test]
    fn g_examples() {
        assert_eq!(g(0, &1.0).unwrap(), 1.0);
        assert_eq!(g(0, &1.5).unwrap(), 3.0);
        assert!((g(1_000_000, &0.7).unwrap() - 1.0).abs() < 1e-6);
        assert!(g(0, &2.0).is_err());
    }

    #[test]
    fn step_examples() {
        let p = prm(1.0, 0.9);
        assert!((riccati_step(&1.0, 5, &p).unwrap() - 1.0).abs() < 1e-15);
        let p = prm(1.4, PI / 2.0);
        let next = riccati_step(&0.8, 3, &p).unwrap();
        assert!((next - g(3, &1.4).unwrap() / 0.8).abs() < 1e-14);
    }

    #[test]
    fn p0_closed_examples() {
        assert!((p0_closed(&1.0, &0.4).unwrap() - 1.0).abs() < 1e-15);
        assert!((p0_closed(&1.5, &(PI / 3.0)).unwrap() - 2.732050807568877).abs() < 1e-12);
        assert!((p0_closed(&0.5, &(PI / 2.0)).unwrap() - 0.41421356237309503).abs() < 1e-12);
    }

    #[test]
    fn hyp_f_basics() {
        assert_eq!(hyp_f(0.3, 0.7, 1.5, 0.0, 1e-16).unwrap(), 1.0);
        assert_eq!(hyp_f(1.0, 0.0, -3.5, 0.4, 1e-16).unwrap(), 1.0);
        // F(1, 1; 2; z) = -ln(1 - z) / z
        let z = 0.6;
        assert!((hyp_f(1.0, 1.0, 2.0, z, 1e-17).unwrap() + (1.0f64 - z).ln() / z).abs() < 1e-14);
        assert!(hyp_f(1.0, 1.0, 2.0, 1.0, 1e-16).is_err());
        // derivative of -ln(1-z)/z
        let d = (z / (1.0 - z) + (1.0f64 - z).ln()) / (z * z);
        assert!((hyp_f_deriv(1.0, 1.0, 2.0, z, 1e-17).unwrap() - d).abs() < 1e-12);
    }

    #[test]
    fn hyp_f_with_negative_cc_tends_to_one() {
        let (a, b) = series_params(1.5);
        let z = (1.0 - (PI / 3.0).cos()) / 2.0;
        let f = hyp_f(a, b, 0.5 - 200.0, z, 1e-17).unwrap();
        assert!((f - 1.0).abs() < 1e-3);
    }

    #[test]
    fn hyp_f_satisfies_gauss_equation() {
        let (a, b, cc) = (0.75, 0.25, -3.5);
        let z = 0.3;
        let h = 1e-4;
        let f = |x: f64| hyp_f(a, b, cc, x, 1e-17).unwrap();
        let (f0, fp, fm) = (f(z), f(z + h), f(z - h));
        let d1 = (fp - fm) / (2.0 * h);
        let d2 = (fp - 2.0 * f0 + fm) / (h * h);
        let res = z * (1.0 - z) * d2 + (cc - (a + b + 1.0) * z) * d1 - a * b * f0;
        assert!(res.abs() < 1e-5 * (1.0 + f0.abs()), "{res}");
    }

    #[test]
    fn closed_form_solves_linear_recurrence() {
        let p = prm(1.5, PI / 3.0);
        for (c1, c2) in [(1.0, 0.0), (0.0, 1.0), (0.37, -1.2)] {
            for n in 0..=20 {
                let y = [
                    y_closed(n, c1, c2, &p).unwrap(),
                    y_closed(n + 1, c1, c2, &p).unwrap(),
                    y_closed(n + 2, c1, c2, &p).unwrap(),
                ];
                assert!(
                    linear_residual(n, y, &p).unwrap() < 1e-10,
                    "n={n} ({c1},{c2})"
                );
            }
        }
    }

    #[test]
    fn minimal_branch_reproduces_closed_p0() {
        for c in [0.25, 0.75, 1.5] {
            for a in [PI / 6.0, PI / 3.0, 2.0 * PI / 5.0] {
                let p = prm(c, a);
                let y0 = y_closed(0, 0.0, 1.0, &p).unwrap();
                let y1 = y_closed(1, 0.0, 1.0, &p).unwrap();
                let p0 = y1 / y0 + p.t * g(0, &c).unwrap();
                assert!(
                    (p0 - p0_closed(&c, &a).unwrap()).abs() < 1e-12,
                    "c={c} a={a}"
                );
            }
        }
    }

    #[test]
    fn series_p0_matches_closed_form() {
        for c in [0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75] {
            for a in [PI / 6.0, PI / 4.0, PI / 3.0, 2.0 * PI / 5.0, PI / 2.0] {
                let p = prm(c, a);
                let d = (p0_via_series(&p).unwrap() - p0_closed(&c, &a).unwrap()).abs();
                assert!(d < 1e-10, "c={c} a={a} d={d}");
            }
        }
        assert_eq!(p0_via_series(&prm(1.0, 1.0)).unwrap(), 1.0);
    }

    #[test]
    fn stirling_ratio_within_one_percent() {
        for c in [0.25, 1.0, 1.75] {
            for n in [50, 100, 400] {
                let e = gamma_ratio(n, c).unwrap();
                let s = gamma_ratio_stirling(n, c);
                assert!(((e - s) / e).abs() < 0.01);
            }
        }
    }

    #[test]
    fn mobius_cross_ratio_is_invariant() {
        let p = prm(1.3, 1.1);
        let starts = [0.4, 1.7, 2.9, 5.0];
        let runs: Vec<_> = starts
            .iter()
            .map(|s| riccati_run(*s, 12, &p).unwrap())
            .collect();
        let q = |i: usize| {
            let v: Vec<f64> = runs.iter().map(|r| r.values[i]).collect();
            (v[0] - v[1]) * (v[2] - v[3]) / ((v[1] - v[2]) * (v[3] - v[0]))
        };
        let q0 = q(0);
        for i in 1..12 {
            assert!((q(i) - q0).abs() < 1e-8 * q0.abs().max(1.0), "n={i}");
        }
    }

    #[test]
    fn ansatz_matches_iteration() {
        let p = prm(1.5, PI / 3.0);
        let (c1, c2) = (0.2, 1.0);
        let y: Vec<f64> = (0..=22).map(|n| y_closed(n, c1, c2, &p).unwrap()).collect();
        let p0 = y[1] / y[0] + p.t * g(0, &p.c).unwrap();
        let run = riccati_run(p0, 20, &p).unwrap();
        for n in 0..=20 {
            let ans = y[n + 1] / y[n] + p.t * g(n as i64, &p.c).unwrap();
            assert!(
                (ans - run.values[n]).abs() < 1e-7 * ans.abs().max(1.0),
                "n={n}"
            );
        }
    }

    #[test]
    fn separatrix_and_perturbations_in_extended_precision() {
        let c = Ext::from_f64(1.5);
        let a = Ext::pi() / Ext::from_f64(3.0);
        let p = RiccatiParams::new(c.clone(), a.clone()).unwrap();
        let p0 = p0_closed(&c, &a).unwrap();
        let run = riccati_run(p0.clone(), 40, &p).unwrap();
        assert_eq!(run.first_nonpositive, None);
        assert!((run.last().to_f64() - 1.0).abs() < 0.05);
        for f in [1.0 + 1e-3, 1.0 - 1e-3] {
            let r = riccati_run(p0.clone() * Ext::from_f64(f), 40, &p).unwrap();
            assert!(r.first_nonpositive.is_some());
        }
    }

    #[test]
    fn unit_exponent_is_fixed() {
        let p = prm(1.0, 0.8);
        let run = riccati_run(1.0, 50, &p).unwrap();
        assert!(run.values.iter().all(|v| (*v - 1.0).abs() < 1e-15));
    }
}
