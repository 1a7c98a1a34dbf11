//! Unitary boundary variables x_n on the border plane and their three-point
//! recurrence. Includes sector bookkeeping and a bisection search for the
//! initial angle of the trajectory that never leaves the sector (0, alpha).

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::real::{cabs, cis, cscale, Cx, Real};

#[derive(Debug, Clone, PartialEq)]
pub struct PainleveState<R> {
    pub n: i64,
    pub x_prev: Cx<R>,
    pub x_cur: Cx<R>,
    pub c: R,
    pub epsilon: Cx<R>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SectorTag {
    AI,
    AII,
    AIII,
    AIV,
    /// x = 1
    BoundaryLow,
    /// x = epsilon
    BoundaryHigh,
}

impl SectorTag {
    pub fn name(self) -> &'static str {
        match self {
            SectorTag::AI => "A_I",
            SectorTag::AII => "A_II",
            SectorTag::AIII => "A_III",
            SectorTag::AIV => "A_IV",
            SectorTag::BoundaryLow => "boundary(1)",
            SectorTag::BoundaryHigh => "boundary(eps)",
        }
    }

    /// Exits through the epsilon side steer the bracket down, exits through
    /// the 1 side steer it up.
    fn exits_high(self) -> Option<bool> {
        match self {
            SectorTag::AII | SectorTag::BoundaryHigh => Some(true),
            SectorTag::AIV | SectorTag::BoundaryLow => Some(false),
            _ => None,
        }
    }
}

fn near_zero<R: Real>(v: &R) -> bool {
    v.abs() <= R::eps() * R::from_i64(64)
}

/// Next value x_{n+1}. The relation is linear-fractional in x_{n+1}.
pub fn dpii_step<R: Real>(s: &PainleveState<R>) -> Result<Cx<R>> {
    let eps = &s.epsilon;
    let x = &s.x_cur;
    if *x == *eps {
        return Ok(-Cx::new(R::one(), R::zero()));
    }
    if x.re == R::one() && x.im.is_zero() {
        return Ok(-eps.clone());
    }
    let one = Cx::new(R::one(), R::zero());
    let eps2 = eps.clone() * eps.clone();
    let two = R::from_i64(2);
    let rhs = cscale(
        &(x.clone() * (eps2.clone() - one.clone()) / eps2.clone()),
        &(s.c.clone() / two),
    );
    let mut num = rhs;
    if s.n > 0 {
        let xp = &s.x_prev;
        let den = eps.clone() + xp.clone() * x.clone();
        if den.is_zero() {
            return Err(Error::StepSingular(s.n));
        }
        let fac = one.clone() - x.clone() * x.clone() / eps2;
        num = num
            + cscale(
                &(fac * (xp.clone() + eps.clone() * x.clone()) / den),
                &R::from_i64(s.n),
            );
    }
    let den = cscale(&(x.clone() * x.clone() - one), &R::from_i64(s.n + 1));
    let top = x.clone() / eps.clone() * den.clone() - num.clone() * eps.clone();
    let bot = num * x.clone() - den;
    if bot.is_zero() {
        return Err(Error::StepSingular(s.n));
    }
    Ok(top / bot)
}

/// e^{i c alpha / 2}.
pub fn x0_closed<R: Real>(c: &R, alpha: &R) -> Cx<R> {
    cis(&(c.clone() * alpha.clone() / R::from_i64(2)))
}

/// Classifies a unit-modulus value by the signs of Im(x) and Im(x e^{-i alpha}).
pub fn sector_of<R: Real>(x: &Cx<R>, alpha: &R) -> SectorTag {
    let e = cis(alpha);
    let s0 = x.im.clone();
    let rot = x.clone() * e.conj();
    let s1 = rot.im.clone();
    if near_zero(&s0) && x.re > R::zero() {
        return SectorTag::BoundaryLow;
    }
    if near_zero(&s1) && rot.re > R::zero() {
        return SectorTag::BoundaryHigh;
    }
    let zero = R::zero();
    if near_zero(&s0) {
        // x = -1
        return SectorTag::AII;
    }
    if near_zero(&s1) {
        // x = -epsilon
        return SectorTag::AIV;
    }
    match (s0 > zero, s1 > R::zero()) {
        (true, false) => SectorTag::AI,
        (true, true) => SectorTag::AII,
        (false, false) => SectorTag::AIV,
        (false, true) => SectorTag::AIII,
    }
}

#[derive(Debug, Clone)]
pub struct PainleveTrajectory<R> {
    /// x_0, x_1, ... up to the exit step inclusive
    pub xs: Vec<Cx<R>>,
    /// first index with x_n outside A_I and its sector
    pub exit: Option<(usize, SectorTag)>,
    /// largest | |x| - 1 | before renormalization
    pub unitarity_drift: f64,
}

impl<R: Real> PainleveTrajectory<R> {
    /// Number of leading values inside A_I.
    pub fn steps_in_sector(&self) -> usize {
        self.exit.map(|(n, _)| n).unwrap_or(self.xs.len())
    }

    pub fn stayed(&self) -> bool {
        self.exit.is_none()
    }
}

/// Iterates from x_0 = e^{i beta0} through x_n, stopping at the first exit
/// from A_I.
pub fn run_trajectory<R: Real>(
    c: &R,
    alpha: &R,
    beta0: &R,
    n: usize,
) -> Result<PainleveTrajectory<R>> {
    run_from(c, alpha, cis(beta0), n)
}

pub fn run_from<R: Real>(c: &R, alpha: &R, x0: Cx<R>, n: usize) -> Result<PainleveTrajectory<R>> {
    let eps = cis(alpha);
    let mut xs = vec![x0.clone()];
    let mut drift = 0.0f64;
    let tag = sector_of(&x0, alpha);
    if tag != SectorTag::AI {
        return Ok(PainleveTrajectory {
            xs,
            exit: Some((0, tag)),
            unitarity_drift: 0.0,
        });
    }
    let mut state = PainleveState {
        n: 0,
        x_prev: x0.clone(),
        x_cur: x0,
        c: c.clone(),
        epsilon: eps,
    };
    for i in 0..n {
        let raw = dpii_step(&state)?;
        let m = cabs(&raw);
        drift = drift.max((m.to_f64() - 1.0).abs());
        let next = cscale(&raw, &(R::one() / m));
        xs.push(next.clone());
        let tag = sector_of(&next, alpha);
        if tag != SectorTag::AI {
            return Ok(PainleveTrajectory {
                xs,
                exit: Some((i + 1, tag)),
                unitarity_drift: drift,
            });
        }
        state = PainleveState {
            n: state.n + 1,
            x_prev: state.x_cur,
            x_cur: next,
            c: state.c,
            epsilon: state.epsilon,
        };
    }
    Ok(PainleveTrajectory {
        xs,
        exit: None,
        unitarity_drift: drift,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShootResult<R> {
    pub lo: R,
    pub hi: R,
    /// a trial angle never left the sector within the run cap
    pub stayed: bool,
    pub bisections: usize,
}

impl<R: Real> ShootResult<R> {
    pub fn width(&self) -> R {
        self.hi.clone() - self.lo.clone()
    }

    pub fn contains(&self, beta: &R) -> bool {
        self.lo <= *beta && *beta <= self.hi
    }
}

/// Exit-side bisection on beta0 in [0, alpha]. The returned endpoints exit
/// A_I on opposite sides after at least `n` steps inside, and are at most
/// `tol` apart.
pub fn shoot<R: Real>(c: &R, alpha: &R, n: usize, tol: &R) -> Result<ShootResult<R>> {
    if n < 1 || !(*tol > R::zero()) {
        return Err(Error::InvalidParams(
            "shoot needs n >= 1 and tol > 0".into(),
        ));
    }
    let cap = 4 * n + 100;
    let side = |beta: &R| -> Result<(bool, usize, bool)> {
        let tr = run_trajectory(c, alpha, beta, cap)?;
        match tr.exit {
            None => Ok((false, tr.xs.len(), true)),
            Some((k, tag)) => {
                let high = tag.exits_high().ok_or_else(|| {
                    Error::NoBracket(format!("jump into {} at step {k}", tag.name()))
                })?;
                Ok((high, k, false))
            }
        }
    };
    let mut lo = R::zero();
    let mut hi = alpha.clone();
    // x_0 = 1 leaves through the 1 side, x_0 = epsilon through the epsilon side
    let mut lo_steps = 0usize;
    let mut hi_steps = 0usize;
    let two = R::from_i64(2);
    let floor = R::eps() * R::from_i64(16) * alpha.clone();
    let mut bisections = 0;
    loop {
        let width = hi.clone() - lo.clone();
        if width <= *tol && lo_steps >= n && hi_steps >= n {
            return Ok(ShootResult {
                lo,
                hi,
                stayed: false,
                bisections,
            });
        }
        if width <= floor {
            return Err(Error::NoBracket(format!(
                "precision floor reached after {bisections} bisections; endpoints last {lo_steps} and {hi_steps} steps"
            )));
        }
        let mid = (lo.clone() + hi.clone()) / two.clone();
        bisections += 1;
        let (high, steps, stayed) = side(&mid)?;
        if stayed {
            let h = tol.clone() / two.clone();
            return Ok(ShootResult {
                lo: mid.clone() - h.clone(),
                hi: mid + h,
                stayed: true,
                bisections,
            });
        }
        if high {
            hi = mid;
            hi_steps = steps;
        } else {
            lo = mid;
            lo_steps = steps;
        }
    }
}
