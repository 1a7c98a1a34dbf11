//! Evolution of the discrete map z on Q by the face cross-ratio system and
//! the axis constraint, plus residual and Lax compatibility checks.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::lattice::{to_sub, MultiIndex, Region, SubIndex};
use crate::real::{cabs, carg, cis, cx, to_c64, Cx, Precision, Real};

pub fn pi_frac<R: Real>(num: i64, den: i64) -> R {
    R::pi() * R::from_i64(num) / R::from_i64(den)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatternParams<R> {
    pub alpha: [R; 3],
    pub c: R,
    pub precision: Precision,
}

impl<R: Real> PatternParams<R> {
    /// Validates the angles and exponent. The third angle is re-derived
    /// as pi - a1 - a2 in working precision once the sum has been checked.
    pub fn new(alpha: [R; 3], c: R) -> Result<Self> {
        for (i, a) in alpha.iter().enumerate() {
            if !(*a > R::zero()) {
                return Err(Error::InvalidParams(format!(
                    "alpha{} must be positive",
                    i + 1
                )));
            }
        }
        let sum = alpha[0].clone() + alpha[1].clone() + alpha[2].clone();
        if (sum - R::pi()).to_f64().abs() > 1e-12 {
            return Err(Error::InvalidParams("angles must sum to pi".into()));
        }
        if c < R::zero() || c > R::from_f64(2.0) {
            return Err(Error::InvalidParams(format!(
                "c={} outside [0,2]",
                c.to_f64()
            )));
        }
        let a3 = R::pi() - alpha[0].clone() - alpha[1].clone();
        if !(a3 > R::zero()) {
            return Err(Error::InvalidParams("alpha3 must be positive".into()));
        }
        let [a1, a2, _] = alpha;
        Ok(PatternParams {
            alpha: [a1, a2, a3],
            c,
            precision: R::PRECISION,
        })
    }

    pub fn isotropic(c: R) -> Result<Self> {
        let a = pi_frac::<R>(1, 3);
        Self::new([a.clone(), a.clone(), a], c)
    }

    pub fn from_f64(alpha: [f64; 3], c: f64) -> Result<Self> {
        Self::new(alpha.map(R::from_f64), R::from_f64(c))
    }

    pub fn sines(&self) -> [R; 3] {
        [
            self.alpha[0].sin(),
            self.alpha[1].sin(),
            self.alpha[2].sin(),
        ]
    }

    pub fn with_c(&self, c: R) -> Self {
        PatternParams {
            alpha: self.alpha.clone(),
            c,
            precision: self.precision,
        }
    }

    pub fn is_c(&self, v: f64) -> bool {
        self.c == R::from_f64(v)
    }

    /// e^{-2 i alpha_i} for the face type.
    pub fn face_target(&self, ty: FaceType) -> Cx<R> {
        let a = self.alpha[ty.index()].clone();
        cis(&(-(a.clone() + a)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FaceType {
    /// spanned by the k and l directions
    Alpha1,
    /// spanned by the l and m directions
    Alpha2,
    /// spanned by the k and m directions
    Alpha3,
}

impl FaceType {
    pub const ALL: [FaceType; 3] = [FaceType::Alpha1, FaceType::Alpha2, FaceType::Alpha3];

    pub fn index(self) -> usize {
        match self {
            FaceType::Alpha1 => 0,
            FaceType::Alpha2 => 1,
            FaceType::Alpha3 => 2,
        }
    }
}

/// Elementary quadrilateral identified by its type and base vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Face {
    pub ty: FaceType,
    pub base: MultiIndex,
}

impl Face {
    /// Vertices in the order used for the cross-ratio; the order is
    /// counterclockwise for an orientation-preserving pattern.
    pub fn vertices(&self) -> [MultiIndex; 4] {
        let p = self.base;
        match self.ty {
            FaceType::Alpha1 => [p, p.offset(0, 1, 0), p.offset(-1, 1, 0), p.offset(-1, 0, 0)],
            FaceType::Alpha2 => [p, p.offset(0, 0, -1), p.offset(0, 1, -1), p.offset(0, 1, 0)],
            FaceType::Alpha3 => [p, p.offset(1, 0, 0), p.offset(1, 0, -1), p.offset(0, 0, -1)],
        }
    }
}

/// Initial values on the three unit axis points; z_{0,0,0} is always 0.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialData<R> {
    pub z100: Cx<R>,
    pub z010: Cx<R>,
    pub z00m1: Cx<R>,
}

impl<R: Real> InitialData<R> {
    pub fn standard(p: &PatternParams<R>) -> Self {
        let c = p.c.clone();
        InitialData {
            z100: Cx::one(),
            z010: cis(&(c.clone() * (p.alpha[1].clone() + p.alpha[2].clone()))),
            z00m1: cis(&(c * p.alpha[2].clone())),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ZField<R> {
    pub params: PatternParams<R>,
    pub values: BTreeMap<MultiIndex, Cx<R>>,
    /// vertices satisfy k + l - m <= generation
    pub generation: i64,
    /// largest disagreement between alternative faces resolving one vertex
    pub overdetermination: f64,
}

impl<R: Real> ZField<R> {
    pub fn get(&self, p: &MultiIndex) -> Option<&Cx<R>> {
        self.values.get(p)
    }

    /// All faces whose four vertices are present.
    pub fn faces(&self) -> Vec<Face> {
        let mut out = Vec::new();
        for p in self.values.keys() {
            for ty in FaceType::ALL {
                let f = Face { ty, base: *p };
                if f.vertices().iter().all(|v| self.values.contains_key(v)) {
                    out.push(f);
                }
            }
        }
        out
    }

    pub fn face_points(&self, f: &Face) -> Option<[Cx<R>; 4]> {
        let v = f.vertices();
        Some([
            self.values.get(&v[0])?.clone(),
            self.values.get(&v[1])?.clone(),
            self.values.get(&v[2])?.clone(),
            self.values.get(&v[3])?.clone(),
        ])
    }

    /// Radius of the circle centered at the even vertex `p`, read off the
    /// first available axis neighbour.
    pub fn radius_at(&self, p: &MultiIndex) -> Option<R> {
        let z = self.values.get(p)?;
        p.axis_neighbours()
            .iter()
            .find_map(|q| self.values.get(q).map(|w| cabs(&(w.clone() - z.clone()))))
    }

    /// max/min ratio of distances to the available axis neighbours.
    pub fn kite_spread(&self, p: &MultiIndex) -> Option<f64> {
        let z = self.values.get(p)?;
        let d: Vec<f64> = p
            .axis_neighbours()
            .iter()
            .filter_map(|q| {
                self.values
                    .get(q)
                    .map(|w| cabs(&(w.clone() - z.clone())).to_f64())
            })
            .collect();
        if d.len() < 2 {
            return None;
        }
        let lo = d.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = d.iter().cloned().fold(0.0, f64::max);
        Some(hi / lo)
    }

    /// Radii at every even vertex with at least one neighbour, keyed by label.
    pub fn extract_radii(&self) -> BTreeMap<SubIndex, R> {
        let mut out = BTreeMap::new();
        for p in self.values.keys() {
            if p.is_even() {
                if let Some(r) = self.radius_at(p) {
                    out.insert(to_sub(*p).expect("even"), r);
                }
            }
        }
        out
    }

    pub fn restrict(&self, keep: impl Fn(&MultiIndex) -> bool) -> ZField<R> {
        ZField {
            params: self.params.clone(),
            values: self
                .values
                .iter()
                .filter(|(p, _)| keep(p))
                .map(|(p, z)| (*p, z.clone()))
                .collect(),
            generation: self.generation,
            overdetermination: self.overdetermination,
        }
    }

    pub fn to_f64(&self) -> ZField<f64> {
        ZField {
            params: PatternParams {
                alpha: self.params.alpha.clone().map(|a| a.to_f64()),
                c: self.params.c.to_f64(),
                precision: self.params.precision,
            },
            values: self.values.iter().map(|(p, z)| (*p, to_c64(z))).collect(),
            generation: self.generation,
            overdetermination: self.overdetermination,
        }
    }
}

pub fn cross_ratio<R: Real>(z1: &Cx<R>, z2: &Cx<R>, z3: &Cx<R>, z4: &Cx<R>) -> Result<Cx<R>> {
    let den = (z2.clone() - z3.clone()) * (z4.clone() - z1.clone());
    if den.is_zero() {
        return Err(Error::DegenerateQuad);
    }
    Ok((z1.clone() - z2.clone()) * (z3.clone() - z4.clone()) / den)
}

/// The point z4 with q(z1, z2, z3, z4) = q_target.
pub fn solve_fourth<R: Real>(
    z1: &Cx<R>,
    z2: &Cx<R>,
    z3: &Cx<R>,
    q_target: &Cx<R>,
) -> Result<Cx<R>> {
    if z1 == z2 || z2 == z3 || z1 == z3 {
        return Err(Error::DegenerateQuad);
    }
    let a = q_target.clone() * (z2.clone() - z3.clone());
    let b = z1.clone() - z2.clone();
    let den = a.clone() + b.clone();
    if den.is_zero() {
        return Err(Error::Infinity);
    }
    Ok((b * z3.clone() + a * z1.clone()) / den)
}

/// Next point along a coordinate axis from the constraint at distance n.
pub fn axis_next<R: Real>(n: i64, z_prev: &Cx<R>, z_cur: &Cx<R>, c: &R) -> Result<Cx<R>> {
    if n < 1 {
        return Err(Error::AxisDegenerate(n));
    }
    if z_prev == z_cur {
        return Err(Error::AxisDegenerate(n));
    }
    let cc = Cx::new(c.clone(), R::zero());
    let two_n = Cx::new(R::from_i64(2 * n), R::zero());
    let a = z_cur.clone() - z_prev.clone();
    let den = cc.clone() * z_cur.clone() - two_n.clone() * a.clone();
    if den.is_zero() {
        return Err(Error::AxisDegenerate(n));
    }
    Ok(z_cur.clone() * (cc * z_prev.clone() - two_n * a) / den)
}

fn taxicab_shell(d: i64) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    for k in 0..=d {
        for l in 0..=d - k {
            out.push(MultiIndex::new(k, l, -(d - k - l)));
        }
    }
    out
}

/// Candidate faces that determine vertex `p` from three vertices closer to
/// the origin, in priority order, as (known1, known2, known3, target).
fn resolving_faces<R: Real>(p: &MultiIndex, q: &[Cx<R>; 3]) -> Vec<([MultiIndex; 3], Cx<R>)> {
    let (k, l, m) = (p.k, p.l, p.m);
    let mut out = Vec::new();
    if k > 0 && l > 0 {
        out.push((
            [
                MultiIndex::new(k - 1, l, m),
                MultiIndex::new(k - 1, l - 1, m),
                MultiIndex::new(k, l - 1, m),
            ],
            q[0].clone(),
        ));
    }
    if l > 0 && m < 0 {
        out.push((
            [
                MultiIndex::new(k, l, m + 1),
                MultiIndex::new(k, l - 1, m + 1),
                MultiIndex::new(k, l - 1, m),
            ],
            Cx::<R>::one() / q[1].clone(),
        ));
    }
    if k > 0 && m < 0 {
        out.push((
            [
                MultiIndex::new(k - 1, l, m),
                MultiIndex::new(k - 1, l, m + 1),
                MultiIndex::new(k, l, m + 1),
            ],
            Cx::<R>::one() / q[2].clone(),
        ));
    }
    out
}

pub fn generate_z<R: Real>(params: &PatternParams<R>, n: i64) -> Result<ZField<R>> {
    if params.is_c(2.0) {
        return crate::geometry::z2_field(params, n);
    }
    generate_z_with(params, n, &InitialData::standard(params))
}

/// Fill Q up to taxicab distance `n` from arbitrary initial data.
pub fn generate_z_with<R: Real>(
    params: &PatternParams<R>,
    n: i64,
    init: &InitialData<R>,
) -> Result<ZField<R>> {
    if n < 1 {
        return Err(Error::InvalidParams("generation must be at least 1".into()));
    }
    if !(params.c > R::zero()) {
        return Err(Error::InvalidParams("c must be positive".into()));
    }
    let mut values = BTreeMap::new();
    values.insert(MultiIndex::new(0, 0, 0), Cx::<R>::zero());
    values.insert(MultiIndex::new(1, 0, 0), init.z100.clone());
    values.insert(MultiIndex::new(0, 1, 0), init.z010.clone());
    values.insert(MultiIndex::new(0, 0, -1), init.z00m1.clone());

    let axes: [(i64, i64, i64); 3] = [(1, 0, 0), (0, 1, 0), (0, 0, -1)];
    for (dk, dl, dm) in axes {
        let at = |j: i64| MultiIndex::new(dk * j, dl * j, dm * j);
        for j in 1..n {
            let zp = values[&at(j - 1)].clone();
            let zc = values[&at(j)].clone();
            let zn = axis_next(j, &zp, &zc, &params.c).map_err(|e| e.at(at(j + 1)))?;
            values.insert(at(j + 1), zn);
        }
    }

    let targets = [
        params.face_target(FaceType::Alpha1),
        params.face_target(FaceType::Alpha2),
        params.face_target(FaceType::Alpha3),
    ];
    let mut over = 0.0f64;
    for d in 2..=n {
        for p in taxicab_shell(d) {
            if values.contains_key(&p) {
                continue;
            }
            let faces = resolving_faces(&p, &targets);
            let mut first: Option<Cx<R>> = None;
            for (known, q) in faces {
                let z = solve_fourth(
                    &values[&known[0]],
                    &values[&known[1]],
                    &values[&known[2]],
                    &q,
                )
                .map_err(|e| e.at(p))?;
                match &first {
                    None => first = Some(z),
                    Some(z0) => {
                        let scale = 1.0 + cabs(z0).to_f64();
                        over = over.max(cabs(&(z.clone() - z0.clone())).to_f64() / scale);
                    }
                }
            }
            let z = first.ok_or(Error::IncompleteStencil(p))?;
            values.insert(p, z);
        }
    }
    // the cross-ratio system is consistent, so alternatives agree up to
    // the growth of rounding errors along the unstable directions
    let limit = 1e3 * (R::eps().to_f64() * 3.6f64.powi(n as i32)).max(R::eps().to_f64());
    if over > limit.max(1e-6) {
        return Err(Error::Domain(format!(
            "alternative faces disagree by {over:e} (limit {:e})",
            limit.max(1e-6)
        )));
    }
    Ok(ZField {
        params: params.clone(),
        values,
        generation: n,
        overdetermination: over,
    })
}

/// Solve the constraint at `p` for the unknown neighbour `target`
/// (one of the six axis neighbours), all other needed values present.
pub fn solve_constraint_neighbour<R: Real>(
    zf: &BTreeMap<MultiIndex, Cx<R>>,
    c: &R,
    p: &MultiIndex,
    target: &MultiIndex,
) -> Option<Cx<R>> {
    let z = zf.get(p)?.clone();
    let coeff = [p.k, p.l, p.m];
    let mut s = Cx::new(c.clone(), R::zero()) * z.clone();
    let mut solve: Option<(R, Cx<R>, bool)> = None;
    for (axis, n) in coeff.iter().enumerate() {
        let mut plus = *p;
        let mut minus = *p;
        match axis {
            0 => {
                plus.k += 1;
                minus.k -= 1
            }
            1 => {
                plus.l += 1;
                minus.l -= 1
            }
            _ => {
                plus.m += 1;
                minus.m -= 1
            }
        }
        if plus == *target || minus == *target {
            if *n == 0 {
                return None;
            }
            let other = if plus == *target { &minus } else { &plus };
            let zo = zf.get(other)?.clone();
            solve = Some((R::from_i64(2 * n), zo, plus == *target));
            continue;
        }
        if *n == 0 {
            continue;
        }
        let zp = zf.get(&plus)?.clone();
        let zm = zf.get(&minus)?.clone();
        let den = zp.clone() - zm.clone();
        if den.is_zero() {
            return None;
        }
        let two_n = Cx::new(R::from_i64(2 * n), R::zero());
        s = s - two_n * (zp - z.clone()) * (z.clone() - zm) / den;
    }
    let (two_n, zo, is_plus) = solve?;
    let two_n = Cx::new(two_n, R::zero());
    // 2n (z+ - z)(z - z-) = S (z+ - z-), linear-fractional in the unknown
    let result = if is_plus {
        let num = two_n.clone() * z.clone() * (z.clone() - zo.clone()) - s.clone() * zo.clone();
        let den = two_n * (z - zo) - s;
        if den.is_zero() {
            return None;
        }
        num / den
    } else {
        let num = two_n.clone() * z.clone() * (zo.clone() - z.clone()) - s.clone() * zo.clone();
        let den = two_n * (zo - z) - s;
        if den.is_zero() {
            return None;
        }
        num / den
    };
    Some(result)
}

/// Constraint residual c z - sum over axes of 2n (z+ - z)(z - z-)/(z+ - z-).
/// Axes with zero coefficient drop out and need no neighbours.
pub fn constraint_residual<R: Real>(zf: &ZField<R>, p: &MultiIndex) -> Result<Cx<R>> {
    let z = zf.get(p).ok_or(Error::IncompleteStencil(*p))?.clone();
    let mut acc = Cx::new(zf.params.c.clone(), R::zero()) * z.clone();
    let coeff = [p.k, p.l, p.m];
    let steps = [(1, 0, 0), (0, 1, 0), (0, 0, 1)];
    for (n, (dk, dl, dm)) in coeff.iter().zip(steps) {
        if *n == 0 {
            continue;
        }
        let zp = zf
            .get(&p.offset(dk, dl, dm))
            .ok_or(Error::IncompleteStencil(*p))?
            .clone();
        let zm = zf
            .get(&p.offset(-dk, -dl, -dm))
            .ok_or(Error::IncompleteStencil(*p))?
            .clone();
        let den = zp.clone() - zm.clone();
        if den.is_zero() {
            return Err(Error::DegenerateEdge);
        }
        let two_n = Cx::new(R::from_i64(2 * n), R::zero());
        acc = acc - two_n * (zp - z.clone()) * (z.clone() - zm) / den;
    }
    Ok(acc)
}

/// Lax edge matrix [[1, u], [mu Delta / u, 1]] with u = z_in - z_out.
#[derive(Debug, Clone, PartialEq)]
pub struct LaxMatrix<R> {
    pub u: Cx<R>,
    pub delta: Cx<R>,
}

pub type Mat2<R> = [[Cx<R>; 2]; 2];

impl<R: Real> LaxMatrix<R> {
    pub fn new(z_out: &Cx<R>, z_in: &Cx<R>, delta: Cx<R>) -> Result<Self> {
        let u = z_in.clone() - z_out.clone();
        if u.is_zero() {
            return Err(Error::DegenerateEdge);
        }
        Ok(LaxMatrix { u, delta })
    }

    pub fn eval(&self, mu: &Cx<R>) -> Mat2<R> {
        [
            [Cx::one(), self.u.clone()],
            [mu.clone() * self.delta.clone() / self.u.clone(), Cx::one()],
        ]
    }
}

pub fn mat_mul<R: Real>(a: &Mat2<R>, b: &Mat2<R>) -> Mat2<R> {
    let e =
        |i: usize, j: usize| a[i][0].clone() * b[0][j].clone() + a[i][1].clone() * b[1][j].clone();
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

pub fn mat_det<R: Real>(a: &Mat2<R>) -> Cx<R> {
    a[0][0].clone() * a[1][1].clone() - a[0][1].clone() * a[1][0].clone()
}

fn direction(a: &MultiIndex, b: &MultiIndex) -> usize {
    if a.k != b.k {
        0
    } else if a.l != b.l {
        1
    } else {
        2
    }
}

/// Face vertices rearranged as (lowest sum, two middle, highest sum).
fn oriented_square(f: &Face) -> [MultiIndex; 4] {
    let mut v = f.vertices();
    v.sort_by_key(|p| (p.sum(), p.k, p.l, p.m));
    [v[0], v[1], v[3], v[2]]
}

/// Edge phases delta for the k, l and m edge types (delta_k = 0).
#[derive(Debug, Clone, PartialEq)]
pub struct LaxCalibration<R> {
    pub delta: [R; 3],
}

impl<R: Real> LaxCalibration<R> {
    pub fn phase(&self, dir: usize) -> Cx<R> {
        cis(&self.delta[dir])
    }
}

/// Phase ratio Delta_{b->c} / Delta_{a->b} that makes the two products
/// around a face agree.
fn face_phase_ratio<R: Real>(zf: &ZField<R>, f: &Face) -> Option<(usize, usize, Cx<R>)> {
    let [a, b, c, d] = oriented_square(f);
    let za = zf.get(&a)?;
    let zb = zf.get(&b)?;
    let zc = zf.get(&c)?;
    let zd = zf.get(&d)?;
    let u = zb.clone() - za.clone();
    let v = zc.clone() - zb.clone();
    let w = zd.clone() - za.clone();
    let x = zc.clone() - zd.clone();
    let den = u.clone() * x.clone();
    if den.is_zero() || v.is_zero() || w.is_zero() {
        return None;
    }
    Some((direction(&a, &b), direction(&b, &c), v * w / den))
}

/// Fix delta_l from the first non-degenerate k-l face and delta_m from the
/// first non-degenerate k-m face; l-m faces are left as a consistency check.
pub fn calibrate_lax<R: Real>(zf: &ZField<R>) -> Result<LaxCalibration<R>> {
    let mut delta: [Option<R>; 3] = [Some(R::zero()), None, None];
    for f in zf.faces() {
        if f.ty == FaceType::Alpha2 {
            continue;
        }
        let Some((i, j, rho)) = face_phase_ratio(zf, &f) else {
            continue;
        };
        let (known, unknown, sign) = if i == 0 {
            (i, j, R::one())
        } else {
            (j, i, -R::one())
        };
        if known != 0 || delta[unknown].is_some() {
            continue;
        }
        delta[unknown] = Some(sign * carg(&rho));
        if delta.iter().all(|d| d.is_some()) {
            break;
        }
    }
    match delta {
        [Some(a), Some(b), Some(c)] => Ok(LaxCalibration { delta: [a, b, c] }),
        _ => Err(Error::Domain(
            "no non-degenerate reference faces for calibration".into(),
        )),
    }
}

/// Frobenius norm of L(b->c) L(a->b) - L(d->c) L(a->d), maximised over `mus`.
pub fn zero_curvature_residual<R: Real>(
    zf: &ZField<R>,
    f: &Face,
    cal: &LaxCalibration<R>,
    mus: &[Cx<R>],
) -> Result<R> {
    let [a, b, c, d] = oriented_square(f);
    let get = |p: &MultiIndex| zf.get(p).ok_or(Error::IncompleteStencil(*p));
    let (za, zb, zc, zd) = (get(&a)?, get(&b)?, get(&c)?, get(&d)?);
    let lab = LaxMatrix::new(za, zb, cal.phase(direction(&a, &b)))?;
    let lbc = LaxMatrix::new(zb, zc, cal.phase(direction(&b, &c)))?;
    let lad = LaxMatrix::new(za, zd, cal.phase(direction(&a, &d)))?;
    let ldc = LaxMatrix::new(zd, zc, cal.phase(direction(&d, &c)))?;
    let mut worst = R::zero();
    for mu in mus {
        let m1 = mat_mul(&lbc.eval(mu), &lab.eval(mu));
        let m2 = mat_mul(&ldc.eval(mu), &lad.eval(mu));
        let mut s = R::zero();
        for i in 0..2 {
            for j in 0..2 {
                let e = m1[i][j].clone() - m2[i][j].clone();
                s = s + e.norm_sqr();
            }
        }
        // compare relative to the size of the entries involved
        let scale = R::one() + cabs(&m1[0][1]) + cabs(&m1[1][0]);
        worst = R::max_of(worst, s.sqrt() / scale);
    }
    Ok(worst)
}

/// Three fixed generic sample points for the spectral parameter.
pub fn default_mu_samples<R: Real>() -> Vec<Cx<R>> {
    vec![
        cx(R::from_f64(0.37), R::from_f64(0.81)),
        cx(R::from_f64(-1.3), R::from_f64(0.45)),
        cx(R::from_f64(2.2), R::from_f64(-0.6)),
    ]
}

/// Worst |q - e^{-2i alpha}| over all faces with four distinct vertices.
pub fn max_cross_ratio_error<R: Real>(zf: &ZField<R>) -> f64 {
    let mut worst = 0.0f64;
    for f in zf.faces() {
        let [z1, z2, z3, z4] = zf.face_points(&f).expect("face present");
        if let Ok(q) = cross_ratio(&z1, &z2, &z3, &z4) {
            let e = cabs(&(q - zf.params.face_target(f.ty))).to_f64();
            worst = worst.max(e);
        }
    }
    worst
}

/// Worst constraint residual over vertices of Q whose stencil is present,
/// relative to 1 + |z|.
pub fn max_constraint_residual<R: Real>(zf: &ZField<R>) -> f64 {
    let mut worst = 0.0f64;
    for (p, z) in &zf.values {
        if !Region::Q.contains(p) {
            continue;
        }
        if let Ok(r) = constraint_residual(zf, p) {
            worst = worst.max(cabs(&r).to_f64() / (1.0 + cabs(z).to_f64()));
        }
    }
    worst
}

/// At c = 0 the constraint sum is a nonzero constant instead of c z.
/// Largest deviation of the sum from its mean over Q minus the origin,
/// relative to the mean.
pub fn max_constraint_spread<R: Real>(zf: &ZField<R>) -> f64 {
    let sums: Vec<Cx<R>> = zf
        .values
        .keys()
        .filter(|p| Region::Q.contains(*p) && **p != MultiIndex::new(0, 0, 0))
        .filter_map(|p| constraint_residual(zf, p).ok())
        .collect();
    if sums.is_empty() {
        return 0.0;
    }
    let n = R::from_i64(sums.len() as i64);
    let mean = sums.iter().cloned().fold(Cx::<R>::zero(), |a, b| a + b);
    let mean = Cx::new(mean.re / n.clone(), mean.im / n);
    let scale = cabs(&mean).to_f64().max(f64::MIN_POSITIVE);
    sums.iter()
        .map(|s| cabs(&(s.clone() - mean.clone())).to_f64() / scale)
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::Ext;
    use num_complex::Complex;

    type C = Complex<f64>;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn cross_ratio_examples() {
        let q = cross_ratio(&c(0., 0.), &c(1., 0.), &c(1., 1.), &c(0., 1.)).unwrap();
        assert!((q - c(-1., 0.)).norm() < 1e-15);
        let q = cross_ratio(&c(0., 0.), &c(1., 0.), &c(2., 0.), &c(3., 0.)).unwrap();
        assert!((q - c(-1. / 3., 0.)).norm() < 1e-15);
        assert_eq!(
            cross_ratio(&c(0., 0.), &c(1., 0.), &c(1., 0.), &c(2., 0.)),
            Err(Error::DegenerateQuad)
        );
    }

    #[test]
    fn cross_ratio_rotation_identities() {
        let z = [c(0.1, 0.3), c(1.2, -0.4), c(2.0, 0.9), c(-0.5, 1.7)];
        let q = cross_ratio(&z[0], &z[1], &z[2], &z[3]).unwrap();
        let q2 = cross_ratio(&z[2], &z[3], &z[0], &z[1]).unwrap();
        let q3 = cross_ratio(&z[3], &z[0], &z[1], &z[2]).unwrap();
        assert!((q - q2).norm() < 1e-14);
        assert!((q * q3 - c(1., 0.)).norm() < 1e-14);
    }

    #[test]
    fn solve_fourth_examples() {
        let z = solve_fourth(&c(0., 0.), &c(1., 0.), &c(1., 1.), &c(-1., 0.)).unwrap();
        assert!((z - c(0., 1.)).norm() < 1e-15);
        let z = solve_fourth(&c(0., 0.), &c(1., 0.), &c(2., 0.), &c(-1. / 3., 0.)).unwrap();
        assert!((z - c(3., 0.)).norm() < 1e-14);
        let z4 = c(0.3, -2.0);
        let q = cross_ratio(&c(0., 0.), &c(1., 0.), &c(2., 1.), &z4).unwrap();
        let back = solve_fourth(&c(0., 0.), &c(1., 0.), &c(2., 1.), &q).unwrap();
        assert!((back - z4).norm() < 1e-13);
    }

    #[test]
    fn axis_next_examples() {
        let z = axis_next(1, &c(0., 0.), &c(1., 0.), &1.0).unwrap();
        assert!((z - c(2., 0.)).norm() < 1e-15);
        for cc in [0.3, 0.5, 1.5, 1.9] {
            let z = axis_next(1, &c(0., 0.), &c(1., 0.), &cc).unwrap();
            assert!((z - c(2.0 / (2.0 - cc), 0.)).norm() < 1e-13);
        }
        let mut prev = c(0., 0.);
        let mut cur = c(1., 0.);
        for n in 1..20 {
            let next = axis_next(n, &prev, &cur, &1.0).unwrap();
            assert!((next - c((n + 1) as f64, 0.)).norm() < 1e-12);
            prev = cur;
            cur = next;
        }
        assert!(axis_next(0, &c(0., 0.), &c(1., 0.), &1.0).is_err());
        assert!(axis_next(2, &c(1., 0.), &c(1., 0.), &1.0).is_err());
    }

    #[test]
    fn c_one_is_the_linear_lattice() {
        let p =
            PatternParams::<f64>::from_f64([0.9, 1.1, std::f64::consts::PI - 2.0], 1.0).unwrap();
        let zf = generate_z(&p, 8).unwrap();
        let el = cis(&(p.alpha[1] + p.alpha[2]));
        let em = cis(&p.alpha[2]);
        for (q, z) in &zf.values {
            let expect = c(q.k as f64, 0.) + el * q.l as f64 - em * q.m as f64;
            assert!((z - expect).norm() < 1e-11, "{q}");
        }
        for r in zf.extract_radii().values() {
            assert!((r - 1.0).abs() < 1e-11);
        }
    }

    #[test]
    fn origin_and_unit_data() {
        let p = PatternParams::<f64>::isotropic(1.5).unwrap();
        let zf = generate_z(&p, 4).unwrap();
        assert_eq!(zf.values[&MultiIndex::new(0, 0, 0)], c(0., 0.));
        for q in [
            MultiIndex::new(1, 0, 0),
            MultiIndex::new(0, 1, 0),
            MultiIndex::new(0, 0, -1),
        ] {
            assert!((zf.values[&q].norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn generated_faces_hit_targets() {
        let p = PatternParams::<f64>::isotropic(1.5).unwrap();
        let zf = generate_z(&p, 10).unwrap();
        assert!(max_cross_ratio_error(&zf) < 1e-9);
        assert!(max_constraint_residual(&zf) < 1e-9);
    }

    #[test]
    fn kite_property_at_even_vertices() {
        let p =
            PatternParams::<f64>::from_f64([0.7, 1.0, std::f64::consts::PI - 1.7], 0.6).unwrap();
        let zf = generate_z(&p, 9).unwrap();
        for q in zf.values.keys().filter(|q| q.is_even()) {
            if let Some(s) = zf.kite_spread(q) {
                assert!(s <= 1.0 + 1e-9, "{q} spread {s}");
            }
        }
    }

    #[test]
    fn corrupted_vertex_breaks_constraint() {
        let p = PatternParams::<f64>::isotropic(1.5).unwrap();
        let mut zf = generate_z(&p, 8).unwrap();
        let bad = MultiIndex::new(2, 1, -1);
        *zf.values.get_mut(&bad).unwrap() += c(1e-2, 0.);
        let r = constraint_residual(&zf, &bad).unwrap();
        assert!(r.norm() >= 1e-3);
        let r = constraint_residual(&zf, &MultiIndex::new(3, 1, -1)).unwrap();
        assert!(r.norm() >= 1e-3);
    }

    #[test]
    fn constraint_neighbour_solve_matches_field() {
        let p = PatternParams::<f64>::isotropic(0.7).unwrap();
        let zf = generate_z(&p, 8).unwrap();
        let at = MultiIndex::new(2, 1, -1);
        for t in at.axis_neighbours() {
            let mut vals = zf.values.clone();
            let truth = vals.remove(&t).unwrap();
            let z = solve_constraint_neighbour(&vals, &p.c, &at, &t).unwrap();
            assert!((z - truth).norm() < 1e-10, "{t}");
        }
    }

    #[test]
    fn lax_identity_on_generated_faces() {
        let p =
            PatternParams::<f64>::from_f64([0.6, 1.2, std::f64::consts::PI - 1.8], 1.3).unwrap();
        let zf = generate_z(&p, 7).unwrap();
        let cal = calibrate_lax(&zf).unwrap();
        let mus = default_mu_samples::<f64>();
        for f in zf.faces() {
            let r = zero_curvature_residual(&zf, &f, &cal, &mus).unwrap();
            assert!(r < 1e-9, "{:?} {r}", f);
            let r0 = zero_curvature_residual(&zf, &f, &cal, &[c(0., 0.)]).unwrap();
            assert!(r0 < 1e-14);
        }
        // perturbing one vertex violates the identity on its faces
        let mut bad = zf.clone();
        *bad.values.get_mut(&MultiIndex::new(2, 2, -1)).unwrap() += c(1e-3, 0.);
        let f = Face {
            ty: FaceType::Alpha1,
            base: MultiIndex::new(3, 1, -1),
        };
        assert!(f.vertices().contains(&MultiIndex::new(2, 2, -1)));
        assert!(zero_curvature_residual(&bad, &f, &cal, &mus).unwrap() > 1e-6);
    }

    #[test]
    fn diagonal_radii_follow_g() {
        let cc = 1.5;
        let p = PatternParams::<f64>::isotropic(cc).unwrap();
        let zf = generate_z(&p, 12).unwrap();
        for k in 0..5i64 {
            let r0 = zf.radius_at(&MultiIndex::new(0, 0, -2 * k)).unwrap();
            let r1 = zf.radius_at(&MultiIndex::new(0, 0, -2 * k - 2)).unwrap();
            let g = (2.0 * k as f64 + cc) / (2.0 * k as f64 + 2.0 - cc);
            assert!((r1 / r0 - g).abs() < 1e-9, "K={k}");
        }
    }

    #[test]
    fn lax_matrix_at_zero() {
        let l = LaxMatrix::new(&c(0.2, 0.1), &c(1.0, -0.3), c(0., 1.)).unwrap();
        let m = l.eval(&c(0., 0.));
        assert_eq!(m[1][0], c(0., 0.));
        assert!((mat_det(&m) - c(1., 0.)).norm() < 1e-15);
    }

    #[test]
    fn extended_precision_field_is_tight() {
        let p = PatternParams::<Ext>::isotropic(Ext::from_f64(1.5)).unwrap();
        let zf = generate_z(&p, 14).unwrap();
        assert!(max_cross_ratio_error(&zf) < 1e-100);
        assert!(max_constraint_residual(&zf) < 1e-100);
    }

    #[test]
    fn params_validation() {
        assert!(PatternParams::<f64>::from_f64([1.0, 1.0, 1.0], 1.0).is_err());
        assert!(
            PatternParams::<f64>::from_f64([0.0, 1.0, std::f64::consts::PI - 1.0], 1.0).is_err()
        );
        assert!(PatternParams::<f64>::isotropic(2.5).is_err());
        assert!(PatternParams::<f64>::isotropic(2.0).is_ok());
    }
}
