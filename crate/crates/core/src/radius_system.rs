//! Radius function on the dual sublattice: the border, hexagonal and
//! three-circle relations, the sequential fill, duality and the c=2 data.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::lattice::{
    a_site, b_site, fill_order, hex_pivot, hex_slots, MultiIndex, Source, SubIndex,
};
use crate::pattern_core::{generate_z_with, InitialData, PatternParams};
use crate::real::Real;

/// Relation family used at a site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StencilType {
    /// border relation along the K axis (uses alpha3)
    TypeI,
    /// border relation along the L axis (uses alpha2)
    TypeII,
    /// six-point relation
    TypeIII,
    /// three-circle relation
    TypeIV,
}

impl StencilType {
    pub fn arity(self) -> usize {
        match self {
            StencilType::TypeIII => 6,
            _ => 3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RadiusField<R> {
    pub params: PatternParams<R>,
    pub values: BTreeMap<SubIndex, R>,
    pub sources: BTreeMap<SubIndex, Source>,
    /// zero radii or poles, excluded from positivity and residual checks
    pub singular: BTreeSet<SubIndex>,
    pub generation: i64,
    pub normalized: bool,
}

impl<R: Real> RadiusField<R> {
    pub fn get(&self, s: &SubIndex) -> Option<&R> {
        self.values.get(s)
    }

    /// Value at a regular site.
    fn regular(&self, s: &SubIndex) -> Option<R> {
        if self.singular.contains(s) {
            None
        } else {
            self.values.get(s).cloned()
        }
    }

    pub fn min_value(&self) -> Option<R> {
        self.values
            .iter()
            .filter(|(s, _)| !self.singular.contains(s))
            .map(|(_, v)| v.clone())
            .reduce(|a, b| if b < a { b } else { a })
    }

    pub fn all_positive(&self) -> bool {
        self.values
            .iter()
            .all(|(s, v)| self.singular.contains(s) || *v > R::zero())
    }
}

/// Border relation
/// (r1+r2)(r^2 - r2 r3 + r(r3-r2)cos) + (r3+r2)(r^2 - r2 r1 + r(r1-r2)cos).
/// `r` is the border circle, `r1`, `r3` its border neighbours and `r2` the
/// inner neighbour.
pub fn border_residual<R: Real>(r: &R, r1: &R, r2: &R, r3: &R, cos_a: &R) -> R {
    let rr = r.clone() * r.clone();
    let t1 = (r1.clone() + r2.clone())
        * (rr.clone() - r2.clone() * r3.clone()
            + r.clone() * (r3.clone() - r2.clone()) * cos_a.clone());
    let t2 = (r3.clone() + r2.clone())
        * (rr - r2.clone() * r1.clone() + r.clone() * (r1.clone() - r2.clone()) * cos_a.clone());
    t1 + t2
}

/// Solves the border relation for `r3`, the next border radius.
pub fn border_solve<R: Real>(r: &R, r1: &R, r2: &R, cos_a: &R) -> Result<R> {
    let x = r.clone() * r.clone() - r2.clone() * r1.clone()
        + r.clone() * (r1.clone() - r2.clone()) * cos_a.clone();
    let s = r1.clone() + r2.clone();
    let coef_a = s.clone() * (r.clone() * cos_a.clone() - r2.clone()) + x.clone();
    let coef_b =
        s * (r.clone() * r.clone() - r.clone() * r2.clone() * cos_a.clone()) + r2.clone() * x;
    if coef_a.is_zero() {
        return Err(Error::Infinity);
    }
    Ok(-coef_b / coef_a)
}

/// Six-point relation at pivot p:
/// sum of C (x - y)/(x + y) - (c - 1), with coefficients
/// (L+M+1) for (r4, r1), (M+K+1) for (r6, r3), (K+L+1) for (r2, r5).
/// Pairs with zero coefficient are skipped and may be absent.
pub fn hex_residual<R: Real>(p: SubIndex, slots: &[Option<R>; 6], c: &R) -> Result<R> {
    let mut acc = -(c.clone() - R::one());
    for (coef, x, y) in hex_pairs(p) {
        if coef == 0 {
            continue;
        }
        let (Some(xv), Some(yv)) = (&slots[x], &slots[y]) else {
            return Err(Error::DegenerateStencil(p));
        };
        let den = xv.clone() + yv.clone();
        if den.is_zero() {
            return Err(Error::DegenerateStencil(p));
        }
        acc = acc + R::from_i64(coef) * (xv.clone() - yv.clone()) / den;
    }
    Ok(acc)
}

fn hex_pairs(p: SubIndex) -> [(i64, usize, usize); 3] {
    [
        (p.l + p.m + 1, 3, 0),
        (p.m + p.k + 1, 5, 2),
        (p.k + p.l + 1, 1, 4),
    ]
}

/// Solves the six-point relation for the single missing slot.
pub fn hex_solve<R: Real>(p: SubIndex, slots: &[Option<R>; 6], c: &R) -> Result<R> {
    let missing: Vec<usize> = (0..6).filter(|i| slots[*i].is_none()).collect();
    let pairs = hex_pairs(p);
    let unknown = match missing.as_slice() {
        [u] => *u,
        _ => {
            // all missing slots must belong to dropped pairs except one
            let live: Vec<usize> = missing
                .iter()
                .copied()
                .filter(|i| {
                    pairs
                        .iter()
                        .any(|(cf, x, y)| *cf != 0 && (x == i || y == i))
                })
                .collect();
            match live.as_slice() {
                [u] => *u,
                _ => return Err(Error::DegenerateStencil(p)),
            }
        }
    };
    let (coef, x, y) = *pairs
        .iter()
        .find(|(_, x, y)| *x == unknown || *y == unknown)
        .expect("every slot is in a pair");
    if coef == 0 {
        return Err(Error::DegenerateStencil(p));
    }
    let mut w = c.clone() - R::one();
    for (cf, a, b) in pairs {
        if cf == 0 || (a, b) == (x, y) {
            continue;
        }
        let (Some(av), Some(bv)) = (&slots[a], &slots[b]) else {
            return Err(Error::DegenerateStencil(p));
        };
        let den = av.clone() + bv.clone();
        if den.is_zero() {
            return Err(Error::DegenerateStencil(p));
        }
        w = w - R::from_i64(cf) * (av.clone() - bv.clone()) / den;
    }
    let t = w / R::from_i64(coef);
    let one = R::one();
    if unknown == x {
        let yv = slots[y].clone().ok_or(Error::DegenerateStencil(p))?;
        let den = one.clone() - t.clone();
        if den.is_zero() {
            return Err(Error::DegenerateStencil(p));
        }
        Ok(yv * (one + t) / den)
    } else {
        let xv = slots[x].clone().ok_or(Error::DegenerateStencil(p))?;
        let den = one.clone() + t.clone();
        if den.is_zero() {
            return Err(Error::DegenerateStencil(p));
        }
        Ok(xv * (one - t) / den)
    }
}

/// Three-circle relation
/// (r1 r2 s2 + r2 r3 s3 + r3 r1 s1) / (r1 s3 + r2 s1 + r3 s2), s_i = sin alpha_i.
pub fn tri_solve<R: Real>(r1: &R, r2: &R, r3: &R, sines: &[R; 3]) -> R {
    let [s1, s2, s3] = sines;
    let num = r1.clone() * r2.clone() * s2.clone()
        + r2.clone() * r3.clone() * s3.clone()
        + r3.clone() * r1.clone() * s1.clone();
    let den = r1.clone() * s3.clone() + r2.clone() * s1.clone() + r3.clone() * s2.clone();
    num / den
}

/// The three-circle relation solved for its middle argument given the result `b`.
pub fn tri_solve_middle<R: Real>(b: &R, r1: &R, r3: &R, sines: &[R; 3]) -> Result<R> {
    let [s1, s2, s3] = sines;
    let num = b.clone() * (r1.clone() * s3.clone() + r3.clone() * s2.clone())
        - r1.clone() * r3.clone() * s1.clone();
    let den = r1.clone() * s2.clone() + r3.clone() * s3.clone() - b.clone() * s1.clone();
    if den.is_zero() {
        return Err(Error::Infinity);
    }
    Ok(num / den)
}

/// Seeds r(0,0,0), r(1,0,-1), r(0,1,-1) and, for c=2, r(1,1,-1).
#[derive(Debug, Clone)]
pub enum SeedSource<R> {
    /// distances in a depth-two run of the cross-ratio evolution
    Pattern,
    /// the closed-form border ratio
    Closed,
    Explicit {
        a10: R,
        a01: R,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Seeds<R> {
    pub a00: R,
    pub a10: R,
    pub a01: R,
    /// only for c=2, where the six-point relation at the first pivot is void
    pub b11: Option<R>,
}

/// c=2 initial radii: r(0,0,0)=0, sin(a3)/a3, sin(a2)/a2 and r(1,1,-1)=1.
pub fn z2_initial<R: Real>(params: &PatternParams<R>) -> Result<Seeds<R>> {
    let a2 = params.alpha[1].clone();
    let a3 = params.alpha[2].clone();
    if !(a2 > R::zero()) || !(a3 > R::zero()) {
        return Err(Error::InvalidParams("alpha must be positive".into()));
    }
    Ok(Seeds {
        a00: R::zero(),
        a10: a3.sin() / a3,
        a01: a2.sin() / a2,
        b11: Some(R::one()),
    })
}

pub fn resolve_seeds<R: Real>(params: &PatternParams<R>, src: &SeedSource<R>) -> Result<Seeds<R>> {
    if params.is_c(2.0) {
        let mut s = z2_initial(params)?;
        if let SeedSource::Explicit { a10, a01 } = src {
            s.a10 = a10.clone();
            s.a01 = a01.clone();
        }
        return Ok(s);
    }
    let (a10, a01) = match src {
        SeedSource::Pattern => {
            let zf = generate_z_with(params, 2, &InitialData::standard(params))?;
            let r = |p: MultiIndex| zf.radius_at(&p).ok_or(Error::IncompleteStencil(p));
            (r(MultiIndex::new(1, 0, -1))?, r(MultiIndex::new(0, 1, -1))?)
        }
        SeedSource::Closed => (
            crate::riccati::p0_closed(&params.c, &params.alpha[2])?,
            crate::riccati::p0_closed(&params.c, &params.alpha[1])?,
        ),
        SeedSource::Explicit { a10, a01 } => (a10.clone(), a01.clone()),
    };
    Ok(Seeds {
        a00: R::one(),
        a10,
        a01,
        b11: None,
    })
}

fn check_positive<R: Real>(
    site: SubIndex,
    v: R,
    deps: &[SubIndex],
    values: &BTreeMap<SubIndex, R>,
) -> Result<R> {
    let f = v.to_f64();
    if v > R::zero() && f.is_finite() {
        return Ok(v);
    }
    Err(Error::Positivity {
        site,
        value: f,
        upstream: deps
            .iter()
            .filter_map(|d| values.get(d).map(|x| (*d, x.to_f64())))
            .collect(),
    })
}

/// Fill the radius function on the hexagonal dual region up to generation
/// `n`, following the sequential fill order.
pub fn generate_radii<R: Real>(
    params: &PatternParams<R>,
    n: i64,
    seeds: &SeedSource<R>,
) -> Result<RadiusField<R>> {
    let seeds = resolve_seeds(params, seeds)?;
    generate_radii_from(params, n, &seeds)
}

pub fn generate_radii_from<R: Real>(
    params: &PatternParams<R>,
    n: i64,
    seeds: &Seeds<R>,
) -> Result<RadiusField<R>> {
    let order = fill_order(n);
    let sines = params.sines();
    let cos3 = params.alpha[2].cos();
    let cos2 = params.alpha[1].cos();
    let mut values: BTreeMap<SubIndex, R> = BTreeMap::new();
    let mut sources = BTreeMap::new();
    let mut singular = BTreeSet::new();
    for e in order.iter() {
        let s = e.site;
        let (v, src) = match e.source {
            Source::Seed => {
                let v = if s == a_site(0, 0) {
                    seeds.a00.clone()
                } else if s == a_site(1, 0) {
                    seeds.a10.clone()
                } else {
                    seeds.a01.clone()
                };
                if v.is_zero() {
                    singular.insert(s);
                    values.insert(s, v);
                    sources.insert(s, Source::Seed);
                    continue;
                }
                (check_positive(s, v, &[], &values)?, Source::Seed)
            }
            Source::Hex if s == b_site(1, 1) && seeds.b11.is_some() => {
                (seeds.b11.clone().expect("checked"), Source::Seed)
            }
            Source::Hex => {
                let p = hex_pivot(s.k, s.l);
                let labels = hex_slots(p);
                let mut slots: [Option<R>; 6] = Default::default();
                for (i, lab) in labels.iter().enumerate() {
                    if *lab != s {
                        slots[i] = values.get(lab).cloned();
                    }
                }
                (hex_solve(p, &slots, &params.c)?, Source::Hex)
            }
            Source::Border => {
                let [prev, prev2, side] = [e.deps[0], e.deps[1], e.deps[2]];
                let cos = if s.l == 0 { &cos3 } else { &cos2 };
                let v = border_solve(&values[&prev], &values[&prev2], &values[&side], cos)?;
                (v, Source::Border)
            }
            Source::Tri => {
                let b = &values[&e.deps[0]];
                let below = &values[&e.deps[1]];
                let left = &values[&e.deps[2]];
                (tri_solve_middle(b, below, left, &sines)?, Source::Tri)
            }
        };
        let v = check_positive(s, v, &e.deps, &values)?;
        values.insert(s, v);
        sources.insert(s, src);
    }
    Ok(RadiusField {
        params: params.clone(),
        values,
        sources,
        singular,
        generation: n,
        normalized: true,
    })
}

/// Involution r -> 1/r, c -> 2 - c; zero radii become poles and back.
pub fn dual<R: Real>(rf: &RadiusField<R>) -> RadiusField<R> {
    let values = rf
        .values
        .iter()
        .map(|(s, v)| {
            if rf.singular.contains(s) {
                // a stored zero turns into a pole and vice versa; both are kept as 0
                (*s, v.clone())
            } else {
                (*s, R::one() / v.clone())
            }
        })
        .collect();
    RadiusField {
        params: rf.params.with_c(R::from_i64(2) - rf.params.c.clone()),
        values,
        sources: rf.sources.clone(),
        singular: rf.singular.clone(),
        generation: rf.generation,
        normalized: rf.normalized,
    }
}

/// Largest residuals of each relation over the sites where they apply and
/// all inputs are regular.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RadiusResiduals {
    pub border: f64,
    pub hex: f64,
    pub tri: f64,
    /// number of relation instances evaluated
    pub count: usize,
}

impl RadiusResiduals {
    pub fn max(&self) -> f64 {
        self.border.max(self.hex).max(self.tri)
    }
}

pub fn radius_residuals<R: Real>(rf: &RadiusField<R>) -> RadiusResiduals {
    let mut out = RadiusResiduals::default();
    let sines = rf.params.sines();
    let c = &rf.params.c;
    let cos = [rf.params.alpha[1].cos(), rf.params.alpha[2].cos()];
    let n = rf.generation;
    for j in 2..=n {
        for along_k in [true, false] {
            let (s, prev, prev2, side, cs) = if along_k {
                (
                    a_site(j, 0),
                    a_site(j - 1, 0),
                    a_site(j - 2, 0),
                    b_site(j - 1, 1),
                    &cos[1],
                )
            } else {
                (
                    a_site(0, j),
                    a_site(0, j - 1),
                    a_site(0, j - 2),
                    b_site(1, j - 1),
                    &cos[0],
                )
            };
            if let (Some(r3), Some(r), Some(r1), Some(r2)) = (
                rf.regular(&s),
                rf.regular(&prev),
                rf.regular(&prev2),
                rf.regular(&side),
            ) {
                let scale = R::max_of(
                    R::max_of(r.clone(), r1.clone()),
                    R::max_of(r2.clone(), r3.clone()),
                );
                let res = border_residual(&r, &r1, &r2, &r3, cs).abs()
                    / (scale.clone() * scale.clone() * scale);
                out.border = out.border.max(res.to_f64());
                out.count += 1;
            }
        }
    }
    // six-point relation at every pivot whose live slots are regular
    for lvl in 2..=n + 1 {
        for k in 1..lvl {
            let p = hex_pivot(k, lvl - k);
            let labels = hex_slots(p);
            let slots: [Option<R>; 6] = labels.map(|l| rf.regular(&l));
            if let Ok(r) = hex_residual(p, &slots, c) {
                out.hex = out.hex.max(r.abs().to_f64());
                out.count += 1;
            }
        }
    }
    // three-circle relation around every sum-one label
    for (s, b) in &rf.values {
        if s.sum() != 1 || rf.singular.contains(s) {
            continue;
        }
        let (k, l) = (s.k, s.l);
        if let (Some(r1), Some(r2), Some(r3)) = (
            rf.regular(&a_site(k, l - 1)),
            rf.regular(&a_site(k, l)),
            rf.regular(&a_site(k - 1, l)),
        ) {
            let t = tri_solve(&r1, &r2, &r3, &sines);
            out.tri = out.tri.max(((t - b.clone()) / b.clone()).abs().to_f64());
            out.count += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern_core::generate_z;

    fn iso(c: f64) -> PatternParams<f64> {
        PatternParams::isotropic(c).unwrap()
    }

    #[test]
    fn border_constant_solution() {
        for a in [0.3, 1.0, 2.5] {
            let v = border_solve(&1.7, &1.7, &1.7, &f64::cos(a)).unwrap();
            assert!((v - 1.7).abs() < 1e-14);
        }
    }

    #[test]
    fn border_solve_has_small_residual() {
        let cs = f64::cos(0.9);
        let (r, r1, r2) = (1.3, 0.8, 1.6);
        let r3 = border_solve(&r, &r1, &r2, &cs).unwrap();
        assert!(border_residual(&r, &r1, &r2, &r3, &cs).abs() < 1e-12);
    }

    #[test]
    fn hex_examples() {
        let p = hex_pivot(1, 1);
        let mut slots: [Option<f64>; 6] = [None; 6];
        slots[4] = Some(1.0);
        let v = hex_solve(p, &slots, &1.5).unwrap();
        assert!((v - 3.0).abs() < 1e-14);
        for c in [0.25, 0.5, 1.0, 1.75] {
            let v = hex_solve(p, &slots, &c).unwrap();
            assert!((v - c / (2.0 - c)).abs() < 1e-14);
        }
        // regular pattern: equal radii around any pivot
        let p = hex_pivot(3, 2);
        let mut slots = [Some(2.0); 6];
        slots[1] = None;
        assert!((hex_solve(p, &slots, &1.0).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn hex_solve_any_slot() {
        let p = hex_pivot(3, 4);
        let full = [
            Some(1.1),
            Some(1.7),
            Some(0.9),
            Some(1.3),
            Some(1.2),
            Some(0.8),
        ];
        let mut slots = full;
        slots[1] = None;
        let v = hex_solve(p, &slots, &1.4).unwrap();
        slots[1] = Some(v);
        for i in 0..6 {
            let mut s = slots;
            s[i] = None;
            let back = hex_solve(p, &s, &1.4).unwrap();
            assert!((back - slots[i].unwrap()).abs() < 1e-12, "slot {i}");
        }
        assert!(hex_residual(p, &slots, &1.4).unwrap().abs() < 1e-14);
    }

    #[test]
    fn tri_examples() {
        let s = iso(1.0).sines();
        assert!((tri_solve(&1.0, &2.0, &3.0, &s) - 11.0 / 6.0).abs() < 1e-14);
        assert!((tri_solve(&0.7, &0.7, &0.7, &s) - 0.7).abs() < 1e-15);
        let b = tri_solve(&1.0, &2.0, &3.0, &s);
        assert!((tri_solve_middle(&b, &1.0, &3.0, &s).unwrap() - 2.0).abs() < 1e-13);
    }

    #[test]
    fn regular_pattern_has_unit_radii() {
        let rf = generate_radii(&iso(1.0), 10, &SeedSource::Closed).unwrap();
        for v in rf.values.values() {
            assert!((v - 1.0).abs() < 1e-12);
        }
        assert_eq!(rf.sources[&b_site(3, 4)], Source::Hex);
        assert_eq!(rf.sources[&a_site(5, 0)], Source::Border);
        assert_eq!(rf.sources[&a_site(2, 3)], Source::Tri);
    }

    #[test]
    fn pattern_seeds_drift_in_double_but_not_extended() {
        use crate::real::Ext;
        let rf = generate_radii(&iso(1.0), 10, &SeedSource::Pattern).unwrap();
        let worst = rf
            .values
            .values()
            .map(|v| (v - 1.0).abs())
            .fold(0.0, f64::max);
        assert!(worst > 1e-12 && worst < 1e-4);
        let p = PatternParams::<Ext>::isotropic(Ext::from_f64(1.0)).unwrap();
        let rf = generate_radii(&p, 10, &SeedSource::Pattern).unwrap();
        for v in rf.values.values() {
            assert!((v.clone() - Ext::from_f64(1.0)).abs() < Ext::from_f64(1e-100));
        }
    }

    #[test]
    fn first_diagonal_step_is_g0() {
        for c in [0.5, 1.5] {
            let rf = generate_radii(&iso(c), 3, &SeedSource::Closed).unwrap();
            let g0 = c / (2.0 - c);
            assert!((rf.values[&b_site(1, 1)] / rf.values[&a_site(0, 0)] - g0).abs() < 1e-14);
        }
    }

    #[test]
    fn matches_pattern_distances() {
        let p = PatternParams::<f64>::from_f64(
            [
                std::f64::consts::FRAC_PI_4,
                std::f64::consts::FRAC_PI_4,
                std::f64::consts::FRAC_PI_2,
            ],
            0.5,
        )
        .unwrap();
        let rf = generate_radii(&p, 5, &SeedSource::Pattern).unwrap();
        let zf = generate_z(&p, 14).unwrap();
        for (s, v) in &rf.values {
            let r = zf.radius_at(&s.center()).unwrap();
            assert!(((r - v) / r).abs() < 1e-8, "{s}");
        }
    }

    #[test]
    fn closed_seeds_agree_with_pattern_seeds() {
        for c in [0.25, 0.75, 1.5] {
            let a = resolve_seeds(&iso(c), &SeedSource::Pattern).unwrap();
            let b = resolve_seeds(&iso(c), &SeedSource::<f64>::Closed).unwrap();
            assert!((a.a10 - b.a10).abs() < 1e-12);
            assert!((a.a01 - b.a01).abs() < 1e-12);
        }
    }

    #[test]
    fn perturbed_seed_loses_positivity() {
        let p = iso(1.5);
        let s = resolve_seeds(&p, &SeedSource::Pattern).unwrap();
        for f in [1.0 + 1e-3, 1.0 - 1e-3] {
            let bad = Seeds {
                a10: s.a10 * f,
                ..s.clone()
            };
            let r = generate_radii_from(&p, 40, &bad);
            assert!(matches!(r, Err(Error::Positivity { .. })), "factor {f}");
        }
    }

    #[test]
    fn z2_seed_values() {
        let p = iso(2.0);
        let s = z2_initial(&p).unwrap();
        assert!((s.a10 - 0.8269933431326881).abs() < 1e-15);
        assert!((s.a10 - s.a01).abs() < 1e-15);
        assert_eq!(s.b11, Some(1.0));
        assert_eq!(s.a00, 0.0);
    }

    #[test]
    fn z2_and_log_fields() {
        let p = iso(2.0);
        let rf = generate_radii(&p, 10, &SeedSource::Pattern).unwrap();
        assert!(rf.all_positive());
        assert!(rf.singular.contains(&a_site(0, 0)));
        assert!(radius_residuals(&rf).max() < 1e-9);
        let log = dual(&rf);
        assert_eq!(log.params.c, 0.0);
        let res = radius_residuals(&log);
        assert!(res.max() < 1e-9, "{res:?}");
        let back = dual(&log);
        assert_eq!(back.params.c, 2.0);
        for (s, v) in &rf.values {
            assert!((back.values[s] - v).abs() <= 1e-15 * v.abs().max(1.0));
        }
    }

    #[test]
    fn dual_preserves_relations_generically() {
        let p =
            PatternParams::<f64>::from_f64([0.8, 1.1, std::f64::consts::PI - 1.9], 0.7).unwrap();
        let rf = generate_radii(&p, 8, &SeedSource::Pattern).unwrap();
        assert!(radius_residuals(&rf).max() < 1e-10);
        let d = dual(&rf);
        assert!((d.params.c - 1.3).abs() < 1e-15);
        assert!(radius_residuals(&d).max() < 1e-9);
    }

    #[test]
    fn extended_precision_fill() {
        use crate::real::Ext;
        let p = PatternParams::<Ext>::isotropic(Ext::from_f64(1.5)).unwrap();
        let rf = generate_radii(&p, 6, &SeedSource::Pattern).unwrap();
        let res = radius_residuals(&rf);
        assert!(res.max() < 1e-100, "{res:?}");
    }
}
