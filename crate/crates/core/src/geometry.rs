//! Planar geometry of the patterns: kite shapes, reconstruction of the map
//! from radii, immersion certificates, circles, and the square-grid slice.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::lattice::{to_sub, MultiIndex, Region, SubIndex};
use crate::pattern_core::{
    axis_next, cross_ratio, solve_constraint_neighbour, solve_fourth, Face, FaceType,
    PatternParams, ZField,
};
use crate::radius_system::{generate_radii, RadiusField, SeedSource};
use crate::real::{cabs, cis, cscale, to_c64, Cx, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KiteCase {
    /// equal sides at z1, positive orientation
    EqualSidesPositive,
    /// equal sides at z1, negative orientation
    EqualSidesNegative,
    /// angle alpha at z1, positive orientation
    AnglePositive,
    /// angle pi - alpha at z1, negative orientation
    AngleNegative,
}

fn interior_angle<R: Real>(at: &Cx<R>, a: &Cx<R>, b: &Cx<R>) -> f64 {
    let u = to_c64(&(a.clone() - at.clone()));
    let v = to_c64(&(b.clone() - at.clone()));
    (v / u).arg().abs()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

/// Decides which kite shape a quadrilateral with q = e^{-2i alpha} has and
/// checks the shape the case implies.
pub fn kite_classify<R: Real>(z: &[Cx<R>; 4], alpha: &R) -> Result<KiteCase> {
    let tol = 1e-7;
    let target = cis(&(-(alpha.clone() + alpha.clone())));
    let q = cross_ratio(&z[0], &z[1], &z[2], &z[3])?;
    if cabs(&(q - target)).to_f64() > 1e-6 {
        return Err(Error::NotAKite);
    }
    let a = alpha.to_f64();
    let pi = std::f64::consts::PI;
    let d = |i: usize, j: usize| cabs(&(z[i].clone() - z[j].clone())).to_f64();
    let w = to_c64(&(z[1].clone() - z[0].clone()));
    let v = to_c64(&(z[3].clone() - z[0].clone()));
    let orient = w.re * v.im - w.im * v.re;
    let equal = close(d(0, 1), d(0, 3), tol);
    let ang1 = interior_angle(&z[0], &z[1], &z[3]);
    let case = if equal && orient > 0.0 {
        KiteCase::EqualSidesPositive
    } else if equal && orient < 0.0 {
        KiteCase::EqualSidesNegative
    } else if close(ang1, a, tol) && orient > 0.0 {
        KiteCase::AnglePositive
    } else if close(ang1, pi - a, tol) && orient < 0.0 {
        KiteCase::AngleNegative
    } else {
        return Err(Error::NotAKite);
    };
    let ok = match case {
        KiteCase::EqualSidesPositive | KiteCase::EqualSidesNegative => {
            let ang2 = interior_angle(&z[1], &z[0], &z[2]);
            let want = if case == KiteCase::EqualSidesPositive {
                pi - a
            } else {
                a
            };
            close(d(2, 1), d(2, 3), tol) && close(ang2, want, tol)
        }
        _ => close(d(2, 1), d(0, 1), tol) && close(d(2, 3), d(3, 0), tol),
    };
    if ok {
        Ok(case)
    } else {
        Err(Error::NotAKite)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circle<R> {
    pub center: Cx<R>,
    pub radius: R,
    pub lattice_site: SubIndex,
}

#[derive(Debug, Clone)]
pub struct CirclePattern<R> {
    pub circles: Vec<Circle<R>>,
    pub intersections: BTreeMap<MultiIndex, Cx<R>>,
    /// pairs of circles sharing a face, with the angle between the radii
    /// at their common points
    pub adjacency: Vec<(SubIndex, SubIndex, R)>,
}

/// Kite view of a face: vertices ordered (center, point, center, point)
/// counterclockwise and the angle beta entering the side lengths.
#[derive(Debug, Clone, Copy)]
struct Kite {
    v: [MultiIndex; 4],
    odd: bool,
}

fn kite_of(f: &Face) -> Kite {
    let v = f.vertices();
    if f.base.is_even() {
        Kite { v, odd: false }
    } else {
        Kite {
            v: [v[1], v[2], v[3], v[0]],
            odd: true,
        }
    }
}

fn kite_beta<R: Real>(params: &PatternParams<R>, f: &Face) -> R {
    let a = params.alpha[f.ty.index()].clone();
    if f.base.is_even() {
        a
    } else {
        R::pi() - a
    }
}

pub fn circle_pattern<R: Real>(zf: &ZField<R>) -> CirclePattern<R> {
    let mut circles = Vec::new();
    let mut intersections = BTreeMap::new();
    for (p, z) in &zf.values {
        if p.is_even() {
            if let Some(r) = zf.radius_at(p) {
                circles.push(Circle {
                    center: z.clone(),
                    radius: r,
                    lattice_site: to_sub(*p).expect("even"),
                });
            }
        } else {
            intersections.insert(*p, z.clone());
        }
    }
    let mut adjacency = Vec::new();
    for f in zf.faces() {
        let k = kite_of(&f);
        let a = kite_beta(&zf.params, &f);
        adjacency.push((
            to_sub(k.v[0]).expect("even"),
            to_sub(k.v[2]).expect("even"),
            R::pi() - a,
        ));
    }
    CirclePattern {
        circles,
        intersections,
        adjacency,
    }
}

/// Largest distance mismatch between an intersection point and the
/// circles centered at its even neighbours.
pub fn max_incidence_error<R: Real>(zf: &ZField<R>) -> f64 {
    let radii: BTreeMap<MultiIndex, f64> = zf
        .values
        .keys()
        .filter(|p| p.is_even())
        .filter_map(|p| zf.radius_at(p).map(|r| (*p, r.to_f64())))
        .collect();
    let mut worst = 0.0f64;
    for (p, z) in &zf.values {
        if p.is_even() {
            continue;
        }
        for q in p.axis_neighbours() {
            if let (Some(r), Some(w)) = (radii.get(&q), zf.values.get(&q)) {
                let d = cabs(&(z.clone() - w.clone())).to_f64();
                worst = worst.max((d - r).abs() / (1.0 + r));
            }
        }
    }
    worst
}

/// Largest deviation of the angle between radii at an intersection point
/// from pi - beta, over all faces.
pub fn max_face_angle_error<R: Real>(zf: &ZField<R>) -> f64 {
    let mut worst = 0.0f64;
    for f in zf.faces() {
        let k = kite_of(&f);
        let [c1, i1, c2, _] = k.v.map(|p| zf.values[&p].clone());
        if c1 == i1 || c2 == i1 {
            continue;
        }
        let want = std::f64::consts::PI - kite_beta(&zf.params, &f).to_f64();
        worst = worst.max((interior_angle(&i1, &c1, &c2) - want).abs());
    }
    worst
}

struct KiteShape<R> {
    r1: R,
    r2: R,
    phi1: R,
    phi2: R,
    d: R,
}

fn kite_shape<R: Real>(r1: &R, r2: &R, beta: &R) -> KiteShape<R> {
    let (s, c) = (beta.sin(), beta.cos());
    let phi1 = (r2.clone() * s.clone()).atan2(&(r1.clone() + r2.clone() * c.clone()));
    let phi2 = (r1.clone() * s).atan2(&(r2.clone() + r1.clone() * c.clone()));
    let d2 = r1.clone() * r1.clone()
        + r2.clone() * r2.clone()
        + R::from_i64(2) * r1.clone() * r2.clone() * c;
    KiteShape {
        r1: r1.clone(),
        r2: r2.clone(),
        phi1,
        phi2,
        d: d2.sqrt(),
    }
}

fn unit<R: Real>(z: &Cx<R>) -> Option<Cx<R>> {
    let m = cabs(z);
    if m.is_zero() {
        None
    } else {
        Some(cscale(z, &(R::one() / m)))
    }
}

fn doubled<R: Real>(phi: &R) -> R {
    phi.clone() + phi.clone()
}

/// All four kite vertices from an adjacent known pair; `hint` is the unit
/// direction from c1 to i1 when the first circle has radius zero.
fn place_kite<R: Real>(
    sh: &KiteShape<R>,
    known: &[Option<Cx<R>>; 4],
    hint: Option<&Cx<R>>,
) -> Option<[Cx<R>; 4]> {
    let sc = |z: &Cx<R>, r: &R| cscale(z, r);
    if sh.r1.is_zero() {
        let c1 = known[0]
            .clone()
            .or_else(|| known[1].clone())
            .or_else(|| known[3].clone())?;
        let u = hint?.clone();
        let c2 = c1.clone() + sc(&(u * cis(&sh.phi1)), &sh.d);
        return Some([c1.clone(), c1.clone(), c2, c1]);
    }
    if let (Some(c1), Some(i1)) = (&known[0], &known[1]) {
        let u = unit(&(i1.clone() - c1.clone()))?;
        let c2 = c1.clone() + sc(&(u.clone() * cis(&sh.phi1)), &sh.d);
        let i2 = c1.clone() + sc(&(u * cis(&doubled(&sh.phi1))), &sh.r1);
        return Some([c1.clone(), i1.clone(), c2, i2]);
    }
    if let (Some(i1), Some(c2)) = (&known[1], &known[2]) {
        let u = unit(&(i1.clone() - c2.clone()))?;
        let c1 = c2.clone() + sc(&(u.clone() * cis(&-sh.phi2.clone())), &sh.d);
        let i2 = c2.clone() + sc(&(u * cis(&-doubled(&sh.phi2))), &sh.r2);
        return Some([c1, i1.clone(), c2.clone(), i2]);
    }
    if let (Some(c2), Some(i2)) = (&known[2], &known[3]) {
        let u = unit(&(i2.clone() - c2.clone()))?;
        let c1 = c2.clone() + sc(&(u.clone() * cis(&sh.phi2)), &sh.d);
        let i1 = c2.clone() + sc(&(u * cis(&doubled(&sh.phi2))), &sh.r2);
        return Some([c1, i1, c2.clone(), i2.clone()]);
    }
    if let (Some(i2), Some(c1)) = (&known[3], &known[0]) {
        let u = unit(&(i2.clone() - c1.clone()))?;
        let c2 = c1.clone() + sc(&(u.clone() * cis(&-sh.phi1.clone())), &sh.d);
        let i1 = c1.clone() + sc(&(u * cis(&-doubled(&sh.phi1))), &sh.r1);
        return Some([c1.clone(), i1, c2, i2.clone()]);
    }
    None
}

/// Direction from the origin to its axis neighbour in the limit of a
/// point circle at the origin.
fn origin_direction<R: Real>(params: &PatternParams<R>, p: &MultiIndex) -> Cx<R> {
    let c = params.c.clone();
    if p.l > 0 {
        cis(&(c * (params.alpha[1].clone() + params.alpha[2].clone())))
    } else if p.m < 0 {
        cis(&(c * params.alpha[2].clone()))
    } else {
        Cx::one()
    }
}

fn in_band(p: &MultiIndex) -> bool {
    Region::Q.contains(p) && (-2..=1).contains(&p.sum())
}

fn band_faces(rf_sites: &BTreeSet<MultiIndex>) -> Vec<Face> {
    let mut out = Vec::new();
    for p in rf_sites {
        for ty in FaceType::ALL {
            let f = Face { ty, base: *p };
            let s = p.sum();
            if (s == 0 || s == -1) && f.vertices().iter().all(in_band) {
                out.push(f);
            }
        }
    }
    out
}

/// Places centers and intersection points from the radii on the band of
/// vertices with sums -2..=1. The origin sits at 0 and its first k-edge
/// on the positive real axis. A pole at the origin drops its faces and
/// moves the anchor to the next center.
pub fn reconstruct<R: Real>(rf: &RadiusField<R>) -> Result<ZField<R>> {
    let params = &rf.params;
    // centers whose radii are known
    let mut radius: BTreeMap<MultiIndex, R> = BTreeMap::new();
    let mut poles = BTreeSet::new();
    for (s, v) in &rf.values {
        let p = s.center();
        if !Region::Q.contains(&p) {
            continue;
        }
        // a singular label is a point circle for c > 1 and a pole for c < 1
        if rf.singular.contains(s) && params.c < R::one() {
            poles.insert(p);
        } else {
            radius.insert(p, v.clone());
        }
    }
    let mut candidates = BTreeSet::new();
    for p in radius.keys() {
        for q in p.axis_neighbours() {
            if in_band(&q) {
                candidates.insert(q);
                for ty in FaceType::ALL {
                    for v in (Face { ty, base: q }).vertices() {
                        if in_band(&v) {
                            candidates.insert(v);
                        }
                    }
                }
            }
        }
    }
    let mut faces: Vec<(Face, Kite, KiteShape<R>)> = Vec::new();
    for f in band_faces(&candidates) {
        let k = kite_of(&f);
        if poles.contains(&k.v[0]) || poles.contains(&k.v[2]) {
            continue;
        }
        let (Some(r1), Some(r2)) = (radius.get(&k.v[0]), radius.get(&k.v[2])) else {
            continue;
        };
        let beta = kite_beta(params, &f);
        faces.push((f, k, kite_shape(r1, r2, &beta)));
    }
    if faces.is_empty() {
        return Err(Error::Domain("no faces with known radii".into()));
    }
    let mut z: BTreeMap<MultiIndex, Cx<R>> = BTreeMap::new();
    // anchor: the first regular center and the point of its first kite
    let origin = MultiIndex::new(0, 0, 0);
    let anchor = if radius.contains_key(&origin) {
        faces
            .iter()
            .find(|(_, k, _)| k.v[0] == origin && k.v[1] == MultiIndex::new(1, 0, 0))
            .or_else(|| faces.iter().find(|(_, k, _)| k.v[0] == origin))
    } else {
        faces.iter().find(|(_, k, _)| !k.odd)
    }
    .ok_or_else(|| Error::Domain("no anchor face".into()))?;
    let (_, ak, ash) = anchor;
    z.insert(ak.v[0], Cx::zero());
    z.insert(ak.v[1], Cx::new(ash.r1.clone(), R::zero()));

    let tol = (R::eps().to_f64() * 1e8).max(1e-300);
    let mut done = vec![false; faces.len()];
    loop {
        let mut progress = false;
        for (idx, (_, k, sh)) in faces.iter().enumerate() {
            if done[idx] {
                continue;
            }
            let known: [Option<Cx<R>>; 4] = k.v.map(|p| z.get(&p).cloned());
            let hint = if sh.r1.is_zero() {
                Some(origin_direction(params, &k.v[1]))
            } else {
                None
            };
            let Some(pts) = place_kite(sh, &known, hint.as_ref()) else {
                continue;
            };
            for (i, p) in k.v.iter().enumerate() {
                match &known[i] {
                    Some(old) => {
                        let scale = 1.0 + cabs(old).to_f64();
                        if cabs(&(old.clone() - pts[i].clone())).to_f64()
                            > tol * 1e3 * scale.max(sh.d.to_f64())
                        {
                            return Err(Error::Closure(*p));
                        }
                    }
                    None => {
                        z.insert(*p, pts[i].clone());
                    }
                }
            }
            done[idx] = true;
            progress = true;
        }
        if !progress {
            break;
        }
    }
    let generation = z.keys().map(|p| p.taxicab()).max().unwrap_or(0);
    Ok(ZField {
        params: params.clone(),
        values: z,
        generation,
        overdetermination: 0.0,
    })
}

/// Fills Q up to taxicab distance `n` from the known values using faces
/// with three known distinct vertices, the constraint solved for a missing
/// neighbour, and the axis recurrence.
pub fn extend<R: Real>(zf: &mut ZField<R>, n: i64) -> Result<()> {
    let params = zf.params.clone();
    let targets: [Cx<R>; 3] = FaceType::ALL.map(|t| params.face_target(t));
    let mut pending: BTreeSet<MultiIndex> = BTreeSet::new();
    for d in 0..=n {
        for k in 0..=d {
            for l in 0..=d - k {
                let p = MultiIndex::new(k, l, -(d - k - l));
                if !zf.values.contains_key(&p) {
                    pending.insert(p);
                }
            }
        }
    }
    while !pending.is_empty() {
        let mut placed = Vec::new();
        for p in &pending {
            if let Some(v) = resolve_vertex(&zf.values, &params, &targets, p) {
                placed.push((*p, v));
            }
        }
        if placed.is_empty() {
            return Err(Error::IncompleteStencil(
                *pending.iter().next().expect("nonempty"),
            ));
        }
        for (p, v) in placed {
            pending.remove(&p);
            zf.values.insert(p, v);
        }
    }
    zf.generation = zf.generation.max(n);
    Ok(())
}

fn resolve_vertex<R: Real>(
    values: &BTreeMap<MultiIndex, Cx<R>>,
    params: &PatternParams<R>,
    targets: &[Cx<R>; 3],
    p: &MultiIndex,
) -> Option<Cx<R>> {
    // faces containing p at each position
    for ty in FaceType::ALL {
        for pos in 0..4 {
            let base = face_base_for(ty, p, pos);
            let f = Face { ty, base };
            let v = f.vertices();
            debug_assert_eq!(v[pos], *p);
            let others: Vec<Cx<R>> = (1..4)
                .filter_map(|j| values.get(&v[(pos + j) % 4]).cloned())
                .collect();
            if others.len() != 3 {
                continue;
            }
            // rotate so that p is last: rotations by two keep q, by one or three invert it
            let q = if pos % 2 == 1 {
                targets[ty.index()].clone()
            } else {
                Cx::<R>::one() / targets[ty.index()].clone()
            };
            if let Ok(z) = solve_fourth(&others[0], &others[1], &others[2], &q) {
                return Some(z);
            }
        }
    }
    for w in p.axis_neighbours() {
        if values.contains_key(&w) {
            if let Some(z) = solve_constraint_neighbour(values, &params.c, &w, p) {
                return Some(z);
            }
        }
    }
    // axis recurrence towards p
    let axis = if p.l == 0 && p.m == 0 {
        Some((p.k, (1, 0, 0)))
    } else if p.k == 0 && p.m == 0 {
        Some((p.l, (0, 1, 0)))
    } else if p.k == 0 && p.l == 0 {
        Some((-p.m, (0, 0, -1)))
    } else {
        None
    };
    if let Some((j, (dk, dl, dm))) = axis {
        if j >= 2 {
            let at = |i: i64| MultiIndex::new(dk * i, dl * i, dm * i);
            let a = values.get(&at(j - 2))?;
            let b = values.get(&at(j - 1))?;
            if let Ok(z) = axis_next(j - 1, a, b, &params.c) {
                return Some(z);
            }
        }
    }
    None
}

fn face_base_for(ty: FaceType, p: &MultiIndex, pos: usize) -> MultiIndex {
    let offsets: [(i64, i64, i64); 4] = match ty {
        FaceType::Alpha1 => [(0, 0, 0), (0, 1, 0), (-1, 1, 0), (-1, 0, 0)],
        FaceType::Alpha2 => [(0, 0, 0), (0, 0, -1), (0, 1, -1), (0, 1, 0)],
        FaceType::Alpha3 => [(0, 0, 0), (1, 0, 0), (1, 0, -1), (0, 0, -1)],
    };
    let (dk, dl, dm) = offsets[pos];
    p.offset(-dk, -dl, -dm)
}

/// The c = 2 field: radii from the c=2 initial data, reconstruction on the
/// band, then extension over Q.
pub fn z2_field<R: Real>(params: &PatternParams<R>, n: i64) -> Result<ZField<R>> {
    if !params.is_c(2.0) {
        return Err(Error::InvalidParams("z2 field needs c = 2".into()));
    }
    let rf = generate_radii(params, n / 2 + 1, &SeedSource::Pattern)?;
    let mut zf = reconstruct(&rf)?;
    zf.values.retain(|p, _| p.taxicab() <= n + 2);
    extend(&mut zf, n + 2)?;
    let mut out = zf.restrict(|p| p.taxicab() <= n);
    out.generation = n;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FailureKind {
    NonpositiveRadius,
    OrientationFlip,
    OverlappingQuads,
}

impl FailureKind {
    pub fn name(self) -> &'static str {
        match self {
            FailureKind::NonpositiveRadius => "nonpositive-radius",
            FailureKind::OrientationFlip => "orientation-flip",
            FailureKind::OverlappingQuads => "overlapping-quads",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ImmersionReport {
    pub ok: bool,
    pub failures: Vec<(MultiIndex, FailureKind)>,
    /// number of triangles, faces and face pairs examined
    pub checked: usize,
}

impl ImmersionReport {
    fn finish(mut failures: Vec<(MultiIndex, FailureKind)>, checked: usize) -> Self {
        failures.sort();
        failures.dedup();
        ImmersionReport {
            ok: failures.is_empty(),
            failures,
            checked,
        }
    }
}

type P2 = [f64; 2];

fn pt<R: Real>(z: &Cx<R>) -> P2 {
    let c = to_c64(z);
    [c.re, c.im]
}

/// Sign of orient2d with a guard proportional to the squared edge scale.
fn orient(a: P2, b: P2, c: P2) -> i8 {
    let v = robust::orient2d(
        robust::Coord { x: a[0], y: a[1] },
        robust::Coord { x: b[0], y: b[1] },
        robust::Coord { x: c[0], y: c[1] },
    );
    let s = (b[0] - a[0])
        .abs()
        .max((b[1] - a[1]).abs())
        .max((c[0] - a[0]).abs())
        .max((c[1] - a[1]).abs());
    if v.abs() <= 1e-12 * s * s {
        0
    } else if v > 0.0 {
        1
    } else {
        -1
    }
}

fn segments_cross(a: P2, b: P2, c: P2, d: P2) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    o1 * o2 < 0 && o3 * o4 < 0
}

fn quad_area(q: &[P2; 4]) -> f64 {
    let mut s = 0.0;
    for i in 0..4 {
        let (a, b) = (q[i], q[(i + 1) % 4]);
        s += a[0] * b[1] - a[1] * b[0];
    }
    s / 2.0
}

fn quad_scale(q: &[P2; 4]) -> f64 {
    let mut s = 0.0f64;
    for i in 0..4 {
        let (a, b) = (q[i], q[(i + 1) % 4]);
        s = s.max((a[0] - b[0]).hypot(a[1] - b[1]));
    }
    s
}

fn strictly_inside(q: &[P2; 4], p: P2) -> bool {
    // simple counterclockwise quad: split along the diagonal 0-2 or 1-3,
    // whichever lies inside
    let tri_in =
        |a: P2, b: P2, c: P2| orient(a, b, p) > 0 && orient(b, c, p) > 0 && orient(c, a, p) > 0;
    let (t1, t2) = if orient(q[0], q[1], q[2]) > 0 && orient(q[0], q[2], q[3]) > 0 {
        ((q[0], q[1], q[2]), (q[0], q[2], q[3]))
    } else {
        ((q[1], q[2], q[3]), (q[1], q[3], q[0]))
    };
    tri_in(t1.0, t1.1, t1.2) || tri_in(t2.0, t2.1, t2.2)
}

struct FaceGeom {
    face: Face,
    verts: [MultiIndex; 4],
    pts: [P2; 4],
}

fn check_faces<R: Real>(
    zf: &ZField<R>,
    faces: Vec<Face>,
    triangles: &[[MultiIndex; 3]],
    interior_counts: &dyn Fn(&MultiIndex) -> usize,
) -> ImmersionReport {
    let mut failures = Vec::new();
    let mut checked = 0;
    for t in triangles {
        let (Some(a), Some(b), Some(c)) = (zf.get(&t[0]), zf.get(&t[1]), zf.get(&t[2])) else {
            continue;
        };
        checked += 1;
        if orient(pt(a), pt(b), pt(c)) < 0 {
            failures.push((t[0], FailureKind::OrientationFlip));
        }
    }
    let mut geoms = Vec::new();
    for f in faces {
        let Some(zs) = zf.face_points(&f) else {
            continue;
        };
        let pts = zs.map(|z| pt(&z));
        let scale = quad_scale(&pts);
        let distinct = (0..4).all(|i| {
            let (a, b) = (pts[i], pts[(i + 1) % 4]);
            (a[0] - b[0]).hypot(a[1] - b[1]) > 1e-12 * scale.max(1e-300)
        });
        if !distinct || scale == 0.0 {
            // collapsed kites at a point circle
            continue;
        }
        checked += 1;
        let simple = !segments_cross(pts[0], pts[1], pts[2], pts[3])
            && !segments_cross(pts[1], pts[2], pts[3], pts[0]);
        if !(quad_area(&pts) > 0.0) || !simple {
            failures.push((f.base, FailureKind::OrientationFlip));
        }
        geoms.push(FaceGeom {
            face: f,
            verts: f.vertices(),
            pts,
        });
    }
    // pairs of faces sharing a vertex must have disjoint interiors
    let mut by_vertex: BTreeMap<MultiIndex, Vec<usize>> = BTreeMap::new();
    for (i, g) in geoms.iter().enumerate() {
        for v in g.verts {
            by_vertex.entry(v).or_default().push(i);
        }
    }
    let mut seen = BTreeSet::new();
    for list in by_vertex.values() {
        for (x, &i) in list.iter().enumerate() {
            for &j in &list[x + 1..] {
                if !seen.insert((i.min(j), i.max(j))) {
                    continue;
                }
                checked += 1;
                if quads_overlap(&geoms[i], &geoms[j]) {
                    failures.push((geoms[i].face.base, FailureKind::OverlappingQuads));
                }
            }
        }
    }
    // complete stars must wrap exactly once
    for (v, list) in &by_vertex {
        if list.len() != interior_counts(v) || list.is_empty() {
            continue;
        }
        let mut total = 0.0;
        for &i in list {
            let g = &geoms[i];
            let k = g.verts.iter().position(|w| w == v).expect("vertex of face");
            let at = g.pts[k];
            let next = g.pts[(k + 1) % 4];
            let prev = g.pts[(k + 3) % 4];
            let u = (next[0] - at[0], next[1] - at[1]);
            let w = (prev[0] - at[0], prev[1] - at[1]);
            let mut a = (u.0 * w.1 - u.1 * w.0).atan2(u.0 * w.0 + u.1 * w.1);
            if a < 0.0 {
                a += 2.0 * std::f64::consts::PI;
            }
            total += a;
        }
        checked += 1;
        if (total - 2.0 * std::f64::consts::PI).abs() > 1e-6 {
            failures.push((*v, FailureKind::OverlappingQuads));
        }
    }
    ImmersionReport::finish(failures, checked)
}

fn quads_overlap(a: &FaceGeom, b: &FaceGeom) -> bool {
    for i in 0..4 {
        for j in 0..4 {
            let (a0, a1) = (a.verts[i], a.verts[(i + 1) % 4]);
            let (b0, b1) = (b.verts[j], b.verts[(j + 1) % 4]);
            if a0 == b0 || a0 == b1 || a1 == b0 || a1 == b1 {
                continue;
            }
            if segments_cross(a.pts[i], a.pts[(i + 1) % 4], b.pts[j], b.pts[(j + 1) % 4]) {
                return true;
            }
        }
    }
    for i in 0..4 {
        if !b.verts.contains(&a.verts[i]) && strictly_inside(&b.pts, a.pts[i]) {
            return true;
        }
        if !a.verts.contains(&b.verts[i]) && strictly_inside(&a.pts, b.pts[i]) {
            return true;
        }
    }
    // a shared edge needs the two quads on opposite sides of it
    for i in 0..4 {
        let (x, y) = (a.verts[i], a.verts[(i + 1) % 4]);
        if (0..4).any(|j| b.verts[j] == x && b.verts[(j + 1) % 4] == y) {
            // same direction on a shared edge means the faces fold over
            return true;
        }
    }
    false
}

fn in_h(p: &MultiIndex) -> bool {
    Region::QH.contains(p)
}

/// Orientation and overlap certificate for the hexagonal part of a field.
pub fn immersion_check<R: Real>(zf: &ZField<R>) -> ImmersionReport {
    let faces: Vec<Face> = zf
        .faces()
        .into_iter()
        .filter(|f| f.vertices().iter().all(in_h))
        .collect();
    let mut tris = Vec::new();
    for p in zf.values.keys() {
        // half-kites: two at each center, one per face at sum -1 points;
        // [p, p+k, p+l] at a center spans two kites and folds at the cone
        for (t, apex_sum) in [
            ([*p, p.offset(1, 0, 0), p.offset(0, 0, -1)], 0),
            ([*p, p.offset(0, 0, -1), p.offset(0, 1, 0)], 0),
            ([*p, p.offset(1, 0, 0), p.offset(0, 1, 0)], -1),
        ] {
            if p.sum() == apex_sum && t.iter().all(in_h) {
                tris.push(t);
            }
        }
    }
    let counts = |v: &MultiIndex| if v.is_even() { 6 } else { 3 };
    check_faces(zf, faces, &tris, &counts)
}

/// Positivity of a radius field, reported in the same form.
pub fn radius_report<R: Real>(rf: &RadiusField<R>) -> ImmersionReport {
    let mut failures = Vec::new();
    for (s, v) in &rf.values {
        if !rf.singular.contains(s) && !(*v > R::zero()) {
            failures.push((s.center(), FailureKind::NonpositiveRadius));
        }
    }
    ImmersionReport::finish(failures, rf.values.len())
}

/// The l = 0 plane: a pattern with square-grid combinatorics and the
/// single angle alpha3.
#[derive(Debug, Clone)]
pub struct SquareGrid<R> {
    pub field: ZField<R>,
}

impl<R: Real> SquareGrid<R> {
    pub fn faces(&self) -> Vec<Face> {
        self.field
            .faces()
            .into_iter()
            .filter(|f| f.ty == FaceType::Alpha3)
            .collect()
    }

    pub fn alpha(&self) -> &R {
        &self.field.params.alpha[2]
    }

    /// Largest deviation of the angle between the radii at an intersection
    /// point from pi - alpha3 (even faces) or alpha3 (odd faces).
    pub fn max_angle_error(&self) -> f64 {
        max_face_angle_error(&self.field)
    }
}

pub fn sg_slice<R: Real>(zf: &ZField<R>) -> SquareGrid<R> {
    SquareGrid {
        field: zf.restrict(|p| p.l == 0),
    }
}

pub fn sg_immersion_check<R: Real>(sg: &SquareGrid<R>) -> ImmersionReport {
    let zf = &sg.field;
    let tris: Vec<[MultiIndex; 3]> = zf
        .values
        .keys()
        .map(|p| [*p, p.offset(1, 0, 0), p.offset(0, 0, -1)])
        .collect();
    let counts = |_: &MultiIndex| 4;
    check_faces(zf, sg.faces(), &tris, &counts)
}

/// e^{n m}.
pub fn erf_radius<R: Real>(n: i64, m: i64) -> R {
    R::from_i64(n * m).exp()
}

/// R^2 (r1+r2+r3+r4) - (r2 r3 r4 + r1 r3 r4 + r1 r2 r4 + r1 r2 r3)
/// + 2 R cos(alpha) (r1 r3 - r2 r4).
pub fn sg_radius_residual<R: Real>(big: &R, r: [&R; 4], alpha: &R) -> R {
    let [r1, r2, r3, r4] = r.map(|x| x.clone());
    let sum = r1.clone() + r2.clone() + r3.clone() + r4.clone();
    let triples = r2.clone() * r3.clone() * r4.clone()
        + r1.clone() * r3.clone() * r4.clone()
        + r1.clone() * r2.clone() * r4.clone()
        + r1.clone() * r2.clone() * r3.clone();
    big.clone() * big.clone() * sum - triples
        + R::from_i64(2) * big.clone() * alpha.cos() * (r1 * r3 - r2 * r4)
}

/// The residual at grid point (n, m) for the Erf radii.
pub fn erf_residual<R: Real>(n: i64, m: i64, alpha: &R) -> R {
    let big = erf_radius::<R>(n, m);
    let r1 = erf_radius::<R>(n + 1, m);
    let r2 = erf_radius::<R>(n, m + 1);
    let r3 = erf_radius::<R>(n - 1, m);
    let r4 = erf_radius::<R>(n, m - 1);
    sg_radius_residual(&big, [&r1, &r2, &r3, &r4], alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern_core::{generate_z, generate_z_with, max_cross_ratio_error, InitialData};
    use crate::radius_system::dual;
    use crate::real::Ext;
    use num_complex::Complex;
    use std::f64::consts::PI;

    type C = Complex<f64>;

    #[test]
    fn unit_square_is_equal_sides_positive() {
        let z = [
            C::new(0., 0.),
            C::new(1., 0.),
            C::new(1., 1.),
            C::new(0., 1.),
        ];
        assert_eq!(
            kite_classify(&z, &(PI / 2.0)).unwrap(),
            KiteCase::EqualSidesPositive
        );
        let zr = z.map(|w| w.conj());
        assert_eq!(
            kite_classify(&zr, &(PI / 2.0)).unwrap(),
            KiteCase::EqualSidesNegative
        );
        let bad = [
            C::new(0., 0.),
            C::new(1., 0.),
            C::new(1.3, 1.),
            C::new(0., 1.),
        ];
        assert!(kite_classify(&bad, &(PI / 2.0)).is_err());
    }

    #[test]
    fn generated_faces_are_kites() {
        let p = PatternParams::<f64>::isotropic(1.5).unwrap();
        let zf = generate_z(&p, 10).unwrap();
        for f in zf.faces() {
            let z = zf.face_points(&f).unwrap();
            kite_classify(&z, &p.alpha[f.ty.index()]).unwrap();
        }
        assert!(max_incidence_error(&zf) < 1e-9);
        assert!(max_face_angle_error(&zf) < 1e-9);
    }

    #[test]
    fn reconstruct_matches_cross_ratio_route() {
        let p = PatternParams::<f64>::from_f64([PI / 4.0, PI / 4.0, PI / 2.0], 1.5).unwrap();
        let rf = generate_radii(&p, 6, &SeedSource::Pattern).unwrap();
        let rec = reconstruct(&rf).unwrap();
        let zf = generate_z(&p, 14).unwrap();
        let mut n = 0;
        for (q, z) in &rec.values {
            if let Some(w) = zf.values.get(q) {
                assert!((z - w).norm() < 1e-8 * (1.0 + w.norm()), "{q}");
                n += 1;
            }
        }
        assert!(n > 50);
        for (s, r) in &rf.values {
            if let Some(e) = rec.radius_at(&s.center()) {
                assert!((e - r).abs() < 1e-9 * r.max(1.0));
            }
        }
    }

    #[test]
    fn regular_reconstruction() {
        let p = PatternParams::<f64>::isotropic(1.0).unwrap();
        let rf = generate_radii(&p, 5, &SeedSource::Closed).unwrap();
        let rec = reconstruct(&rf).unwrap();
        let el = cis(&(p.alpha[1] + p.alpha[2]));
        let em = cis(&p.alpha[2]);
        for (q, z) in &rec.values {
            let expect = C::new(q.k as f64, 0.) + el * q.l as f64 - em * q.m as f64;
            assert!((z - expect).norm() < 1e-12, "{q}");
        }
        assert!(immersion_check(&rec).ok);
    }

    #[test]
    fn z2_field_satisfies_lattice_equations() {
        let p = PatternParams::<f64>::isotropic(2.0).unwrap();
        let zf = generate_z(&p, 10).unwrap();
        assert!(max_cross_ratio_error(&zf) < 1e-9);
        assert!(crate::pattern_core::max_constraint_residual(&zf) < 1e-9);
        assert!(immersion_check(&zf).ok);
    }

    #[test]
    fn log_pattern_reconstructs() {
        let p = PatternParams::<f64>::isotropic(2.0).unwrap();
        let rf = generate_radii(&p, 6, &SeedSource::Pattern).unwrap();
        let log = dual(&rf);
        let zf = reconstruct(&log).unwrap();
        assert!(!zf.values.contains_key(&MultiIndex::new(0, 0, 0)));
        assert!(max_cross_ratio_error(&zf) < 1e-9);
        assert!(immersion_check(&zf).ok);
    }

    #[test]
    fn immersion_detects_perturbed_initial_data() {
        let p = PatternParams::<f64>::isotropic(1.5).unwrap();
        let good = generate_z(&p, 10).unwrap();
        let rep = immersion_check(&good);
        assert!(rep.ok, "{:?}", rep.failures.first());
        let mut init = InitialData::standard(&p);
        init.z00m1 = cis(&(p.c * p.alpha[2] + 0.05));
        let bad = generate_z_with(&p, 10, &init).unwrap();
        assert!(!immersion_check(&bad).ok);
    }

    #[test]
    fn reflex_cone_at_origin_is_immersed() {
        // c (a2 + a3) > pi for both
        for p in [
            PatternParams::<f64>::isotropic(1.75).unwrap(),
            PatternParams::from_f64([PI / 4.0, PI / 4.0, PI / 2.0], 1.5).unwrap(),
        ] {
            let rep = immersion_check(&generate_z(&p, 10).unwrap());
            assert!(rep.ok, "{:?}", rep.failures);
        }
    }

    #[test]
    fn slices_are_square_grid_immersions() {
        for c in [0.5, 1.0, 1.5] {
            let p = PatternParams::<f64>::isotropic(c).unwrap();
            let sg = sg_slice(&generate_z(&p, 10).unwrap());
            assert!(sg_immersion_check(&sg).ok, "c={c}");
            assert!(sg.max_angle_error() < 1e-9);
            assert!(sg.field.values.keys().all(|q| q.l == 0));
        }
    }

    #[test]
    fn erf_identity() {
        for a in [PI / 6.0, PI / 4.0, PI / 3.0, PI / 2.0] {
            for n in -3..=3 {
                for m in -3..=3 {
                    let r = erf_residual::<Ext>(n, m, &Ext::from_f64(a));
                    assert!(r.abs().to_f64() < 1e-12);
                }
            }
        }
        assert_eq!(erf_radius::<f64>(0, 5), 1.0);
        assert!((erf_radius::<f64>(2, 3) - 6f64.exp()).abs() < 1e-12);
        let rnd = sg_radius_residual(&1.3, [&0.2, &2.0, &0.9, &1.7], &0.8);
        assert!(rnd.abs() > 1e-3);
        assert_eq!(
            sg_radius_residual(&2.0, [&2.0, &2.0, &2.0, &2.0], &0.4),
            0.0
        );
    }
}
