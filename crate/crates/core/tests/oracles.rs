//! Cross-module checks against oracles written independently of the
//! library code paths they test.

use circlepat_core::geometry::{
    immersion_check, kite_classify, max_face_angle_error, max_incidence_error, reconstruct,
};
use circlepat_core::lattice::{a_site, MultiIndex, SubIndex};
use circlepat_core::pattern_core::{generate_z, generate_z_with, pi_frac, InitialData};
use circlepat_core::radius_system::{generate_radii, SeedSource};
use circlepat_core::real::{cis, Cx, Ext, Real};
use circlepat_core::riccati::{p0_closed, p0_via_series, riccati_run, RiccatiParams};
use circlepat_core::{PatternParams, ZField};
use num_complex::Complex64;
use std::f64::consts::PI;

fn c64<R: Real>(z: &Cx<R>) -> Complex64 {
    Complex64::new(z.re.to_f64(), z.im.to_f64())
}

/// Distance from the center of label `s` to one of its intersection points,
/// computed without the library's radius helpers.
fn distance_oracle<R: Real>(zf: &ZField<R>, s: SubIndex) -> Option<R> {
    let p = MultiIndex::new(-(s.l + s.m), -(s.m + s.k), -(s.k + s.l));
    let z = zf.values.get(&p)?;
    for d in [
        (1, 0, 0),
        (0, 1, 0),
        (0, 0, -1),
        (-1, 0, 0),
        (0, -1, 0),
        (0, 0, 1),
    ] {
        if let Some(w) = zf
            .values
            .get(&MultiIndex::new(p.k + d.0, p.l + d.1, p.m + d.2))
        {
            let u = w.clone() - z.clone();
            return Some((u.re.clone() * u.re + u.im.clone() * u.im).sqrt());
        }
    }
    None
}

fn isotropic<R: Real>(c: f64) -> PatternParams<R> {
    PatternParams::isotropic(R::from_f64(c)).unwrap()
}

fn single_angle(c: f64, alpha: f64) -> PatternParams<f64> {
    let rest = (PI - alpha) / 2.0;
    PatternParams::from_f64([rest, rest, alpha], c).unwrap()
}

#[test]
fn radii_route_matches_cross_ratio_distances_ext() {
    let prm = isotropic::<Ext>(1.5);
    let rf = generate_radii(&prm, 8, &SeedSource::Closed).unwrap();
    let zf = generate_z(&prm, 18).unwrap();
    let mut worst = 0.0f64;
    let mut n = 0;
    for (s, r) in &rf.values {
        let d = distance_oracle(&zf, *s).expect("center present");
        worst = worst.max(((d - r.clone()) / r.clone()).to_f64().abs());
        n += 1;
    }
    assert!(n > 60);
    assert!(worst < 1e-60, "worst relative mismatch {worst:e}");
}

#[test]
fn radii_route_matches_cross_ratio_distances_anisotropic() {
    let prm = PatternParams::from_f64([PI / 4.0, PI / 4.0, PI / 2.0], 0.75).unwrap();
    let rf = generate_radii(&prm, 6, &SeedSource::Closed).unwrap();
    let zf = generate_z(&prm, 14).unwrap();
    for (s, r) in &rf.values {
        let d: f64 = distance_oracle(&zf, *s).unwrap();
        assert!((d - r).abs() <= 1e-8 * r, "{s}: {d} vs {r}");
    }
}

#[test]
fn p0_three_way_agreement() {
    for ci in 1..=7 {
        let c = 0.25 * ci as f64;
        for alpha in [PI / 6.0, PI / 4.0, PI / 3.0, 2.0 * PI / 5.0] {
            let closed = p0_closed(&c, &alpha).unwrap();
            let series = p0_via_series(&RiccatiParams::new(c, alpha).unwrap()).unwrap();
            let zf = generate_z(&single_angle(c, alpha), 3).unwrap();
            let z = |k, l, m| c64(&zf.values[&MultiIndex::new(k, l, m)]);
            let extracted = (z(1, 0, -1) - z(1, 0, 0)).norm() / (z(0, 0, 0) - z(1, 0, 0)).norm();
            assert!((closed - series).abs() <= 1e-10, "c={c} a={alpha}");
            assert!(
                (closed - extracted).abs() <= 1e-8,
                "c={c} a={alpha}: {closed} vs {extracted}"
            );
        }
    }
}

#[test]
fn border_radii_follow_riccati_ratios() {
    // p_n = R_n / r_n with r_n centered at z(0,0,-2n) and R_n at z(1,0,-2n-1)
    let c = 1.5;
    let prm = RiccatiParams::new(Ext::from_f64(c), pi_frac::<Ext>(1, 3)).unwrap();
    let p0 = p0_closed(&prm.c, &prm.alpha).unwrap();
    let tr = riccati_run(p0, 6, &prm).unwrap();
    let zf = generate_z(&isotropic::<Ext>(c), 16).unwrap();
    for n in 0..6i64 {
        let r = zf.radius_at(&MultiIndex::new(0, 0, -2 * n)).unwrap();
        let big = zf.radius_at(&MultiIndex::new(1, 0, -2 * n - 1)).unwrap();
        let err = (big / r - tr.values[n as usize].clone()).abs().to_f64();
        assert!(err < 1e-100, "n={n}: {err:e}");
    }
}

#[test]
fn reconstruct_round_trip() {
    for c in [0.5, 1.5] {
        for prm in [
            isotropic::<f64>(c),
            PatternParams::from_f64([PI / 4.0, PI / 4.0, PI / 2.0], c).unwrap(),
        ] {
            let rf = generate_radii(&prm, 6, &SeedSource::Closed).unwrap();
            let zf = reconstruct(&rf).unwrap();
            let back = zf.extract_radii();
            let mut checked = 0;
            for (s, r) in &rf.values {
                if let Some(b) = back.get(s) {
                    assert!((b - r).abs() <= 1e-9 * (1.0 + r), "{s}: {b} vs {r}");
                    checked += 1;
                }
            }
            assert!(checked * 10 >= rf.values.len() * 9);
            for f in zf.faces() {
                let pts = zf.face_points(&f).unwrap();
                kite_classify(&pts, &prm.alpha[f.ty.index()]).unwrap();
            }
            assert!(max_face_angle_error(&zf) < 1e-9);
            assert!(max_incidence_error(&zf) < 1e-9);
        }
    }
}

#[test]
fn immersion_tracks_positivity() {
    // regular family: immersed, positive radii
    for c in [0.5, 1.0, 1.5] {
        let prm = isotropic::<f64>(c);
        assert!(immersion_check(&generate_z(&prm, 8).unwrap()).ok);
        assert!(generate_radii(&prm, 8, &SeedSource::Closed)
            .unwrap()
            .all_positive());
    }
    // perturbed family: the cross-ratio field folds and the radius fill
    // from its own seeds reaches a nonpositive value
    let prm = isotropic::<f64>(1.5);
    let mut init = InitialData::standard(&prm);
    init.z00m1 = cis(&(1.5 * prm.alpha[2] + 0.05));
    let zf = generate_z_with(&prm, 16, &init).unwrap();
    assert!(!immersion_check(&zf).ok);
    let a10 = distance_oracle(&zf, a_site(1, 0)).unwrap();
    let a01 = distance_oracle(&zf, a_site(0, 1)).unwrap();
    let rf = generate_radii(&prm, 16, &SeedSource::Explicit { a10, a01 });
    assert!(match rf {
        Err(circlepat_core::Error::Positivity { .. }) => true,
        Ok(rf) => !rf.all_positive(),
        Err(_) => false,
    });
}

#[test]
fn c1_closed_seeds_are_unit() {
    let rf = generate_radii(&isotropic::<f64>(1.0), 10, &SeedSource::Closed).unwrap();
    assert!(rf.values.values().all(|r| (r - 1.0).abs() <= 1e-12));
}
