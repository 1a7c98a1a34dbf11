//! Deterministic SVG 1.1 export. Coordinates are printed with a fixed
//! number of decimals and elements are emitted in lattice order.

use std::fmt::Write as _;

use circlepat_core::ZField;

use crate::document::PatternDocument;
use crate::{CliError, Outcome, RenderArgs, Show};

const DECIMALS: usize = 3;

fn num(x: f64) -> String {
    let s = format!("{x:.DECIMALS$}");
    // avoid "-0.000"
    if s.trim_start_matches('-')
        .chars()
        .all(|c| c == '0' || c == '.')
    {
        format!("{:.DECIMALS$}", 0.0)
    } else {
        s
    }
}

/// SVG text for a vertex field; `None` when there is nothing to draw.
pub fn svg(zf: &ZField<f64>, show: Show, scale: f64) -> Option<String> {
    let tx = |re: f64| re * scale;
    let ty = |im: f64| -im * scale;
    let circles: Vec<(f64, f64, f64)> = if show == Show::Quads {
        Vec::new()
    } else {
        zf.values
            .iter()
            .filter(|(p, _)| p.is_even())
            .filter_map(|(p, z)| {
                let r = zf.radius_at(p)?;
                (r > 0.0 && r.is_finite() && z.re.is_finite() && z.im.is_finite())
                    .then_some((z.re, z.im, r))
            })
            .collect()
    };
    let quads: Vec<[(f64, f64); 4]> = if show == Show::Circles {
        Vec::new()
    } else {
        zf.faces()
            .iter()
            .filter_map(|f| zf.face_points(f))
            .filter(|pts| pts.iter().all(|z| z.re.is_finite() && z.im.is_finite()))
            .map(|pts| pts.map(|z| (z.re, z.im)))
            .collect()
    };
    if circles.is_empty() && quads.is_empty() {
        return None;
    }
    let (mut x0, mut y0, mut x1, mut y1) = (
        f64::INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::NEG_INFINITY,
    );
    let mut grow = |x: f64, y: f64, r: f64| {
        x0 = x0.min(tx(x) - r * scale);
        x1 = x1.max(tx(x) + r * scale);
        y0 = y0.min(ty(y) - r * scale);
        y1 = y1.max(ty(y) + r * scale);
    };
    for &(x, y, r) in &circles {
        grow(x, y, r);
    }
    for q in &quads {
        for &(x, y) in q {
            grow(x, y, 0.0);
        }
    }
    let pad = 10.0;
    let (x0, y0) = (x0 - pad, y0 - pad);
    let (w, h) = (x1 - x0 + pad, y1 - y0 + pad);
    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" viewBox=\"{} {} {} {}\">",
        num(w),
        num(h),
        num(x0),
        num(y0),
        num(w),
        num(h)
    );
    if !quads.is_empty() {
        s.push_str("<g fill=\"none\" stroke=\"#7a7a7a\" stroke-width=\"0.5\">\n");
        for q in &quads {
            let pts: Vec<String> = q
                .iter()
                .chain(std::iter::once(&q[0]))
                .map(|&(x, y)| format!("{},{}", num(tx(x)), num(ty(y))))
                .collect();
            let _ = writeln!(s, "<polyline points=\"{}\"/>", pts.join(" "));
        }
        s.push_str("</g>\n");
    }
    if !circles.is_empty() {
        s.push_str("<g fill=\"none\" stroke=\"#1f4e79\" stroke-width=\"0.8\">\n");
        for &(x, y, r) in &circles {
            let _ = writeln!(
                s,
                "<circle cx=\"{}\" cy=\"{}\" r=\"{}\"/>",
                num(tx(x)),
                num(ty(y)),
                num(r * scale)
            );
        }
        s.push_str("</g>\n");
    }
    s.push_str("</svg>\n");
    Some(s)
}

pub fn cmd_render(a: &RenderArgs) -> Result<Outcome, CliError> {
    if !(a.scale > 0.0 && a.scale.is_finite()) {
        return Err(CliError::usage("--scale must be positive"));
    }
    let doc = PatternDocument::load(&a.file)?;
    if doc.is_empty() {
        return Err(CliError::usage("document is empty"));
    }
    let t = doc.typed::<f64>()?;
    let zf =
        t.z.ok_or_else(|| CliError::usage("document has no vertices to draw"))?;
    let text = svg(&zf, a.show, a.scale).ok_or_else(|| CliError::usage("nothing to draw"))?;
    std::fs::write(&a.out, &text)
        .map_err(|e| CliError::usage(format!("cannot write {}: {e}", a.out.display())))?;
    Ok(Outcome {
        stdout: format!("wrote {} ({} bytes)\n", a.out.display(), text.len()),
        code: crate::EXIT_OK,
    })
}
