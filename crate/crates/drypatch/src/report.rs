//! File outputs: branch tables and profiles as CSV, structured reports
//! and manifests as JSON, bifurcation diagrams as self-contained SVG.

use crate::continuation::{Branch, PointStability};
use crate::error::{Error, Result};
use crate::solver::Profile;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

/// Writes a branch table with the fixed column set
/// `index,p,p_minus_pc,l2norm,stability,fold_flag`.
pub fn write_branch_csv(path: &Path, branch: &Branch, p_c: f64) -> Result<()> {
    let mut out = String::new();
    out.push_str("index,p,p_minus_pc,l2norm,stability,fold_flag\n");
    for (i, pt) in branch.points.iter().enumerate() {
        let stab = match pt.stability {
            PointStability::Stable => "stable",
            PointStability::Unstable => "unstable",
            PointStability::Unknown => "unknown",
        };
        writeln!(
            out,
            "{},{:.12e},{:.12e},{:.12e},{},{}",
            i,
            pt.param,
            pt.param - p_c,
            pt.l2norm,
            stab,
            u8::from(pt.fold_here)
        )
        .unwrap();
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Writes a profile as `r,n,w` rows preceded by `# key=value` header
/// comments carrying the metadata needed to reload it.
pub fn write_profile_csv(path: &Path, profile: &Profile, r: &[f64], family: &str) -> Result<()> {
    let mut out = String::new();
    writeln!(out, "# param={:.17e}", profile.param).unwrap();
    writeln!(out, "# family={family}").unwrap();
    writeln!(out, "# residual_norm={:.17e}", profile.residual_norm).unwrap();
    writeln!(out, "# converged={}", profile.converged).unwrap();
    out.push_str("r,n,w\n");
    for i in 0..profile.n.len() {
        writeln!(out, "{:.17e},{:.17e},{:.17e}", r[i], profile.n[i], profile.w[i]).unwrap();
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Reads a profile written by [`write_profile_csv`]; returns the profile
/// (with its stored residual norm and convergence flag) plus the radial
/// coordinates and family tag.
pub fn read_profile_csv(path: &Path) -> Result<(Profile, Vec<f64>, String)> {
    let text = std::fs::read_to_string(path)?;
    let mut param = None;
    let mut family = String::from("unknown");
    let mut residual_norm = f64::NAN;
    let mut converged = false;
    let mut r = Vec::new();
    let mut n = Vec::new();
    let mut w = Vec::new();
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            if let Some((key, value)) = rest.split_once('=') {
                match key.trim() {
                    "param" => param = value.trim().parse::<f64>().ok(),
                    "family" => family = value.trim().to_string(),
                    "residual_norm" => {
                        residual_norm = value.trim().parse::<f64>().unwrap_or(f64::NAN)
                    }
                    "converged" => converged = value.trim() == "true",
                    _ => {}
                }
            }
            continue;
        }
        if line.starts_with('r') || line.trim().is_empty() {
            continue;
        }
        let mut it = line.split(',');
        let (rv, nv, wv) = (it.next(), it.next(), it.next());
        match (rv, nv, wv) {
            (Some(rv), Some(nv), Some(wv)) => {
                r.push(rv.trim().parse().map_err(|e| Error::Config(format!("{e}")))?);
                n.push(nv.trim().parse().map_err(|e| Error::Config(format!("{e}")))?);
                w.push(wv.trim().parse().map_err(|e| Error::Config(format!("{e}")))?);
            }
            _ => return Err(Error::Config(format!("malformed row in {path:?}"))),
        }
    }
    let param = param.ok_or_else(|| Error::Config(format!("{path:?} lacks a param header")))?;
    let mut profile = Profile::from_state(&[n, w].concat(), param);
    profile.residual_norm = residual_norm;
    profile.converged = converged;
    Ok((profile, r, family))
}

/// Writes any serialisable record as pretty JSON.
pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Config(format!("serialize: {e}")))?;
    f.write_all(text.as_bytes())?;
    f.write_all(b"\n")?;
    Ok(())
}

/// One curve of a bifurcation diagram.
pub struct Curve {
    /// `(p - p_c, norm, stable)` samples in branch order.
    pub points: Vec<(f64, f64, Option<bool>)>,
    pub color: &'static str,
    pub label: String,
}

/// Renders curves into a self-contained SVG bifurcation diagram: solid
/// segments for stable points, dashed for unstable or unknown.
pub fn write_bifurcation_svg(path: &Path, curves: &[Curve], title: &str) -> Result<()> {
    let (width, height) = (760.0, 540.0);
    let (ml, mr, mt, mb) = (70.0, 20.0, 40.0, 55.0);
    let (pw, ph) = (width - ml - mr, height - mt - mb);
    let mut xmin = f64::INFINITY;
    let mut xmax = f64::NEG_INFINITY;
    let mut ymin = f64::INFINITY;
    let mut ymax = f64::NEG_INFINITY;
    for c in curves {
        for &(x, y, _) in &c.points {
            xmin = xmin.min(x);
            xmax = xmax.max(x);
            ymin = ymin.min(y);
            ymax = ymax.max(y);
        }
    }
    if !xmin.is_finite() {
        xmin = 0.0;
        xmax = 1.0;
        ymin = 0.0;
        ymax = 1.0;
    }
    let xpad = 0.05 * (xmax - xmin).max(1e-12);
    let ypad = 0.05 * (ymax - ymin).max(1e-12);
    xmin -= xpad;
    xmax += xpad;
    ymin -= ypad;
    ymax += ypad;
    let sx = |x: f64| ml + (x - xmin) / (xmax - xmin) * pw;
    let sy = |y: f64| mt + (1.0 - (y - ymin) / (ymax - ymin)) * ph;

    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    )
    .unwrap();
    writeln!(
        svg,
        r#"<rect width="{width}" height="{height}" fill="white"/>"#
    )
    .unwrap();
    writeln!(
        svg,
        r#"<text x="{:.1}" y="24" font-family="sans-serif" font-size="16" text-anchor="middle">{title}</text>"#,
        ml + pw / 2.0
    )
    .unwrap();
    // axes
    writeln!(
        svg,
        r#"<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="black" stroke-width="1"/>"#
    )
    .unwrap();
    for i in 0..=5 {
        let xv = xmin + (xmax - xmin) * i as f64 / 5.0;
        let yv = ymin + (ymax - ymin) * i as f64 / 5.0;
        let xs = sx(xv);
        let ys = sy(yv);
        writeln!(
            svg,
            r#"<line x1="{xs:.1}" y1="{:.1}" x2="{xs:.1}" y2="{:.1}" stroke="black"/>"#,
            mt + ph,
            mt + ph + 5.0
        )
        .unwrap();
        writeln!(
            svg,
            r#"<text x="{xs:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="middle">{xv:.3}</text>"#,
            mt + ph + 18.0
        )
        .unwrap();
        writeln!(
            svg,
            r#"<line x1="{:.1}" y1="{ys:.1}" x2="{ml}" y2="{ys:.1}" stroke="black"/>"#,
            ml - 5.0
        )
        .unwrap();
        writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="end">{yv:.2}</text>"#,
            ml - 8.0,
            ys + 4.0
        )
        .unwrap();
    }
    writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="13" text-anchor="middle">p - p_c</text>"#,
        ml + pw / 2.0,
        height - 14.0
    )
    .unwrap();
    writeln!(
        svg,
        r#"<text x="18" y="{:.1}" font-family="sans-serif" font-size="13" text-anchor="middle" transform="rotate(-90 18 {:.1})">||n||</text>"#,
        mt + ph / 2.0,
        mt + ph / 2.0
    )
    .unwrap();
    // zero line for p = p_c
    if xmin < 0.0 && xmax > 0.0 {
        let x0 = sx(0.0);
        writeln!(
            svg,
            r##"<line x1="{x0:.1}" y1="{mt}" x2="{x0:.1}" y2="{:.1}" stroke="#bbbbbb" stroke-width="0.8"/>"##,
            mt + ph
        )
        .unwrap();
    }
    // curves, split into stability segments (solid = stable)
    for curve in curves {
        let mut segment: Vec<(f64, f64)> = Vec::new();
        let mut seg_stable: Option<bool> = None;
        let flush = |seg: &mut Vec<(f64, f64)>, stable: Option<bool>, svg: &mut String| {
            if seg.len() < 2 {
                seg.clear();
                return;
            }
            let mut d = String::new();
            for (i, (x, y)) in seg.iter().enumerate() {
                let cmd = if i == 0 { 'M' } else { 'L' };
                write!(d, "{cmd}{:.2} {:.2} ", sx(*x), sy(*y)).unwrap();
            }
            let dash = match stable {
                Some(true) => "",
                _ => r#" stroke-dasharray="6 4""#,
            };
            writeln!(
                svg,
                r#"<path d="{d}" fill="none" stroke="{}" stroke-width="1.8"{dash}/>"#,
                curve.color
            )
            .unwrap();
            seg.clear();
        };
        for &(x, y, stable) in &curve.points {
            if seg_stable != stable && !segment.is_empty() {
                let carry = *segment.last().unwrap();
                flush(&mut segment, seg_stable, &mut svg);
                segment.push(carry);
            }
            seg_stable = stable;
            segment.push((x, y));
        }
        flush(&mut segment, seg_stable, &mut svg);
    }
    // legend
    let mut ly = mt + 14.0;
    for curve in curves {
        writeln!(
            svg,
            r#"<line x1="{:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{}" stroke-width="2.5"/>"#,
            ml + pw - 150.0,
            ml + pw - 120.0,
            curve.color
        )
        .unwrap();
        writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="12">{}</text>"#,
            ml + pw - 112.0,
            ly + 4.0,
            curve.label
        )
        .unwrap();
        ly += 18.0;
    }
    svg.push_str("</svg>\n");
    std::fs::write(path, svg)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::continuation::{Branch, BranchFamily, BranchPoint, Termination};

    fn dummy_profile(t: usize, param: f64) -> Profile {
        let mut prof = Profile::from_state(&vec![0.1; 2 * t], param);
        prof.converged = true;
        prof.residual_norm = 1e-12;
        prof
    }

    #[test]
    fn branch_csv_has_fixed_columns() {
        let dir = std::env::temp_dir().join("drypatch_test_branch");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("branch.csv");
        let branch = Branch {
            family: BranchFamily::SpotA,
            points: vec![BranchPoint {
                param: 0.2,
                l2norm: 1.0,
                amplitude: 0.1,
                stability: PointStability::Stable,
                fold_here: true,
                profile: dummy_profile(4, 0.2),
            }],
            terminated: Termination::MaxSteps,
            folds: vec![],
            onset_p: None,
        };
        write_branch_csv(&path, &branch, 0.15625).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("index,p,p_minus_pc,l2norm,stability,fold_flag\n"));
        assert!(text.contains(",stable,1"));
    }

    #[test]
    fn profile_csv_roundtrip() {
        let dir = std::env::temp_dir().join("drypatch_test_profile");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("profile.csv");
        let mut prof = Profile::from_state(
            &[vec![0.1, 0.2, 0.3, 0.4], vec![1.0, 1.1, 1.2, 1.3]].concat(),
            0.21,
        );
        prof.converged = true;
        prof.residual_norm = 3.25e-11;
        let r = vec![0.0, 1.0, 2.0, 3.0];
        write_profile_csv(&path, &prof, &r, "spot_a").unwrap();
        let (back, r2, family) = read_profile_csv(&path).unwrap();
        assert_eq!(family, "spot_a");
        assert_eq!(back.param, 0.21);
        assert_eq!(back.residual_norm, 3.25e-11);
        assert!(back.converged);
        assert_eq!(r, r2);
        for (a, b) in back.n.iter().zip(&prof.n) {
            assert_eq!(a, b);
        }
        for (a, b) in back.w.iter().zip(&prof.w) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn svg_is_written_and_well_formed_enough() {
        let dir = std::env::temp_dir().join("drypatch_test_svg");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("diagram.svg");
        let curves = vec![Curve {
            points: vec![
                (0.0, 0.0, Some(true)),
                (0.01, 0.5, Some(true)),
                (0.02, 1.0, Some(false)),
                (0.015, 1.5, Some(false)),
            ],
            color: "#1f3b99",
            label: "spot_a".into(),
        }];
        write_bifurcation_svg(&path, &curves, "test").unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("<svg"));
        assert!(text.trim_end().ends_with("</svg>"));
        assert!(text.contains("stroke-dasharray"));
    }
}
