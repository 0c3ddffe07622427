//! Run artifacts: CSV reports, deployment tables, PGM coverage maps and the
//! manifest. Every file is a pure function of the configuration and seed.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use super::pipeline::{PhaseSnapshot, RunOutcome, RunReport};
use crate::geometry::SensorPose;
use crate::grid::Region;

/// Formats `v` with 9 significant digits, in fixed notation for moderate
/// magnitudes and scientific notation otherwise.
pub fn fmt_sig9(v: f64) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    if v == 0.0 {
        return "0.00000000".to_string();
    }
    let sci = format!("{v:.8e}");
    let exp: i32 = sci
        .rsplit_once('e')
        .and_then(|(_, e)| e.parse().ok())
        .unwrap_or(0);
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp) as usize;
        format!("{v:.decimals$}")
    } else {
        sci
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn report_csv(report: &RunReport) -> String {
    let mut s = String::from(
        "phase,coverage_ratio,covered_cells,total_cells,working_nodes,redundant_nodes,analytic_m,moves_accepted,moves_rejected\n",
    );
    let r = report;
    let _ = writeln!(
        s,
        "initial,{},{},{},{},,,,",
        fmt_sig9(r.eta_initial),
        r.covered_initial,
        r.total_cells,
        r.nodes
    );
    let _ = writeln!(
        s,
        "tilted,{},{},{},{},{},{},,",
        fmt_sig9(r.eta_tilted),
        r.covered_tilted,
        r.total_cells,
        r.m_prime,
        r.redundant,
        opt(r.analytic_m_ceil())
    );
    let _ = writeln!(
        s,
        "final,{},{},{},,,,{},{}",
        fmt_sig9(r.eta_final),
        r.covered_final,
        r.total_cells,
        r.moves_accepted,
        r.moves_rejected
    );
    s
}

pub fn deployment_csv(poses: &[SensorPose]) -> String {
    let mut s = String::from("id,x,y,z,theta_rad,gamma_rad\n");
    for (i, p) in poses.iter().enumerate() {
        let _ = writeln!(
            s,
            "{i},{},{},{},{},{}",
            fmt_sig9(p.x),
            fmt_sig9(p.y),
            fmt_sig9(p.z),
            fmt_sig9(p.theta),
            fmt_sig9(p.gamma)
        );
    }
    s
}

/// Binary PGM (P5), one byte per cell, 255 = covered. The first raster row
/// is the `y = 0` edge.
pub fn coverage_pgm(covered: &[bool], region: &Region) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", region.cols(), region.rows()).into_bytes();
    out.extend(covered.iter().map(|&c| if c { 255u8 } else { 0 }));
    out
}

pub fn manifest(outcome: &RunOutcome) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "package={} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION"));
    let _ = writeln!(s, "rng=ChaCha8Rng::seed_from_u64 (rand_chacha 0.3)");
    s.push_str(&outcome.config.to_key_values());
    let _ = writeln!(s, "cells={}x{}", outcome.region.cols(), outcome.region.rows());
    let _ = writeln!(s, "target-eta-used={}", fmt_sig9(outcome.report.target_eta));
    let _ = writeln!(s, "shortfall={}", outcome.report.shortfall);
    s
}

/// Writes via a temporary sibling and rename so readers never see a
/// partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)
}

pub fn write_run_artifacts(outcome: &RunOutcome, dir: &Path) -> io::Result<()> {
    std::fs::create_dir_all(dir)?;
    write_atomic(&dir.join("report.csv"), report_csv(&outcome.report).as_bytes())?;
    let phases: [(&str, &PhaseSnapshot); 3] = [
        ("initial", &outcome.initial),
        ("tilted", &outcome.tilted),
        ("final", &outcome.final_),
    ];
    for (name, snap) in phases {
        write_atomic(
            &dir.join(format!("deployment_{name}.csv")),
            deployment_csv(&snap.poses).as_bytes(),
        )?;
        write_atomic(
            &dir.join(format!("coverage_{name}.pgm")),
            &coverage_pgm(&snap.covered, &outcome.region),
        )?;
    }
    write_atomic(&dir.join("manifest.txt"), manifest(outcome).as_bytes())
}

pub fn sweep_csv(reports: &[RunReport]) -> String {
    let mut s = String::from(
        "nodes,seed,initial_eta,tilted_eta,final_eta,m_prime,analytic_m_ceil,redundant,moves_accepted,tilt_regressed\n",
    );
    for r in reports {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{}",
            r.nodes,
            r.seed,
            fmt_sig9(r.eta_initial),
            fmt_sig9(r.eta_tilted),
            fmt_sig9(r.eta_final),
            r.m_prime,
            opt(r.analytic_m_ceil()),
            r.redundant,
            r.moves_accepted,
            r.tilt_regressed()
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(fmt_sig9(0.9992), "0.999200000");
        assert_eq!(fmt_sig9(250.0), "250.000000");
        assert_eq!(fmt_sig9(-1.5), "-1.50000000");
        assert_eq!(fmt_sig9(123456789.0), "123456789");
        assert_eq!(fmt_sig9(1.0e12), "1.00000000e12");
        assert_eq!(fmt_sig9(0.0), "0.00000000");
        // rounding that carries into a new decade
        assert_eq!(fmt_sig9(9.9999999999), "10.0000000");
    }

    #[test]
    fn pgm_layout() {
        let region = Region::new(3.0, 2.0, 1.0).unwrap();
        let bytes = coverage_pgm(&[true, false, false, false, false, true], &region);
        let header = b"P5\n3 2\n255\n";
        assert_eq!(&bytes[..header.len()], header);
        assert_eq!(&bytes[header.len()..], &[255, 0, 0, 0, 0, 255]);
    }

    #[test]
    fn deployment_rows() {
        let csv = deployment_csv(&[SensorPose::new(1.0, 2.0, 5.5, 0.25, 0.6)]);
        assert_eq!(
            csv,
            "id,x,y,z,theta_rad,gamma_rad\n0,1.00000000,2.00000000,5.50000000,0.250000000,0.600000000\n"
        );
    }
}
