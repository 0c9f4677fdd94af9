//! Table and field writers. Every number goes out through [`fmt_sig`], a
//! fixed 17-significant-digit scientific format, so a file's bytes are a
//! pure function of the values in it.

use monostab_core::grid2d::Mask2D;
use monostab_core::shoot1d::{LengthCurve, ProfileSample, RadialProfile};
use monostab_core::spatialdyn::PeriodicOrbit;
use monostab_core::spectra::LiebReport;
use monostab_core::stargeom::Polygon;
use serde::Serialize;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

/// 17 significant digits, enough to reproduce any `f64` exactly.
pub fn fmt_sig(x: f64) -> String {
    format!("{x:.16e}")
}

fn writer(path: &Path) -> std::io::Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn write_rows(path: &Path, header: &str, rows: &[Vec<f64>]) -> std::io::Result<()> {
    let mut w = writer(path)?;
    writeln!(w, "{header}")?;
    for row in rows {
        let line: Vec<String> = row.iter().map(|&v| fmt_sig(v)).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    w.flush()
}

pub fn write_length_curve(path: &Path, curve: &LengthCurve) -> std::io::Result<()> {
    let rows: Vec<Vec<f64>> = (0..curve.alphas.len())
        .map(|k| {
            vec![
                curve.alphas[k],
                curve.lengths[k],
                curve.dlengths[k],
                curve.s_maxes[k],
            ]
        })
        .collect();
    write_rows(path, "alpha,L,dL,s_max", &rows)
}

/// One row per interior node, in the mask's cell order.
pub fn write_field_csv(path: &Path, mask: &Mask2D, values: &[f64]) -> std::io::Result<()> {
    let rows: Vec<Vec<f64>> = (0..mask.n_cells())
        .map(|i| {
            let (x, y) = mask.cell_center(i);
            vec![x, y, values[i]]
        })
        .collect();
    write_rows(path, "x,y,value", &rows)
}

/// Flat little-endian `f64` dump in cell order, no framing.
pub fn write_field_bin(path: &Path, values: &[f64]) -> std::io::Result<()> {
    let mut w = writer(path)?;
    for &v in values {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()
}

pub fn read_field_bin(path: &Path) -> std::io::Result<Vec<f64>> {
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() % 8 != 0 {
        return Err(std::io::Error::new(
            std::io::ErrorKind::InvalidData,
            "field file length is not a multiple of 8",
        ));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect())
}

/// Plain-text PBM (P1) bitmap of the mask, one pixel per lattice node,
/// top row first; `1` marks an interior node.
pub fn write_mask_pbm(path: &Path, mask: &Mask2D) -> std::io::Result<()> {
    let mut w = writer(path)?;
    writeln!(w, "P1")?;
    writeln!(w, "{} {}", mask.nx(), mask.ny())?;
    for iy in (0..mask.ny()).rev() {
        let mut line = String::with_capacity(2 * mask.nx());
        for ix in 0..mask.nx() {
            line.push(if mask.is_inside(ix as i64, iy as i64) { '1' } else { '0' });
            if ix + 1 < mask.nx() {
                line.push(' ');
            }
        }
        writeln!(w, "{line}")?;
    }
    w.flush()
}

pub fn write_branch_csv(
    path: &Path,
    branch: &[monostab_core::grid2d::BranchPoint],
) -> std::io::Result<()> {
    let rows: Vec<Vec<f64>> = branch
        .iter()
        .map(|b| {
            vec![
                b.kappa,
                b.gap,
                b.sup_u_min,
                b.sup_u_max,
                b.dist_phi_min,
                b.dist_phi_max,
                b.lambda_phi,
            ]
        })
        .collect();
    write_rows(
        path,
        "kappa,gap,sup_umin,sup_umax,dist_phi_min,dist_phi_max,lambda_phi",
        &rows,
    )
}

pub fn write_profile_csv(path: &Path, samples: &[ProfileSample]) -> std::io::Result<()> {
    let rows: Vec<Vec<f64>> = samples.iter().map(|s| vec![s.x, s.u, s.du]).collect();
    write_rows(path, "x,u,du", &rows)
}

pub fn write_radial_csv(path: &Path, profile: &RadialProfile) -> std::io::Result<()> {
    write_profile_csv(path, &profile.profile)
}

/// Orbit field on the `(tau, y)` product grid, `tau` cycling fastest.
pub fn write_orbit_csv(path: &Path, orbit: &PeriodicOrbit) -> std::io::Result<()> {
    let dy = orbit.l / (orbit.ny as f64 + 1.0);
    let ds = 1.0 / orbit.n_sigma as f64;
    let mut rows = Vec::with_capacity(orbit.n_sigma * orbit.ny);
    for iy in 0..orbit.ny {
        let y = (iy as f64 + 1.0) * dy;
        for is in 0..orbit.n_sigma {
            rows.push(vec![is as f64 * ds, y, orbit.field[is * orbit.ny + iy]]);
        }
    }
    write_rows(path, "tau,y,u", &rows)
}

#[derive(Serialize)]
struct OrbitHeader {
    #[serde(rename = "T")]
    t: f64,
    epsilon: f64,
    lambda1: f64,
    residual: f64,
}

pub fn write_orbit_header(
    path: &Path,
    orbit: &PeriodicOrbit,
    lambda1: f64,
) -> std::io::Result<()> {
    let header = OrbitHeader {
        t: orbit.period,
        epsilon: orbit.epsilon,
        lambda1,
        residual: orbit.residual,
    };
    let mut w = writer(path)?;
    serde_json::to_writer_pretty(&mut w, &header)?;
    writeln!(w)?;
    w.flush()
}

#[derive(Serialize)]
struct PolygonDoc<'a> {
    vertices: &'a [(f64, f64)],
}

pub fn write_polygon_json(path: &Path, polygon: &Polygon) -> std::io::Result<()> {
    let doc = PolygonDoc {
        vertices: polygon.vertices(),
    };
    let mut w = writer(path)?;
    serde_json::to_writer_pretty(&mut w, &doc)?;
    writeln!(w)?;
    w.flush()
}

#[derive(Serialize)]
struct LiebDoc {
    lhs: f64,
    rhs: f64,
    slack: f64,
    centers_evaluated: usize,
    seed: u64,
}

pub fn write_lieb_json(path: &Path, report: &LiebReport) -> std::io::Result<()> {
    let doc = LiebDoc {
        lhs: report.lhs,
        rhs: report.rhs,
        slack: report.slack,
        centers_evaluated: report.centers_evaluated,
        seed: report.seed,
    };
    let mut w = writer(path)?;
    serde_json::to_writer_pretty(&mut w, &doc)?;
    writeln!(w)?;
    w.flush()
}

/// Generic numeric table for experiment-specific sweeps.
pub fn write_table(path: &Path, header: &str, rows: &[Vec<f64>]) -> std::io::Result<()> {
    write_rows(path, header, rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig_format_is_fixed_width_scientific() {
        assert_eq!(fmt_sig(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_sig(-0.5), "-5.0000000000000000e-1");
        let x = 0.1 + 0.2;
        let parsed: f64 = fmt_sig(x).parse().unwrap();
        assert_eq!(parsed.to_bits(), x.to_bits());
    }

    #[test]
    fn binary_field_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.bin");
        let vals = vec![0.0, 1.5, -2.25, f64::MIN_POSITIVE, 1.0 / 3.0];
        write_field_bin(&path, &vals).unwrap();
        assert_eq!(read_field_bin(&path).unwrap(), vals);
    }

    #[test]
    fn pbm_has_one_pixel_per_node() {
        let mask = monostab_core::grid2d::build_mask(
            &monostab_core::grid2d::BuilderTag::Rectangle {
                width: 1.0,
                height: 0.5,
            },
            1.0 / 32.0,
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.pbm");
        write_mask_pbm(&path, &mask).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("P1"));
        assert_eq!(lines.next(), Some("31 15"));
        assert_eq!(lines.count(), 15);
    }
}
