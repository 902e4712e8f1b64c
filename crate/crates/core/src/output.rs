//! CSV artifacts and run manifests. Every file starts with `#` comment lines
//! carrying the configuration hash and the theta source.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::diagnostics::{DiagnosticsRow, FunctionalWeights, ProbeSet};
use crate::quasi1d::{Comparison, DuctGeometry, Quasi1DSolution, ScalingStudy};
use crate::scheme::SolutionField;

/// Version string in `git describe` style, captured at build time.
pub const VERSION: &str = env!("STEADY_GLIMM_VERSION");

/// Number formatting shared by all files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct NumberFormat {
    /// Significant digits; `None` is the shortest string that round-trips.
    pub precision: Option<usize>,
}

impl NumberFormat {
    pub fn num(&self, x: f64) -> String {
        match self.precision {
            _ if !x.is_finite() => format!("{x}"),
            None => format!("{x:e}"),
            Some(p) => format!("{:.*e}", p.saturating_sub(1), x),
        }
    }

    fn opt(&self, x: Option<f64>) -> String {
        x.map_or_else(String::new, |v| self.num(v))
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Header {
    pub config_hash: String,
    pub theta: String,
    /// Further `key: value` lines.
    pub notes: Vec<String>,
}

impl Header {
    fn write(&self, w: &mut dyn Write, columns: &[&str]) -> io::Result<()> {
        writeln!(w, "# steady-glimm {VERSION}")?;
        writeln!(w, "# config_sha256: {}", self.config_hash)?;
        writeln!(w, "# theta: {}", self.theta)?;
        for n in &self.notes {
            writeln!(w, "# {n}")?;
        }
        writeln!(w, "{}", columns.join(","))
    }
}

fn create(path: &Path) -> io::Result<BufWriter<fs::File>> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(fs::File::create(path)?))
}

/// `columns.csv`: every `stride`-th column, one row per cell.
pub fn write_columns(w: &mut dyn Write, field: &SolutionField, head: &Header, f: NumberFormat, stride: usize) -> io::Result<()> {
    head.write(w, &["k", "x", "y_lo", "y_hi", "u", "v", "p", "rho", "Z"])?;
    for col in field.columns.iter().step_by(stride.max(1)) {
        for c in &col.cells {
            let s = c.state;
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{}",
                col.k,
                f.num(col.x),
                f.num(c.y_lo),
                f.num(c.y_hi),
                f.num(s.u),
                f.num(s.v),
                f.num(s.p),
                f.num(s.rho),
                f.num(s.z)
            )?;
        }
    }
    Ok(())
}

/// `contact.csv`.
pub fn write_contact(w: &mut dyn Write, field: &SolutionField, head: &Header, f: NumberFormat) -> io::Result<()> {
    head.write(w, &["x", "chi"])?;
    for (x, chi) in field.contact_path() {
        writeln!(w, "{},{}", f.num(x), f.num(chi))?;
    }
    Ok(())
}

/// `diagnostics.csv`. `L` is the weighted linear part `F - K Q`.
pub fn write_diagnostics(
    w: &mut dyn Write,
    rows: &[DiagnosticsRow],
    weights: &FunctionalWeights,
    head: &Header,
    f: NumberFormat,
) -> io::Result<()> {
    head.write(
        w,
        &["k", "TV", "L", "Q", "F", "Fc", "res_mass", "res_xmom", "res_energy", "res_Z", "entropy_min"],
    )?;
    for r in rows {
        let fun = r.functional;
        let res = r.slab.map(|s| s.four());
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.k,
            f.num(r.tv),
            f.opt(fun.map(|s| s.f - weights.k * s.q)),
            f.opt(fun.map(|s| s.q)),
            f.opt(fun.map(|s| s.f)),
            f.opt(fun.map(|s| s.f_c)),
            f.opt(res.map(|r| r[0])),
            f.opt(res.map(|r| r[1])),
            f.opt(res.map(|r| r[2])),
            f.opt(res.map(|r| r[3])),
            f.opt(r.entropy_min),
        )?;
    }
    Ok(())
}

/// `compare.csv`.
pub fn write_compare(w: &mut dyn Write, cmp: &Comparison, head: &Header, f: NumberFormat) -> io::Result<()> {
    head.write(
        w,
        &["x", "A", "rho_bar", "u_bar", "p_bar", "Z_bar", "rho_A", "u_A", "p_A", "Z_A", "max_abs_diff"],
    )?;
    for r in &cmp.rows {
        let (b, d) = (r.averaged, r.duct);
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{}",
            f.num(r.x),
            f.num(r.a),
            f.num(b.rho),
            f.num(b.u),
            f.num(b.p),
            f.num(b.z),
            f.num(d.rho),
            f.num(d.u),
            f.num(d.p),
            f.num(d.z),
            f.num(r.max_abs_diff)
        )?;
    }
    Ok(())
}

/// `quasi1d.csv`: the duct solution on its own grid.
pub fn write_quasi1d(
    w: &mut dyn Write,
    geom: &DuctGeometry,
    sol: &Quasi1DSolution,
    head: &Header,
    f: NumberFormat,
) -> io::Result<()> {
    head.write(w, &["x", "A", "rho", "u", "p", "Z"])?;
    for (j, n) in sol.nodes.iter().enumerate() {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            f.num(sol.x(j)),
            f.num(geom.a[j]),
            f.num(n.rho),
            f.num(n.u),
            f.num(n.p),
            f.num(n.z)
        )?;
    }
    Ok(())
}

/// `probe.csv`: probed coefficients next to their closed forms.
pub fn write_probe(w: &mut dyn Write, p: &ProbeSet, head: &Header, f: NumberFormat) -> io::Result<()> {
    head.write(w, &["quantity", "numeric", "closed_form", "abs_diff"])?;
    let b = &p.boundary;
    let rows = [
        ("K_b", b.k_b, b.k_b_closed),
        ("K_b5", b.k_b5, 1.0),
        ("K_b2", b.k_b2, 0.0),
        ("K_b3", b.k_b3, 0.0),
        ("K_25", p.contact.k25(), p.k25_closed),
    ];
    for (name, num, closed) in rows {
        writeln!(w, "{name},{},{},{}", f.num(num), f.num(closed), f.num((num - closed).abs()))?;
    }
    Ok(())
}

/// `scaling.csv`.
pub fn write_scaling(w: &mut dyn Write, st: &ScalingStudy, head: &Header, f: NumberFormat) -> io::Result<()> {
    head.write(w, &["delta", "h", "sup_diff", "sup_diff_single", "seeds", "q1d_iterations"])?;
    for r in &st.rows {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            f.num(r.delta),
            f.num(r.h),
            f.num(r.sup_diff),
            f.num(r.sup_diff_single),
            r.seeds,
            r.q1d_iterations
        )?;
    }
    Ok(())
}

/// Opens `dir/name`, runs `body` on it and returns the path.
pub fn emit(dir: &Path, name: &str, body: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> io::Result<PathBuf> {
    let path = dir.join(name);
    let mut w = create(&path)?;
    body(&mut w)?;
    w.flush()?;
    Ok(path)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub version: String,
    pub command: String,
    pub config_sha256: String,
    pub seed: u64,
    pub theta: String,
    pub h: f64,
    pub files: Vec<String>,
    pub notes: Vec<String>,
    pub status: String,
}

pub fn write_manifest(dir: &Path, m: &Manifest) -> io::Result<PathBuf> {
    let text = toml::to_string(m).map_err(io::Error::other)?;
    emit(dir, "manifest.toml", |w| w.write_all(text.as_bytes()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shortest_round_trip() {
        let f = NumberFormat::default();
        for x in [0.1, 1.0 / 3.0, -2.5e-17, 1e300, 0.0] {
            assert_eq!(f.num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(f.num(0.1), "1e-1");
        assert_eq!(NumberFormat { precision: Some(3) }.num(1.0 / 3.0), "3.33e-1");
    }

    #[test]
    fn header_lines() {
        let h = Header { config_hash: "abc".into(), theta: "t".into(), notes: vec!["n: 1".into()] };
        let mut buf = Vec::new();
        h.write(&mut buf, &["x", "chi"]).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert!(lines[0].starts_with("# steady-glimm"));
        assert_eq!(lines[1], "# config_sha256: abc");
        assert_eq!(lines[2], "# theta: t");
        assert_eq!(lines[3], "# n: 1");
        assert_eq!(lines[4], "x,chi");
    }
}
