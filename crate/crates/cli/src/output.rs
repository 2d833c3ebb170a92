//! Deterministic output: CSV files with 12 significant digits, `\n` line
//! endings, a trailing extrema/failure comment block, and a TOML manifest
//! sidecar echoing the fully resolved configuration.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use enaqt::sweep::{ExtremumKind, PhaseDiagram, SweepTable};

use crate::config::Resolved;
use crate::CliError;

/// 12 significant digits, scientific, locale-independent.
pub fn sig12(x: f64) -> String {
    format!("{x:.11e}")
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .map_err(|e| CliError::Io(format!("creating {}: {e}", parent.display())))?;
        }
    }
    fs::write(path, contents).map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))
}

/// Sweep table as `param,eta` rows; failed rows keep their grid value with
/// an empty efficiency field and are explained in the comment block.
pub fn sweep_csv(table: &SweepTable) -> String {
    let mut out = String::from("param,eta\n");
    for (i, &g) in table.grid.iter().enumerate() {
        match table.eta[i] {
            Some(eta) => {
                let _ = writeln!(out, "{},{}", sig12(g), sig12(eta));
            }
            None => {
                let _ = writeln!(out, "{},", sig12(g));
            }
        }
    }
    let _ = writeln!(out, "# param: {}", table.param.name());
    if table.extrema.is_empty() {
        let _ = writeln!(out, "# extrema: none");
    } else {
        let _ = writeln!(out, "# extrema:");
        for e in &table.extrema {
            let kind = match e.kind {
                ExtremumKind::Minimum => "min",
                ExtremumKind::Maximum => "max",
            };
            let _ = writeln!(
                out,
                "#   kind={kind} grid_index={} position={} value={}",
                e.index,
                sig12(e.position),
                sig12(e.value)
            );
        }
    }
    if !table.failures.is_empty() {
        let _ = writeln!(out, "# failures:");
        for (i, reason) in &table.failures {
            let _ = writeln!(out, "#   grid_index={i} reason={reason}");
        }
    }
    out
}

/// Generic two-column scan (`param,value`) used by the dip-characterization
/// presets; `value_name` documents the second column in the comment block.
pub fn curve_csv(rows: &[(f64, Option<f64>)], value_name: &str) -> String {
    let mut out = String::from("param,value\n");
    for &(x, y) in rows {
        match y {
            Some(y) => {
                let _ = writeln!(out, "{},{}", sig12(x), sig12(y));
            }
            None => {
                let _ = writeln!(out, "{},", sig12(x));
            }
        }
    }
    let _ = writeln!(out, "# value: {value_name}");
    out
}

/// Phase diagram as `c,delta,label` rows with B=0, I=1, II=2, III=3.
pub fn phase_csv(pd: &PhaseDiagram) -> String {
    let mut out = String::from("c,delta,label\n");
    for (ic, &c) in pd.c_grid.iter().enumerate() {
        for (id, &d) in pd.delta_grid.iter().enumerate() {
            let _ = writeln!(out, "{},{},{}", sig12(c), sig12(d), pd.label(ic, id).code());
        }
    }
    let _ = writeln!(out, "# label codes: B=0 I=1 II=2 III=3");
    out
}

/// Analytic boundary curves as `delta,d_minus,d_plus`.
pub fn overlay_csv(pd: &PhaseDiagram) -> String {
    let mut out = String::from("delta,d_minus,d_plus\n");
    for p in &pd.overlay {
        let _ = writeln!(out, "{},{},{}", sig12(p.delta), sig12(p.d_minus), sig12(p.d_plus));
    }
    out
}

/// Write `contents` to `path` plus a `<path>.manifest.toml` sidecar carrying
/// the tool version, the command, and the canonical configuration echo.
pub fn write_with_manifest(
    path: &Path,
    contents: &str,
    command: &str,
    config: &Resolved,
) -> Result<(), CliError> {
    write_file(path, contents)?;
    let manifest = format!(
        "[provenance]\ntool = \"enaqt\"\nversion = \"{}\"\ncommand = \"{}\"\n\n{}",
        env!("CARGO_PKG_VERSION"),
        command,
        config.canonical_toml()
    );
    let mut manifest_path = path.as_os_str().to_owned();
    manifest_path.push(".manifest.toml");
    write_file(Path::new(&manifest_path), &manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig12_formats_twelve_significant_digits() {
        assert_eq!(sig12(0.832417673892), "8.32417673892e-1");
        assert_eq!(sig12(1.0), "1.00000000000e0");
        assert_eq!(sig12(-0.25), "-2.50000000000e-1");
    }
}
