use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use super::{ConvergenceRecord, RunOutput};
use crate::error::{Error, Result};
use crate::mesh::write_ascii_tri;

pub const CSV_HEADER: &str = "step,ndof,energy,iters,delay,err_total_sq,err_iter_sq,err_exact_sq,wall_s";

fn opt<T: std::fmt::LowerExp>(v: Option<T>) -> String {
    v.map_or(String::new(), |x| format!("{x:e}"))
}

/// Convergence table; disabled diagnostics leave their fields empty.
pub fn csv_string(records: &[ConvergenceRecord]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in records {
        let _ = writeln!(
            s,
            "{},{},{:e},{},{},{},{},{},{}",
            r.step,
            r.ndof,
            r.energy,
            r.iters,
            r.delay.map_or(String::new(), |d| d.to_string()),
            opt(r.err_total_sq),
            opt(r.err_iter_sq),
            opt(r.err_exact_sq),
            r.wall_s.map_or(String::new(), |w| format!("{w:.3}")),
        );
    }
    s
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 60.0;

struct Axes {
    x: (f64, f64),
    y: (f64, f64),
}

impl Axes {
    fn px(&self, n: f64) -> f64 {
        MARGIN + (n.log10() - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - 2.0 * MARGIN)
    }

    fn py(&self, e: f64) -> f64 {
        HEIGHT - MARGIN - (e.log10() - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - 2.0 * MARGIN)
    }
}

/// Log-log plot of the available error columns against the number of
/// degrees of freedom, with a dashed `O(ndof^-1)` guide line.
pub fn svg_string(records: &[ConvergenceRecord]) -> String {
    let series = [
        ("err_total_sq", "#1f77b4", pick(records, |r| r.err_total_sq)),
        ("err_iter_sq", "#ff7f0e", pick(records, |r| r.err_iter_sq)),
        ("err_exact_sq", "#2ca02c", pick(records, |r| r.err_exact_sq)),
    ];
    let all: Vec<(f64, f64)> = series.iter().flat_map(|s| s.2.iter().copied()).collect();

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    if all.is_empty() {
        let _ = writeln!(s, r#"<text x="{MARGIN}" y="{MARGIN}">no error data</text>"#);
        s.push_str("</svg>\n");
        return s;
    }
    let lx: Vec<f64> = all.iter().map(|p| p.0.log10()).collect();
    let ly: Vec<f64> = all.iter().map(|p| p.1.log10()).collect();
    let bounds = |v: &[f64]| {
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min).floor();
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max).ceil();
        (lo, if hi > lo { hi } else { lo + 1.0 })
    };
    let axes = Axes {
        x: bounds(&lx),
        y: bounds(&ly),
    };

    // frame and decade ticks
    let (x0, x1, y0, y1) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(
        s,
        r#"<rect x="{x0}" y="{y0}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        x1 - x0,
        y1 - y0
    );
    for k in axes.x.0 as i32..=axes.x.1 as i32 {
        let x = axes.px(10f64.powi(k));
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{y1}" x2="{x:.2}" y2="{}" stroke="black"/><text x="{x:.2}" y="{}" text-anchor="middle" font-size="12">1e{k}</text>"#,
            y1 + 5.0,
            y1 + 20.0
        );
    }
    for k in axes.y.0 as i32..=axes.y.1 as i32 {
        let y = axes.py(10f64.powi(k));
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{y:.2}" x2="{x0}" y2="{y:.2}" stroke="black"/><text x="{}" y="{y:.2}" text-anchor="end" font-size="12">1e{k}</text>"#,
            x0 - 5.0,
            x0 - 8.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="14">degrees of freedom</text>"#,
        WIDTH / 2.0,
        HEIGHT - 15.0
    );

    for (i, (name, color, pts)) in series.iter().enumerate() {
        if pts.is_empty() {
            continue;
        }
        let path: Vec<String> = pts
            .iter()
            .map(|(n, e)| format!("{:.2},{:.2}", axes.px(*n), axes.py(*e)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline class="series" data-name="{name}" points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            path.join(" ")
        );
        for (n, e) in pts {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#,
                axes.px(*n),
                axes.py(*e)
            );
        }
        let ly = y0 + 20.0 + 18.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{ly}" font-size="12" fill="{color}">{name}</text>"#,
            x1 - 110.0
        );
    }

    // guide through the first point of the first non-empty series
    let (n0, e0) = series.iter().find_map(|s| s.2.first().copied()).expect("data exists");
    let n1 = 10f64.powf(axes.x.1);
    let e1 = e0 * n0 / n1;
    let _ = writeln!(
        s,
        r#"<line class="guide" data-slope="-1" data-n0="{n0:e}" data-e0="{e0:e}" data-n1="{n1:e}" data-e1="{e1:e}" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black" stroke-dasharray="6,4"/>"#,
        axes.px(n0),
        axes.py(e0),
        axes.px(n1),
        axes.py(e1)
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="12">O(ndof^-1)</text>"#,
        x1 - 110.0,
        y0 + 20.0 + 18.0 * 3.0
    );
    s.push_str("</svg>\n");
    s
}

fn pick(records: &[ConvergenceRecord], f: impl Fn(&ConvergenceRecord) -> Option<f64>) -> Vec<(f64, f64)> {
    records
        .iter()
        .filter_map(|r| f(r).map(|e| (r.ndof as f64, e)))
        .filter(|&(n, e)| n > 0.0 && e > 0.0 && e.is_finite())
        .collect()
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Written file paths.
#[derive(Clone, Debug, Default)]
pub struct Emitted {
    pub csv: PathBuf,
    pub svg: Option<PathBuf>,
    pub snapshots: Vec<PathBuf>,
}

/// Writes `convergence.csv`, `convergence.svg`, `run.txt` and, if meshes
/// were kept, `mesh_NNN.tri` snapshots into `dir`.
pub fn emit_outputs(out: &RunOutput, dir: &Path, svg: bool) -> Result<Emitted> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let csv = dir.join("convergence.csv");
    fs::write(&csv, csv_string(&out.records)).map_err(io_err(&csv))?;

    let info = dir.join("run.txt");
    let mut text = out.config.to_config_string();
    let _ = writeln!(text, "# reference = {}", out.reference.as_str());
    if let Some(r) = out.reference_value {
        let _ = writeln!(text, "# reference_value = {r:e}");
    }
    if let Some(e) = &out.error {
        let _ = writeln!(text, "# aborted: {e}");
    }
    fs::write(&info, text).map_err(io_err(&info))?;

    let mut emitted = Emitted {
        csv,
        ..Emitted::default()
    };
    if svg {
        let path = dir.join("convergence.svg");
        fs::write(&path, svg_string(&out.records)).map_err(io_err(&path))?;
        emitted.svg = Some(path);
    }
    for (r, mesh) in out.records.iter().zip(&out.meshes) {
        let path = dir.join(format!("mesh_{:03}.tri", r.step));
        let file = fs::File::create(&path).map_err(io_err(&path))?;
        write_ascii_tri(mesh, io::BufWriter::new(file)).map_err(io_err(&path))?;
        emitted.snapshots.push(path);
    }
    Ok(emitted)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(step: usize, ndof: usize, err: f64) -> ConvergenceRecord {
        ConvergenceRecord {
            step,
            ndof,
            energy: -0.1,
            iters: 12,
            delay: None,
            err_total_sq: Some(err),
            err_iter_sq: None,
            err_exact_sq: None,
            wall_s: None,
            initial_energy: -0.1,
            marked: 3,
        }
    }

    #[test]
    fn csv_rows_and_empty_fields() {
        let recs = vec![rec(0, 10, 1e-2), rec(1, 20, 5e-3), rec(2, 40, 2.5e-3)];
        let csv = csv_string(&recs);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines[1], "0,10,-1e-1,12,,1e-2,,,");
        assert!(lines.iter().all(|l| l.split(',').count() == 9));
    }

    #[test]
    fn guide_line_has_slope_minus_one() {
        let recs = vec![rec(0, 10, 1e-2), rec(1, 100, 1e-3), rec(2, 1000, 2e-4)];
        let svg = svg_string(&recs);
        let guide = svg.lines().find(|l| l.contains(r#"class="guide""#)).unwrap();
        let attr = |name: &str| -> f64 {
            let key = format!(r#"{name}=""#);
            let start = guide.find(&key).unwrap() + key.len();
            guide[start..].split('"').next().unwrap().parse().unwrap()
        };
        let slope =
            (attr("data-e1").log10() - attr("data-e0").log10()) / (attr("data-n1").log10() - attr("data-n0").log10());
        assert!((slope + 1.0).abs() < 1e-12);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    }
}
