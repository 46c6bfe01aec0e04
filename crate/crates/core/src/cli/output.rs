//! CSV and SVG writers. Files are written to a temporary sibling and renamed
//! into place.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

/// Header plus numeric rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, k: usize) -> impl Iterator<Item = f64> + '_ {
        self.rows.iter().map(move |r| r[k])
    }
}

/// Twelve significant digits, exponent notation, `.` decimal separator.
pub fn format_value(x: f64) -> String {
    format!("{x:.11e}")
}

pub fn to_csv(table: &Table) -> String {
    let mut s = table.header.join(",");
    s.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(|&x| format_value(x)).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

/// Write `contents` to `path` atomically.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// One polyline per `(group value, y column)` pair, `x` on the horizontal axis.
///
/// With `group = Some(k)` rows sharing the value in column `k` form one curve.
pub fn render_svg(table: &Table, x: usize, ys: &[usize], group: Option<usize>) -> Result<String, String> {
    if table.rows.is_empty() {
        return Err("no data to plot".into());
    }
    let finite = |v: f64| v.is_finite();
    let xs: Vec<f64> = table.column(x).filter(|v| finite(*v)).collect();
    let yv: Vec<f64> = ys.iter().flat_map(|&k| table.column(k)).filter(|v| finite(*v)).collect();
    let (x0, x1) = bounds(&xs).ok_or("x column has no finite values")?;
    let (y0, y1) = bounds(&yv).ok_or("y columns have no finite values")?;
    let px = |v: f64| MARGIN + (v - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let py = |v: f64| HEIGHT - MARGIN - (v - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut groups: Vec<f64> = Vec::new();
    if let Some(g) = group {
        for v in table.column(g) {
            if !groups.iter().any(|u| u.to_bits() == v.to_bits()) {
                groups.push(v);
            }
        }
    }
    let group_keys: Vec<Option<f64>> = if groups.is_empty() { vec![None] } else { groups.into_iter().map(Some).collect() };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let (l, r, t, b) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(svg, r#"<path d="M{l},{t} L{l},{b} L{r},{b}" stroke="black" fill="none"/>"#);
    let _ = writeln!(svg, r#"<text x="{l}" y="{}" >{}</text>"#, b + 20.0, short(x0));
    let _ = writeln!(svg, r#"<text x="{r}" y="{}" text-anchor="end">{}</text>"#, b + 20.0, short(x1));
    let _ = writeln!(svg, r#"<text x="{}" y="{b}" text-anchor="end">{}</text>"#, l - 6.0, short(y0));
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, l - 6.0, t + 4.0, short(y1));
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, WIDTH / 2.0, HEIGHT - 15.0, table.header[x]);

    let mut curve = 0;
    for key in &group_keys {
        for &k in ys {
            let pts: Vec<String> = table
                .rows
                .iter()
                .filter(|row| match (key, group) {
                    (Some(v), Some(g)) => row[g].to_bits() == v.to_bits(),
                    _ => true,
                })
                .filter(|row| finite(row[x]) && finite(row[k]))
                .map(|row| format!("{:.2},{:.2}", px(row[x]), py(row[k])))
                .collect();
            let color = COLORS[curve % COLORS.len()];
            let _ = writeln!(svg, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, pts.join(" "));
            let label = match (key, group) {
                (Some(v), Some(g)) => format!("{} ({} = {})", table.header[k], table.header[g], short(*v)),
                _ => table.header[k].clone(),
            };
            let _ = writeln!(svg, r#"<text x="{}" y="{}" fill="{color}">{label}</text>"#, r - 200.0, t + 14.0 * (curve as f64 + 1.0));
            curve += 1;
        }
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn bounds(v: &[f64]) -> Option<(f64, f64)> {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !lo.is_finite() {
        return None;
    }
    if hi - lo > 0.0 {
        Some((lo, hi))
    } else {
        Some((lo - 0.5, hi + 0.5))
    }
}

fn short(v: f64) -> String {
    format!("{v:.4}")
}
