//! Small-multiples plot of `P(|0>)` against free evolution time.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::experiments::ResultTable;
use crate::LensIndex;

const PANEL_W: f64 = 220.0;
const PANEL_H: f64 = 160.0;
const PAD_L: f64 = 44.0;
const PAD_R: f64 = 10.0;
const PAD_T: f64 = 22.0;
const PAD_B: f64 = 34.0;

/// One panel per site, laid out like the lens grid. `filter` restricts the
/// sites shown.
pub fn render_plot(table: &ResultTable, filter: Option<&BTreeSet<LensIndex>>) -> Result<String> {
    if table.rows.is_empty() {
        return Err(Error::EmptySelection("result table has no rows".into()));
    }
    let sites: Vec<LensIndex> = table.sites().into_iter().filter(|s| filter.is_none_or(|f| f.contains(s))).collect();
    if sites.is_empty() {
        return Err(Error::EmptySelection("site filter matches no site in the table".into()));
    }
    let cols: BTreeSet<usize> = sites.iter().map(|s| s.i).collect();
    let rows: BTreeSet<usize> = sites.iter().map(|s| s.j).collect();
    let col_of = |i: usize| cols.iter().position(|&c| c == i).expect("column present");
    let row_of = |j: usize| rows.iter().position(|&r| r == j).expect("row present");

    let (t_min, t_max) = table
        .rows
        .iter()
        .fold((f64::MAX, f64::MIN), |(lo, hi), r| (lo.min(r.scan_ms), hi.max(r.scan_ms)));
    let span = if t_max > t_min { t_max - t_min } else { 1.0 };
    let plot_w = PANEL_W - PAD_L - PAD_R;
    let plot_h = PANEL_H - PAD_T - PAD_B;

    let width = PANEL_W * cols.len() as f64;
    let height = PANEL_H * rows.len() as f64;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif" font-size="10">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for site in &sites {
        let ox = PANEL_W * col_of(site.i) as f64 + PAD_L;
        let oy = PANEL_H * row_of(site.j) as f64 + PAD_T;
        let x = |t: f64| ox + plot_w * (t - t_min) / span;
        let y = |p: f64| oy + plot_h * (1.0 - p.clamp(0.0, 1.0));
        let _ = writeln!(s, r#"<g id="site-{}-{}">"#, site.i, site.j);
        let _ = writeln!(s, r##"<rect x="{ox:.2}" y="{oy:.2}" width="{plot_w:.2}" height="{plot_h:.2}" fill="none" stroke="#444"/>"##);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">site ({}, {})</text>"#, ox + plot_w / 2.0, oy - 6.0, site.i, site.j);
        for (p, label) in [(0.0, "0"), (0.5, "0.5"), (1.0, "1")] {
            let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{label}</text>"#, ox - 4.0, y(p) + 3.0);
        }
        for t in [t_min, t_max] {
            let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{t:.1}</text>"#, x(t), oy + plot_h + 12.0);
        }
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">T (ms)</text>"#, ox + plot_w / 2.0, oy + plot_h + 26.0);
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" transform="rotate(-90 {:.2} {:.2})">P(|0⟩)</text>"#,
            ox - 30.0,
            oy + plot_h / 2.0,
            ox - 30.0,
            oy + plot_h / 2.0
        );
        let ideal: Vec<String> = table.site_rows(*site).map(|r| format!("{:.2},{:.2}", x(r.scan_ms), y(r.p0_ideal))).collect();
        let _ = writeln!(s, r##"<polyline fill="none" stroke="#1f77b4" stroke-dasharray="3 2" points="{}"/>"##, ideal.join(" "));
        for r in table.site_rows(*site) {
            let (cx, cy) = (x(r.scan_ms), y(r.p0_measured));
            if r.sem > 0.0 {
                let _ = writeln!(
                    s,
                    r##"<line x1="{cx:.2}" y1="{:.2}" x2="{cx:.2}" y2="{:.2}" stroke="#d62728"/>"##,
                    y(r.p0_measured - r.sem),
                    y(r.p0_measured + r.sem)
                );
            }
            let _ = writeln!(s, r##"<circle cx="{cx:.2}" cy="{cy:.2}" r="1.8" fill="#d62728"/>"##);
        }
        let _ = writeln!(s, "</g>");
    }
    s.push_str("</svg>\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{Backend, ResultMetadata, ResultRow};
    use crate::LensRect;

    fn table(grid: LensRect) -> ResultTable {
        let rows = grid
            .iter()
            .flat_map(|site| {
                (0..5).map(move |k| ResultRow { site, scan_ms: k as f64, p0_ideal: 0.5, p0_measured: 0.4, sem: 0.01 })
            })
            .collect();
        ResultTable { rows, metadata: ResultMetadata { seed: 0, backend: Backend::Analytic, spec_hash: String::new() } }
    }

    #[test]
    fn one_panel_per_site() {
        let svg = render_plot(&table(LensRect::new(24, 24, 3, 3)), None).unwrap();
        assert_eq!(svg.matches("<g id=\"site-").count(), 9);
        assert!(svg.contains("T (ms)") && svg.contains("P(|0⟩)"));
        let one: BTreeSet<_> = [LensIndex::new(25, 25)].into();
        let svg1 = render_plot(&table(LensRect::new(24, 24, 3, 3)), Some(&one)).unwrap();
        assert_eq!(svg1.matches("<g id=\"site-").count(), 1);
    }

    #[test]
    fn deterministic_and_filter_errors() {
        let t = table(LensRect::new(0, 0, 2, 2));
        assert_eq!(render_plot(&t, None).unwrap(), render_plot(&t, None).unwrap());
        let none: BTreeSet<_> = [LensIndex::new(9, 9)].into();
        assert!(matches!(render_plot(&t, Some(&none)), Err(Error::EmptySelection(_))));
    }
}
