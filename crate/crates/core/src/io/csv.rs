use std::fmt::Write as _;

use crate::constants::{K_B, MICRO, MILLI};
use crate::experiments::{ResultTable, SiteReport};

pub const RESULTS_HEADER: &str = "site_i,site_j,scan_ms,p0_ideal,p0_measured,sem";
pub const TRAPS_HEADER: &str =
    "site_i,site_j,x_um,y_um,power_mw,relative_transmission,depth_uk,f_radial_khz,f_axial_khz,delta0_hz,tau_ms";

/// Positional decimal with nine significant digits.
pub fn fmt_sig9(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0.00000000".into();
    }
    let sci = format!("{x:.8e}");
    let exp: i32 = sci[sci.find('e').expect("exponent") + 1..].parse().expect("integer exponent");
    let decimals = (8 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

pub fn results_csv(table: &ResultTable) -> String {
    let mut out = String::with_capacity(64 * (table.rows.len() + 1));
    out.push_str(RESULTS_HEADER);
    out.push('\n');
    let mut rows: Vec<_> = table.rows.iter().collect();
    rows.sort_by(|a, b| (a.site.i, a.site.j).cmp(&(b.site.i, b.site.j)).then(a.scan_ms.total_cmp(&b.scan_ms)));
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.site.i,
            r.site.j,
            fmt_sig9(r.scan_ms),
            fmt_sig9(r.p0_ideal),
            fmt_sig9(r.p0_measured),
            fmt_sig9(r.sem)
        );
    }
    out
}

pub fn traps_csv(reports: &[SiteReport]) -> String {
    let mut out = String::new();
    out.push_str(TRAPS_HEADER);
    out.push('\n');
    let mut reports: Vec<_> = reports.iter().collect();
    reports.sort_by_key(|r| (r.lens.i, r.lens.j));
    let two_pi = 2.0 * std::f64::consts::PI;
    for r in reports {
        let t = &r.trap;
        let fields = [
            r.position[0] / MICRO,
            r.position[1] / MICRO,
            r.power / MILLI,
            r.relative_transmission,
            t.depth / K_B / MICRO,
            t.radial_frequency / two_pi / 1e3,
            t.axial_frequency / two_pi / 1e3,
            t.differential_shift / two_pi,
            t.dephasing_tau / MILLI,
        ];
        let _ = write!(out, "{},{}", r.lens.i, r.lens.j);
        for f in fields {
            let _ = write!(out, ",{}", fmt_sig9(f));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{Backend, ResultMetadata, ResultRow};
    use crate::LensIndex;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(fmt_sig9(0.5), "0.500000000");
        assert_eq!(fmt_sig9(10.0), "10.0000000");
        assert_eq!(fmt_sig9(0.25), "0.250000000");
        assert_eq!(fmt_sig9(1.0 / 3.0), "0.333333333");
        assert_eq!(fmt_sig9(123456.7891), "123456.789");
        assert_eq!(fmt_sig9(1.2e-5), "0.0000120000000");
        assert_eq!(fmt_sig9(0.0), "0.00000000");
        // rounding into the next decade keeps nine digits
        assert_eq!(fmt_sig9(9.9999999999), "10.0000000");
    }

    #[test]
    fn empty_table_is_header_only() {
        let t = ResultTable { rows: vec![], metadata: ResultMetadata { seed: 0, backend: Backend::Analytic, spec_hash: String::new() } };
        assert_eq!(results_csv(&t), format!("{RESULTS_HEADER}\n"));
    }

    #[test]
    fn rows_sorted_lf_only() {
        let row = |i, j, t| ResultRow { site: LensIndex::new(i, j), scan_ms: t, p0_ideal: 0.5, p0_measured: 0.5, sem: 0.0 };
        let t = ResultTable {
            rows: vec![row(25, 24, 0.0), row(24, 25, 1.0), row(24, 25, 0.5)],
            metadata: ResultMetadata { seed: 0, backend: Backend::Analytic, spec_hash: String::new() },
        };
        let s = results_csv(&t);
        assert!(!s.contains('\r'));
        let lines: Vec<_> = s.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("24,25,0.500000000,"));
        assert!(lines[2].starts_with("24,25,1.00000000,"));
        assert!(lines[3].starts_with("25,24,0.00000000,"));
    }
}
