//! CSV and JSON renderings of a scan. Numbers use 17 significant digits so
//! identical requests give byte-identical files.

use std::io::{self, Write};

use nlspring::format::sig17;
use nlspring::{Diagnostics, ScanResult};

fn header(result: &ScanResult) -> Vec<&'static str> {
    std::iter::once("tau").chain(result.quantities.iter().map(|q| q.column())).collect()
}

fn row(result: &ScanResult, i: usize) -> impl Iterator<Item = f64> + '_ {
    std::iter::once(result.tau[i]).chain(result.columns.iter().map(move |c| c[i]))
}

pub fn write_csv<W: Write>(mut w: W, result: &ScanResult) -> io::Result<()> {
    writeln!(w, "{}", header(result).join(","))?;
    for i in 0..result.tau.len() {
        let line: Vec<String> = row(result, i).map(sig17).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    w.flush()
}

fn json_number(x: f64) -> String {
    if x.is_finite() {
        sig17(x)
    } else {
        "null".to_string()
    }
}

fn json_string(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

fn json_diagnostics(d: &Diagnostics) -> String {
    let warnings: Vec<String> = d.warnings.iter().map(|s| json_string(s)).collect();
    format!(
        "{{\"support_len\":{},\"residual_mass\":{},\"cap_hit\":{},\"squeeze_support_len\":{},\
         \"squeeze_tail_estimate\":{},\"warnings\":[{}]}}",
        d.support_len,
        json_number(d.residual_mass),
        d.cap_hit,
        d.squeeze_support_len,
        json_number(d.squeeze_tail_estimate),
        warnings.join(",")
    )
}

pub fn write_json<W: Write>(mut w: W, result: &ScanResult) -> io::Result<()> {
    let columns: Vec<String> = header(result).into_iter().map(json_string).collect();
    writeln!(w, "{{")?;
    writeln!(w, "  \"columns\": [{}],", columns.join(","))?;
    writeln!(w, "  \"rows\": [")?;
    let n = result.tau.len();
    for i in 0..n {
        let cells: Vec<String> = row(result, i).map(json_number).collect();
        let sep = if i + 1 < n { "," } else { "" };
        writeln!(w, "    [{}]{sep}", cells.join(","))?;
    }
    writeln!(w, "  ],")?;
    writeln!(w, "  \"diagnostics\": {}", json_diagnostics(&result.diagnostics))?;
    writeln!(w, "}}")?;
    w.flush()
}

/// One-line summary for stderr.
pub fn summary(d: &Diagnostics) -> String {
    format!(
        "support_len={} residual_mass={:e} cap_hit={} squeeze_support_len={} squeeze_tail_estimate={:e}",
        d.support_len, d.residual_mass, d.cap_hit, d.squeeze_support_len, d.squeeze_tail_estimate
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use nlspring::Quantity;

    fn sample() -> ScanResult {
        ScanResult {
            tau: vec![0.0, 0.5],
            quantities: vec![Quantity::P0, Quantity::Sp],
            columns: vec![vec![1.0, 0.25], vec![1.0, f64::NAN]],
            diagnostics: Diagnostics {
                support_len: 3,
                residual_mass: 1e-13,
                cap_hit: false,
                squeeze_support_len: 4,
                squeeze_tail_estimate: 0.0,
                warnings: vec!["a \"quoted\" note".into()],
            },
        }
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &sample()).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("tau,p0,sp"));
        assert_eq!(lines.next(), Some("0.0000000000000000e0,1.0000000000000000e0,1.0000000000000000e0"));
        assert_eq!(lines.next(), Some("5.0000000000000000e-1,2.5000000000000000e-1,NaN"));
        assert!(!text.contains('\r'));
    }

    #[test]
    fn json_parses_with_null_for_nan() {
        let mut buf = Vec::new();
        write_json(&mut buf, &sample()).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["columns"][2], "sp");
        assert_eq!(v["rows"][1][1], 0.25);
        assert!(v["rows"][1][2].is_null());
        assert_eq!(v["diagnostics"]["support_len"], 3);
        assert_eq!(v["diagnostics"]["warnings"][0], "a \"quoted\" note");
    }
}
