use serde::Serialize;

use crate::error::Result;

/// One line of the bounds summary; absent values are written as empty fields.
#[derive(Debug, Clone, Serialize)]
pub struct SummaryRow {
    #[serde(rename = "Dataset")]
    pub dataset: String,
    /// Shape such as `8 x 8`.
    #[serde(rename = "size")]
    pub size: String,
    #[serde(rename = "f*")]
    pub f_star: Option<f64>,
    /// Lower bound on log2|S| with the density it was obtained at, e.g. `5 (0.30)`.
    #[serde(rename = "LB(f)")]
    pub lb: Option<String>,
    #[serde(rename = "log2|S|")]
    pub log2_count: Option<f64>,
    #[serde(rename = "UB")]
    pub ub: Option<f64>,
    #[serde(rename = "trivial UB")]
    pub trivial_ub: usize,
}

impl SummaryRow {
    pub fn format_lb(lb_log2: f64, f: f64) -> String {
        format!("{lb_log2:.2} ({f:.2})")
    }
}

pub fn write_summary_csv(rows: &[SummaryRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(std::io::Error::other)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_blanks() {
        let rows = [SummaryRow {
            dataset: "synth_8".into(),
            size: "8 x 8".into(),
            f_star: Some(0.41),
            lb: Some(SummaryRow::format_lb(5.0, 0.3)),
            log2_count: Some(5.64),
            ub: None,
            trivial_ub: 64,
        }];
        let text = write_summary_csv(&rows).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "Dataset,size,f*,LB(f),log2|S|,UB,trivial UB"
        );
        assert_eq!(
            lines.next().unwrap(),
            "synth_8,8 x 8,0.41,5.00 (0.30),5.64,,64"
        );
    }
}
