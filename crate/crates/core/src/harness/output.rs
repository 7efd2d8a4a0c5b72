use std::io::Write;

use crate::error::{Error, Result};

pub const HEADER: [&str; 8] = [
    "parameter",
    "value",
    "metric",
    "analytic",
    "simulated",
    "ci95",
    "trials",
    "runtime_ms",
];

/// One `(parameter point, metric)` record.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub parameter: String,
    pub value: f64,
    pub metric: String,
    pub analytic: Option<f64>,
    pub simulated: Option<f64>,
    pub ci95: Option<f64>,
    pub trials: Option<u64>,
    pub runtime_ms: Option<f64>,
}

impl SweepRow {
    pub fn analytic(parameter: &str, value: f64, metric: impl Into<String>, analytic: f64) -> Self {
        SweepRow {
            parameter: parameter.to_string(),
            value,
            metric: metric.into(),
            analytic: Some(analytic),
            simulated: None,
            ci95: None,
            trials: None,
            runtime_ms: None,
        }
    }

    pub fn simulated(
        parameter: &str,
        value: f64,
        metric: impl Into<String>,
        analytic: Option<f64>,
        simulated: f64,
        ci95: f64,
        trials: u64,
    ) -> Self {
        SweepRow {
            parameter: parameter.to_string(),
            value,
            metric: metric.into(),
            analytic,
            simulated: Some(simulated),
            ci95: Some(ci95),
            trials: Some(trials),
            runtime_ms: None,
        }
    }

    pub fn with_runtime(mut self, runtime_ms: Option<f64>) -> Self {
        self.runtime_ms = runtime_ms;
        self
    }

    fn fields(&self) -> [String; 8] {
        let opt = |v: Option<f64>| v.map(format_sig).unwrap_or_default();
        [
            self.parameter.clone(),
            format_sig(self.value),
            self.metric.clone(),
            opt(self.analytic),
            opt(self.simulated),
            opt(self.ci95),
            self.trials.map(|t| t.to_string()).unwrap_or_default(),
            opt(self.runtime_ms),
        ]
    }
}

/// Formats `x` to 12 significant digits with trailing zeros removed:
/// plain notation for exponents in `[-5, 12)`, scientific otherwise.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// Writes the header and rows with LF line endings.
pub fn write_rows<W: Write>(out: W, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(HEADER).map_err(io)?;
    for row in rows {
        if row.analytic.is_none() && row.simulated.is_none() {
            return Err(Error::numerical(
                "csv",
                format!("row {}/{} has neither analytic nor simulated value", row.parameter, row.metric),
            ));
        }
        w.write_record(row.fields()).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

pub fn rows_to_string(rows: &[SweepRow]) -> Result<String> {
    let mut buf = Vec::new();
    write_rows(&mut buf, rows)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(format_sig(0.206010000000001), "0.20601");
        assert_eq!(format_sig(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_sig(2.0 / 3.0 * 1e6), "666666.666667");
        assert_eq!(format_sig(1234.0), "1234");
        assert_eq!(format_sig(-0.5), "-0.5");
        assert_eq!(format_sig(1e-7 / 3.0), "3.33333333333e-8");
        assert_eq!(format_sig(6.02214076e23), "6.02214076e23");
        assert_eq!(format_sig(0.0), "0");
        assert_eq!(format_sig(f64::INFINITY), "inf");
    }

    #[test]
    fn round_trip_to_twelve_digits() {
        for &x in &[0.123456789012345, 98765.4321098765, 1e-3 * std::f64::consts::PI] {
            let back: f64 = format_sig(x).parse().unwrap();
            assert!(((back - x) / x).abs() < 5e-12);
        }
    }

    #[test]
    fn header_and_line_endings() {
        let rows = vec![
            SweepRow::analytic("lambda_bs", 0.001, "gcho_rate_m3", 0.20601),
            SweepRow::simulated("speed", 10.0, "gcho_rate", None, 1.5, 0.01, 100),
        ];
        let s = rows_to_string(&rows).unwrap();
        assert!(s.starts_with("parameter,value,metric,analytic,simulated,ci95,trials,runtime_ms\n"));
        assert!(!s.contains('\r'));
        assert_eq!(s.lines().nth(1).unwrap(), "lambda_bs,0.001,gcho_rate_m3,0.20601,,,,");
        assert_eq!(s.lines().nth(2).unwrap(), "speed,10,gcho_rate,,1.5,0.01,100,");
    }

    #[test]
    fn empty_row_is_rejected() {
        let mut r = SweepRow::analytic("x", 1.0, "m", 1.0);
        r.analytic = None;
        assert!(rows_to_string(&[r]).is_err());
    }
}
