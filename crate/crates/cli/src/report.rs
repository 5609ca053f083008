//! Result rows and their CSV/JSON serialization.

use std::fmt::Write as _;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::OutputFormat;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Info,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Info => "info",
        }
    }

    pub fn from_check(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub run_id: String,
    pub suite: String,
    pub scenario_hash: String,
    pub param_name: String,
    pub param_value: String,
    pub metric: String,
    pub value: f64,
    pub verdict: Verdict,
}

/// Fixed 17-significant-digit rendering used for every number in the output.
pub fn format_number(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

fn short_hash(text: &str) -> String {
    hex::encode(&Sha256::digest(text.as_bytes())[..8])
}

/// Rows plus the `# key: value` provenance block.
#[derive(Debug, Clone)]
pub struct Report {
    pub suite: String,
    pub run_id: String,
    pub scenario_hash: String,
    header: Vec<(String, String)>,
    rows: Vec<ResultRow>,
}

impl Report {
    pub fn new(suite: &str, canonical_config: &str, canonical_model: &str, seed: u64) -> Self {
        let run_id = short_hash(&format!("{suite}\n{seed}\n{canonical_config}"));
        let scenario_hash = short_hash(canonical_model);
        let mut report = Self {
            suite: suite.to_string(),
            run_id,
            scenario_hash,
            header: Vec::new(),
            rows: Vec::new(),
        };
        report.meta("tool", concat!("fwlab ", env!("CARGO_PKG_VERSION")));
        report.meta("suite", suite);
        let (id, hash) = (report.run_id.clone(), report.scenario_hash.clone());
        report.meta("run_id", &id);
        report.meta("scenario_hash", &hash);
        report.meta("seed", &seed.to_string());
        report
    }

    pub fn meta(&mut self, key: &str, value: &str) {
        self.header.push((key.to_string(), value.to_string()));
    }

    /// Records a threshold used by a verdict; repeated keys are listed once.
    pub fn threshold(&mut self, name: &str, value: f64) {
        let key = format!("threshold.{name}");
        if !self.header.iter().any(|(k, _)| *k == key) {
            self.header.push((key, format_number(value)));
        }
    }

    pub fn push(&mut self, param_name: &str, param_value: &str, metric: &str, value: f64, verdict: Verdict) {
        self.rows.push(ResultRow {
            run_id: self.run_id.clone(),
            suite: self.suite.clone(),
            scenario_hash: self.scenario_hash.clone(),
            param_name: param_name.to_string(),
            param_value: param_value.to_string(),
            metric: metric.to_string(),
            value,
            verdict,
        });
    }

    pub fn info(&mut self, param_name: &str, param_value: &str, metric: &str, value: f64) {
        self.push(param_name, param_value, metric, value, Verdict::Info);
    }

    /// Pass iff `value ≤ limit`; the limit is added to the header.
    pub fn at_most(&mut self, param: (&str, &str), metric: &str, value: f64, name: &str, limit: f64) {
        self.threshold(name, limit);
        self.push(param.0, param.1, metric, value, Verdict::from_check(value <= limit));
    }

    pub fn rows(&self) -> &[ResultRow] {
        &self.rows
    }

    pub fn header(&self) -> &[(String, String)] {
        &self.header
    }

    pub fn any_fail(&self) -> bool {
        self.rows.iter().any(|r| r.verdict == Verdict::Fail)
    }

    pub fn row(&self, metric: &str) -> Option<&ResultRow> {
        self.rows.iter().find(|r| r.metric == metric)
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.header {
            let _ = writeln!(out, "# {k}: {v}");
        }
        out.push_str("run_id,suite,scenario_hash,param_name,param_value,metric,value,verdict\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.run_id,
                r.suite,
                r.scenario_hash,
                csv_field(&r.param_name),
                csv_field(&r.param_value),
                csv_field(&r.metric),
                format_number(r.value),
                r.verdict.as_str()
            );
        }
        out
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Doc<'a> {
            provenance: serde_json::Map<String, serde_json::Value>,
            rows: Vec<JsonRow<'a>>,
        }
        #[derive(Serialize)]
        struct JsonRow<'a> {
            run_id: &'a str,
            suite: &'a str,
            scenario_hash: &'a str,
            param_name: &'a str,
            param_value: &'a str,
            metric: &'a str,
            value: String,
            verdict: Verdict,
        }
        let provenance = self
            .header
            .iter()
            .map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone())))
            .collect();
        let rows = self
            .rows
            .iter()
            .map(|r| JsonRow {
                run_id: &r.run_id,
                suite: &r.suite,
                scenario_hash: &r.scenario_hash,
                param_name: &r.param_name,
                param_value: &r.param_value,
                metric: &r.metric,
                value: format_number(r.value),
                verdict: r.verdict,
            })
            .collect();
        let mut text = serde_json::to_string_pretty(&Doc { provenance, rows }).expect("plain data serializes");
        text.push('\n');
        text
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::new("verify", "model.points = 8\n", "model.points = 8\n", 7);
        r.at_most(("scenario", "standard"), "unitarity_res", 3e-15, "unitarity", 1e-12);
        r.info("k", "1,2", "slope", f64::NAN);
        r
    }

    #[test]
    fn numbers_have_seventeen_digits() {
        assert_eq!(format_number(0.1), "1.0000000000000001e-1");
        assert_eq!(format_number(-2.0), "-2.0000000000000000e0");
        assert_eq!(format_number(f64::NAN), "NaN");
    }

    #[test]
    fn csv_layout() {
        let text = sample().to_csv();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# tool: fwlab"));
        assert!(lines.contains(&"# threshold.unitarity: 9.9999999999999998e-13"));
        let header = lines.iter().position(|l| l.starts_with("run_id,")).unwrap();
        assert!(lines[header + 1].ends_with(&format!(",unitarity_res,{},pass", format_number(3e-15))));
        assert!(lines[header + 2].contains(",\"1,2\",slope,NaN,info"));
    }

    #[test]
    fn json_mirrors_rows() {
        let r = sample();
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["rows"].as_array().unwrap().len(), 2);
        assert_eq!(v["rows"][0]["verdict"], "pass");
        assert_eq!(v["provenance"]["run_id"], r.run_id.as_str());
    }

    #[test]
    fn ids_are_deterministic() {
        let a = Report::new("scan", "x", "y", 1);
        let b = Report::new("scan", "x", "y", 1);
        let c = Report::new("scan", "x", "y", 2);
        assert_eq!(a.run_id, b.run_id);
        assert_ne!(a.run_id, c.run_id);
        assert_eq!(a.scenario_hash, c.scenario_hash);
        assert_eq!(a.run_id.len(), 16);
    }
}
