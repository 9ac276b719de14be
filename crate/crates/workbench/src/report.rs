//! Report rows and their csv / json rendering.

use serde::{Deserialize, Serialize};

/// One solver run. Numeric fields are stored already rendered so that a
/// json round trip reproduces the row exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRow {
    pub instance: String,
    pub matrix: String,
    pub algorithm: String,
    pub rho: String,
    pub mu: u32,
    pub mode: String,
    pub status: String,
    pub active_connections: Option<u64>,
    pub deactivated_fraction: Option<String>,
    pub runtime_s: String,
    /// Utilization per evaluated matrix, `"inf"` when a demand is cut off.
    pub mlu: Vec<String>,
    pub bound: Option<String>,
}

pub const CSV_HEADER: [&str; 12] = [
    "instance",
    "matrix",
    "algorithm",
    "rho",
    "mu",
    "mode",
    "status",
    "active_connections",
    "deactivated_fraction",
    "runtime_s",
    "mlu",
    "bound",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            _ => Err(format!("unknown report format {s:?}")),
        }
    }
}

fn csv_record(row: &ReportRow) -> [String; 12] {
    [
        row.instance.clone(),
        row.matrix.clone(),
        row.algorithm.clone(),
        row.rho.clone(),
        row.mu.to_string(),
        row.mode.clone(),
        row.status.clone(),
        row.active_connections
            .map(|v| v.to_string())
            .unwrap_or_default(),
        row.deactivated_fraction.clone().unwrap_or_default(),
        row.runtime_s.clone(),
        row.mlu.join(";"),
        row.bound.clone().unwrap_or_default(),
    ]
}

pub fn emit_report(rows: &[ReportRow], format: ReportFormat) -> String {
    match format {
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(CSV_HEADER).expect("writing to memory");
            for row in rows {
                w.write_record(csv_record(row)).expect("writing to memory");
            }
            String::from_utf8(w.into_inner().expect("flushing memory"))
                .expect("csv of utf-8 fields")
        }
        ReportFormat::Json => {
            let mut text = serde_json::to_string_pretty(rows).expect("rows serialize");
            text.push('\n');
            text
        }
    }
}

pub fn parse_json_report(text: &str) -> serde_json::Result<Vec<ReportRow>> {
    serde_json::from_str(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row() -> ReportRow {
        ReportRow {
            instance: "Abilene".into(),
            matrix: "0".into(),
            algorithm: "mspnd".into(),
            rho: "0.300000".into(),
            mu: 5,
            mode: "duplex".into(),
            status: "timeout".into(),
            active_connections: Some(40),
            deactivated_fraction: Some("0.200000".into()),
            runtime_s: "0.011".into(),
            mlu: vec!["0.912000".into(), "inf".into()],
            bound: Some("31.000000".into()),
        }
    }

    #[test]
    fn empty_csv_is_the_header() {
        assert_eq!(
            emit_report(&[], ReportFormat::Csv),
            "instance,matrix,algorithm,rho,mu,mode,status,active_connections,deactivated_fraction,runtime_s,mlu,bound\n"
        );
    }

    #[test]
    fn infinite_utilization_cell() {
        let text = emit_report(&[row()], ReportFormat::Csv);
        let line = text.lines().nth(1).unwrap();
        assert_eq!(
            line,
            "Abilene,0,mspnd,0.300000,5,duplex,timeout,40,0.200000,0.011,0.912000;inf,31.000000"
        );
    }

    #[test]
    fn json_round_trip() {
        let mut other = row();
        other.bound = None;
        other.active_connections = None;
        other.mlu.clear();
        let rows = vec![row(), other];
        assert_eq!(
            parse_json_report(&emit_report(&rows, ReportFormat::Json)).unwrap(),
            rows
        );
    }
}
