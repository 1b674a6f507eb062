//! CSV and JSON rendering of record tables.

use acl_core::record::CountRecord;
use serde_json::{Map, Value};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Source {
    Label,
    Param(&'static str),
    Observed,
    Predicted,
    Match,
    Tolerance,
}

/// Column headers and where each value comes from.
#[derive(Clone, Debug)]
pub struct Layout(pub Vec<(&'static str, Source)>);

impl Layout {
    fn cell(&self, r: &CountRecord, src: &Source) -> String {
        match src {
            Source::Label => r.label.clone(),
            Source::Param(k) => r.params.get(*k).cloned().unwrap_or_else(|| "-".into()),
            Source::Observed => r.observed.to_string(),
            Source::Predicted => r.predicted.to_string(),
            Source::Match => r.matches.to_string(),
            Source::Tolerance => format!("{}/{}", r.tolerance.numer(), r.tolerance.denom()),
        }
    }

    pub fn csv(&self, records: &[CountRecord]) -> String {
        let mut out = self.0.iter().map(|(h, _)| *h).collect::<Vec<_>>().join(",");
        out.push('\n');
        for r in records {
            let row: Vec<String> = self.0.iter().map(|(_, s)| self.cell(r, s)).collect();
            debug_assert!(row.iter().all(|c| !c.contains([',', '"', '\n'])));
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn json(&self, records: &[CountRecord]) -> String {
        let rows: Vec<Value> = records
            .iter()
            .map(|r| {
                let mut m = Map::new();
                for (h, s) in &self.0 {
                    let v = match s {
                        Source::Match => Value::Bool(r.matches),
                        _ => Value::String(self.cell(r, s)),
                    };
                    m.insert((*h).to_string(), v);
                }
                Value::Object(m)
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&rows).expect("plain values serialize");
        s.push('\n');
        s
    }
}
