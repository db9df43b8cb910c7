//! CSV tables and per-group means.
//!
//! Column order follows struct field order; floats use Rust's shortest
//! round-trip formatting, so equal results produce equal bytes.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::baselines::BaselineRow;
use crate::proximity::ProximityRow;
use crate::robustness::RobustnessRow;

pub fn to_csv<T: Serialize>(rows: &[T]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Mean {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub n: usize,
}

impl Mean {
    fn add(&mut self, precision: f64, recall: f64, f1: f64) {
        self.precision += precision;
        self.recall += recall;
        self.f1 += f1;
        self.n += 1;
    }

    fn finish(mut self) -> Self {
        let n = self.n.max(1) as f64;
        self.precision /= n;
        self.recall /= n;
        self.f1 /= n;
        self
    }
}

fn means<K: Ord, I: IntoIterator<Item = (K, f64, f64, f64)>>(items: I) -> BTreeMap<K, Mean> {
    let mut acc: BTreeMap<K, Mean> = BTreeMap::new();
    for (k, p, r, f) in items {
        acc.entry(k).or_default().add(p, r, f);
    }
    acc.into_iter().map(|(k, m)| (k, m.finish())).collect()
}

/// Mean over seeds per proximity, keyed by `k` formatted as text.
pub fn proximity_means(rows: &[ProximityRow]) -> BTreeMap<String, Mean> {
    means(rows.iter().map(|r| (format!("{}", r.k), r.precision, r.recall, r.f1)))
}

/// Mean over seeds per `(method, k)`.
pub fn baseline_means(rows: &[BaselineRow]) -> BTreeMap<String, Mean> {
    means(rows.iter().map(|r| (format!("{}@{}", r.method, r.k), r.precision, r.recall, r.f1)))
}

/// Mean over seeds per `(knob, setting)`.
pub fn robustness_means(rows: &[RobustnessRow]) -> BTreeMap<String, Mean> {
    means(rows.iter().map(|r| (format!("{}={}", r.knob.name(), r.setting), r.precision, r.recall, r.f1)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_header_and_rows() {
        let rows = [
            ProximityRow { seed: 1, k: 2.0, alpha: 0.5, precision: 0.75, recall: 0.6, f1: 2.0 / 3.0 },
            ProximityRow { seed: 2, k: 2.0, alpha: 0.25, precision: 0.25, recall: 0.4, f1: 0.5 },
        ];
        let text = to_csv(&rows);
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("seed,k,alpha,precision,recall,f1"));
        assert_eq!(lines.next(), Some("1,2.0,0.5,0.75,0.6,0.6666666666666666"));
        let m = proximity_means(&rows)["2"];
        assert_eq!((m.precision, m.recall, m.n), (0.5, 0.5, 2));
    }
}
