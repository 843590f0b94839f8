use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

/// Scalar samples keyed by strictly increasing simulation time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub name: String,
    pub samples: Vec<(f64, f64)>,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
}

impl TimeSeries {
    pub fn new(name: impl Into<String>) -> Self {
        TimeSeries {
            name: name.into(),
            samples: Vec::new(),
            metadata: BTreeMap::new(),
        }
    }

    pub fn with_meta(mut self, key: &str, value: impl Into<String>) -> Self {
        self.metadata.insert(key.to_string(), value.into());
        self
    }

    /// Appends a sample. Panics if `t` does not exceed the last time.
    pub fn push(&mut self, t: f64, value: f64) {
        if let Some(last) = self.last_t() {
            assert!(t > last, "{}: time {t} does not exceed {last}", self.name);
        }
        self.samples.push((t, value));
    }

    /// Appends a sample, overwriting the last one if it has the same time.
    pub fn push_replacing(&mut self, t: f64, value: f64) {
        match self.samples.last_mut() {
            Some(last) if last.0 == t => last.1 = value,
            _ => self.push(t, value),
        }
    }

    pub fn last_t(&self) -> Option<f64> {
        self.samples.last().map(|s| s.0)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.0)
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.1)
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.samples.windows(2).all(|w| w[1].0 > w[0].0)
    }

    /// Writes `t,value` rows with a header.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "value"])?;
        for (t, v) in &self.samples {
            w.write_record([t.to_string(), v.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_of_values() {
        let mut s = TimeSeries::new("x");
        s.push(0.1, 1.0 / 3.0);
        s.push(0.2, -2.5e-17);
        let text = s.to_csv_string();
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let back: Vec<(f64, f64)> = r.deserialize().map(|x| x.unwrap()).collect();
        assert_eq!(back, s.samples);
    }

    #[test]
    #[should_panic]
    fn rejects_non_increasing_time() {
        let mut s = TimeSeries::new("x");
        s.push(1.0, 0.0);
        s.push(1.0, 0.0);
    }

    #[test]
    fn replacing_keeps_times_distinct() {
        let mut s = TimeSeries::new("x");
        s.push_replacing(1.0, 0.0);
        s.push_replacing(1.0, 2.0);
        s.push_replacing(1.5, 3.0);
        assert_eq!(s.samples, vec![(1.0, 2.0), (1.5, 3.0)]);
    }
}
