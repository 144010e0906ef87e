use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Time-stamped table of named scalar diagnostics for one run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NormSeries {
    names: Vec<String>,
    times: Vec<f64>,
    rows: Vec<Vec<f64>>,
}

impl NormSeries {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Self {
        NormSeries {
            names: names.into_iter().map(Into::into).collect(),
            times: Vec::new(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, t: f64, values: Vec<f64>) {
        assert_eq!(values.len(), self.names.len(), "row width mismatch");
        self.times.push(t);
        self.rows.push(values);
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn rows(&self) -> impl Iterator<Item = (f64, &[f64])> + '_ {
        self.times
            .iter()
            .copied()
            .zip(self.rows.iter().map(Vec::as_slice))
    }

    fn index(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::InvalidParameter(format!("no series column named {name:?}")))
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let i = self.index(name)?;
        Ok(self.rows.iter().map(|r| r[i]).collect())
    }

    /// Largest sampled value of a column (0 for an empty series).
    pub fn sup(&self, name: &str) -> Result<f64> {
        Ok(self.column(name)?.into_iter().fold(0.0, f64::max))
    }

    pub fn last(&self, name: &str) -> Result<f64> {
        let i = self.index(name)?;
        self.rows
            .last()
            .map(|r| r[i])
            .ok_or_else(|| Error::InvalidParameter("empty series".into()))
    }

    /// Appends the columns of `other`, which must share the time stamps.
    pub fn join(&mut self, other: &NormSeries) -> Result<()> {
        if self.times != other.times {
            return Err(Error::InvalidParameter("series time stamps differ".into()));
        }
        self.names.extend(other.names.iter().cloned());
        for (row, extra) in self.rows.iter_mut().zip(&other.rows) {
            row.extend_from_slice(extra);
        }
        Ok(())
    }

    /// CSV with header `t,<names...>`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t");
        for n in &self.names {
            out.push(',');
            out.push_str(n);
        }
        out.push('\n');
        for (t, row) in self.rows() {
            let _ = write!(out, "{t:e}");
            for v in row {
                let _ = write!(out, ",{v:e}");
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sup_last_and_csv() {
        let mut s = NormSeries::new(["a", "b"]);
        s.push(0.0, vec![1.0, 0.5]);
        s.push(0.5, vec![3.0, 0.25]);
        assert_eq!(s.sup("a").unwrap(), 3.0);
        assert_eq!(s.last("b").unwrap(), 0.25);
        assert!(s.column("c").is_err());
        assert_eq!(s.to_csv(), "t,a,b\n0e0,1e0,5e-1\n5e-1,3e0,2.5e-1\n");

        let mut other = NormSeries::new(["c"]);
        other.push(0.0, vec![7.0]);
        other.push(0.5, vec![8.0]);
        s.join(&other).unwrap();
        assert_eq!(s.column("c").unwrap(), vec![7.0, 8.0]);
    }
}
