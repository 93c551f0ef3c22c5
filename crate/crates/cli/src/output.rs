//! Number formatting and CSV tables.

use std::io::Write;

use crate::CliError;

/// 17 significant digits in scientific notation; parses back to the same f64.
pub fn fmt_exact(x: f64) -> String {
    format!("{x:.16e}")
}

/// `digits` significant digits, positional notation for moderate exponents.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    if (-5..(digits as i32)).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        sci
    }
}

/// Column-major numeric table with a header row.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

impl Table {
    pub fn new() -> Self {
        Self {
            header: Vec::new(),
            columns: Vec::new(),
        }
    }

    pub fn push(&mut self, name: impl Into<String>, values: Vec<f64>) {
        if let Some(first) = self.columns.first() {
            assert_eq!(first.len(), values.len(), "ragged table column");
        }
        self.header.push(name.into());
        self.columns.push(values);
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        let i = self.header.iter().position(|h| h == name)?;
        Some(&self.columns[i])
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| CliError::Io(e.to_string());
        w.write_record(&self.header).map_err(io)?;
        for r in 0..self.rows() {
            w.write_record(self.columns.iter().map(|c| fmt_exact(c[r])))
                .map_err(io)?;
        }
        w.flush().map_err(|e| CliError::Io(e.to_string()))
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }

    pub fn read_csv<R: std::io::Read>(input: R) -> Result<Self, CliError> {
        let bad = |e: &dyn std::fmt::Display| CliError::Io(format!("csv: {e}"));
        let mut r = csv::Reader::from_reader(input);
        let header: Vec<String> = r
            .headers()
            .map_err(|e| bad(&e))?
            .iter()
            .map(String::from)
            .collect();
        let mut columns = vec![Vec::new(); header.len()];
        for rec in r.records() {
            let rec = rec.map_err(|e| bad(&e))?;
            for (col, field) in columns.iter_mut().zip(rec.iter()) {
                col.push(field.parse::<f64>().map_err(|e| bad(&e))?);
            }
        }
        Ok(Self { header, columns })
    }
}

impl Default for Table {
    fn default() -> Self {
        Self::new()
    }
}
