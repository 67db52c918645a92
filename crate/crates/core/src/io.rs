//! File formats shared by the command-line tool and the tests.
//!
//! Floats are written with 17 significant digits so every value survives a
//! round trip unchanged.

use std::io;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::eigensteps::{InnerEigenstepTable, OuterEigenstepTable};
use crate::error::{Error, Result};

/// `%.17g`-style formatting with trailing zeros removed.
pub fn fmt17(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent in scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..17).contains(&exp) {
        trim_fraction(format!("{:.*}", (16 - exp) as usize, x))
    } else {
        format!("{}e{exp}", trim_fraction(mantissa.to_string()))
    }
}

fn trim_fraction(mut s: String) -> String {
    if s.contains('.') {
        let end = s.trim_end_matches('0').trim_end_matches('.').len();
        s.truncate(end);
    }
    s
}

/// Compact JSON formatter that writes floats through [`fmt17`].
#[derive(Debug, Default, Clone, Copy)]
pub struct Fmt17Formatter;

impl serde_json::ser::Formatter for Fmt17Formatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(fmt17(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Serializes `value` as one line of JSON, floats at full precision.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Fmt17Formatter);
    value
        .serialize(&mut ser)
        .expect("serializing to memory cannot fail");
    String::from_utf8(out).expect("serde_json writes UTF-8")
}

/// Reads a JSON array of numbers, or one number per line.
///
/// The order is kept as given; callers check monotonicity.
pub fn parse_sequence(text: &str) -> Result<Vec<f64>> {
    let trimmed = text.trim_start();
    let values: Vec<f64> = if trimmed.starts_with('[') {
        serde_json::from_str(trimmed).map_err(|e| Error::Parse(format!("sequence: {e}")))?
    } else {
        trimmed
            .lines()
            .enumerate()
            .filter(|(_, line)| !line.trim().is_empty())
            .map(|(i, line)| {
                line.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}: {:?}", i + 1, line.trim())))
            })
            .collect::<Result<_>>()?
    };
    if values.is_empty() {
        return Err(Error::Parse("empty sequence".into()));
    }
    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::Parse(format!("non-finite value {bad}")));
    }
    Ok(values)
}

#[derive(Serialize, Deserialize)]
struct TableDoc {
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "M")]
    m: usize,
    lam: Vec<f64>,
    mu: Vec<f64>,
    rows: Vec<Vec<f64>>,
}

/// A table read from disk; the row count tells the two layouts apart.
#[derive(Debug, Clone, PartialEq)]
pub enum EigenstepTable {
    Inner(InnerEigenstepTable),
    Outer(OuterEigenstepTable),
}

/// Inner table JSON. `m` is recorded as the ambient dimension; `lam` is the
/// length-N final row.
pub fn inner_table_to_json(table: &InnerEigenstepTable, m: usize) -> String {
    to_json(&TableDoc {
        n: table.n(),
        m,
        lam: table.lam().to_vec(),
        mu: table.mu().to_vec(),
        rows: table.rows().to_vec(),
    })
}

/// Outer table JSON: `N + 1` rows of length `M`, starting with the zero row.
pub fn outer_table_to_json(table: &OuterEigenstepTable) -> String {
    to_json(&TableDoc {
        n: table.n(),
        m: table.m(),
        lam: table.lam().to_vec(),
        mu: table.mu().to_vec(),
        rows: table.rows().to_vec(),
    })
}

pub fn parse_table(text: &str) -> Result<EigenstepTable> {
    let doc: TableDoc =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("eigenstep table: {e}")))?;
    if doc.mu.len() != doc.n {
        return Err(Error::Parse(format!(
            "table declares N = {} but mu has {} entries",
            doc.n,
            doc.mu.len()
        )));
    }
    let shape = |e: Error| Error::Parse(format!("eigenstep table: {e}"));
    if doc.rows.len() == doc.n {
        InnerEigenstepTable::new(doc.rows, doc.lam, doc.mu)
            .map(EigenstepTable::Inner)
            .map_err(shape)
    } else if doc.rows.len() == doc.n + 1 {
        if doc.rows.iter().any(|r| r.len() != doc.m) {
            return Err(Error::Parse(format!(
                "outer table rows must have length M = {}",
                doc.m
            )));
        }
        OuterEigenstepTable::new(doc.rows, doc.lam, doc.mu)
            .map(EigenstepTable::Outer)
            .map_err(shape)
    } else {
        Err(Error::Parse(format!(
            "table with N = {} must have N or N + 1 rows, found {}",
            doc.n,
            doc.rows.len()
        )))
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixDoc {
    #[serde(rename = "M")]
    m: usize,
    #[serde(rename = "N")]
    n: usize,
    entries: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixFormat {
    Json,
    Csv,
}

pub fn matrix_to_json(a: &DMatrix<f64>) -> String {
    let entries = (0..a.nrows())
        .flat_map(|i| (0..a.ncols()).map(move |j| a[(i, j)]))
        .collect();
    to_json(&MatrixDoc {
        m: a.nrows(),
        n: a.ncols(),
        entries,
    })
}

pub fn matrix_to_csv(a: &DMatrix<f64>) -> String {
    let mut out = String::new();
    for row in a.row_iter() {
        let cells: Vec<String> = row.iter().map(|&v| fmt17(v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn write_matrix(a: &DMatrix<f64>, format: MatrixFormat) -> String {
    match format {
        MatrixFormat::Json => matrix_to_json(a),
        MatrixFormat::Csv => matrix_to_csv(a),
    }
}

/// Reads matrix JSON (first byte `{`) or CSV.
pub fn parse_matrix(text: &str) -> Result<DMatrix<f64>> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        let doc: MatrixDoc =
            serde_json::from_str(trimmed).map_err(|e| Error::Parse(format!("matrix: {e}")))?;
        if doc.entries.len() != doc.m * doc.n {
            return Err(Error::Parse(format!(
                "matrix declares {}x{} but has {} entries",
                doc.m,
                doc.n,
                doc.entries.len()
            )));
        }
        return Ok(DMatrix::from_row_slice(doc.m, doc.n, &doc.entries));
    }

    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, line) in trimmed.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|cell| {
                cell.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("matrix line {}: {e}", i + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::Parse(format!(
                    "matrix line {} has {} columns, expected {}",
                    i + 1,
                    row.len(),
                    first.len()
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse("empty matrix".into()));
    }
    let flat: Vec<f64> = rows.concat();
    Ok(DMatrix::from_row_slice(rows.len(), rows[0].len(), &flat))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fmt17_round_trips() {
        for x in [
            1.75,
            2.0 / 3.0,
            -1.0 / 6.0_f64.sqrt(),
            1e-300,
            6.02e23,
            0.1,
            123456.789,
            -0.0,
        ] {
            assert_eq!(fmt17(x).parse::<f64>().unwrap(), x, "{}", fmt17(x));
        }
        assert_eq!(fmt17(1.75), "1.75");
        assert_eq!(fmt17(0.5), "0.5");
        assert_eq!(fmt17(3.0), "3");
        assert_eq!(fmt17(2.0 / 3.0), "0.66666666666666663");
        assert_eq!(fmt17(1e-300), "1e-300");
    }

    #[test]
    fn json_uses_full_precision() {
        assert_eq!(to_json(&vec![1.0 / 3.0, 2.0]), "[0.33333333333333331,2]");
    }

    #[test]
    fn sequences_from_json_or_lines() {
        assert_eq!(parse_sequence("[1.5, 0.5]").unwrap(), vec![1.5, 0.5]);
        assert_eq!(parse_sequence("1.5\n\n0.5\n").unwrap(), vec![1.5, 0.5]);
        assert_eq!(parse_sequence("  [2]").unwrap(), vec![2.0]);
        assert!(matches!(parse_sequence("1.5\nabc"), Err(Error::Parse(_))));
        assert!(matches!(parse_sequence(""), Err(Error::Parse(_))));
        assert!(matches!(parse_sequence("[1, 2"), Err(Error::Parse(_))));
    }

    #[test]
    fn matrix_round_trip_both_formats() {
        let a = DMatrix::from_row_slice(2, 3, &[1.0, 2.0 / 3.0, -0.25, 0.0, 1e-17, 5.0]);
        for f in [MatrixFormat::Json, MatrixFormat::Csv] {
            assert_eq!(parse_matrix(&write_matrix(&a, f)).unwrap(), a);
        }
        assert!(matrix_to_json(&a).starts_with("{\"M\":2,\"N\":3,"));
        assert!(parse_matrix("1,2\n3\n").is_err());
        assert!(parse_matrix("{\"M\":2,\"N\":2,\"entries\":[1]}").is_err());
    }

    #[test]
    fn tables_round_trip_and_are_told_apart() {
        let inner = InnerEigenstepTable::new(
            vec![vec![1.0], vec![1.5, 0.5], vec![1.75, 0.75, 0.5]],
            vec![1.75, 0.75, 0.5],
            vec![1.0; 3],
        )
        .unwrap();
        let text = inner_table_to_json(&inner, 3);
        assert!(text.starts_with("{\"N\":3,\"M\":3,"));
        assert_eq!(
            parse_table(&text).unwrap(),
            EigenstepTable::Inner(inner.clone())
        );

        let outer = crate::eigensteps::inner_to_outer(&inner, 3, &Default::default()).unwrap();
        let text = outer_table_to_json(&outer);
        assert_eq!(parse_table(&text).unwrap(), EigenstepTable::Outer(outer));

        assert!(parse_table("{\"N\":3,\"M\":3,\"lam\":[],\"mu\":[1,1,1],\"rows\":[]}").is_err());
    }
}
